from fractions import Fraction

import pytest

from voganish.evs import (Budget, BudgetExceeded, LocalSplit, NotCritical, NotSmoothPoint, certificate_determinant,
                          hessian, hessian_expected_rank, implicit_derivatives, is_admissible_unit,
                          local_coordinates, solve_triangular, square_certificate)
from voganish.exactcore import QRatFunc, det, var
from voganish.multiseg import named

u, w = var("u"), var("w")
u1, u2 = var("u1"), var("u2")
t1, t2 = var("t1"), var("t2")


def Q(v):
    return QRatFunc.coerce(v)


def test_local_split_follows_variable_order():
    pt = {"u": Fraction(1), "w": Fraction(1)}
    sp = local_coordinates([w - u * u], ["w", "u"], pt)
    assert (sp.implicit, sp.local, sp.rank) == (["w"], ["u"], 1)
    with pytest.raises(NotSmoothPoint):
        local_coordinates([w - u * u], ["w", "u"], pt, expected_rank=2)


def test_implicit_derivatives_of_a_parabola():
    pt = {"u": Fraction(1), "w": Fraction(1)}
    sp = local_coordinates([w - u * u], ["w", "u"], pt)
    d = implicit_derivatives([w - u * u], sp, pt, order=2)
    assert d.first == [[Q(2)]]
    assert d.second[0][(0, 0)] == Q(2)


def test_implicit_derivatives_of_a_square_root():
    # w^2 = u near (1, 1): w' = 1/2, w'' = -1/4
    pt = {"u": Fraction(1), "w": Fraction(1)}
    g = [w * w - u]
    sp = local_coordinates(g, ["w", "u"], pt)
    d = implicit_derivatives(g, sp, pt, order=2)
    assert d.first == [[Q(Fraction(1, 2))]]
    assert d.second[0][(0, 0)] == Q(Fraction(-1, 4))


def test_constrained_hessian_uses_the_curvature():
    # f = w restricted to w = u^2 is u^2
    pt = {"u": Fraction(0), "w": Fraction(0)}
    g = [w - u * u]
    sp = local_coordinates(g, ["w", "u"], pt)
    rep = hessian(w, g, sp, pt)
    assert rep.rank == 1 and rep.matrix.rows == [[Q(2)]]
    with pytest.raises(NotCritical):
        hessian(u, g, sp, pt)


def test_hyperbolic_form_gets_a_square_certificate():
    rep = hessian(u1 * u2, [], LocalSplit([], ["u1", "u2"], [], 0), {"u1": 0, "u2": 0})
    assert rep.rank == 2
    assert rep.matrix.rows == [[Q(0), Q(1)], [Q(1), Q(0)]]
    rep = square_certificate(rep)
    assert rep.verdict == "SQUARE" and rep.isotropic_dim == 1
    sign, B = certificate_determinant(rep)
    H = rep.matrix.rows
    minor = [[H[i][j] for j in rep.minor] for i in rep.minor]
    assert sign * det(B) ** 2 == det(minor) == Q(-1)


def test_definite_form_has_no_certificate():
    rep = hessian(u1 * u1 + u2 * u2, [], LocalSplit([], ["u1", "u2"], [], 0), {"u1": 0, "u2": 0})
    assert rep.rank == 2
    assert square_certificate(rep).verdict == "UNKNOWN"


def test_solve_triangular_over_parameters():
    sols = solve_triangular([u1 * u2 - 1, u2 - t1], ["u1", "u2"])
    assert len(sols) == 1
    s = sols.solutions[0]
    assert Q(s["u2"]) == Q(t1) and Q(s["u1"]) * Q(t1) == Q(1)


def test_solve_triangular_splits_factors():
    sols = solve_triangular([u1 * (u1 - t1)], ["u1"])
    assert sorted(v["u1"].to_str() for v in sols.solutions) == ["0", "t1"]


def test_admissible_units():
    assert is_admissible_unit(t1 * t2 * (t1 - t2))
    assert is_admissible_unit((t1 + 1) * (t2 + 1))
    assert not is_admissible_unit(t1 + t2)


def test_budget():
    b = Budget(max_terms=10)
    b.check(5)
    with pytest.raises(BudgetExceeded):
        b.check(11)


def test_expected_hessian_rank_ks():
    assert hessian_expected_rank(named("KS"), named("KS")) == 16
