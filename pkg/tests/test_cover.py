from hypothesis import given, settings, strategies as st

import pytest

from voganish.cover import (FULL, ZERO, ChartMissesFibre, InconsistentChart, Chart, check_chart, chain_dims,
                            chart_ideal, count_polynomial, cover_from_triangle, embeds, enumerate_charts,
                            fibre_dim_bound, fibre_dim_exact, fibre_over, hom_dim, point_count_fibre,
                            semismall_report, solve_fibre_in_chart)
from voganish.multiseg import Multisegment, closure_leq, enumerate_orbits, named
from voganish.vogan import representative, x_KS

SMALL = [(1, 2, 2, 1), (2, 2, 1), (1, 2, 1, 1), (2, 3, 2)]


def _pairs():
    out = []
    for mults in SMALL:
        orbs = enumerate_orbits(mults)
        for T in orbs:
            if chain_dims(T) is None:
                continue
            out.extend((T, S) for S in orbs if closure_leq(S, T))
    return out


PAIRS = _pairs()


def test_conditions_of_R():
    spec = cover_from_triangle(named("R"), "R")
    got = {(i, S, T) for i, S, T in spec.conditions}
    assert got == {(1, FULL, (1, 2)), (3, FULL, (3, 2)), (2, (1, 2), (2, 2)), (4, (3, 2), ZERO),
                   (3, (2, 2), ZERO)}


def test_condition_counts():
    sizes = {nm: len(cover_from_triangle(named(nm)).conditions) for nm in ("r", "m", "R", "psi")}
    assert sizes == {"r": 7, "m": 8, "R": 5, "psi": 9}


def test_hom_and_embedding():
    seg = lambda p, q: Multisegment(4, {(p, q): 1})
    assert hom_dim(seg(1, 3), seg(1, 3)) == 1
    assert hom_dim(seg(1, 3), seg(0, 2)) == 1
    assert hom_dim(seg(0, 2), seg(1, 3)) == 0
    assert embeds(seg(1, 2), seg(0, 2))
    assert not embeds(seg(0, 2), seg(1, 2))
    assert not embeds(seg(1, 3), seg(0, 2))
    two = Multisegment(4, {(1, 2): 2})
    assert embeds(seg(1, 2), two) and not embeds(two, seg(0, 2))


@given(st.sampled_from(PAIRS))
@settings(max_examples=60)
def test_exact_fibre_dim_matches_point_counts(pair):
    T, S = pair
    spec = cover_from_triangle(T)
    fit = count_polynomial(spec, S)
    assert fit.stable and fit.integral
    assert fibre_dim_exact(T, S) == fit.degree


@given(st.sampled_from(PAIRS))
@settings(max_examples=40)
def test_window_bound_dominates(pair):
    T, S = pair
    spec = cover_from_triangle(T)
    assert fibre_dim_bound(spec, representative(S)) >= fibre_dim_exact(T, S)


def test_birational_over_the_open_stratum():
    for T, S in PAIRS:
        if S == T:
            assert fibre_dim_exact(T, T) == 0
            for q in (2, 3, 5):
                assert point_count_fibre(cover_from_triangle(T), T, q) == 1


def test_empty_fibre_off_the_closure():
    T = named("R")
    outside = named("psi")
    assert not closure_leq(outside, T)
    assert point_count_fibre(cover_from_triangle(T), outside, 3) == 0


@pytest.mark.parametrize("name,dim,q2", [("r", 1, 9), ("m", 2, 81), ("R", 0, 1), ("psi", 4, 81)])
def test_fibres_over_ks(name, dim, q2):
    spec = cover_from_triangle(named(name), name)
    assert fibre_dim_exact(named(name), named("KS")) == dim
    fd = fibre_over(spec, x_KS(), counts=False)
    assert fd.dimension == dim
    if name in ("R", "psi"):
        assert point_count_fibre(spec, named("KS"), 2) == q2


def test_chart_ideal_vanishes_on_the_open_fibre_point():
    for T in enumerate_orbits((2, 3, 2)):
        spec = cover_from_triangle(T)
        if spec.is_trivial():
            continue
        x = representative(T)
        sub = x.substitute_map()
        hits = 0
        for chart in enumerate_charts(spec):
            try:
                fib = solve_fibre_in_chart(spec, chart, x)
            except ChartMissesFibre:
                continue
            assert fib.free == [] and fib.relations == []
            for g in chart_ideal(spec, chart):
                g = g.substitute(sub)
                g = g.substitute({_idx(k): v for k, v in fib.solution.items()})
                assert not g
            hits += 1
        assert hits >= 1


def _idx(name):
    from voganish.exactcore.poly import REGISTRY
    return REGISTRY.get(name)


def test_bad_chart_rejected():
    spec = cover_from_triangle(named("R"), "R")
    with pytest.raises(InconsistentChart):
        check_chart(spec, Chart({}))


def test_semismall_on_a_small_quiver():
    mults = (1, 2, 1)
    orbs = enumerate_orbits(mults)
    for T in orbs:
        if chain_dims(T) is None:
            continue
        rep = semismall_report(cover_from_triangle(T), T, orbs, check_counts=True)
        assert rep.semismall
        assert T in rep.relevant
