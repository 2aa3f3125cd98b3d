from fractions import Fraction
from itertools import product

import sympy
from hypothesis import given, strategies as st

from voganish.exactcore import (GF, QPoly, QRatFunc, PolyMatrix, det, det_expand, generic_rank, kernel_basis,
                                matmul, ops_invertible, psnf, rank, replay, rref, solve, var)
from voganish.exactcore.fields import (QQ, apply, enumerate_subspaces, full_space, gaussian_binomial, intersect,
                                       kernel, preimage, rref_rows, span)

X, Y, Z = var("px"), var("py"), var("pz")
SX, SY, SZ = sympy.symbols("px py pz")

coeff = st.integers(-5, 5)
mono = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2))
poly_terms = st.lists(st.tuples(coeff, mono), max_size=5)


def build(terms):
    p = QPoly()
    s = sympy.Integer(0)
    for c, (a, b, e) in terms:
        p = p + QPoly.const(c) * X ** a * Y ** b * Z ** e
        s += c * SX ** a * SY ** b * SZ ** e
    return p, sympy.expand(s)


def as_sympy(p):
    return sympy.expand(sympy.sympify(p.to_str().replace("^", "**")))


@given(poly_terms, poly_terms)
def test_poly_ring_ops_match_sympy(a, b):
    p, sp = build(a)
    q, sq = build(b)
    assert as_sympy(p + q) == sympy.expand(sp + sq)
    assert as_sympy(p * q) == sympy.expand(sp * sq)
    assert as_sympy(p - q) == sympy.expand(sp - sq)


@given(poly_terms)
def test_derivative_and_substitute(a):
    p, sp = build(a)
    assert as_sympy(p.derivative("px")) == sympy.expand(sympy.diff(sp, SX))
    point = {"px": Fraction(2), "py": Fraction(-1, 3), "pz": Fraction(5)}
    val = p.substitute({k: v for k, v in point.items()})
    want = sp.subs({SX: sympy.Rational(2), SY: sympy.Rational(-1, 3), SZ: 5})
    want = sympy.Rational(want)
    assert Fraction(int(want.p), int(want.q)) == (val.constant_value() if val else 0)


def test_poly_parse_roundtrip():
    p = QPoly.const(3) * X ** 2 * Y - QPoly.const(Fraction(1, 2)) * Z + 7
    assert QPoly.parse(p.to_str()) == p


@given(poly_terms, poly_terms)
def test_ratfunc_field_axioms(a, b):
    p, _ = build(a)
    q, _ = build(b)
    if not q or not p:
        return
    f = QRatFunc(p, q)
    g = QRatFunc(q, p)
    assert f * g == QRatFunc.coerce(1)
    assert f + g == g + f
    assert (f - f).is_zero()


def test_ratfunc_normalises_common_factor():
    f = QRatFunc(X * X - Y * Y, X - Y)
    assert f == QRatFunc.coerce(X + Y)
    assert f.den.is_constant()


small = st.integers(-4, 4)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_sympy(M):
    F = [[Fraction(v) for v in r] for r in M]
    want = int(sympy.Matrix(M).det())
    assert det(F) == want
    assert det_expand(F) == want


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_and_kernel(M):
    F = [[Fraction(v) for v in r] for r in M]
    assert rank(F) == sympy.Matrix(M).rank()
    K = kernel_basis(F, 4)
    assert len(K) == 4 - rank(F)
    for v in K:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in F)


def test_solve_and_rref():
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    X_ = solve(A, [[Fraction(1)], [Fraction(2)]])
    assert matmul(A, X_) == [[1], [2]]
    cols, rows = rref([[1, 2, 3], [2, 4, 7]])
    assert cols == [0, 2]


def test_rank_over_rational_functions():
    t = QRatFunc.coerce(var("tt"))
    M = [[t, QRatFunc.coerce(1)], [QRatFunc.coerce(1), 1 / t]]
    assert rank(M) == 1
    assert generic_rank(PolyMatrix([[X, Y], [Y, X]])) == 2


def test_psnf_replay_and_identity_block():
    t1, t2 = var("t1"), var("t2")
    M = PolyMatrix([[t1, QPoly.const(1), X], [QPoly.const(0), t2, X * Y], [t1, QPoly.const(1) + t2, X + X * Y]])
    res = psnf(M, ("t1", "t2"))
    assert ops_invertible(res.ops)
    assert replay(M, res.ops).rows == res.block_form().rows
    # third row is the sum of the first two
    assert res.identity_size + rank([[v for v in r] for r in res.trimmed_residual().rows] or [[0]]) <= 2


def test_psnf_uses_unit_pivots_only():
    M = PolyMatrix([[X, QPoly()], [QPoly(), X]])
    res = psnf(M, ())
    assert res.identity_size == 0
    assert res.trimmed_residual().shape == (2, 2)


@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9]))
def test_finite_field_axioms(q):
    K = GF(q)
    for a in K.elements():
        assert K.add(a, K.neg(a)) == 0
        if a:
            assert K.mul(a, K.inv(a)) == 1
    for a, b, c in product(range(q), repeat=3):
        if (a * 7 + b * 3 + c) % 5:
            continue
        assert K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c))


def test_subspace_enumeration_counts():
    for q in (2, 3, 4):
        K = GF(q)
        full = full_space(K, 4)
        for d in range(5):
            assert sum(1 for _ in enumerate_subspaces(K, (), full, d)) == gaussian_binomial(4, d, q)


def test_subspace_operations():
    K = GF(5)
    a = rref_rows(K, [[1, 0, 0], [0, 1, 0]])
    b = rref_rows(K, [[0, 1, 0], [0, 0, 1]])
    assert len(intersect(K, a, b, 3)) == 1
    assert len(span(K, a, b)) == 3
    x = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert len(kernel(K, x, 3)) == 1
    assert len(apply(K, x, full_space(K, 3))) == 2
    assert len(preimage(K, x, (), 3)) == 1
    assert QQ.inv(Fraction(2)) == Fraction(1, 2)
