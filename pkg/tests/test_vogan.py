import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from voganish.cli import small_mults
from voganish.multiseg import (KS_MULTS, Multisegment, closure_leq, enumerate_orbits, multisegment_from_triangle,
                               named, triangle_from_multisegment)
from voganish.vogan import (VoganSpace, act_x, act_y, bracket, compute_dual, conormal_dim, conormal_fiber,
                            jordan_partition, orbit_dim, pair_stabilizer_dim, pairing, point_from_vector,
                            q_invariant, random_h, rank_triangle_of, representative, stabilizer_dim, x_KS, y_KS,
                            y_KS_slice)

KS_ORBITS = enumerate_orbits(KS_MULTS)


def mw_dual(segs):
    """Independent combinatorial dual: repeatedly peel a maximal descending chain of segment ends."""
    segs = list(segs)
    out = []
    while segs:
        e = max(q for _, q in segs)
        chain, cur, prev = [], e, None
        while True:
            cands = [s for s in segs if s[1] == cur and (prev is None or s[0] < prev)]
            if not cands:
                break
            s = max(cands)
            chain.append(s)
            prev, cur = s[0], cur - 1
        out.append((cur + 1, e))
        for s in chain:
            segs.remove(s)
            if s[0] < s[1]:
                segs.append((s[0], s[1] - 1))
    return sorted(out)


def _segs(T):
    return sorted(multisegment_from_triangle(T).segments())


def test_space_dimensions():
    sp = VoganSpace(KS_MULTS)
    assert (sp.dim_V, sp.dim_H) == (48, 56)
    assert len(sp.x_vars()) == len(sp.y_vars()) == 48


@pytest.mark.parametrize("name,dim", [("KS", 32), ("psi", 40), ("R", 36)])
def test_named_orbit_dims(name, dim):
    assert orbit_dim(named(name)) == dim


@given(st.sampled_from(KS_ORBITS))
@settings(max_examples=25)
def test_representative_has_its_triangle(T):
    assert rank_triangle_of(representative(T)) == T


@given(st.sampled_from(KS_ORBITS))
@settings(max_examples=15)
def test_conormal_plus_orbit_is_dim_V(T):
    x = representative(T)
    assert orbit_dim(T) + conormal_dim(x) == 48
    assert orbit_dim(T) == 56 - stabilizer_dim(x)


@given(st.sampled_from(KS_ORBITS), st.integers(0, 10**6))
@settings(max_examples=10)
def test_conormal_vectors_commute(T, seed):
    x = representative(T)
    rng = random.Random(seed)
    basis = conormal_fiber(x)
    vec = [Fraction(0)] * 48
    for b in basis:
        c = rng.randint(-5, 5)
        vec = [v + c * w for v, w in zip(vec, b)]
    y = point_from_vector(KS_MULTS, vec, dual=True)
    assert all(all(v == 0 for row in h for v in row) for h in bracket(x, y))


@given(st.integers(0, 10**6))
@settings(max_examples=10)
def test_group_action_preserves_triangle_and_pairing(seed):
    rng = random.Random(seed)
    x = point_from_vector(KS_MULTS, [Fraction(rng.randint(-2, 2)) for _ in range(48)])
    y = point_from_vector(KS_MULTS, [Fraction(rng.randint(-2, 2)) for _ in range(48)], dual=True)
    h = random_h(KS_MULTS, rng)
    assert rank_triangle_of(act_x(h, x)) == rank_triangle_of(x)
    assert pairing(act_x(h, x), act_y(h, y)) == pairing(x, y)


def test_pairing_is_bilinear():
    rng = random.Random(3)
    a = [Fraction(rng.randint(-4, 4)) for _ in range(48)]
    b = [Fraction(rng.randint(-4, 4)) for _ in range(48)]
    x = point_from_vector(KS_MULTS, a)
    y = point_from_vector(KS_MULTS, b, dual=True)
    x2 = point_from_vector(KS_MULTS, [2 * v for v in a])
    assert pairing(x2, y) == 2 * pairing(x, y)


def test_duals_match_combinatorial_oracle_small():
    for mults in small_mults(6):
        for T in enumerate_orbits(mults):
            assert _segs(compute_dual(T)) == mw_dual(_segs(T))


@pytest.mark.parametrize("name", ["KS", "psi", "L", "R", "l", "m", "r"])
def test_named_duals_match_oracle(name):
    T = named(name)
    assert _segs(compute_dual(T)) == mw_dual(_segs(T))


def test_named_duals():
    assert compute_dual(named("KS")) == named("KS")
    assert compute_dual(named("psi")) == named("psi")
    assert compute_dual(named("L")) == named("R")


@given(st.sampled_from(KS_ORBITS))
@settings(max_examples=20)
def test_dual_is_an_involution(T):
    assert compute_dual(compute_dual(T)) == T


def test_dual_does_not_reverse_closure_order():
    # on (1, 2, 1): A < B with B self-dual
    mults = (1, 2, 1)
    A = triangle_from_multisegment(Multisegment(2, {(0, 0): 1, (1, 1): 1, (1, 2): 1}), mults)
    B = triangle_from_multisegment(Multisegment(2, {(0, 1): 1, (1, 2): 1}), mults)
    assert closure_leq(A, B) and A != B
    assert compute_dual(B) == B
    dA = compute_dual(A)
    assert _segs(dA) == [(0, 1), (1, 1), (2, 2)]
    # reversal would need dual(B) <= dual(A); instead the pair keeps its order
    assert not closure_leq(compute_dual(B), dA)
    assert closure_leq(dA, compute_dual(B))


def test_ks_stabilizers():
    x = x_KS()
    I = [[1, 0], [0, 1]]
    Z = [[0, 0], [0, 0]]
    D = [[1, 0], [0, 2]]
    assert conormal_dim(x) == 16
    assert stabilizer_dim(x) == 24
    assert pair_stabilizer_dim(x, y_KS(I, Z, I, Z)) == 16
    assert pair_stabilizer_dim(x, y_KS(I, D, I, I)) == 10


def test_ks_slice_is_conormal():
    x = x_KS()
    y = y_KS_slice(Fraction(2), Fraction(-3))
    assert all(all(v == 0 for row in h for v in row) for h in bracket(x, y))
    assert q_invariant(y) == (Fraction(-1), Fraction(-6))


def test_jordan_partitions():
    assert jordan_partition(x_KS()) == (3, 3, 2, 2, 2, 2, 1, 1)
    assert jordan_partition(representative(named("psi"))) == (4, 4, 2, 2, 2, 2)
    assert jordan_partition(representative(named("KS"))) == (3, 3, 2, 2, 2, 2, 1, 1)


def test_zero_multiplicity_vertices():
    mults = (2, 0, 1)
    for T in enumerate_orbits(mults):
        assert compute_dual(T) == T
        assert rank_triangle_of(representative(T)) == T
