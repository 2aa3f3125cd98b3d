import itertools

import pytest
from hypothesis import given, strategies as st

from voganish.cli import small_mults
from voganish.multiseg import (KS_MULTS, M_KS, M_PSI, Multisegment, MultsMismatch, NegativeRank, ParseError,
                               RankTriangle, closure_leq, enumerate_multisegments, enumerate_orbits,
                               is_arthur_type, is_valid, multisegment_from_triangle, named, open_orbit,
                               orbits_between, parse_multisegment, format_multisegment, segment_counts,
                               triangle_from_multisegment, zero_orbit)

KS_ORBITS = enumerate_orbits(KS_MULTS)


def test_named_triangles_come_from_their_multisegments():
    assert triangle_from_multisegment(M_KS, KS_MULTS) == named("KS")
    assert triangle_from_multisegment(M_PSI, KS_MULTS) == named("psi")
    assert multisegment_from_triangle(named("KS")) == M_KS


def test_text_roundtrip_and_display_order():
    s = "2 4 4 4 2 / 2 3 3 2 / 1 2 1 / 1 1 / 0"
    T = RankTriangle.parse(s)
    assert T.to_text() == s
    assert RankTriangle.from_json(T.to_json()) == T
    U = RankTriangle.parse("1 2 3 / 1 2 / 0")
    # top row is printed m_n ... m_0
    assert U.mults == (3, 2, 1)
    assert U.r(1, 1) == 2 and U.r(2, 2) == 1


def test_parse_errors_carry_location():
    with pytest.raises(ParseError):
        RankTriangle.parse("2 4 4 4 2 / 2 3 3 / 1 2 1 / 1 1 / 0")
    with pytest.raises(ParseError):
        RankTriangle.parse("2 4 x 4 2 / 2 3 3 2 / 1 2 1 / 1 1 / 0")
    with pytest.raises(ParseError):
        parse_multisegment("{not json")


def test_multisegment_json_roundtrip():
    assert parse_multisegment(format_multisegment(M_PSI)) == M_PSI


def test_negative_rank_detected():
    T = RankTriangle.parse("1 1 1 / 1 1 / 2")
    assert not is_valid(T)
    with pytest.raises(NegativeRank):
        multisegment_from_triangle(T)


def test_enumeration_is_duplicate_free():
    assert len(set(KS_ORBITS)) == len(KS_ORBITS) == 1138
    mss = enumerate_multisegments(KS_MULTS)
    assert len(set(mss)) == len(mss) == 1138


def test_exhaustive_bijection_and_validity_small():
    for mults in small_mults(8):
        orbits = enumerate_orbits(mults)
        for T in orbits:
            assert triangle_from_multisegment(multisegment_from_triangle(T), mults) == T
            assert is_valid(T)
        # validity <=> extraction succeeds, over every triangle with entries bounded by the mults
        if sum(mults) > 5:
            continue
        n = len(mults) - 1
        keys = [(i, j) for i in range(1, n + 1) for j in range(1, i + 1)]
        found = set()
        for vals in itertools.product(*[range(min(mults[j - 1:i + 1]) + 1) for i, j in keys]):
            T = RankTriangle(mults, dict(zip(keys, vals)))
            try:
                ok = triangle_from_multisegment(multisegment_from_triangle(T), mults) == T
            except (NegativeRank, ValueError):
                ok = False
            assert ok == is_valid(T)
            if ok:
                found.add(T)
        assert found == set(orbits)


def test_segment_counts_are_the_multiplicities():
    for T in KS_ORBITS[::37]:
        m = multisegment_from_triangle(T)
        counts = {k: v for k, v in segment_counts(T).items() if v}
        assert counts == {tuple(s): c for s, c in m.counts.items()}


@given(st.sampled_from(KS_ORBITS), st.sampled_from(KS_ORBITS), st.sampled_from(KS_ORBITS))
def test_closure_order_is_a_partial_order(a, b, c):
    assert closure_leq(a, a)
    if closure_leq(a, b) and closure_leq(b, a):
        assert a == b
    if closure_leq(a, b) and closure_leq(b, c):
        assert closure_leq(a, c)


def test_open_and_zero_orbits_are_extremes():
    top, bottom = open_orbit(KS_MULTS), zero_orbit(KS_MULTS)
    assert top in KS_ORBITS and bottom in KS_ORBITS
    assert all(closure_leq(T, top) and closure_leq(bottom, T) for T in KS_ORBITS)
    assert top.rows()[0] == [2, 4, 4, 2]


def test_orbits_between():
    assert orbits_between(named("KS"), lambda C: False, KS_ORBITS) == []
    top = open_orbit(KS_MULTS)
    assert len(orbits_between(named("KS"), lambda C: closure_leq(C, top), KS_ORBITS)) == 1138


def test_mults_mismatch():
    with pytest.raises(MultsMismatch):
        closure_leq(named("KS"), open_orbit((1, 1)))


def test_arthur_shape():
    assert is_arthur_type(M_PSI)
    assert not is_arthur_type(M_KS)
    assert is_arthur_type(Multisegment(4, {(1, 3): 1}))
    assert is_arthur_type(Multisegment(4, {(0, 4): 1}))
    assert not is_arthur_type(Multisegment(4, {(0, 1): 1}))
