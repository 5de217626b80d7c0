import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from multireach.hilbert import DiophantineInstance, build_instance, enumerate_identifications, verify_witness
from multireach.poly import parse_poly, variables


def _orbit_values(G, p, R):
    """p M^r h^T for r = 0..R by repeated vector-matrix products."""
    out, v = [], [Fraction(x) for x in p]
    for _ in range(R + 1):
        out.append(v[0])
        v = G.M.rmul_vector(v)
    return out


def test_identifications():
    Q = parse_poly("y1^2 - 3*y2 + y1*y2", variables("y", 2))
    ids = enumerate_identifications(Q)
    assert len(ids) == 4
    assert {i.subset for i in ids} == {(), (1,), (2,), (1, 2)}
    assert len(enumerate_identifications(parse_poly("y1 - 2", ["y1"]))) == 2
    diff = enumerate_identifications(parse_poly("y1 - y2", variables("y", 2)))
    assert [i.identically_zero for i in diff] == [False, False, False, True]


def test_build_example():
    G = build_instance(DiophantineInstance.parse("(y1-2)^2+(y2-5)^2", 2))
    assert G.dimension == 5 and G.m == 2
    p = G.point_for([2, 5])
    assert p[:3] == [4, 0, -2]
    assert G.in_S(p)
    vals = _orbit_values(G, p, 50)
    assert [r for r, v in enumerate(vals) if v == 0] == [1, 4]
    assert verify_witness(G, p, [1, 4])
    bad = list(p)
    bad[0] = Fraction(5)
    assert not verify_witness(G, bad, [1, 4])
    assert not verify_witness(G, p, [1, 3])
    with pytest.raises(ValueError):
        verify_witness(G, p[:4], [1, 4])


def test_no_positive_zero():
    G = build_instance(DiophantineInstance.parse("y1", 1))
    # y1 = 0 is forced on S, so the orbit value is r + 1 > 0 for r >= 0
    p = G.point_for([0])
    assert G.in_S(p)
    assert all(v != 0 for v in _orbit_values(G, p, 50))


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_planted_witnesses(rnd):
    n = rnd.randint(1, 3)
    ys = rnd.sample(range(1, 9), n)
    names = variables("y", n)
    extra = "*".join(f"({names[rnd.randrange(n)]} + {rnd.randint(0, 3)})" for _ in range(rnd.randint(0, 2))) or "1"
    text = " + ".join(f"({v} - {y})^2" for v, y in zip(names, ys)) + f" + 0*{extra}"
    G = build_instance(DiophantineInstance.parse(text, n))
    p = G.point_for(ys)
    assert verify_witness(G, p, [y - 1 for y in ys])


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_no_witness_without_zero(rnd):
    n = rnd.randint(1, 2)
    names = variables("y", n)
    text = " + ".join(f"{v}^2" for v in names) + f" + {rnd.randint(1, 5)}"
    G = build_instance(DiophantineInstance.parse(text, n))
    for ys in permutations(range(1, 10), n):
        p = G.point_for(ys)
        assert not G.in_S(p)
        assert not verify_witness(G, p, [y - 1 for y in ys])


@settings(max_examples=15, deadline=None)
@given(st.lists(st.fractions(-5, 5, max_denominator=4), min_size=1, max_size=3))
def test_orbit_identity_rational_y(ys):
    n = len(ys)
    G = build_instance(DiophantineInstance.parse(" + ".join(variables("y", n)), n))
    p = G.point_for(ys)
    vals = _orbit_values(G, p, 100)
    for r in range(101):
        prod = Fraction(1)
        for y in ys:
            prod *= r + 1 - y
        assert vals[r] == prod
