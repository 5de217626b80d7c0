import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from multireach.numeric import QuadraticNumber as Q
from multireach.planar import (NO, YES, classify_matrix, decide_halfplane_multi, eventual_sign_profile,
                               homogeneous_line_fastpath, invariant_form, polar_params, verify_witness)
from multireach.semialg import SemiAlgebraicSet2D as Set

from oracles import simulate, visits_bruteforce

def mpq(v):
    v = Fraction(v)
    return mpmath.mpf(v.numerator) / v.denominator


ROT = [[Fraction(4, 5), Fraction(3, 5)], [Fraction(-3, 5), Fraction(4, 5)]]


def test_classification_examples():
    ec = classify_matrix(ROT)
    assert ec.kind == "ComplexPair" and ec.modulus_vs_one == "=" and not ec.degenerate
    ec = classify_matrix([[1, 1], [-1, 1]])
    assert ec.kind == "ComplexPair" and ec.det == 2 and ec.degenerate_order == 4
    ec = classify_matrix([[2, 0], [0, 3]])
    assert ec.kind == "RealDistinct"
    assert classify_matrix([[2, 1], [0, 2]]).kind == "RealRepeatedDefective"
    assert classify_matrix([[2, 0], [0, 2]]).kind == "RealRepeatedDiagonalisable"
    assert classify_matrix([[1, 2], [2, 4]]).kind == "ZeroEigenvalue"


@settings(max_examples=60, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(1, 3))
def test_degeneracy_matches_root_of_unity_oracle(a, b, c, d, q):
    M = [[Fraction(a, q), Fraction(b, q)], [Fraction(c, q), Fraction(d, q)]]
    ec = classify_matrix(M)
    if ec.kind != "ComplexPair":
        return
    # oracle: lambda/conj(lambda) is a k-th root of unity, tested numerically
    tr, det = Fraction(a + d, q), Fraction(a * d - b * c, q * q)
    with mpmath.workdps(40):
        lam = (mpq(tr) + mpmath.sqrt(mpmath.mpc(mpq(tr * tr - 4 * det)))) / 2
        ratio = lam / mpmath.conj(lam)
        orders = [k for k in range(1, 13) if abs(ratio ** k - 1) < mpmath.mpf(10) ** -30]
    assert (ec.degenerate_order is not None) == bool(orders)
    if orders:
        assert ec.degenerate_order == orders[0]


def test_invariant_form_is_invariant():
    for M in (ROT, [[1, 2], [-1, 1]], [[Fraction(2, 5), Fraction(3, 10)], [Fraction(-3, 10), Fraction(2, 5)]]):
        g11, g12, g22 = invariant_form(M)
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        G = [[g11, g12], [g12, g22]]
        MG = [[sum(Fraction(M[i][k]) * G[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        MGMt = [[sum(MG[i][k] * Fraction(M[j][k]) for k in range(2)) for j in range(2)] for i in range(2)]
        assert MGMt == [[det * G[i][j] for j in range(2)] for i in range(2)]


def test_polar_examples():
    P = polar_params(ROT, (1, 0))
    assert P.modulus.to_fraction() == 1
    assert P.angle_cos_sin == (Q(Fraction(4, 5)), Q(Fraction(-3, 5)))
    P2 = polar_params([[Fraction(8, 5), Fraction(6, 5)], [Fraction(-6, 5), Fraction(8, 5)]], (1, 0))
    assert P2.modulus.to_fraction() == 2
    with pytest.raises(ValueError):
        polar_params([[2, 0], [0, 3]], (1, 0))


@settings(max_examples=15, deadline=None)
@given(st.integers(-3, 3), st.integers(1, 4), st.integers(-4, -1), st.integers(-3, 3), st.integers(1, 3))
def test_polar_modulus_high_precision(a, b, c, d, q):
    M = [[Fraction(a, q), Fraction(b, q)], [Fraction(c, q), Fraction(d, q)]]
    if classify_matrix(M).kind != "ComplexPair":
        return
    P = polar_params(M, (1, 2))
    g11, g12, g22 = P.form
    with mpmath.workdps(60):
        for n, (x, y) in enumerate(simulate(M, (1, 2), 50), start=1):
            # the modulus in the normal frame is sqrt(G(p M^n))
            G = mpq(g11 * x * x + 2 * g12 * x * y + g22 * y * y)
            ref = mpmath.sqrt(G)
            got = P.orbit_modulus(n).approx(40)
            assert abs(mpq(got) - ref) < mpmath.mpf(10) ** -30
            fx, fy = P.frame_point(n)
            assert abs(mpmath.sqrt(fx.approx(50) ** 2 + fy.approx(50) ** 2) - ref) < mpmath.mpf(10) ** -30


def test_profile_examples():
    v = eventual_sign_profile([[2, 0], [0, Fraction(1, 2)]], (1, 1), (1, 1, -3))
    assert v.infinite and v.as_list(60) == list(range(2, 61))
    v = eventual_sign_profile([[Fraction(1, 2), 0], [0, Fraction(1, 3)]], (1, 1), (1, 1, -3))
    assert v.count() == 0
    rnd = random.Random(3)
    for _ in range(20):
        a, b = Fraction(rnd.randint(1, 9), rnd.randint(1, 4)), Fraction(rnd.randint(1, 9), rnd.randint(1, 4))
        H = (rnd.randint(-3, 3) or 1, rnd.randint(-3, 3), 0)
        v = eventual_sign_profile([[a, 0], [0, b]], (rnd.randint(-3, 3), rnd.randint(-3, 3)), H)
        # homogeneous halfplane: at most one switch, so the visits form one interval
        assert len(v.runs) <= 1 or all(r[1] == r[0] for r in v.runs[:-1])
        lst = v.as_list(300)
        assert lst == list(range(lst[0], lst[-1] + 1)) if lst else True


real_entries = st.fractions(-3, 3, max_denominator=3)


@settings(max_examples=120, deadline=None)
@given(real_entries, real_entries, real_entries, real_entries,
       st.tuples(st.integers(-4, 4), st.integers(-4, 4)), st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-4, 4)))
def test_profile_matches_bruteforce(a, b, c, d, p, H):
    M = [[a, b], [c, d]]
    ec = classify_matrix(M)
    if ec.kind == "ComplexPair" and not ec.degenerate:
        return
    if H[0] == 0 and H[1] == 0:
        return
    v = eventual_sign_profile(M, p, H)
    assert v.as_list(500) == visits_bruteforce(M, p, H, 500)


def test_decide_examples():
    disk = Set.parse("1 - x^2 - y^2 > 0")
    v = decide_halfplane_multi(disk, "x - 5 > 0", [[1, 2], [-1, 1]], 7)
    assert v.outcome == YES and len(v.witness["visits"]) == 7
    pt = v.point
    assert verify_witness(disk, "x - 5 > 0", [[1, 2], [-1, 1]], pt, v.witness["visits"])
    M = [[Fraction(2, 5), Fraction(3, 10)], [Fraction(-3, 10), Fraction(2, 5)]]
    v = decide_halfplane_multi(disk, "x - 3 > 0", M, 1)
    assert v.outcome == NO and v.horizon is not None
    v = decide_halfplane_multi("x = 1 & y = 1", "x + y - 3 > 0", [[2, 0], [0, Fraction(1, 2)]], 10)
    assert v.outcome == YES and v.witness["visits"] == list(range(2, 12))


def test_complex_shrinking_no_confirmed_by_simulation():
    disk = Set.parse("1 - x^2 - y^2 > 0")
    M = [[Fraction(2, 5), Fraction(3, 10)], [Fraction(-3, 10), Fraction(2, 5)]]
    v = decide_halfplane_multi(disk, "x - 3 > 0", M, 1)
    rnd = random.Random(7)
    samples = []
    while len(samples) < 50:
        p = (Fraction(rnd.randint(-99, 99), 100), Fraction(rnd.randint(-99, 99), 100))
        if disk.member(p):
            samples.append(p)
    for p in samples:
        assert all(x - 3 <= 0 for x, _ in simulate(M, p, v.horizon + 5))


def test_fastpath_examples():
    disk = Set.parse("1 - x^2 - y^2 > 0")
    assert homogeneous_line_fastpath(disk, "y - x = 0", [[3, 0], [0, 3]], 5).outcome == YES
    v = homogeneous_line_fastpath(disk, "y - x = 0", ROT, 2)
    assert v.outcome == YES and v.witness["visits"] == [1, 2]
    assert homogeneous_line_fastpath(disk, "x = 0", [[2, 0], [0, 3]], 2).outcome == YES
    assert homogeneous_line_fastpath("x - 2 > 0", "y - x = 0", ROT, 2).outcome == NO


def test_degenerate_dispatch_counts():
    # M^4 is scalar for [[1,1],[-1,1]]: visits follow residue classes mod 4
    M = [[1, 1], [-1, 1]]
    for p, H in [((1, 0), (1, 0, -3)), ((2, 1), (1, -1, 1)), ((-1, 3), (0, 1, -5))]:
        v = eventual_sign_profile(M, p, H)
        assert v.as_list(1000) == visits_bruteforce(M, p, H, 1000)


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 6))
def test_yes_witnesses_reverify(a, b, c, d, m):
    M = [[a, b], [c, d]]
    S = Set.parse("1 - x^2 - y^2 > 0")
    v = decide_halfplane_multi(S, "x + y - 1 > 0", M, m, budget=60)
    if v.outcome == YES:
        assert verify_witness(S, "x + y - 1 > 0", M, v.point, v.witness["visits"])
        assert len(v.witness["visits"]) >= m
