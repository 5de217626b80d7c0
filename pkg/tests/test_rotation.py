import itertools
import math
import stat
import sys
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from multireach.lrs import RationalMatrix
from multireach.numeric import QuadraticNumber as Q
from multireach.planar import NO_WITHIN_BUDGET, YES
from multireach.rotation import (BoundProviderError, EffectiveOracle, RotationInstance, UserBudget,
                                 bounded_witness_search, decide_infinite_visits, decide_rotation_multi,
                                 derive_search_bound, eigenvalue_height, eliminate_line_target,
                                 executable_oracle, rotation_eigenvalue, vanishes_on_subtorus,
                                 verify_rotation_witness)
from multireach.semialg import SemiAlgebraicSet2D as Set, is_empty
from multireach.torus import Lattice, LaurentPoly, LaurentSystem

from conftest import CISSOID, LINE, ROT

ROT2 = [[Fraction(5, 13), Fraction(12, 13)], [Fraction(-12, 13), Fraction(5, 13)]]
ROT3 = [[Fraction(3, 5), Fraction(4, 5)], [Fraction(-4, 5), Fraction(3, 5)]]


def mat_power(M, x):
    A = RationalMatrix([[Fraction(v) for v in r] for r in M])
    return A ** x if x >= 0 else A.inverse() ** (-x)


def meets_all(S, T, M, xs):
    """Ground truth: S meets every preimage of T under M^x for x in xs."""
    S, T = Set.parse(S) if isinstance(S, str) else S, Set.parse(T)
    R = S
    for x in xs:
        R = R.intersect(T.transform(mat_power(M, x).rows))
    return bool(R.disjuncts) and not is_empty(R).empty


def test_eigenvalue_and_height():
    lam = rotation_eigenvalue(ROT)
    assert lam * lam.conjugate() == 1
    assert lam.approx(30).real == pytest.approx(0.8) and lam.approx(30).imag == pytest.approx(0.6)
    h = eigenvalue_height(ROT)
    assert h.lo <= Fraction(math.log(5) / 2 + 1e-12) and h.hi >= Fraction(math.log(5) / 2 - 1e-12)


def test_instance_validation():
    with pytest.raises(ValueError):
        RotationInstance("x > 0", "x > 0", [[2, 0], [0, 1]], 1)
    with pytest.raises(ValueError):
        RotationInstance("x > 0", "x > 0", [[0, 1], [-1, 1]], 1)    # order 6
    with pytest.raises(ValueError):
        RotationInstance("x > 0", "x > 0", ROT, 0)
    inst = RotationInstance("x > 0", "x > 0", ROT, 2, budget=17)
    assert isinstance(inst.bound_provider, UserBudget) and inst.bound_provider.B == 17


def test_infinite_visits_examples():
    assert decide_infinite_visits("x^2 + y^2 - 1 = 0", "x > 0", ROT)
    assert not decide_infinite_visits(CISSOID, LINE, ROT)
    assert not decide_infinite_visits("x - 10 > 0", "1 - x^2 - y^2 > 0", ROT)


def test_bounded_search_examples():
    res = bounded_witness_search(CISSOID, LINE, ROT, 2, 50)
    assert res.found is None and res.exhausted and res.checked == 50 * 49 // 2
    res = bounded_witness_search(CISSOID, LINE, ROT, 1, 1)
    assert res.found is not None and res.found[0] == (1,)
    # oracle: real roots of the cissoid restricted to the preimage line, via sympy
    x, y = sympy.symbols("x y")
    M = sympy.Matrix([[sympy.Rational(4, 5), sympy.Rational(3, 5)], [sympy.Rational(-3, 5), sympy.Rational(4, 5)]])
    px, py = (sympy.Matrix([[x, y]]) * M)
    line = sympy.expand(py - px + 1)
    ysol = sympy.solve(line, y)[0]
    cubic = sympy.Poly(sympy.expand((x**3 + x * y**2 - 2 * y**2).subs(y, ysol)), x)
    roots = [complex(r) for r in cubic.nroots(n=30)]
    real = [r.real for r in roots if abs(r.imag) < 1e-20]
    assert real
    p = res.found[1]
    px_val = float(p.x) if hasattr(p, "x") else float(p[0])
    assert min(abs(px_val - r) for r in real) < 1e-9
    res = bounded_witness_search("x^2 + y^2 - 1 = 0", "x > 0", ROT, 3, 20)
    assert res.found is not None
    xs, p = res.found
    assert len(xs) == 3
    assert verify_rotation_witness("x^2 + y^2 - 1 = 0", "x > 0", ROT, p, list(xs))


def test_bounded_search_first_tuple_is_lexicographic():
    # simulate p = (1, 0): the first three visits to x > 0 form the least tuple
    M = [[float(v) for v in r] for r in ROT]
    v, visits = (1.0, 0.0), []
    for n in range(1, 21):
        v = (v[0] * M[0][0] + v[1] * M[1][0], v[0] * M[0][1] + v[1] * M[1][1])
        if v[0] > 0:
            visits.append(n)
    assert bounded_witness_search("x = 1 & y = 0", "x > 0", ROT, 3, 20).found[0] == tuple(visits[:3])


def test_vanishing_examples():
    z = lambda n, i, k=1: LaurentPoly.var(n, i, k)
    X = LaurentSystem(2, [z(2, 0) * z(2, 1) - 1], conjugate_pairs=[(0, 1)])
    assert vanishes_on_subtorus(X, Lattice.full(1))
    for L in (Lattice.full(1), Lattice.from_generators([[3]])):
        assert not vanishes_on_subtorus(LaurentSystem(2, [z(2, 0) - 2], [(0, 1)]), L)
    assert not vanishes_on_subtorus(z(1, 0) - 2, Lattice.full(1))
    assert vanishes_on_subtorus(z(2, 0, 2) - z(2, 1, 2), Lattice.from_generators([[1, 1]]))
    assert not vanishes_on_subtorus(z(2, 0, 2) - z(2, 1, 2), Lattice.from_generators([[1, 2]]))


lam = rotation_eigenvalue(ROT)
lam_inv = lam.inverse()


def lam_pow(x):
    return lam ** x if x >= 0 else lam_inv ** (-x)


exps = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(exps, st.integers(-3, 3)), min_size=1, max_size=4),
       st.sampled_from([[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, -1]]))
def test_vanishing_matches_lambda_points(terms, gen):
    Q0 = LaurentPoly(2, {})
    for e, c in terms:
        Q0 = Q0 + LaurentPoly(2, {e: c})
    L = Lattice.from_generators([gen])
    got = vanishes_on_subtorus(Q0, L)
    # oracle: evaluate at lambda^x for x in L, |x| <= 30
    vals = [Q0.evaluate([lam_pow(k * gen[0]), lam_pow(k * gen[1])]) for k in range(-30, 31)
            if max(abs(k * gen[0]), abs(k * gen[1])) <= 30]
    assert got == all(not v for v in vals)


def planted_source():
    # a circle through the point on the preimage lines for visits 1 and 3
    M1, M3 = mat_power(ROT, 1), mat_power(ROT, 3)
    from multireach.rotation import _line_point
    p = _line_point((-1, 1, 1), M1, M3)
    r2 = p.x * p.x + p.y * p.y
    return f"x^2 + y^2 - {r2} = 0", (p.x, p.y)


@pytest.mark.parametrize("source", [CISSOID, "planted"])
def test_elimination_validated_per_tuple(source):
    if source == "planted":
        source, _ = planted_source()
    systems = eliminate_line_target(source, LINE, ROT, 2)
    assert systems is not None and len(systems) == 1
    sysm = systems[0]
    eq_only = Set.parse(source)
    hits = 0
    for x1, x2 in itertools.combinations(range(1, 21), 2):
        truth = meets_all(eq_only, LINE, ROT, (x1, x2))
        assert sysm.holds_at((x1, x2), lam) == truth, (x1, x2)
        hits += truth
    if source != CISSOID:
        assert hits >= 1
    else:
        assert hits == 0


def test_vanishing_discard_spot_check():
    # wherever Q0 vanishes on a lattice, no admissible tuple in it is a solution
    src, _ = planted_source()
    for S in (CISSOID, src):
        sysm = eliminate_line_target(S, LINE, ROT, 2)[0]
        for gen in ([1, 1], [1, -1], [1, 2], [2, 1], [1, 0], [0, 1], [1, -2]):
            L = Lattice.from_generators([gen])
            if not vanishes_on_subtorus(sysm.equations, L):
                continue
            for k in range(-30, 31):
                xs = (k * gen[0], k * gen[1])
                if max(map(abs, xs)) > 30 or xs[0] == xs[1] or 0 in xs:
                    continue
                assert not meets_all(S, LINE, ROT, xs)


def test_eliminated_system_not_applicable():
    assert eliminate_line_target(CISSOID, LINE, ROT, 1) is None
    assert eliminate_line_target(CISSOID, "x > 0", ROT, 2) is None
    assert eliminate_line_target("x > 0", LINE, ROT, 2) is None


def test_search_bound_providers(tmp_path):
    z1 = LaurentPoly.var(2, 0)
    X = LaurentSystem(2, [z1 - 2], [(0, 1)])
    h = eigenvalue_height(ROT)
    assert derive_search_bound(X, UserBudget(50), h).B == 50
    assert not derive_search_bound(X, UserBudget(50), h).complete
    b = derive_search_bound(X, EffectiveOracle(lambda _: 10), h)
    assert b.complete and b.B == math.ceil(10 / (math.log(5) / 2)) == 13
    with pytest.raises(BoundProviderError):
        derive_search_bound(X, EffectiveOracle(lambda _: -1), h)
    with pytest.raises(BoundProviderError):
        derive_search_bound(X, EffectiveOracle(lambda _: 1 / 0), h)
    zero = LaurentSystem(2, [LaurentPoly.var(2, 0) * LaurentPoly.var(2, 1) - 1], [(0, 1)])
    with pytest.raises(ValueError):
        derive_search_bound(zero, EffectiveOracle(lambda _: 10), h)
    script = tmp_path / "oracle.py"
    script.write_text(f"#!{sys.executable}\nimport json, sys\njson.load(sys.stdin)\nprint(7)\n")
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    assert derive_search_bound(X, executable_oracle(str(script)), h).B == math.ceil(7 / (math.log(5) / 2))


def test_decide_examples():
    v = decide_rotation_multi(CISSOID, LINE, ROT, 2, budget=50)
    assert v.outcome == NO_WITHIN_BUDGET and v.budget == 50
    v = decide_rotation_multi(CISSOID, LINE, ROT, 1)
    assert v.outcome == YES and v.witness["visits"] == [1]
    assert verify_rotation_witness(CISSOID, LINE, ROT, v.point, v.witness["visits"])
    v = decide_rotation_multi("x^2 + y^2 - 1 = 0", "x > 0", ROT, 1000)
    assert v.outcome == YES and len(v.witness["visits"]) == 1000
    assert verify_rotation_witness("x^2 + y^2 - 1 = 0", "x > 0", ROT, v.point, v.witness["visits"])


@pytest.mark.parametrize("M", [ROT, ROT2, ROT3])
@pytest.mark.parametrize("S,T", [("x^2 + y^2 - 1 = 0", "x > 0"), ("1 - x^2 - y^2 > 0", "x - y > 0"),
                                 ("x - 2 > 0", "y - 1 > 0")])
def test_infinite_implies_small_witnesses(M, S, T):
    assert decide_infinite_visits(S, T, M)
    for m in range(1, 6):
        res = bounded_witness_search(S, T, M, m, 200)
        assert res.found is not None
        assert verify_rotation_witness(S, T, M, res.found[1], list(res.found[0]))
