"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
import bisect
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import sympy

import conftest
from conftest import CISSOID, LINE, ROT
from oracles import runs_with_gaps, simulate, visits_bruteforce

from multireach import cli
from multireach.hilbert import DiophantineInstance, build_instance, verify_witness
from multireach.lrs import RationalMatrix, binomial_recurrence, md_matrix
from multireach.numeric import QuadraticNumber as Q, weil_height
from multireach.planar import NO, YES, classify_matrix, decide_halfplane_multi, eventual_sign_profile
from multireach.planar import verify_witness as planar_verify
from multireach.reduction import MatrixCondition, compile_to_polytope
from multireach.rotation import (bounded_witness_search, decide_rotation_multi, rotation_eigenvalue,
                                 vanishes_on_subtorus, verify_rotation_witness)
from multireach.semialg import SemiAlgebraicSet2D as Set
from multireach.torus import Lattice, LaurentPoly, LaurentSystem, maximal_subtori, torus_parametrization

ROOT = Path(__file__).parent.parent


@contextmanager
def criterion(k, title, limit):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < limit, f"runtime {elapsed:.1f}s exceeds {limit}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        line = f"criterion {k} ({title}): {'PASS' if ok else 'FAIL'} in {elapsed:.2f}s (limit {limit}s)"
        conftest.ACCEPTANCE_LINES[k] = line
        print(line)


# -- 1 ---------------------------------------------------------------------

def _numeric_field_point(wit):
    """x, y of a field point from its defining polynomial, via mpmath roots."""
    alpha = wit["alpha"]
    coeffs = [int(c) for c in alpha["poly"]]
    lo, hi = (float(Fraction(v)) for v in alpha["interval"])
    mpmath.mp.dps = 40
    roots = [r for r in mpmath.polyroots(coeffs[::-1], maxsteps=200, extraprec=200)
             if abs(mpmath.im(r)) < 1e-30 and lo <= mpmath.re(r) <= hi]
    assert len(roots) == 1
    a = mpmath.re(roots[0])

    def comb(pair):
        return sum(mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator * a ** k for k, c in enumerate(pair))
    return comb(wit["x"]), comb(wit["y"])


def test_criterion_1_cissoid(capsys):
    with criterion(1, "cissoid example", 60):
        code = cli.main(["analyze", str(ROOT / "instances" / "cissoid.json")])
        out = capsys.readouterr().out
        assert code == 0 and out.splitlines()[0] in ("No", "NoWithinBudget(50)")
        res = bounded_witness_search(CISSOID, LINE, ROT, 2, 50)
        assert res.found is None and res.exhausted and res.checked == 1225
        v = decide_rotation_multi(CISSOID, LINE, ROT, 1)
        assert v.outcome == YES
        assert verify_rotation_witness(CISSOID, LINE, ROT, v.point, v.witness["visits"])
        wit = v.witness["point"]
        if wit["kind"] == "field":
            x, y = _numeric_field_point(wit)
        else:
            x, y = mpmath.mpf(Fraction(wit["x"])), mpmath.mpf(Fraction(wit["y"]))
        assert abs(x ** 3 + x * y ** 2 - 2 * y ** 2) < 1e-25
        (k,) = v.witness["visits"]
        c, s = mpmath.mpf(4) / 5, mpmath.mpf(3) / 5
        for _ in range(k):
            x, y = x * c - y * s, x * s + y * c
        assert abs(y - x + 1) < 1e-25


# -- 2 ---------------------------------------------------------------------

def test_criterion_2_binomial():
    with criterion(2, "binomial recurrence", 5):
        rnd = random.Random(2)
        for d in range(7):
            q = binomial_recurrence(d).coefficients
            Md = md_matrix(d)
            for _ in range(20):
                P = [Fraction(rnd.randint(-50, 50), rnd.randint(1, 5)) for _ in range(d + 1)]
                val = lambda n: sum(c * n ** k for k, c in enumerate(P))
                seq = [val(n) for n in range(0, 101 + d + 1)]
                for n in range(d + 1, len(seq)):
                    assert seq[n] == sum(q[i] * seq[n - 1 - i] for i in range(d + 1))
                # p = (P(1), ..., P(d+1)), h = e_1: p M_d^n h^T = P(n+1)
                v = [val(k) for k in range(1, d + 2)]
                for n in range(101):
                    assert v[0] == val(n + 1)
                    v = Md.rmul_vector(v)


# -- 3 ---------------------------------------------------------------------

def _orbit_values(G, p, R):
    out, v = [], [Fraction(x) for x in p]
    for _ in range(R + 1):
        out.append(v[0])
        v = G.M.rmul_vector(v)
    return out


def test_criterion_3_gadget():
    with criterion(3, "gadget equivalence", 10):
        G = build_instance(DiophantineInstance.parse("(y1-2)^2+(y2-5)^2", 2))
        p = G.point_for([2, 5])
        vals = _orbit_values(G, p, 50)
        # zeros at r with r + 1 in {2, 5}
        assert [r for r, v in enumerate(vals) if v == 0] == [1, 4]
        assert all(vals[r] == (r + 1 - 2) * (r + 1 - 5) for r in range(51))
        assert verify_witness(G, p, [1, 4])
        rnd = random.Random(3)
        for _ in range(20):
            n = rnd.randint(1, 3)
            ys = rnd.sample(range(1, 12), n)
            text = " + ".join(f"(y{i + 1} - {y})^2" for i, y in enumerate(ys))
            G = build_instance(DiophantineInstance.parse(text, n))
            p = G.point_for(ys)
            zeros = [r for r, v in enumerate(_orbit_values(G, p, 50)) if v == 0]
            assert zeros == sorted(y - 1 for y in ys)
            assert verify_witness(G, p, [y - 1 for y in ys])


# -- 4 ---------------------------------------------------------------------

NAMES = ["A11", "A12", "A21", "A22"]


def _eval(text, P):
    env = {name: P[i // 2][i % 2] for i, name in enumerate(NAMES)}
    return eval(text.replace("^", "**"), {"__builtins__": {}}, env)


def _random_poly(rnd):
    terms = []
    for _ in range(rnd.randint(1, 3)):
        mono = "*".join(rnd.choice(NAMES) for _ in range(rnd.randint(1, 2)))
        terms.append(f"({rnd.randint(-3, 3)})*{mono}")
    return " + ".join(terms) + f" + ({rnd.randint(-4, 4)})"


def test_criterion_4_reduction():
    with criterion(4, "reduction equivalence", 30):
        rnd = random.Random(4)
        done = 0
        while done < 50:
            rows = [[Fraction(rnd.randint(-3, 3), rnd.randint(1, 2)) for _ in range(2)] for _ in range(2)]
            disjuncts = []
            for _ in range(rnd.randint(1, 2)):
                dj = {"gt": [_random_poly(rnd) for _ in range(rnd.randint(0, 2))]}
                if rnd.random() < 0.6:
                    dj["eq"] = _random_poly(rnd)
                if "eq" not in dj and not dj["gt"]:
                    dj["gt"] = [_random_poly(rnd)]
                disjuncts.append(dj)
            try:
                cond = MatrixCondition.parse(2, disjuncts)
                insts = compile_to_polytope(cond, RationalMatrix(rows))
            except ValueError:
                continue        # an equation that parses to the zero polynomial
            done += 1
            orbits = [inst.orbit(200) for inst in insts]
            P = [[Fraction(int(i == j)) for j in range(2)] for i in range(2)]
            for n in range(1, 201):
                P = [[sum(P[i][k] * rows[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
                direct = any((("eq" not in dj) or _eval(dj["eq"], P) == 0)
                             and all(_eval(g, P) > 0 for g in dj["gt"]) for dj in disjuncts)
                compiled = False
                for inst, orb in zip(insts, orbits):
                    k, v = next(orb)
                    assert k == n
                    compiled = compiled or inst.in_polytope(v)
                assert direct == compiled, (rows, disjuncts, n)


# -- 5 ---------------------------------------------------------------------

def _random_real_instance(rnd):
    while True:
        kind = rnd.random()
        if kind < 0.3:
            # diagonalisable with chosen eigenvalues (possibly negative or zero)
            ev = [Fraction(rnd.randint(-6, 6), rnd.randint(1, 4)) for _ in range(2)]
            B = [[rnd.randint(-2, 2) for _ in range(2)] for _ in range(2)]
            det = B[0][0] * B[1][1] - B[0][1] * B[1][0]
            if det == 0:
                continue
            Binv = [[Fraction(B[1][1], det), Fraction(-B[0][1], det)], [Fraction(-B[1][0], det), Fraction(B[0][0], det)]]
            D = [[ev[0], 0], [0, ev[1]]]
            M = [[sum(Binv[i][k] * D[k][l] * B[l][j] for k in range(2) for l in range(2)) for j in range(2)]
                 for i in range(2)]
        elif kind < 0.4:
            lam = Fraction(rnd.randint(-5, 5), rnd.randint(1, 3))
            M = [[lam, Fraction(rnd.randint(1, 3))], [Fraction(0), lam]]
        else:
            M = [[Fraction(rnd.randint(-4, 4), rnd.randint(1, 3)) for _ in range(2)] for _ in range(2)]
        tr = M[0][0] + M[1][1]
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        if tr * tr - 4 * det < 0:
            continue
        p = (Fraction(rnd.randint(-5, 5), rnd.randint(1, 3)), Fraction(rnd.randint(-5, 5), rnd.randint(1, 3)))
        H = (rnd.randint(-4, 4), rnd.randint(-4, 4), rnd.choice([0, rnd.randint(-6, 6)]))
        if H[0] == 0 and H[1] == 0:
            continue
        return M, p, H


def test_criterion_5_real_gaps():
    with criterion(5, "real-eigenvalue gap bounds", 60):
        rnd = random.Random(5)
        horizon = 10 ** 4
        for _ in range(200):
            M, p, H = _random_real_instance(rnd)
            assert classify_matrix(M).kind != "ComplexPair"
            brute = visits_bruteforce(M, p, H, horizon)
            prof = eventual_sign_profile(M, p, H)
            assert prof.as_list(horizon) == brute, (M, p, H)
            # a maximal visit run is one arithmetic run of the profile (a
            # sign-stable stretch of one residue class): its step is at most 2
            for first, last, step in prof.runs:
                assert step <= 2 or first == last, (M, p, H, prof.runs)
            # sign switches are bounded: splitting the brute-force visits at
            # gaps longer than 3 leaves at most two stretches per residue class
            assert len(runs_with_gaps(brute, 3)) <= 4, (M, p, H)


# -- 6 ---------------------------------------------------------------------

def _complex_matrix(rnd, expanding):
    while True:
        q = 1 if expanding else rnd.randint(3, 6)
        M = [[Fraction(rnd.randint(-4, 4), q) for _ in range(2)] for _ in range(2)]
        ec = classify_matrix(M)
        if ec.kind != "ComplexPair" or ec.degenerate:
            continue
        if (ec.det > 1) if expanding else (ec.det < 1):
            return M


def test_criterion_6_complex_branches():
    with criterion(6, "complex-pair branches", 60):
        rnd = random.Random(6)
        yes = 0
        while yes < 15:
            M = _complex_matrix(rnd, True)
            cx, cy = rnd.randint(-3, 3), rnd.randint(-3, 3)
            S = f"1 - (x - {cx})^2 - (y - {cy})^2 > 0"
            T = f"{rnd.randint(-3, 3) or 1}*x + {rnd.randint(-3, 3)}*y + {rnd.randint(-9, -1)} > 0"
            m = rnd.randint(1, 4)
            v = decide_halfplane_multi(S, T, M, m)
            assert v.outcome == YES, (M, S, T, m, v)
            yes += 1
            pt = v.point
            assert Set.parse(S).member(pt)
            orbit = simulate(M, (pt.x, pt.y), max(v.witness["visits"]))
            tgt = Set.parse(T)
            assert len(v.witness["visits"]) >= m
            assert all(tgt.member(orbit[n - 1]) for n in v.witness["visits"])
        no = 0
        while no < 15:
            M = _complex_matrix(rnd, False)
            S = "1 - x^2 - y^2 > 0"
            T = f"{rnd.randint(-3, 3) or 1}*x + {rnd.randint(-3, 3)}*y + {rnd.randint(-9, -2)} > 0"
            m = rnd.randint(1, 3)
            v = decide_halfplane_multi(S, T, M, m)
            if v.outcome != NO:
                # some disk points do reach the halfplane: check the witness instead
                assert v.outcome == YES and planar_verify(S, T, M, v.point, v.witness["visits"])
                continue
            no += 1
            assert v.horizon is not None
            tgt, src = Set.parse(T), Set.parse(S)
            samples = []
            while len(samples) < 50:
                pt = (Fraction(rnd.randint(-99, 99), 100), Fraction(rnd.randint(-99, 99), 100))
                if src.member(pt):
                    samples.append(pt)
            for pt in samples:
                orbit = simulate(M, pt, v.horizon)
                assert sum(tgt.member(o) for o in orbit) < m


# -- 7 ---------------------------------------------------------------------

def _gdivmod(a, b):
    """Gaussian integer division with rounding; a, b as (re, im) int pairs."""
    (ar, ai), (br, bi) = a, b
    n = br * br + bi * bi
    qr, qi = ar * br + ai * bi, ai * br - ar * bi
    qr = (2 * qr + n) // (2 * n)
    qi = (2 * qi + n) // (2 * n)
    r = (ar - (qr * br - qi * bi), ai - (qr * bi + qi * br))
    return (qr, qi), r


def _ggcd(a, b):
    while b != (0, 0):
        _, r = _gdivmod(a, b)
        a, b = b, r
    return a


def _gpow(z, k):
    out = (1, 0)
    for _ in range(k):
        out = (out[0] * z[0] - out[1] * z[1], out[0] * z[1] + out[1] * z[0])
    return out


def _gscale(z, c):
    return (z[0] * c, z[1] * c)


def tuple_height_oracle(xs):
    """h(lambda^x_1, ..., lambda^x_k) for lambda = (2+i)^2/5 in Q(i).

    Scale (1 : lambda^x_1 : ...) by 5^M to Gaussian integers gamma_j (all of
    absolute value 5^M); then h = (2 log max|gamma_j| - log N(gcd)) / 2."""
    Mx = max(abs(x) for x in xs)
    coords = [(5 ** Mx, 0)]
    for x in xs:
        base = (2, 1) if x >= 0 else (2, -1)
        coords.append(_gscale(_gpow(base, 2 * abs(x)), 5 ** (Mx - abs(x))))
    g = coords[0]
    for c in coords[1:]:
        g = _ggcd(g, c)
    norm_g = g[0] ** 2 + g[1] ** 2
    return (2 * Mx * math.log(5) - math.log(norm_g)) / 2, Mx


def test_criterion_7_height_sandwich():
    with criterion(7, "height sandwich", 120):
        lam = rotation_eigenvalue(ROT)
        h = weil_height(lam, Fraction(1, 10 ** 7))
        assert h.hi - h.lo <= Fraction(1, 10 ** 6)
        assert h.lo <= Fraction(math.log(5) / 2) + Fraction(1, 10 ** 12) and \
            h.hi >= Fraction(math.log(5) / 2) - Fraction(1, 10 ** 12)
        rnd = random.Random(7)
        for _ in range(100):
            k = rnd.randint(1, 4)
            xs = [rnd.randint(-10, 10) for _ in range(k)]
            if not any(xs):
                xs[0] = rnd.choice([-1, 1]) * rnd.randint(1, 10)
            ht, Mx = tuple_height_oracle(xs)
            assert Mx * float(h.lo) - 1e-9 <= ht <= 2 * Mx * float(h.hi) + 1e-9, (xs, ht)
            # each coordinate alone: h(lambda^x) = |x| h(lambda), via the minimal polynomial
            x = xs[0]
            lx = lam ** x if x >= 0 else lam.inverse() ** (-x)
            hx = weil_height(lx, Fraction(1, 10 ** 7))
            assert float(hx.lo) - 1e-6 <= abs(x) * math.log(5) / 2 <= float(hx.hi) + 1e-6


# -- 8 ---------------------------------------------------------------------

def _sym_substitute(p, W):
    ts = sympy.symbols(f"t0:{len(W)}")
    expr = 0
    for e, c in p.terms.items():
        mono = 1
        for i, a in enumerate(e):
            mono *= sympy.Mul(*[ts[k] ** (W[k][i] * a) for k in range(len(W))])
        expr += sympy.sympify(str(c.to_fraction()) if c.is_rational() else c.to_sympy()) * mono
    return sympy.simplify(sympy.expand(expr))


def _random_variety(rnd, n):
    z = [LaurentPoly.var(n, i) for i in range(n)]
    polys = []
    for _ in range(rnd.randint(1, 2)):
        # binomial-style pieces make tori likely: z^a - z^b, plus optional factors
        a = [rnd.randint(-2, 2) for _ in range(n)]
        b = [rnd.randint(-2, 2) for _ in range(n)]
        f = LaurentPoly(n, {tuple(a): 1}) - LaurentPoly(n, {tuple(b): 1})
        if rnd.random() < 0.5:
            f = f * (z[rnd.randrange(n)] + rnd.randint(1, 3))
        if not f.is_zero():
            polys.append(f)
    return LaurentSystem(n, polys)


def test_criterion_8_torus():
    with criterion(8, "torus machinery", 60):
        rnd = random.Random(8)
        checked = 0
        for _ in range(40):
            n = rnd.randint(2, 3)
            X = _random_variety(rnd, n)
            if not X.polys:
                continue
            for L in maximal_subtori(X):
                W = torus_parametrization(L).W
                for p in X.equations():
                    assert _sym_substitute(p, W) == 0
                checked += 1
        assert checked >= 10
        for _ in range(100):
            n = rnd.randint(2, 4)
            gens = [[rnd.randint(-6, 6) for _ in range(n)] for _ in range(rnd.randint(1, n - 1))]
            lat = Lattice.from_generators(gens)
            if lat.rank in (0, n):
                continue
            P = torus_parametrization(lat)
            assert P.norm_bound_ok and P.map.norm() <= n ** 3 * P.N ** (n - P.r)
        lam = rotation_eigenvalue(ROT)

        def lam_pow(x):
            return lam ** x if x >= 0 else lam.inverse() ** (-x)

        for _ in range(60):
            terms = {}
            for _ in range(rnd.randint(1, 4)):
                terms[(rnd.randint(-2, 2), rnd.randint(-2, 2))] = rnd.randint(-3, 3)
            Q0 = LaurentPoly(2, terms)
            gen = rnd.choice([[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, -1]])
            if vanishes_on_subtorus(Q0, Lattice.from_generators([gen])):
                for k in range(-30, 31):
                    xs = (k * gen[0], k * gen[1])
                    if max(map(abs, xs)) <= 30:
                        assert not Q0.evaluate([lam_pow(xs[0]), lam_pow(xs[1])])


# -- 9 ---------------------------------------------------------------------

def test_criterion_9_kronecker():
    with criterion(9, "Kronecker density", 10):
        bits = 96
        with mpmath.workdps(60):
            theta = mpmath.atan2(3, 4) / (2 * mpmath.pi)
            T = int(mpmath.floor(theta * 2 ** bits))
        mask = (1 << bits) - 1
        fr = sorted(((n * T) & mask) / 2 ** bits for n in range(1, 10 ** 5 + 1))
        rnd = random.Random(9)
        for _ in range(100):
            t = rnd.random()
            i = bisect.bisect_left(fr, t)
            near = [fr[j] for j in (i - 1, i) if 0 <= j < len(fr)] + [fr[0] + 1, fr[-1] - 1]
            assert min(abs(t - f) for f in near) < 1e-3
