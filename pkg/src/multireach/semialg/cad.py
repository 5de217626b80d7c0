"""Emptiness of bivariate sign systems by projection and lifting.

Projection: leading coefficients, discriminants and pairwise resultants (in y)
of the irreducible factors of all constraint polynomials.  Their real roots cut
the x-axis into cells.  Lifting: one rational sample per open cell, plus the
algebraic roots themselves when equations are present; over every sample the
fibre constraints are univariate and are decided with Sturm sequences.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .. import _symbridge
from ..numeric import upoly
from ..numeric.numberfield import NumberField, kp_gcd, kp_isolate, kp_refine, kp_trim
from ..numeric.realalg import RealAlgebraic, real_roots
from ..poly import MPoly
from .points import FieldPoint, RationalPoint, TowerPoint
from .sets import SemiAlgebraicSet2D, SignSystem


class EmptinessResult(tuple):
    """(empty: bool, witness or None) with attribute access."""

    def __new__(cls, empty, witness):
        return super().__new__(cls, (empty, witness))

    @property
    def empty(self):
        return self[0]

    @property
    def witness(self):
        return self[1]

    def __bool__(self):
        return self[0]


def is_empty(S: SemiAlgebraicSet2D) -> EmptinessResult:
    """True iff no real point satisfies any disjunct.  When False, the witness
    is an exact point that has been re-checked against the disjunct."""
    for d in S.disjuncts:
        w = find_point(d)
        if w is not None:
            if not d.member(w):
                raise AssertionError(f"witness re-verification failed for {d}")
            return EmptinessResult(False, w)
    return EmptinessResult(True, None)


def find_point(system: SignSystem):
    return _solve(list(system.eqs), list(system.strict))


# ---------------------------------------------------------------------------

def _solve(eqs: list[MPoly], gts: list[MPoly]):
    eqs = [e.primitive() for e in eqs]
    gts = [g.primitive() for g in gts]
    for e in eqs:
        if e.is_constant():
            return None  # nonzero constant (zero polys are rejected upstream)
    kept = []
    for g in gts:
        if g.is_constant():
            if g.constant_term() <= 0:
                return None
            continue
        kept.append(g)
    gts = kept
    if not eqs and not gts:
        return RationalPoint(0, 0)
    for e in eqs:
        if e.total_degree() == 1:
            return _solve_on_line(e, eqs, gts)
    return _solve_general(eqs, gts)


# -- linear equation fast path ----------------------------------------------

def _solve_on_line(line: MPoly, eqs, gts):
    a = Fraction(line.terms.get((1, 0), 0))
    b = Fraction(line.terms.get((0, 1), 0))
    c = Fraction(line.terms.get((0, 0), 0))
    t = MPoly.var(1, 0, Fraction(1))
    if b != 0:
        xs, ys = t, t * (-a / b) + (-c / b)
    else:
        xs, ys = MPoly.const(1, -c / a), t
    others_eq = [e.substitute([xs, ys]).univariate(0) for e in eqs if e is not line]
    others_gt = [g.substitute([xs, ys]).univariate(0) for g in gts]
    root = _solve_univariate(others_eq, others_gt)
    if root is None:
        return None
    xpoly, ypoly = xs.univariate(0), ys.univariate(0)
    if root.is_rational():
        r = root.to_fraction()
        return RationalPoint(upoly.evaluate(xpoly, r), upoly.evaluate(ypoly, r))
    K = NumberField(root)
    return FieldPoint(K, K.element(xpoly), K.element(ypoly))


def _solve_univariate(eqs, gts):
    """A real number satisfying all eqs (=0) and gts (>0), as a RealAlgebraic."""
    eqs = [upoly.trim(e) for e in eqs]
    gts = [upoly.trim(g) for g in gts]
    if any(not g for g in gts):
        return None  # 0 > 0
    nz = [e for e in eqs if e]
    if any(upoly.degree(e) == 0 for e in nz):
        return None
    if nz:
        g = nz[0]
        for e in nz[1:]:
            g = upoly.gcd_poly(g, e)
            if upoly.degree(g) == 0:
                return None
        for r in real_roots(g):
            if all(r.sign_of(q) > 0 for q in gts):
                return r
        return None
    for q in _rational_samples([g for g in gts if upoly.degree(g) >= 1]):
        if all(upoly.sign(upoly.evaluate(g, q)) > 0 for g in gts):
            return RealAlgebraic.rational(q)
    return None


def _rational_samples(polys) -> list[Fraction]:
    roots = []
    for p in polys:
        roots.extend(real_roots(p))
    roots = _sorted_distinct(roots)
    return _cell_samples(roots)


def _sorted_distinct(roots: list[RealAlgebraic]) -> list[RealAlgebraic]:
    roots = sorted(roots)
    out: list[RealAlgebraic] = []
    for r in roots:
        if not out or out[-1] != r:
            out.append(r)
    return out


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """A rational with small denominator strictly between lo < hi."""
    from math import floor

    if lo >= hi:
        raise ValueError("empty interval")
    # try integers, then halves, quarters ... (bounded search; midpoint fallback)
    den = 1
    while den <= 1 << 40:
        k = floor(lo * den) + 1
        cand = Fraction(k, den)
        if lo < cand < hi:
            # prefer the candidate closest to zero among the first hits
            if lo < 0 < hi:
                return Fraction(0)
            return cand
        den *= 2
    return (lo + hi) / 2


def _cell_samples(roots: list[RealAlgebraic]) -> list[Fraction]:
    """One rational per open cell of the real line cut at the given (sorted,
    distinct) roots."""
    if not roots:
        return [Fraction(0)]
    out = [_below(roots[0])]
    for a, b in zip(roots, roots[1:]):
        while True:
            lo, hi = a.hi, b.lo
            if lo < hi:
                out.append(simplest_between(lo, hi))
                break
            if lo == hi and not a.is_rational() and not b.is_rational():
                out.append(lo)  # an isolating endpoint is never a root
                break
            a.bisect()
            b.bisect()
    out.append(_above(roots[-1]))
    return out


def _below(r: RealAlgebraic) -> Fraction:
    from math import floor

    return Fraction(floor(r.lo) - 1)


def _above(r: RealAlgebraic) -> Fraction:
    from math import ceil

    return Fraction(ceil(r.hi) + 1)


# -- general projection and lifting ------------------------------------------

def _to_dict(p: MPoly) -> dict:
    return {e: int(c) for e, c in p.terms.items()}


def _from_dict(d: dict) -> MPoly:
    return MPoly(2, {tuple(e): Fraction(c) for e, c in d.items()})


@lru_cache(maxsize=4096)
def _factors_cached(key) -> tuple:
    terms = dict(key)
    return tuple(tuple(sorted(f.items())) for f in _symbridge.factor_multivariate(terms, 2))


def irreducible_factors(p: MPoly) -> list[MPoly]:
    key = tuple(sorted(_to_dict(p).items()))
    return [_from_dict(dict(f)) for f in _factors_cached(key)]


@lru_cache(maxsize=8192)
def _resultant_cached(fkey, gkey) -> tuple:
    r = _symbridge.resultant(dict(fkey), dict(gkey), 2, 1)
    return tuple(sorted(r.items()))


def resultant_y(f: MPoly, g: MPoly) -> list[Fraction]:
    """Res_y(f, g) as a univariate polynomial in x (low-to-high)."""
    fk = tuple(sorted(_to_dict(f).items()))
    gk = tuple(sorted(_to_dict(g).items()))
    if gk < fk:
        fk, gk = gk, fk
    r = dict(_resultant_cached(fk, gk))
    deg = max((e[0] for e in r), default=-1)
    out = [Fraction(0)] * (deg + 1)
    for e, c in r.items():
        out[e[0]] += c
    return upoly.trim(out)


def projection(polys: list[MPoly]) -> list[list[Fraction]]:
    factors: list[MPoly] = []
    for p in polys:
        for f in irreducible_factors(p):
            if f not in factors:
                factors.append(f)
    proj = []
    ydeg = [f for f in factors if f.degree_in(1) >= 1]
    for f in factors:
        if f.degree_in(1) == 0:
            proj.append(f.univariate(0))
    for f in ydeg:
        lc = f.coefficients_in(1)[-1]
        if not lc.is_constant():
            proj.append(lc.univariate(0))
        if f.degree_in(1) >= 2:
            proj.append(resultant_y(f, f.derivative(1)))
    for i in range(len(ydeg)):
        for j in range(i + 1, len(ydeg)):
            proj.append(resultant_y(ydeg[i], ydeg[j]))
    return [p for p in proj if upoly.degree(p) >= 1]


def _fiber_rational(p: MPoly, x0: Fraction) -> list[Fraction]:
    return upoly.trim([upoly.evaluate(c.univariate(0), x0) if c else Fraction(0)
                       for c in p.coefficients_in(1)])


def _solve_general(eqs: list[MPoly], gts: list[MPoly]):
    proj = projection(eqs + gts)
    roots = []
    for p in proj:
        roots.extend(real_roots(p))
    roots = _sorted_distinct(roots)
    for x0 in _cell_samples(roots):
        w = _lift_rational(x0, eqs, gts)
        if w is not None:
            return w
    if eqs:
        for alpha in roots:
            if alpha.is_rational():
                w = _lift_rational(alpha.to_fraction(), eqs, gts)
            else:
                w = _lift_algebraic(alpha, eqs, gts)
            if w is not None:
                return w
    return None


def _lift_rational(x0: Fraction, eqs, gts):
    efib = [_fiber_rational(e, x0) for e in eqs]
    gfib = [_fiber_rational(g, x0) for g in gts]
    root = _solve_univariate(efib, gfib)
    if root is None:
        return None
    if root.is_rational():
        return RationalPoint(x0, root.to_fraction())
    K = NumberField(root)
    return FieldPoint(K, K.rational(x0), K.gen())


def _fiber_field(p: MPoly, K: NumberField):
    a = K.gen()
    out = []
    for c in p.coefficients_in(1):
        v = K.zero()
        for e, coef in c.terms.items():
            v = v + (a ** e[0]) * coef
        out.append(v)
    return kp_trim(out)


def _lift_algebraic(alpha: RealAlgebraic, eqs, gts):
    K = NumberField(alpha)
    efib = [_fiber_field(e, K) for e in eqs]
    gfib = [_fiber_field(g, K) for g in gts]
    if any(not g for g in gfib):
        return None
    nz = [e for e in efib if e]
    if any(len(e) == 1 for e in nz):
        return None
    xg = K.gen()
    if nz:
        G = nz[0]
        for e in nz[1:]:
            G = kp_gcd(G, e)
            if len(G) <= 1:
                return None
        sf, ivs = kp_isolate(G)
        for lo, hi in ivs:
            if lo == hi:
                pt = FieldPoint(K, xg, K.rational(lo))
            elif len(sf) == 2:
                pt = FieldPoint(K, xg, -sf[0] / sf[1])
            else:
                pt = TowerPoint(K, xg, sf, lo, hi)
            if all(pt.sign(g) > 0 for g in gts):
                return pt
        return None
    # equations vanish identically on this vertical line: sample y between the
    # roots of the product of the strict fibres (one squarefree isolation, so
    # the intervals are disjoint)
    prod = [K.one()]
    for g in gfib:
        if len(g) >= 2:
            prod = _kp_mul(prod, g)
    ys = [Fraction(0)]
    if len(prod) >= 2:
        sf, ivs = kp_isolate(prod)
        ys = _interval_cell_samples(sf, ivs)
    for y0 in ys:
        pt = FieldPoint(K, xg, K.rational(y0))
        if all(pt.sign(g) > 0 for g in gts):
            return pt
    return None


def _kp_mul(p, q):
    K = p[0].field
    out = [K.zero()] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return kp_trim(out)


def _interval_cell_samples(sf, ivs) -> list[Fraction]:
    """Rational samples in every open cell between the disjoint isolating
    intervals of the roots of sf (refined where two cells would touch)."""
    if not ivs:
        return [Fraction(0)]
    ivs = [list(iv) for iv in ivs]
    out = [ivs[0][0] - 1]
    for a, b in zip(ivs, ivs[1:]):
        while True:
            lo, hi = a[1], b[0]
            if lo < hi:
                out.append(simplest_between(lo, hi))
                break
            if lo == hi and a[0] != a[1] and b[0] != b[1]:
                out.append(lo)
                break
            a[0], a[1] = kp_refine(sf, a[0], a[1], (a[1] - a[0]) / 2)
            b[0], b[1] = kp_refine(sf, b[0], b[1], (b[1] - b[0]) / 2)
    out.append(ivs[-1][1] + 1)
    return out
