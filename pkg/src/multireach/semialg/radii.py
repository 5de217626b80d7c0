"""Radial structure of plane semialgebraic sets.

For a positive definite integer quadratic form Q (default x^2 + y^2) we find
the finitely many critical levels of Q on a sign system: Lagrange points on
each boundary curve, pairwise curve intersections, radial curve components and
the origin.  Between consecutive critical levels, whether the level curve
{Q = s} meets the set does not change, so one rational sample level per open
cell decides it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .. import _symbridge
from ..numeric import upoly
from ..numeric.realalg import RealAlgebraic, real_roots
from ..poly import MPoly
from .cad import find_point, irreducible_factors, simplest_between, _sorted_distinct
from .sets import SemiAlgebraicSet2D, SignSystem, poly2

_X = MPoly.var(2, 0, 1)
_Y = MPoly.var(2, 1, 1)
EUCLIDEAN = _X * _X + _Y * _Y


def _dict3(p: MPoly) -> dict:
    """Embed a poly in (x, y) into (x, y, s)."""
    return {(e[0], e[1], 0): int(c) for e, c in p.terms.items()}


def _level_poly(Q: MPoly) -> dict:
    d = _dict3(Q)
    d[(0, 0, 1)] = d.get((0, 0, 1), 0) - 1
    return d


def _s_poly(d: dict) -> list[Fraction]:
    deg = max((e[2] for e in d), default=-1)
    out = [Fraction(0)] * (deg + 1)
    for e, c in d.items():
        if e[0] or e[1]:
            raise AssertionError("elimination left x or y behind")
        out[e[2]] += c
    return upoly.trim(out)


def is_radial(f: MPoly, Q: MPoly) -> bool:
    """f is constant on every level set of Q (f = phi(Q))."""
    jac = f.derivative(0) * Q.derivative(1) - f.derivative(1) * Q.derivative(0)
    return jac.is_zero()


@lru_cache(maxsize=2048)
def _critical_single(fkey, Qkey) -> tuple:
    f = MPoly(2, dict(fkey))
    Q = MPoly(2, dict(Qkey))
    polys = []
    if is_radial(f, Q):
        # levels carried by f: Res_y(f, Q - s) vanishes in x identically; use the
        # restriction to the x-axis instead
        fx = {(e[0], 0, 0): int(c) for e, c in f.terms.items() if e[1] == 0}
        Qx = {(e[0], 0, 0): int(c) for e, c in Q.terms.items() if e[1] == 0}
        Qx[(0, 0, 1)] = -1
        if fx:
            polys.append(_s_poly(_symbridge.resultant(fx, Qx, 3, 0)))
        return tuple(tuple(p) for p in polys)
    lag = f.derivative(0) * Q.derivative(1) - f.derivative(1) * Q.derivative(0)
    if f.degree_in(1) == 0:
        # f(x) = 0 is a union of vertical lines; Lagrange points lie where
        # Q_y = 0 on them, i.e. Res_y(Q - s, Q_y) restricted to roots of f
        A = _symbridge.resultant(_level_poly(Q), _dict3(Q.derivative(1)), 3, 1)
        polys.append(_s_poly(_symbridge.resultant(A, _dict3(f), 3, 0)))
        return tuple(tuple(p) for p in polys)
    A = _symbridge.resultant(_dict3(f), _level_poly(Q), 3, 1)
    R1 = _symbridge.resultant(_dict3(f), _dict3(lag), 3, 1)
    if not R1:
        raise AssertionError("Lagrange system degenerate on a non-radial curve")
    if any(e[0] for e in R1):
        res = _symbridge.resultant(A, R1, 3, 0)
        if not res:
            raise AssertionError("critical level eliminant vanished identically")
        polys.append(_s_poly(res))
    return tuple(tuple(p) for p in polys)


@lru_cache(maxsize=4096)
def _critical_pair(fkey, gkey, Qkey) -> tuple:
    f = MPoly(2, dict(fkey))
    g = MPoly(2, dict(gkey))
    Q = MPoly(2, dict(Qkey))
    if f.degree_in(1) == 0 and g.degree_in(1) == 0:
        return ()
    if f.degree_in(1) == 0:
        f, g = g, f
    A = _symbridge.resultant(_dict3(f), _level_poly(Q), 3, 1)
    if g.degree_in(1) == 0:
        R = _dict3(g)
    else:
        R = _symbridge.resultant(_dict3(f), _dict3(g), 3, 1)
    if not R or not any(e[0] for e in R):
        return ()
    res = _symbridge.resultant(A, R, 3, 0)
    if not res:
        raise AssertionError("intersection level eliminant vanished identically")
    return (tuple(_s_poly(res)),)


def _key(p: MPoly):
    return tuple(sorted((e, int(c)) for e, c in p.terms.items()))


def critical_levels(polys, Q: MPoly = EUCLIDEAN) -> list[RealAlgebraic]:
    """Sorted distinct nonnegative levels s at which {Q = s} can change how it
    meets the sets defined by sign conditions on `polys`."""
    Q = poly2(Q)
    factors: list[MPoly] = []
    for p in polys:
        for f in irreducible_factors(poly2(p)):
            if f not in factors:
                factors.append(f)
    spolys: list[list[Fraction]] = []
    for f in factors:
        spolys.extend(list(p) for p in _critical_single(_key(f), _key(Q)))
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            spolys.extend(list(p) for p in _critical_pair(_key(factors[i]), _key(factors[j]), _key(Q)))
    levels = [RealAlgebraic.rational(0)]
    for p in spolys:
        if upoly.degree(p) >= 1:
            levels.extend(r for r in real_roots(p) if r.sign() > 0)
    return _sorted_distinct(levels)


def level_nonempty(system: SignSystem, s: RealAlgebraic, Q: MPoly = EUCLIDEAN):
    """A point of system on {Q = s}, or None."""
    Q = poly2(Q)
    if s.is_rational():
        v = s.to_fraction()
        eq = (Q - v).primitive()
        return find_point(SignSystem(system.eqs + [eq], system.strict))
    m = s.poly
    mq = MPoly(2)
    for k, c in enumerate(m):
        if c:
            mq = mq + (Q ** k) * c
    lo_c = (Q - s.lo).primitive()
    hi_c = (MPoly.const(2, s.hi) - Q).primitive()
    return find_point(SignSystem(system.eqs + [mq], system.strict + [lo_c, hi_c]))


@dataclass
class RadialProfile:
    """Which levels of Q a sign system meets.

    crit: sorted critical levels (crit[0] = 0); open_ok[i] tells whether the
    open cell (crit[i], crit[i+1]) (the last one unbounded) meets the set.
    Point cells are evaluated lazily.
    """

    system: SignSystem
    Q: MPoly
    crit: list
    open_ok: list
    _points: dict = field(default_factory=dict)

    def point_ok(self, i: int) -> bool:
        if i not in self._points:
            if self.system.is_open():
                # an open set meeting a level curve meets nearby levels too;
                # test the level itself only if a neighbouring cell is populated
                nb = self.open_ok[i] or (i > 0 and self.open_ok[i - 1])
                self._points[i] = nb and level_nonempty(self.system, self.crit[i], self.Q) is not None
            else:
                self._points[i] = level_nonempty(self.system, self.crit[i], self.Q) is not None
        return self._points[i]

    def locate(self, s: RealAlgebraic) -> tuple[str, int]:
        """('point', i) if s is crit[i], else ('open', i) for the containing cell."""
        for i, c in enumerate(self.crit):
            cmp = s._cmp(c)
            if cmp == 0:
                return "point", i
            if cmp < 0:
                return "open", i - 1
        return "open", len(self.crit) - 1

    def meets_level(self, s: RealAlgebraic) -> bool:
        kind, i = self.locate(s)
        if kind == "point":
            return self.point_ok(i)
        if i < 0:
            return False
        return self.open_ok[i]

    @property
    def unbounded(self) -> bool:
        return self.open_ok[-1]

    def nonempty(self) -> bool:
        return any(self.open_ok) or any(self.point_ok(i) for i in range(len(self.crit)))

    def sup_level(self):
        """sup {s : set meets {Q = s}} (None if empty, 'inf' if unbounded)."""
        if self.unbounded:
            return "inf"
        best = None
        for i in range(len(self.crit) - 1, -1, -1):
            if i < len(self.crit) - 1 and self.open_ok[i]:
                return self.crit[i + 1]
            if self.point_ok(i):
                return self.crit[i]
        return best

    def inf_level(self):
        for i in range(len(self.crit)):
            if self.point_ok(i):
                return self.crit[i]
            if self.open_ok[i]:
                return self.crit[i]
        return None


def _sample_level(lo: RealAlgebraic, hi) -> Fraction:
    if hi is None:
        from math import ceil

        return Fraction(ceil(lo.hi) + 1)
    while True:
        a, b = lo.hi, hi.lo
        if a < b:
            return simplest_between(a, b)
        if a == b and not lo.is_rational() and not hi.is_rational():
            return a
        lo.bisect()
        hi.bisect()


def radial_profile(system: SignSystem, Q: MPoly = EUCLIDEAN) -> RadialProfile:
    Q = poly2(Q)
    crit = critical_levels(system.polys(), Q)
    open_ok = []
    for i, c in enumerate(crit):
        nxt = crit[i + 1] if i + 1 < len(crit) else None
        s = _sample_level(c, nxt)
        open_ok.append(level_nonempty(system, RealAlgebraic.rational(s), Q) is not None)
    return RadialProfile(system, Q, crit, open_ok)


def radial_ranges(S: SemiAlgebraicSet2D, Q: MPoly = EUCLIDEAN) -> list[RadialProfile]:
    """One profile per disjunct."""
    return [radial_profile(d, Q) for d in S.disjuncts]


@dataclass
class Radii:
    bounded: bool
    radius: object        # RealAlgebraic, or the string "inf"
    distance: RealAlgebraic
    radius_sq: object
    distance_sq: RealAlgebraic

    def __repr__(self):
        r = "inf" if self.radius == "inf" else f"{float(self.radius):.12g}"
        return f"Radii(bounded={self.bounded}, radius={r}, distance={float(self.distance):.12g})"


def extremal_radii(S: SemiAlgebraicSet2D, Q: MPoly = EUCLIDEAN) -> Radii:
    """Radius (sup of Q-norms) and distance to the origin (inf of Q-norms).
    With the default form these are Euclidean; values are returned both as
    norms and as squared levels."""
    profiles = [p for p in radial_ranges(S, Q) if p.nonempty()]
    if not profiles:
        raise ValueError("extremal radii of the empty set")
    sups = [p.sup_level() for p in profiles]
    infs = [p.inf_level() for p in profiles]
    if "inf" in [s for s in sups if isinstance(s, str)]:
        radius_sq = "inf"
    else:
        radius_sq = max(sups)
    distance_sq = min(infs)
    radius = "inf" if radius_sq == "inf" else radius_sq.sqrt()
    return Radii(radius_sq != "inf", radius, distance_sq.sqrt(), radius_sq, distance_sq)


# ---------------------------------------------------------------------------
# Circle / arc test

def _radial_levels_of(f: MPoly, Q: MPoly) -> list[RealAlgebraic]:
    """Positive levels s with {Q = s} inside {f = 0} (radial factors of f)."""
    out = []
    for g in irreducible_factors(poly2(f)):
        if g.is_constant() or not is_radial(g, Q):
            continue
        for p in _critical_single(_key(g), _key(poly2(Q))):
            out.extend(r for r in real_roots(list(p)) if r.sign() > 0)
    return _sorted_distinct(out)


def _arc_levels_open(Td: SignSystem, S_profiles, Q) -> bool:
    Tp = radial_profile(Td, Q)
    levels = list(Tp.crit)
    for sp in S_profiles:
        levels.extend(sp.crit)
    levels = _sorted_distinct(levels)
    # open cells of the merged partition (positive levels only)
    for i, c in enumerate(levels):
        nxt = levels[i + 1] if i + 1 < len(levels) else None
        s = RealAlgebraic.rational(_sample_level(c, nxt))
        if Tp.meets_level(s) and any(sp.meets_level(s) for sp in S_profiles):
            return True
    # isolated levels: S may meet only single level curves (e.g. a circle)
    for c in levels:
        if c.sign() <= 0:
            continue
        if any(sp.meets_level(c) for sp in S_profiles) and Tp.meets_level(c):
            return True
    return False


def circle_arc_test(T: SemiAlgebraicSet2D, S: SemiAlgebraicSet2D, Q: MPoly = EUCLIDEAN) -> bool:
    """True iff some level curve {Q = s}, s > 0, meets S and contains an open
    arc inside T.  With the default Q these are origin-centred circles."""
    Q = poly2(Q)
    S_profiles = [p for p in radial_ranges(S, Q)]
    if not S_profiles:
        return False
    for Td in T.disjuncts:
        if Td.is_open():
            if _arc_levels_open(Td, S_profiles, Q):
                return True
            continue
        # an arc inside {E = 0} forces the level curve to be a component of
        # every equation: candidate levels are common radial levels
        cands = None
        for e in Td.eqs:
            lv = _radial_levels_of(e, Q)
            if cands is None:
                cands = lv
            else:
                cands = [c for c in cands if any(c == d for d in lv)]
        for c in cands or []:
            if not any(sp.meets_level(c) for sp in S_profiles):
                continue
            if not Td.strict:
                return True
            if level_nonempty(SignSystem([], Td.strict), c, Q) is not None:
                return True
    return False


def circle_arc_witness_level(T: SemiAlgebraicSet2D, S: SemiAlgebraicSet2D, Q: MPoly = EUCLIDEAN):
    """A level s (RealAlgebraic) certifying circle_arc_test, or None."""
    Q = poly2(Q)
    S_profiles = radial_ranges(S, Q)
    for Td in T.disjuncts:
        if Td.is_open():
            Tp = radial_profile(Td, Q)
            levels = list(Tp.crit)
            for sp in S_profiles:
                levels.extend(sp.crit)
            levels = _sorted_distinct(levels)
            for i, c in enumerate(levels):
                nxt = levels[i + 1] if i + 1 < len(levels) else None
                s = RealAlgebraic.rational(_sample_level(c, nxt))
                if Tp.meets_level(s) and any(sp.meets_level(s) for sp in S_profiles):
                    return s, Td
            for c in levels:
                if c.sign() > 0 and any(sp.meets_level(c) for sp in S_profiles) and Tp.meets_level(c):
                    return c, Td
            continue
        cands = None
        for e in Td.eqs:
            lv = _radial_levels_of(e, Q)
            cands = lv if cands is None else [c for c in cands if any(c == d for d in lv)]
        for c in cands or []:
            if any(sp.meets_level(c) for sp in S_profiles):
                if not Td.strict or level_nonempty(SignSystem([], Td.strict), c, Q) is not None:
                    return c, Td
    return None
