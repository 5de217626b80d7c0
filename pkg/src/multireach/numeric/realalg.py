"""Real algebraic numbers given by a squarefree integer polynomial and an
isolating rational interval."""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering

from . import upoly


def interval_eval(p, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Enclosure of {p(t) : lo <= t <= hi} by interval Horner."""
    a = b = Fraction(0)
    for c in reversed(p):
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


def _irreducible_factors(p):
    from .._symbridge import factor_univariate

    return factor_univariate(p)


@total_ordering
class RealAlgebraic:
    """A real root of `poly` (primitive, squarefree, integer coefficients, low-to-high).

    The isolating interval is (lo, hi) open with poly(lo)*poly(hi) < 0, or lo == hi
    for a rational number.  Refinement narrows the interval in place; the number
    represented never changes.
    """

    __slots__ = ("poly", "lo", "hi", "_qpoly")

    def __init__(self, poly, lo, hi):
        self.poly = list(poly)
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        self._qpoly = upoly.from_ints(self.poly)
        if self.lo > self.hi:
            raise ValueError("empty isolating interval")
        if len(self.poly) == 2:
            self.lo = self.hi = Fraction(-self.poly[0], self.poly[1])

    @classmethod
    def rational(cls, q) -> "RealAlgebraic":
        q = Fraction(q)
        return cls([-q.numerator, q.denominator], q, q)

    # -- basic views ----------------------------------------------------
    def is_rational(self) -> bool:
        return self.lo == self.hi

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("irrational real algebraic number")
        return self.lo

    def degree(self) -> int:
        return len(self.poly) - 1

    def interval(self) -> tuple[Fraction, Fraction]:
        return self.lo, self.hi

    def refine(self, width) -> "RealAlgebraic":
        lo, hi = upoly.refine(self._qpoly, self.lo, self.hi, Fraction(width))
        self.lo, self.hi = lo, hi
        if lo == hi:
            self.poly = [-lo.numerator, lo.denominator]
            self._qpoly = upoly.from_ints(self.poly)
        return self

    def bisect(self) -> "RealAlgebraic":
        if not self.is_rational():
            self.refine((self.hi - self.lo) / 2)
        return self

    def __float__(self):
        if self.is_rational():
            return float(self.lo)
        self.refine(Fraction(1, 2**60) * max(1, abs(self.lo)))
        return float((self.lo + self.hi) / 2)

    def approx(self, digits: int = 30) -> Fraction:
        self.refine(Fraction(1, 10 ** (digits + 2)))
        return (self.lo + self.hi) / 2

    # -- exact predicates -------------------------------------------------
    def sign_of(self, q) -> int:
        """Exact sign of the rational polynomial q (low-to-high) at this number."""
        q = upoly.trim(q)
        if not q:
            return 0
        if self.is_rational():
            return upoly.sign(upoly.evaluate(q, self.lo))
        g = upoly.gcd_poly(q, self._qpoly)
        if upoly.degree(g) >= 1 and self._contains_root_of(g):
            return 0
        while True:
            a, b = interval_eval(q, self.lo, self.hi)
            if a > 0:
                return 1
            if b < 0:
                return -1
            self.bisect()
            if self.is_rational():
                return upoly.sign(upoly.evaluate(q, self.lo))

    def _contains_root_of(self, g) -> bool:
        # g divides poly, so any root of g inside the open interval is this number
        seq = upoly.sturm_sequence(upoly.squarefree(g))
        n = upoly.count_roots(seq, self.lo, self.hi)
        if upoly.evaluate(g, self.hi) == 0:
            n -= 1
        return n > 0

    def _cmp(self, other) -> int:
        if not isinstance(other, RealAlgebraic):
            other = RealAlgebraic.rational(other)
        if self.is_rational() and other.is_rational():
            return upoly.sign(self.lo - other.lo)
        if self.is_rational():
            return -other._cmp(self)
        if other.is_rational():
            s = self.sign_of(upoly.sub([Fraction(0), Fraction(1)], [other.lo]))
            return s
        # both irrational: equal iff a common factor has a root in both intervals
        g = upoly.gcd_poly(self._qpoly, other._qpoly)
        if upoly.degree(g) >= 1:
            lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
            if lo < hi:
                seq = upoly.sturm_sequence(g)
                n = upoly.count_roots(seq, lo, hi)
                if upoly.evaluate(g, hi) == 0:
                    n -= 1
                if n > 0:
                    return 0
        while True:
            if self.hi <= other.lo:
                return -1
            if other.hi <= self.lo:
                return 1
            self.bisect()
            other.bisect()
            if self.is_rational() or other.is_rational():
                return self._cmp(other)

    def __eq__(self, other):
        if not isinstance(other, (RealAlgebraic, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        if not isinstance(other, (RealAlgebraic, int, Fraction)):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        if self.is_rational():
            return hash(self.lo)
        return hash(tuple(self.poly))

    def sign(self) -> int:
        return self._cmp(0)

    def sqrt(self) -> "RealAlgebraic":
        """Nonnegative square root of a nonnegative real algebraic number."""
        s = self.sign()
        if s < 0:
            raise ValueError("sqrt of a negative number")
        if s == 0:
            return RealAlgebraic.rational(0)
        if self.is_rational():
            q = self.lo
            from .quadratic import isqrt_exact

            rn, rd = isqrt_exact(q.numerator), isqrt_exact(q.denominator)
            if rn is not None and rd is not None:
                return RealAlgebraic.rational(Fraction(rn, rd))
        # poly(t^2) has +sqrt(value) as a root; keep refining until exactly one
        # positive root of it squares into our isolating interval
        sq = [Fraction(0)] * (2 * len(self._qpoly) - 1)
        for i, c in enumerate(self._qpoly):
            sq[2 * i] = c
        candidates = [r for r in real_roots(sq) if r.sign() > 0]
        while True:
            hits = []
            for r in candidates:
                lo = max(r.lo, Fraction(0))
                if not (r.hi * r.hi < self.lo or lo * lo > self.hi):
                    hits.append(r)
            if len(hits) == 1:
                return hits[0]
            if not hits:
                raise AssertionError("square root not located")
            for r in hits:
                r.bisect()
            self.bisect()

    def __repr__(self):
        if self.is_rational():
            return f"RealAlgebraic({self.lo})"
        return f"RealAlgebraic(poly={self.poly}, in ({self.lo}, {self.hi}))"

    def __str__(self):
        if self.is_rational():
            return str(self.lo)
        return f"root of {upoly.to_str(self._qpoly)} in ({self.lo}, {self.hi}) ~ {float(self):.12g}"

    def to_json(self):
        if self.is_rational():
            return {"rational": str(self.lo)}
        return {"poly": list(self.poly), "interval": [str(self.lo), str(self.hi)], "approx": f"{float(self):.15g}"}


def isolate_real_roots(p) -> list[RealAlgebraic]:
    """All real roots of a nonzero polynomial (integer or rational coefficients,
    low-to-high), increasing.  Sturm-based; the defining polynomial is the
    squarefree part made primitive."""
    q = upoly.trim(p)
    if not q:
        raise ValueError("zero polynomial")
    sf = upoly.squarefree(q)
    ints = upoly.primitive_int(sf)
    out = []
    for lo, hi in upoly.isolate_intervals(sf):
        if lo == hi:
            out.append(RealAlgebraic.rational(lo))
        else:
            out.append(RealAlgebraic(ints, lo, hi))
    return out


def real_roots(p) -> list[RealAlgebraic]:
    """Real roots with irreducible defining polynomials (factorisation via sympy)."""
    q = upoly.trim(p)
    if not q:
        raise ValueError("zero polynomial")
    out = []
    for f in _irreducible_factors(q):
        out.extend(isolate_real_roots(f))
    out.sort()
    # distinct irreducible factors share no roots, so no dedupe needed
    return out
