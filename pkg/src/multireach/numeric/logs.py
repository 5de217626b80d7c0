"""Certified enclosures of natural logarithms with rational endpoints."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from .quadratic import QuadraticNumber


@dataclass(frozen=True)
class LogInterval:
    lo: Fraction
    hi: Fraction
    precision: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("inverted log interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def overlaps(self, other: "LogInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def scale(self, k) -> "LogInterval":
        k = Fraction(k)
        a, b = self.lo * k, self.hi * k
        return LogInterval(min(a, b), max(a, b), self.precision * abs(k))

    def __add__(self, other: "LogInterval") -> "LogInterval":
        return LogInterval(self.lo + other.lo, self.hi + other.hi, self.precision + other.precision)

    def __neg__(self):
        return LogInterval(-self.hi, -self.lo, self.precision)

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self):
        return float(self.mid())


def _atanh_enclosure(t: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    """Enclose atanh(t) for 0 <= t < 1 with width <= eps (partial sums of the
    odd power series plus a geometric tail bound)."""
    if t == 0:
        return Fraction(0), Fraction(0)
    t2 = t * t
    total = Fraction(0)
    power = t
    k = 0
    while True:
        total += power / (2 * k + 1)
        power *= t2
        k += 1
        # tail: sum_{j>=k} t^(2j+1)/(2j+1) <= t^(2k+1) / ((2k+1)(1 - t^2))
        tail = power / ((2 * k + 1) * (1 - t2))
        if tail <= eps:
            return total, total + tail


def _ln2(eps: Fraction) -> tuple[Fraction, Fraction]:
    a, b = _atanh_enclosure(Fraction(1, 3), eps / 2)
    return 2 * a, 2 * b


def certified_log(x, precision=Fraction(1, 10**12)) -> LogInterval:
    """Interval of width <= precision containing ln x, for rational x > 0."""
    x = Fraction(x)
    precision = Fraction(precision)
    if x <= 0:
        raise ValueError("log of a nonpositive number")
    if x == 1:
        return LogInterval(Fraction(0), Fraction(0), precision)
    # x = 2^k * y with y in [2/3, 4/3]
    k = 0
    y = x
    while y > Fraction(4, 3):
        y /= 2
        k += 1
    while y < Fraction(2, 3):
        y *= 2
        k -= 1
    budget = precision / (2 * (abs(k) + 1))
    t = (y - 1) / (y + 1)
    a, b = _atanh_enclosure(abs(t), budget / 2)
    if t < 0:
        a, b = -b, -a
    lo, hi = 2 * a, 2 * b
    if k:
        l2lo, l2hi = _ln2(budget / max(1, abs(k)))
        if k > 0:
            lo, hi = lo + k * l2lo, hi + k * l2hi
        else:
            lo, hi = lo + k * l2hi, hi + k * l2lo
    return LogInterval(lo, hi, precision)


def rational_bracket(q: QuadraticNumber, width: Fraction) -> tuple[Fraction, Fraction]:
    """Rational lo <= q <= hi with hi - lo <= width, for real q."""
    if q.b == 0:
        return q.a, q.a
    # bracket sqrt(d) by integer-scaled isqrt, tightening until wide enough
    from math import isqrt

    scale = 1
    while True:
        r = isqrt(q.d * scale * scale)
        s_lo, s_hi = Fraction(r, scale), Fraction(r + 1, scale)
        a, b = q.a + q.b * s_lo, q.a + q.b * s_hi
        lo, hi = min(a, b), max(a, b)
        if hi - lo <= width:
            return lo, hi
        scale *= 1 << 20


def certified_log_quadratic(q: QuadraticNumber, precision=Fraction(1, 10**12)) -> LogInterval:
    """ln q for a positive real quadratic number q."""
    precision = Fraction(precision)
    if q.b == 0:
        return certified_log(q.a, precision)
    if q.sign() <= 0:
        raise ValueError("log of a nonpositive number")
    w = precision / 4
    while True:
        lo, hi = rational_bracket(q, w)
        if lo > 0:
            a = certified_log(lo, precision / 4)
            b = certified_log(hi, precision / 4)
            if b.hi - a.lo <= precision:
                return LogInterval(a.lo, b.hi, precision)
        w /= 16


def certified_ceil_ratio(b, h_of_precision, start=Fraction(1, 10**6)) -> int:
    """ceil(b / h) for a positive irrational-ish quantity h given by a function
    precision -> LogInterval; refines until both interval ends agree."""
    b = Fraction(b)
    prec = Fraction(start)
    for _ in range(200):
        iv = h_of_precision(prec)
        if iv.lo > 0:
            c1 = ceil(b / iv.hi)
            c2 = ceil(b / iv.lo)
            if c1 == c2:
                return c1
            # b/h is an integer exactly only if h is rational; accept the safe side
            if iv.width == 0:
                return c2
        prec /= 1024
    raise ArithmeticError("ceil(b/h) undecided after refinement")


def floor_log_ratio(x, base) -> int:
    """floor(ln x / ln base) certified, for rationals x > 0 and base > 1."""
    x, base = Fraction(x), Fraction(base)
    prec = Fraction(1, 10**8)
    for _ in range(100):
        a, b = certified_log(x, prec), certified_log(base, prec)
        f1, f2 = floor(a.lo / b.hi), floor(a.hi / b.lo)
        if f1 == f2:
            return f1
        prec /= 1024
    raise ArithmeticError("floor(log ratio) undecided")
