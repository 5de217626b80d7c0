"""Absolute logarithmic Weil height of quadratic numbers via Mahler measure."""
from __future__ import annotations

from fractions import Fraction

from .logs import LogInterval, certified_log, certified_log_quadratic
from .quadratic import QuadraticNumber


def mahler_measure(x: QuadraticNumber) -> QuadraticNumber:
    """Mahler measure of the minimal polynomial of x, as an exact real quadratic number."""
    if not x:
        raise ValueError("zero has no height")
    mp = x.minpoly()
    if len(mp) == 2:
        c0, c1 = mp
        return QuadraticNumber(max(abs(c0), abs(c1)))
    c0, c1, c2 = mp
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        # conjugate pair, |r|^2 = c0/c2
        return QuadraticNumber(max(c0, c2))
    # real conjugates r = (-c1 +- sqrt(disc)) / (2 c2)
    r1 = QuadraticNumber(Fraction(-c1, 2 * c2), Fraction(1, 2 * c2), disc)
    r2 = r1.conjugate()
    measure = QuadraticNumber(abs(c2))
    for r in (r1, r2):
        ar = r if r.sign() >= 0 else -r
        if ar > 1:
            measure = measure * ar
    return measure


def weil_height(x: QuadraticNumber, precision=Fraction(1, 10**12)) -> LogInterval:
    """h(x) = ln(Mahler measure) / deg, as a certified interval."""
    x = QuadraticNumber.coerce(x)
    if not x:
        raise ValueError("zero has no height")
    deg = len(x.minpoly()) - 1
    m = mahler_measure(x)
    iv = certified_log_quadratic(m, Fraction(precision) * deg)
    return iv.scale(Fraction(1, deg))


def height_rational_tuple(values) -> LogInterval:
    """Height of a projective-style affine tuple of rationals: sum over places of
    max log+ |z_j|; for rationals this is ln(max(|num_j|, den)) with a common
    denominator."""
    from math import gcd, lcm

    vals = [Fraction(v) for v in values]
    den = 1
    for v in vals:
        den = lcm(den, v.denominator)
    nums = [int(v * den) for v in vals]
    g = den
    for n in nums:
        g = gcd(g, n)
    top = max([den // g] + [abs(n) // g for n in nums])
    return certified_log(top)
