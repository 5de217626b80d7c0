"""Exact plane points produced by the emptiness engine.

Three shapes occur:
  * RationalPoint: both coordinates rational;
  * FieldPoint: both coordinates in one number field Q(alpha);
  * TowerPoint: x in Q(alpha) and y a root of a squarefree g in Q(alpha)[y]
    isolated by a rational interval.
Every shape supports exact sign evaluation of integer polynomials.
"""
from __future__ import annotations

from fractions import Fraction

from ..numeric import upoly
from ..numeric.numberfield import (FieldElement, NumberField, kp_count, kp_enclosure, kp_eval_rational,
                                   kp_gcd, kp_sturm, kp_trim)
from ..numeric.quadratic import QuadraticNumber
from ..poly import MPoly


def _fmt(v) -> str:
    return str(v)


class RationalPoint:
    kind = "rational"

    def __init__(self, x, y):
        self.x, self.y = Fraction(x), Fraction(y)

    def sign(self, f: MPoly) -> int:
        return upoly.sign(f.evaluate((self.x, self.y)))

    def times(self, A) -> "RationalPoint":
        return RationalPoint(self.x * A[0][0] + self.y * A[1][0], self.x * A[0][1] + self.y * A[1][1])

    def as_quadratic(self):
        return QuadraticNumber(self.x), QuadraticNumber(self.y)

    def approx(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def to_json(self):
        return {"kind": "rational", "x": _fmt(self.x), "y": _fmt(self.y)}

    def __repr__(self):
        return f"({self.x}, {self.y})"


class FieldPoint:
    kind = "field"

    def __init__(self, field: NumberField, x: FieldElement, y: FieldElement):
        self.field, self.x, self.y = field, x, y

    def sign(self, f: MPoly) -> int:
        v = f.evaluate((self.x, self.y))
        if isinstance(v, FieldElement):
            return v.sign()
        return upoly.sign(v)

    def times(self, A) -> "FieldPoint":
        return FieldPoint(self.field, self.x * A[0][0] + self.y * A[1][0], self.x * A[0][1] + self.y * A[1][1])

    def as_quadratic(self):
        """Coordinates as QuadraticNumbers when the field has degree <= 2, else None."""
        K = self.field
        if K.degree == 1:
            return QuadraticNumber(self.x.to_fraction()), QuadraticNumber(self.y.to_fraction())
        if K.degree != 2:
            return None
        c0, c1, c2 = K.modulus  # monic: alpha^2 + c1 alpha + c0
        disc = c1 * c1 - 4 * c0
        base = -c1 / 2
        # alpha = base +- sqrt(disc)/2; pick the sign that matches the isolating interval
        sgn = K.alpha.sign_of([-base, Fraction(1)])
        # sqrt(p/q) = sqrt(p*q)/q
        alpha = QuadraticNumber(base, Fraction(sgn, 2 * disc.denominator), disc.numerator * disc.denominator)

        def conv(e):
            acc = QuadraticNumber(0)
            for c in reversed(e.c):
                acc = acc * alpha + c
            return acc

        return conv(self.x), conv(self.y)

    def approx(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def to_json(self):
        a = self.field.alpha
        return {"kind": "field", "alpha": a.to_json(),
                "x": [str(c) for c in self.x.c], "y": [str(c) for c in self.y.c],
                "approx": [f"{v:.15g}" for v in self.approx()]}

    def __repr__(self):
        return f"FieldPoint(~{self.approx()})"


class TowerPoint:
    kind = "tower"

    def __init__(self, field: NumberField, x: FieldElement, g, lo: Fraction, hi: Fraction):
        self.field, self.x, self.g = field, x, g
        self.lo, self.hi = lo, hi
        self._seq = None

    def _fiber(self, f: MPoly):
        K = self.field
        coeffs = f.coefficients_in(1)
        out = []
        for cpoly in coeffs:
            v = K.zero()
            for e, c in cpoly.terms.items():
                v = v + (self.x ** e[0]) * c
            out.append(v)
        return kp_trim(out)

    def _bisect_y(self):
        mid = (self.lo + self.hi) / 2
        slo = kp_eval_rational(self.g, self.lo).sign()
        sm = kp_eval_rational(self.g, mid).sign()
        if sm == 0:
            self.lo = self.hi = mid
        elif sm == slo:
            self.lo = mid
        else:
            self.hi = mid

    def sign(self, f: MPoly) -> int:
        h = self._fiber(f)
        if not h:
            return 0
        if self.lo == self.hi:
            return kp_eval_rational(h, self.lo).sign()
        if len(h) > 1:
            g = kp_gcd(h, self.g)
            if len(g) > 1:
                seq = kp_sturm(g)
                n = kp_count(seq, self.lo, self.hi)
                if kp_eval_rational(g, self.hi).is_zero():
                    n -= 1
                if n > 0:
                    return 0
        while True:
            a, b = kp_enclosure(h, self.lo, self.hi)
            if a > 0:
                return 1
            if b < 0:
                return -1
            self._bisect_y()
            self.field.alpha.bisect()
            if self.lo == self.hi:
                return kp_eval_rational(h, self.lo).sign()

    def approx(self) -> tuple[float, float]:
        while self.hi - self.lo > Fraction(1, 2**50):
            self._bisect_y()
        return float(self.x), float((self.lo + self.hi) / 2)

    def to_json(self):
        return {"kind": "tower", "alpha": self.field.alpha.to_json(),
                "x": [str(c) for c in self.x.c],
                "g": [[str(c) for c in coeff.c] for coeff in self.g],
                "y_interval": [str(self.lo), str(self.hi)],
                "approx": [f"{v:.15g}" for v in self.approx()]}

    def __repr__(self):
        return f"TowerPoint(~{self.approx()})"


class QuadraticPoint:
    """A point with both coordinates in one real quadratic field."""

    kind = "quadratic"

    def __init__(self, x, y):
        self.x, self.y = QuadraticNumber.coerce(x), QuadraticNumber.coerce(y)
        if self.x.d != 1 and self.y.d != 1 and self.x.d != self.y.d:
            raise ValueError("coordinates in different quadratic fields")
        if not (self.x.is_real() and self.y.is_real()):
            raise ValueError("point coordinates must be real")

    def sign(self, f: MPoly) -> int:
        v = f.evaluate((self.x, self.y))
        return QuadraticNumber.coerce(v).sign()

    def times(self, A) -> "QuadraticPoint":
        return QuadraticPoint(self.x * A[0][0] + self.y * A[1][0], self.x * A[0][1] + self.y * A[1][1])

    def as_quadratic(self):
        return self.x, self.y

    def approx(self):
        return float(self.x), float(self.y)

    def to_json(self):
        def q(v):
            return {"a": str(v.a), "b": str(v.b), "d": v.d}

        return {"kind": "quadratic", "x": q(self.x), "y": q(self.y),
                "approx": [f"{v:.15g}" for v in self.approx()]}

    def __repr__(self):
        return f"({self.x}, {self.y})"


def as_point(p):
    """Coerce a pair of numbers or a point object into a point object."""
    if isinstance(p, (RationalPoint, FieldPoint, TowerPoint, QuadraticPoint)):
        return p
    x, y = p
    if isinstance(x, QuadraticNumber) or isinstance(y, QuadraticNumber):
        return QuadraticPoint(x, y)
    return RationalPoint(x, y)


def simplest(p):
    """Prefer the cheapest exact representation for orbit stepping."""
    if isinstance(p, FieldPoint):
        q = p.as_quadratic()
        if q is not None:
            if q[0].is_rational() and q[1].is_rational():
                return RationalPoint(q[0].a, q[1].a)
            return QuadraticPoint(*q)
    return p
