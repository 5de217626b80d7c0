"""Elements a + b*sqrt(d) of a quadratic extension of Q.

d = 1 (or b = 0) encodes a plain rational.  Eigenvalues of 2x2 rational
matrices always live in such a field, which is why the planar solvers can
stay exact without a general number-field type.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from sympy import factorint


def squarefree_part(n: int) -> tuple[int, int]:
    """Return (s, k) with n = s * k**2 and s squarefree (sign kept in s)."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    s, k = 1, 1
    for p, e in factorint(abs(n)).items():
        k *= p ** (e // 2)
        if e % 2:
            s *= p
    return sign * s, k


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


class QuadraticNumber:
    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a, b = _frac(a), _frac(b)
        if d == 0:
            raise ValueError("d must be nonzero")
        if d != 1:
            s, k = squarefree_part(d)
            b *= k
            d = s
        if d == 1:
            a, b = a + b, Fraction(0)
        if b == 0:
            d = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticNumber is immutable")

    @classmethod
    def sqrt(cls, n) -> "QuadraticNumber":
        """sqrt of a rational n (n may be negative: gives an imaginary element)."""
        n = _frac(n)
        if n == 0:
            return cls(0)
        num, den = n.numerator * n.denominator, n.denominator
        s, k = squarefree_part(num)
        return cls(0, Fraction(k, den), s)

    # -- coercion -----------------------------------------------------
    def _field(self, other: "QuadraticNumber") -> int:
        if self.d == other.d or other.d == 1:
            return self.d
        if self.d == 1:
            return other.d
        raise ValueError(f"mixed quadratic fields: sqrt({self.d}) vs sqrt({other.d})")

    @staticmethod
    def coerce(v) -> "QuadraticNumber":
        if isinstance(v, QuadraticNumber):
            return v
        if isinstance(v, (int, Fraction)):
            return QuadraticNumber(v)
        raise TypeError(f"cannot coerce {type(v).__name__} to QuadraticNumber")

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._field(o)
        return QuadraticNumber(self.a + o.a, self.b + o.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._field(o)
        return QuadraticNumber(self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def inverse(self) -> "QuadraticNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by a zero-norm quadratic number")
        return QuadraticNumber(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        self._field(o)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = QuadraticNumber(1, 0, self.d), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- predicates ---------------------------------------------------
    def is_rational(self) -> bool:
        return self.b == 0

    def is_real(self) -> bool:
        return self.d > 0 or self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is not rational")
        return self.a

    def sign(self) -> int:
        """Exact sign of a real element, no floating point involved."""
        if not self.is_real():
            raise ValueError("sign of a non-real quadratic number")
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d b^2
        diff = self.a * self.a - self.d * self.b * self.b
        if diff > 0:
            return sa
        return sb  # diff == 0 is impossible for squarefree d != 1

    def __eq__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        if self.b == 0 and o.b == 0:
            return self.a == o.a
        return self.a == o.a and self.b == o.b and self.d == o.d

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- views --------------------------------------------------------
    def minpoly(self) -> list[int]:
        """Primitive integer minimal polynomial, low-to-high, positive leading coeff."""
        if self.b == 0:
            coeffs = [-self.a, Fraction(1)]
        else:
            coeffs = [self.norm(), -2 * self.a, Fraction(1)]
        den = 1
        for c in coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in coeffs]
        g = 0
        for c in ints:
            g = gcd(g, c)
        return [c // g for c in ints]

    def real_imag(self) -> tuple["QuadraticNumber", "QuadraticNumber"]:
        """(Re, Im) for imaginary fields, as rationals times 1 and sqrt(-d)."""
        if self.d > 0 or self.b == 0:
            return self, QuadraticNumber(0)
        return QuadraticNumber(self.a), QuadraticNumber(0, self.b, -self.d)

    def abs_squared(self) -> Fraction:
        """|z|^2 for an element of an imaginary field (or square of a real rational)."""
        if self.d < 0:
            return self.norm()
        if self.b == 0:
            return self.a * self.a
        raise ValueError("abs_squared of a real irrational: use (x*x)")

    def __float__(self):
        if not self.is_real():
            raise ValueError("float of a non-real quadratic number")
        return float(self.a) + float(self.b) * (self.d ** 0.5)

    def approx(self, digits: int = 50):
        """mpmath evaluation (complex for imaginary fields)."""
        import mpmath

        with mpmath.workdps(digits + 10):
            a = mpmath.mpf(self.a.numerator) / self.a.denominator
            b = mpmath.mpf(self.b.numerator) / self.b.denominator
            if self.d > 0:
                return a + b * mpmath.sqrt(self.d)
            return mpmath.mpc(a, b * mpmath.sqrt(-self.d))

    def __repr__(self):
        if self.b == 0:
            return f"QuadraticNumber({self.a})"
        return f"QuadraticNumber({self.a}, {self.b}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        root = "i" if self.d == -1 else f"sqrt({self.d})"
        sgn = "+" if self.b > 0 else "-"
        return f"{self.a} {sgn} {abs(self.b)}*{root}"


def isqrt_exact(n: int):
    """Integer square root if n is a perfect square, else None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None
