"""Arithmetic in Q(alpha) for a real algebraic alpha with irreducible minimal
polynomial, with exact sign determination by interval refinement."""
from __future__ import annotations

from fractions import Fraction

from . import upoly
from .realalg import RealAlgebraic, interval_eval


class NumberField:
    """Q(alpha); elements are rational polynomials in alpha reduced mod minpoly."""

    def __init__(self, alpha: RealAlgebraic):
        if alpha.is_rational():
            self.modulus = [-alpha.lo, Fraction(1)]
        else:
            self.modulus = upoly.monic(upoly.from_ints(alpha.poly))
        self.alpha = alpha
        self.degree = len(self.modulus) - 1

    def __repr__(self):
        return f"NumberField({self.alpha!r})"

    def element(self, coeffs) -> "FieldElement":
        return FieldElement(self, upoly.rem(upoly.trim(coeffs), self.modulus))

    def rational(self, q) -> "FieldElement":
        return FieldElement(self, upoly.trim([Fraction(q)]))

    def zero(self):
        return FieldElement(self, [])

    def one(self):
        return self.rational(1)

    def gen(self):
        return self.element([Fraction(0), Fraction(1)])

    def sign(self, coeffs) -> int:
        if not coeffs:
            return 0
        if self.alpha.is_rational():
            return upoly.sign(upoly.evaluate(coeffs, self.alpha.lo))
        # irreducible modulus: a nonzero reduced element never vanishes at alpha
        a = self.alpha
        while True:
            lo, hi = interval_eval(coeffs, a.lo, a.hi)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            a.bisect()
            if a.is_rational():  # cannot happen for irreducible degree >= 2
                return upoly.sign(upoly.evaluate(coeffs, a.lo))

    def enclosure(self, coeffs) -> tuple[Fraction, Fraction]:
        a = self.alpha
        return interval_eval(coeffs, a.lo, a.hi)


class FieldElement:
    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.c = coeffs

    def _lift(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements of different number fields")
            return other
        return self.field.rational(other)

    def __add__(self, other):
        o = self._lift(other)
        return FieldElement(self.field, upoly.add(self.c, o.c))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return FieldElement(self.field, upoly.sub(self.c, o.c))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return FieldElement(self.field, [-x for x in self.c])

    def __mul__(self, other):
        o = self._lift(other)
        return FieldElement(self.field, upoly.rem(upoly.mul(self.c, o.c), self.field.modulus))

    __rmul__ = __mul__

    def inverse(self):
        if not self.c:
            raise ZeroDivisionError("inverse of zero field element")
        # extended Euclid: s*c + t*m = 1
        r0, r1 = self.field.modulus, self.c
        s0, s1 = [], [Fraction(1)]
        while r1:
            q, r = upoly.divmod_poly(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, upoly.sub(s0, upoly.mul(q, s1))
        # r0 is a nonzero constant since the modulus is irreducible
        if upoly.degree(r0) != 0:
            raise ArithmeticError("modulus not irreducible")
        inv = upoly.scale(s0, 1 / r0[0])
        return FieldElement(self.field, upoly.rem(inv, self.field.modulus))

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.c

    def sign(self) -> int:
        return self.field.sign(self.c)

    def is_rational(self) -> bool:
        return len(self.c) <= 1

    def to_fraction(self) -> Fraction:
        if len(self.c) > 1:
            raise ValueError("not rational")
        return self.c[0] if self.c else Fraction(0)

    def enclosure(self):
        return self.field.enclosure(self.c)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(tuple(self.c))

    def __float__(self):
        a = self.field.alpha
        if not a.is_rational():
            a.refine(Fraction(1, 2**64))
        lo, hi = self.enclosure()
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"FieldElement({upoly.to_str(self.c, 'a')})"


# ---------------------------------------------------------------------------
# Polynomials over a number field, K[y]: lists of FieldElements low-to-high.

def kp_trim(p):
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def kp_rem(p, q):
    r = list(p)
    dq = len(q) - 1
    inv_lc = q[-1].inverse()
    while len(r) - 1 >= dq and r:
        c = r[-1] * inv_lc
        shift = len(r) - 1 - dq
        for j in range(dq + 1):
            r[shift + j] = r[shift + j] - c * q[j]
        r = kp_trim(r)
    return r


def kp_quo(p, q):
    r = list(p)
    dq = len(q) - 1
    K = q[-1].field
    if len(r) - 1 < dq:
        return []
    quo = [K.zero()] * (len(r) - dq)
    inv_lc = q[-1].inverse()
    while r and len(r) - 1 >= dq:
        c = r[-1] * inv_lc
        shift = len(r) - 1 - dq
        quo[shift] = c
        for j in range(dq + 1):
            r[shift + j] = r[shift + j] - c * q[j]
        r = kp_trim(r)
    return kp_trim(quo)


def kp_monic(p):
    inv = p[-1].inverse()
    return [c * inv for c in p]


def kp_gcd(p, q):
    p, q = kp_trim(p), kp_trim(q)
    while q:
        p, q = q, kp_rem(p, q)
    return kp_monic(p) if p else p


def kp_derivative(p):
    return kp_trim([p[i] * i for i in range(1, len(p))])


def kp_eval_rational(p, y: Fraction):
    K = p[0].field
    acc = K.zero()
    for c in reversed(p):
        acc = acc * y + c
    return acc


def kp_squarefree(p):
    p = kp_trim(p)
    if len(p) <= 2:
        return kp_monic(p)
    g = kp_gcd(p, kp_derivative(p))
    if len(g) <= 1:
        return kp_monic(p)
    return kp_monic(kp_quo(p, g))


def kp_sturm(p):
    seq = [p, kp_derivative(p)]
    while seq[-1]:
        r = kp_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def kp_variations(seq, y) -> int:
    signs = [kp_eval_rational(s, y).sign() for s in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def kp_count(seq, lo, hi) -> int:
    return kp_variations(seq, lo) - kp_variations(seq, hi)


def kp_cauchy_bound(p) -> Fraction:
    # |root| < 1 + max |c_i / c_n|; bound the quotients with enclosures
    lc = p[-1]
    lo, hi = lc.enclosure()
    while lo <= 0 <= hi:
        lc.field.alpha.bisect()
        lo, hi = lc.enclosure()
    lc_min = min(abs(lo), abs(hi))
    best = Fraction(0)
    for c in p[:-1]:
        a, b = c.enclosure()
        best = max(best, max(abs(a), abs(b)) / lc_min)
    return 1 + best


def kp_isolate(p):
    """Isolating intervals for the real roots of p in K[y] (same convention as
    upoly.isolate_intervals)."""
    sf = kp_squarefree(p)
    if len(sf) <= 1:
        return sf, []
    seq = kp_sturm(sf)
    bound = kp_cauchy_bound(sf)
    out = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = kp_count(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            if kp_eval_rational(sf, hi).is_zero():
                out.append((hi, hi))
                continue
            while kp_eval_rational(sf, lo).is_zero():
                mid = (lo + hi) / 2
                if kp_eval_rational(sf, mid).is_zero():
                    lo = hi = mid
                    break
                if kp_count(seq, mid, hi) == 1:
                    lo = mid
                else:
                    hi = mid
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort(key=lambda iv: iv[0])
    return sf, out


def kp_refine(sf, lo, hi, width):
    if lo == hi:
        return lo, hi
    slo = kp_eval_rational(sf, lo).sign()
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = kp_eval_rational(sf, mid).sign()
        if sm == 0:
            return mid, mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def kp_enclosure(p, ylo, yhi):
    """Enclosure of p(alpha, y) for y in [ylo, yhi] and alpha in its interval."""
    a = b = Fraction(0)
    for c in reversed(p):
        clo, chi = c.enclosure()
        prods = (a * ylo, a * yhi, b * ylo, b * yhi)
        a, b = min(prods) + clo, max(prods) + chi
    return a, b
