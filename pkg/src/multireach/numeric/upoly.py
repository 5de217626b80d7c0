"""Dense univariate polynomials over Q, stored low-to-high as lists of Fractions,
plus Sturm sequences and real root isolation."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Poly = list  # list[Fraction], low-to-high, no trailing zeros; [] is zero


def trim(p: Sequence) -> list:
    p = [c if isinstance(c, Fraction) else Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(p) - 1  # -1 for zero polynomial


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p, c):
    return trim([c * x for x in p])


def mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def divmod_poly(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq, lq = len(q) - 1, q[-1]
    if len(r) - 1 < dq:
        return [], trim(r)
    quo = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lq
        quo[k] = c
        if c:
            for j in range(dq + 1):
                r[k + j] -= c * q[j]
    return trim(quo), trim(r[:dq])


def rem(p, q):
    return divmod_poly(p, q)[1]


def monic(p):
    if not p:
        return []
    lc = p[-1]
    return [c / lc for c in p]


def gcd_poly(p, q):
    p, q = trim(p), trim(q)
    while q:
        p, q = q, rem(p, q)
    return monic(p)


def derivative(p):
    return trim([i * p[i] for i in range(1, len(p))])


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose(p, q):
    """p(q(x))."""
    acc: list = []
    for c in reversed(p):
        acc = add(mul(acc, q), [c])
    return acc


def squarefree(p):
    p = trim(p)
    if degree(p) <= 0:
        return p
    g = gcd_poly(p, derivative(p))
    return monic(divmod_poly(p, g)[0])


def primitive_int(p) -> list[int]:
    """Scale to a primitive integer polynomial with positive leading coefficient."""
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def sign(v) -> int:
    return (v > 0) - (v < 0)


def sturm_sequence(p):
    p = trim(p)
    seq = [p, derivative(p)]
    while seq[-1]:
        r = rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def variations(seq, x) -> int:
    signs = [sign(evaluate(s, x)) for s in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq, lo, hi) -> int:
    """Number of distinct real roots in (lo, hi] for the Sturm sequence seq."""
    return variations(seq, lo) - variations(seq, hi)


def cauchy_bound(p) -> Fraction:
    lc = abs(p[-1])
    return 1 + max((abs(c) / lc for c in p[:-1]), default=Fraction(0))


def isolate_intervals(p):
    """Isolating intervals for the distinct real roots of p, increasing order.

    Each entry is (lo, hi): lo == hi means an exact rational root; otherwise the
    open interval (lo, hi) holds exactly one root and p(lo), p(hi) are nonzero.
    """
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial has no isolated roots")
    if degree(p) == 0:
        return []
    sf = squarefree(p)
    seq = sturm_sequence(sf)
    bound = cauchy_bound(sf)
    out = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append(_tighten(sf, seq, lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort(key=lambda iv: iv[0])
    return out


def _tighten(sf, seq, lo, hi):
    # the single root lies in (lo, hi]; move to an open interval with nonzero ends
    if evaluate(sf, hi) == 0:
        return (hi, hi)
    while evaluate(sf, lo) == 0:
        mid = (lo + hi) / 2
        if evaluate(sf, mid) == 0:
            return (mid, mid)
        if count_roots(seq, mid, hi) == 1:
            lo = mid
        else:
            hi = mid
    return (lo, hi)


def refine(p, lo, hi, width):
    """Bisect an isolating open interval of squarefree p until narrower than width."""
    if lo == hi:
        return lo, hi
    slo = sign(evaluate(p, lo))
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = sign(evaluate(p, mid))
        if sm == 0:
            return mid, mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def from_ints(coeffs: Sequence[int]):
    return trim([Fraction(c) for c in coeffs])


def to_str(p, var: str = "x") -> str:
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mon and c == 1:
            s = mon
        elif mon and c == -1:
            s = "-" + mon
        else:
            s = f"{c}*{mon}" if mon else f"{c}"
        terms.append(s)
    if not terms:
        return "0"
    return " + ".join(terms).replace("+ -", "- ")
