"""Sparse multivariate (Laurent) polynomials with exact coefficients, and an
ASCII parser for them."""
from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence


class ParseError(ValueError):
    def __init__(self, msg: str, text: str = "", pos: int = -1):
        self.text, self.pos = text, pos
        where = f" at column {pos + 1}" if pos >= 0 else ""
        super().__init__(f"{msg}{where}" + (f": {text!r}" if text else ""))


def _is_zero(c) -> bool:
    return not c


class MPoly:
    """Polynomial in nvars variables: {exponent tuple: coefficient}.

    Exponents may be negative (Laurent polynomials).  Coefficients can be int,
    Fraction, QuadraticNumber or any ring element supporting + - * and bool().
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                if not _is_zero(c):
                    e = tuple(e)
                    if len(e) != nvars:
                        raise ValueError("exponent length mismatch")
                    clean[e] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------
    @classmethod
    def const(cls, nvars: int, c) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int, coeff=1) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): coeff})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "MPoly":
        return cls(len(exps), {tuple(exps): coeff})

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials over different variable counts")
            return other
        return MPoly.const(self.nvars, other)

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out[e] + c if e in out else c
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            if _is_zero(other):
                return MPoly(self.nvars)
            return MPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        o = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return MPoly(self.nvars, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        return self == self._coerce(other)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure --------------------------------------------------------
    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def min_degree_in(self, i: int) -> int:
        return min((e[i] for e in self.terms), default=0)

    def is_linear(self) -> bool:
        return self.total_degree() == 1

    def coefficients_in(self, i: int) -> list["MPoly"]:
        """Coefficients as a polynomial in variable i (low-to-high), nonnegative exps."""
        d = self.degree_in(i)
        out = [dict() for _ in range(d + 1)]
        for e, c in self.terms.items():
            k = e[i]
            if k < 0:
                raise ValueError("negative exponent in coefficients_in")
            ee = list(e)
            ee[i] = 0
            out[k][tuple(ee)] = c
        return [MPoly(self.nvars, t) for t in out]

    def derivative(self, i: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ee = list(e)
                ee[i] -= 1
                out[tuple(ee)] = c * e[i]
        return MPoly(self.nvars, out)

    def evaluate(self, point: Sequence):
        """Evaluate at a point whose entries support * and + (and ** for ints)."""
        total = None
        powcache: dict = {}
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powcache:
                        powcache[key] = point[i] ** k
                    term = term * powcache[key]
            total = term if total is None else total + term
        return 0 if total is None else total

    def substitute(self, images: Sequence["MPoly"]) -> "MPoly":
        """Replace variable i by images[i] (polynomials in a common ring)."""
        target_n = images[0].nvars if images else 0
        total = MPoly(target_n)
        powcache: dict = {}
        for e, c in self.terms.items():
            term = MPoly.const(target_n, c)
            for i, k in enumerate(e):
                if k:
                    if k < 0:
                        raise ValueError("cannot substitute into negative exponents")
                    key = (i, k)
                    if key not in powcache:
                        powcache[key] = images[i] ** k
                    term = term * powcache[key]
            total = total + term
        return total

    def map_coefficients(self, f) -> "MPoly":
        return MPoly(self.nvars, {e: f(c) for e, c in self.terms.items()})

    def map_exponents(self, f) -> "MPoly":
        out: dict = {}
        for e, c in self.terms.items():
            ee = tuple(f(e))
            out[ee] = out[ee] + c if ee in out else c
        return MPoly(len(next(iter(out))) if out else self.nvars, out)

    # -- integer normal form ------------------------------------------------
    def primitive(self) -> "MPoly":
        """Integer coefficients, content 1, obtained by a *positive* rescaling
        (so the sign of the polynomial at every point is unchanged)."""
        if not self.terms:
            return self
        fr = {e: Fraction(c) for e, c in self.terms.items()}
        den = 1
        for c in fr.values():
            den = lcm(den, c.denominator)
        ints = {e: int(c * den) for e, c in fr.items()}
        g = 0
        for c in ints.values():
            g = gcd(g, c)
        return MPoly(self.nvars, {e: c // g for e, c in ints.items()})

    def univariate(self, i: int) -> list[Fraction]:
        """Coefficient list (low-to-high) when only variable i occurs."""
        d = self.degree_in(i)
        out = [Fraction(0)] * (d + 1)
        for e, c in self.terms.items():
            if any(k for j, k in enumerate(e) if j != i):
                raise ValueError("polynomial is not univariate")
            out[e[i]] += Fraction(c)
        return out

    # -- display --------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))

    def to_str(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mon = "*".join(n if k == 1 else f"{n}^{k}" if k > 0 else f"{n}^({k})"
                           for n, k in zip(names, e) if k)
            cs = str(c)
            neg = False
            if isinstance(c, (int, Fraction)):
                neg = c < 0
                cs = str(abs(c))
            elif " " in cs:
                cs = f"({cs})"
            if mon:
                body = mon if cs == "1" else f"{cs}*{mon}"
            else:
                body = cs
            parts.append(("-", body) if neg else ("+", body))
        head_sign, head = parts[0]
        s = ("-" if head_sign == "-" else "") + head
        for sg, body in parts[1:]:
            s += f" {sg} {body}"
        return s

    def __repr__(self):
        names = ["x", "y"] if self.nvars == 2 else [f"z{i + 1}" for i in range(self.nvars)]
        return f"MPoly({self.to_str(names)})"


# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*(?:\{[0-9, ]+\})?)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError("unexpected character", text, col)
        num, ident, op = m.groups()
        start = m.start(1) if num else m.start(2) if ident else m.start(3)
        if num is not None:
            out.append(("num", num, start))
        elif ident is not None:
            out.append(("id", ident, start))
        else:
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = list(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self) -> MPoly:
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return p

    def expr(self) -> MPoly:
        p = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MPoly:
        p = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                q = self.unary()
                if t[1] == "*":
                    p = p * q
                else:
                    if not q.is_constant() or q.is_zero():
                        self.fail("division only by nonzero constants", t)
                    p = p * (1 / Fraction(q.constant_term()))
            elif t[0] in ("num", "id") or (t[0] == "op" and t[1] == "("):
                # implicit multiplication such as 2x or 3(x+1)
                q = self.unary()
                p = p * q
            else:
                return p

    def unary(self) -> MPoly:
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self) -> MPoly:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                neg = True
            e = self.peek()
            if e[0] == "op" and e[1] == "(":
                self.take()
                sub = self.expr()
                if self.take()[1] != ")":
                    self.fail("expected ')'")
                if not sub.is_constant():
                    self.fail("non-constant exponent", e)
                k = Fraction(sub.constant_term())
            elif e[0] == "num":
                self.take()
                k = Fraction(e[1])
            else:
                self.fail("expected an exponent")
            if neg:
                k = -k
            if k.denominator != 1:
                self.fail("non-integer exponent", e)
            k = int(k)
            if k < 0:
                # only monomials in variables may carry negative exponents
                if len(base.terms) != 1:
                    self.fail("negative exponent of a non-monomial", e)
                (ex, c), = base.terms.items()
                if c not in (1, -1) and not any(ex):
                    return MPoly.const(base.nvars, Fraction(c) ** k)
                if c != 1:
                    self.fail("negative exponent of a scaled monomial", e)
                return MPoly(base.nvars, {tuple(a * k for a in ex): 1})
            return base ** k
        return base

    def atom(self) -> MPoly:
        t = self.take()
        n = len(self.names)
        if t[0] == "num":
            return MPoly.const(n, Fraction(t[1]))
        if t[0] == "id":
            name = t[1].replace(" ", "")
            if name not in self.index:
                raise ParseError(f"unknown variable {t[1]!r}", self.text, t[2])
            return MPoly.var(n, self.index[name], Fraction(1))
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            if self.take()[1] != ")":
                self.fail("expected ')'", self.toks[self.i - 1])
            return p
        raise ParseError("unexpected token", self.text, t[2])


def parse_poly(text: str, names: Sequence[str] = ("x", "y")) -> MPoly:
    """Parse an ASCII polynomial such as ``x^3 + x*y^2 - 2*y^2`` (rational
    coefficients allowed, e.g. ``3/5*x``)."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty polynomial", text if isinstance(text, str) else "")
    return _Parser(text, names).parse()


def variables(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i + 1}" for i in range(n)]


def lattice_points(bound: int, dim: int) -> Iterable[tuple[int, ...]]:
    from itertools import product

    return product(range(-bound, bound + 1), repeat=dim)
