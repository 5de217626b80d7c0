"""Semialgebraic subsets of the plane in disjunctive normal form."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..poly import MPoly, ParseError, parse_poly

NAMES = ("x", "y")


def poly2(p) -> MPoly:
    """Integer-coefficient bivariate polynomial (positive rescaling of p)."""
    if isinstance(p, str):
        p = parse_poly(p, NAMES)
    if p.nvars != 2:
        raise ValueError("expected a bivariate polynomial")
    return p.primitive()


def poly_str(p: MPoly) -> str:
    return p.to_str(NAMES)


class SignSystem:
    """Conjunction {E_1 = 0, ..., E_r = 0, P_1 > 0, ..., P_k > 0}.

    The equations are kept as a list; `equation` gives the single merged
    polynomial E_1^2 + ... + E_r^2 with the same real zero set.
    """

    __slots__ = ("eqs", "strict")

    def __init__(self, eqs: Sequence[MPoly] = (), strict: Sequence[MPoly] = ()):
        eqs = [poly2(e) for e in eqs]
        strict = [poly2(s) for s in strict]
        if not eqs and not strict:
            raise ValueError("a sign system needs at least one constraint")
        for p in eqs + strict:
            if p.is_zero():
                raise ValueError("degenerate constraint: zero polynomial")
        # dedupe while keeping order
        self.eqs = list(dict.fromkeys(eqs))
        self.strict = list(dict.fromkeys(strict))

    @property
    def equation(self) -> MPoly | None:
        if not self.eqs:
            return None
        if len(self.eqs) == 1:
            return self.eqs[0]
        total = MPoly(2)
        for e in self.eqs:
            total = total + e * e
        return total.primitive()

    def polys(self) -> list[MPoly]:
        return self.eqs + self.strict

    def conjoin(self, other: "SignSystem") -> "SignSystem":
        return SignSystem(self.eqs + other.eqs, self.strict + other.strict)

    def member(self, p) -> bool:
        from .points import as_point

        pt = as_point(p)
        return all(pt.sign(e) == 0 for e in self.eqs) and all(pt.sign(s) > 0 for s in self.strict)

    def substitute_linear(self, A) -> "SignSystem":
        return SignSystem([_pull_back(e, A) for e in self.eqs], [_pull_back(s, A) for s in self.strict])

    def is_open(self) -> bool:
        return not self.eqs

    def to_json(self) -> dict:
        out: dict = {}
        if self.eqs:
            out["eq"] = poly_str(self.eqs[0]) if len(self.eqs) == 1 else [poly_str(e) for e in self.eqs]
        if self.strict:
            out["gt"] = [poly_str(s) for s in self.strict]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SignSystem":
        if not isinstance(obj, dict) or not set(obj) <= {"eq", "gt"}:
            raise ParseError(f"malformed sign system {obj!r}")
        eq = obj.get("eq", [])
        if isinstance(eq, str):
            eq = [eq]
        gt = obj.get("gt", [])
        if isinstance(gt, str):
            gt = [gt]
        return cls([parse_poly(e, NAMES) for e in eq], [parse_poly(g, NAMES) for g in gt])

    def __eq__(self, other):
        return isinstance(other, SignSystem) and self.eqs == other.eqs and self.strict == other.strict

    def __hash__(self):
        return hash((tuple(self.eqs), tuple(self.strict)))

    def __repr__(self):
        parts = [f"{poly_str(e)} = 0" for e in self.eqs] + [f"{poly_str(s)} > 0" for s in self.strict]
        return "{" + ", ".join(parts) + "}"


def _pull_back(p: MPoly, A) -> MPoly:
    """q(v) = p(v A) for a row vector v = (x, y)."""
    x, y = MPoly.var(2, 0, Fraction(1)), MPoly.var(2, 1, Fraction(1))
    a11, a12 = Fraction(A[0][0]), Fraction(A[0][1])
    a21, a22 = Fraction(A[1][0]), Fraction(A[1][1])
    return p.substitute([x * a11 + y * a21, x * a12 + y * a22]).primitive()


class SemiAlgebraicSet2D:
    __slots__ = ("disjuncts",)

    def __init__(self, disjuncts: Sequence[SignSystem] = ()):
        self.disjuncts = list(dict.fromkeys(disjuncts))

    @classmethod
    def empty(cls):
        return cls([])

    @classmethod
    def from_system(cls, eqs=(), strict=()):
        return cls([SignSystem(eqs, strict)])

    @classmethod
    def parse(cls, text: str) -> "SemiAlgebraicSet2D":
        return normalize(parse_formula(text))

    def is_empty_set_syntactically(self) -> bool:
        return not self.disjuncts

    def union(self, other: "SemiAlgebraicSet2D") -> "SemiAlgebraicSet2D":
        return SemiAlgebraicSet2D(self.disjuncts + other.disjuncts)

    def intersect(self, other: "SemiAlgebraicSet2D") -> "SemiAlgebraicSet2D":
        return intersect(self, other)

    def transform(self, A) -> "SemiAlgebraicSet2D":
        return transform(self, A)

    def member(self, p) -> bool:
        return member(self, p)

    def is_empty(self):
        from .cad import is_empty

        return is_empty(self)

    def polys(self) -> list[MPoly]:
        out = []
        for d in self.disjuncts:
            out.extend(d.polys())
        return out

    def to_json(self) -> dict:
        return {"dnf": [d.to_json() for d in self.disjuncts]}

    @classmethod
    def from_json(cls, obj) -> "SemiAlgebraicSet2D":
        if isinstance(obj, str):
            return cls.parse(obj)
        if not isinstance(obj, dict) or "dnf" not in obj or not isinstance(obj["dnf"], list):
            raise ParseError("set must be {'dnf': [...]} or a formula string")
        return cls([SignSystem.from_json(d) for d in obj["dnf"]])

    def __eq__(self, other):
        return isinstance(other, SemiAlgebraicSet2D) and self.disjuncts == other.disjuncts

    def __repr__(self):
        if not self.disjuncts:
            return "EmptySet"
        return " | ".join(map(repr, self.disjuncts))


def intersect(S: SemiAlgebraicSet2D, T: SemiAlgebraicSet2D) -> SemiAlgebraicSet2D:
    return SemiAlgebraicSet2D([a.conjoin(b) for a in S.disjuncts for b in T.disjuncts])


def transform(S: SemiAlgebraicSet2D, A) -> SemiAlgebraicSet2D:
    """{p : p A in S} for an invertible 2x2 rational matrix A."""
    det = Fraction(A[0][0]) * Fraction(A[1][1]) - Fraction(A[0][1]) * Fraction(A[1][0])
    if det == 0:
        raise ValueError("transform needs an invertible matrix")
    return SemiAlgebraicSet2D([d.substitute_linear(A) for d in S.disjuncts])


def member(S: SemiAlgebraicSet2D, p) -> bool:
    return any(d.member(p) for d in S.disjuncts)


# ---------------------------------------------------------------------------
# Formulas and normalisation

@dataclass(frozen=True)
class Atom:
    poly: MPoly  # constraint poly REL 0
    rel: str     # one of = != > >= < <=


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Not:
    part: object


_NEGATE = {"=": "!=", "!=": "=", ">": "<=", "<=": ">", "<": ">=", ">=": "<"}


def _push_not(f, neg=False):
    if isinstance(f, Atom):
        return Atom(f.poly, _NEGATE[f.rel]) if neg else f
    if isinstance(f, Not):
        return _push_not(f.part, not neg)
    if isinstance(f, And):
        parts = tuple(_push_not(p, neg) for p in f.parts)
        return Or(parts) if neg else And(parts)
    if isinstance(f, Or):
        parts = tuple(_push_not(p, neg) for p in f.parts)
        return And(parts) if neg else Or(parts)
    raise ParseError(f"malformed formula node {f!r}")


def _atom_dnf(a: Atom) -> list[tuple[list, list]]:
    p = a.poly
    if p.is_zero():
        raise ValueError("degenerate constraint: zero polynomial")
    if a.rel == "=":
        return [([p], [])]
    if a.rel == ">":
        return [([], [p])]
    if a.rel == "<":
        return [([], [-p])]
    if a.rel == ">=":
        return [([], [p]), ([p], [])]
    if a.rel == "<=":
        return [([], [-p]), ([p], [])]
    if a.rel == "!=":
        return [([], [p]), ([], [-p])]
    raise ParseError(f"unknown relation {a.rel!r}")


def _dnf(f) -> list[tuple[list, list]]:
    if isinstance(f, Atom):
        return _atom_dnf(f)
    if isinstance(f, Or):
        out = []
        for p in f.parts:
            out.extend(_dnf(p))
        return out
    if isinstance(f, And):
        acc = [([], [])]
        for p in f.parts:
            sub = _dnf(p)
            acc = [(e1 + e2, s1 + s2) for e1, s1 in acc for e2, s2 in sub]
        return acc
    raise ParseError(f"malformed formula node {f!r}")


def normalize(formula) -> SemiAlgebraicSet2D:
    """DNF of sign systems.  >= and <= split into > or =, != into two strict
    disjuncts, negations pushed to atoms; conjoined equations merge into the
    sum of squares."""
    f = _push_not(formula)
    disjuncts = []
    for eqs, strict in _dnf(f):
        eqs = [poly2(e) for e in eqs]
        strict = [poly2(s) for s in strict]
        # constant constraints are decided on the spot
        if any(e.is_constant() for e in eqs):
            continue
        if any(s.is_constant() and s.constant_term() <= 0 for s in strict):
            continue
        strict = [s for s in strict if not s.is_constant()]
        if not eqs and not strict:
            # the whole plane; keep it expressible as a system
            strict = [poly2(MPoly.const(2, 1))]
        disjuncts.append(SignSystem(eqs, strict))
    return SemiAlgebraicSet2D(disjuncts)


_REL = re.compile(r"(==|=|!=|>=|<=|>|<)")
_CONNECTIVE = re.compile(r"\s*(and\b|or\b|not\b|&&|\|\||&|\||!(?!=))")


def parse_formula(text: str):
    """Parse `p REL q` atoms combined with and/or/not (also & | !) and parentheses."""
    n = len(text)

    def skip(i):
        while i < n and text[i].isspace():
            i += 1
        return i

    def connective(i):
        m = _CONNECTIVE.match(text, i)
        if not m:
            return None, i
        word = m.group(1)
        kind = {"and": "and", "&": "and", "&&": "and", "or": "or", "|": "or", "||": "or",
                "not": "not", "!": "not"}[word]
        return kind, m.end()

    def disj(i):
        f, i = conj(i)
        parts = [f]
        while True:
            kind, j = connective(i)
            if kind != "or":
                break
            f, i = conj(j)
            parts.append(f)
        return (parts[0] if len(parts) == 1 else Or(tuple(parts))), i

    def conj(i):
        f, i = primary(i)
        parts = [f]
        while True:
            kind, j = connective(i)
            if kind != "and":
                break
            f, i = primary(j)
            parts.append(f)
        return (parts[0] if len(parts) == 1 else And(tuple(parts))), i

    def primary(i):
        i = skip(i)
        kind, j = connective(i)
        if kind == "not":
            f, j = primary(j)
            return Not(f), j
        if i < n and text[i] == "(":
            try:
                f, j = disj(i + 1)
                j = skip(j)
                if j < n and text[j] == ")":
                    k = skip(j + 1)
                    nxt, _ = connective(k)
                    if k >= n or text[k] == ")" or nxt in ("and", "or"):
                        return f, j + 1
            except ParseError:
                pass
        return atom(i)

    def atom(i):
        depth, j = 0, i
        while j < n:
            ch = text[j]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    break
                depth -= 1
            elif depth == 0:
                kind, _ = connective(j)
                if kind in ("and", "or") and (j == 0 or not text[j - 1].isalnum()):
                    break
            j += 1
        s = text[i:j].strip()
        parts = _REL.split(s)
        if len(parts) != 3:
            raise ParseError(f"expected exactly one relation in atom {s!r}", text, i)
        lhs, rel, rhs = parts
        rel = "=" if rel == "==" else rel
        p = parse_poly(lhs, NAMES) - parse_poly(rhs, NAMES)
        return Atom(p, rel), j

    f, i = disj(0)
    if skip(i) != n:
        raise ParseError("trailing input in formula", text, skip(i))
    return f


def halfplane(c1, c2, c3) -> SemiAlgebraicSet2D:
    """{c1 x + c2 y + c3 > 0}."""
    x, y = MPoly.var(2, 0, Fraction(1)), MPoly.var(2, 1, Fraction(1))
    return SemiAlgebraicSet2D.from_system(strict=[x * Fraction(c1) + y * Fraction(c2) + Fraction(c3)])


def linear_coefficients(p: MPoly) -> tuple[Fraction, Fraction, Fraction] | None:
    """(c1, c2, c3) if p = c1 x + c2 y + c3 with (c1, c2) != 0, else None."""
    if p.total_degree() != 1:
        return None
    return (Fraction(p.terms.get((1, 0), 0)), Fraction(p.terms.get((0, 1), 0)),
            Fraction(p.terms.get((0, 0), 0)))
