"""Diophantine equations as algebraic-to-hyperplane multiple reachability.

Given F(y_1..y_n), the instance lives in dimension 2n+1 with coordinates
(x_1..x_{n+1}, y_1..y_n).  S pins x_i to (i - y_1)...(i - y_n), so the orbit
coordinate p M^r h^T evaluates that product at r + 1, and it has n zeros at
nonnegative r exactly when the y_j are distinct positive integers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .lrs import RationalMatrix, md_matrix
from .poly import MPoly, parse_poly, variables


@dataclass
class DiophantineInstance:
    F: MPoly
    n: int
    source: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one variable")
        if self.F.is_zero():
            raise ValueError("F is identically zero")
        if self.F.nvars != self.n:
            raise ValueError("F has the wrong number of variables")

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "DiophantineInstance":
        import re

        if n is None:
            idx = [int(k) for k in re.findall(r"y(\d+)", text)]
            n = max(idx) if idx else 1
        return cls(parse_poly(text, variables("y", n)), n, text)

    def __str__(self):
        return self.source or self.F.to_str(variables("y", self.n))


@dataclass
class Identification:
    subset: tuple            # 1-based indices merged into the fresh variable x
    poly: MPoly              # over (y_1..y_n, x); merged y's no longer occur
    names: list
    identically_zero: bool

    def __str__(self):
        return self.poly.to_str(self.names)


def enumerate_identifications(Q: MPoly) -> list[Identification]:
    """All 2^n polynomials obtained by replacing the variables indexed by a
    subset A with one fresh variable x."""
    n = Q.nvars
    if n < 1:
        raise ValueError("need at least one variable")
    names = variables("y", n) + ["x"]
    out = []
    for size in range(n + 1):
        for A in combinations(range(n), size):
            images = [MPoly.var(n + 1, n if i in A else i, 1) for i in range(n)]
            P = Q.substitute(images)
            out.append(Identification(tuple(i + 1 for i in A), P, names, P.is_zero()))
    return out


@dataclass
class GadgetInstance:
    diophantine: DiophantineInstance
    M: RationalMatrix
    h: list
    equations: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.diophantine.n

    @property
    def dimension(self) -> int:
        return 2 * self.n + 1

    @property
    def m(self) -> int:
        return self.n

    def names(self) -> list[str]:
        return variables("x", self.n + 1) + variables("y", self.n)

    def in_S(self, p: Sequence) -> bool:
        p = [Fraction(v) for v in p]
        return all(e.evaluate(p) == 0 for e in self.equations)

    def orbit_value(self, p: Sequence, r: int) -> Fraction:
        """p M^r h^T."""
        v = [Fraction(x) for x in p]
        for _ in range(r):
            v = self.M.rmul_vector(v)
        return sum((a * b for a, b in zip(v, self.h)), Fraction(0))

    def point_for(self, ys: Sequence) -> list[Fraction]:
        """The unique point of the y-fibre of S's product equations."""
        ys = [Fraction(y) for y in ys]
        xs = []
        for i in range(1, self.n + 2):
            prod = Fraction(1)
            for y in ys:
                prod *= i - y
            xs.append(prod)
        return xs + ys

    def witness_for(self, ys: Sequence[int]) -> dict:
        p = self.point_for(ys)
        return {"point": [str(v) for v in p],
                "r_pinned": [int(y) - 1 for y in ys],
                "r_paper": [int(y) for y in ys]}

    def to_json(self):
        names = self.names()
        return {"schema": 1, "kind": "gadget", "undecidable-family": True,
                "source_polynomial": str(self.diophantine), "n": self.n,
                "dimension": self.dimension, "m": self.m,
                "matrix": self.M.to_json(), "h": [str(v) for v in self.h],
                "S_equations": [e.to_str(names) + " = 0" for e in self.equations],
                "index_convention": "p M^r h^T = prod_j (r + 1 - y_j), r >= 0"}


def build_instance(D: DiophantineInstance) -> GadgetInstance:
    n = D.n
    dim = 2 * n + 1
    Mn = md_matrix(n)
    rows = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(n + 1):
        rows[i][:n + 1] = Mn.rows[i]
    M = RationalMatrix(rows)
    h = [Fraction(int(i == 0)) for i in range(dim)]
    ys = [MPoly.var(dim, n + 1 + j, 1) for j in range(n)]
    eqs = [D.F.substitute(ys)]
    for i in range(1, n + 2):
        prod = MPoly.const(dim, 1)
        for y in ys:
            prod = prod * (MPoly.const(dim, i) - y)
        eqs.append(MPoly.var(dim, i - 1, 1) - prod)
    return GadgetInstance(D, M, h, eqs)


def verify_witness(G: GadgetInstance, p: Sequence, rs: Sequence[int]) -> bool:
    """p in S and p M^{r_i} h^T = 0 for each r_i (pinned convention, r_i >= 0)."""
    if len(p) != G.dimension:
        raise ValueError(f"point has length {len(p)}, expected {G.dimension}")
    if len(rs) != G.n:
        raise ValueError(f"need {G.n} indices, got {len(rs)}")
    if len(set(rs)) != len(rs) or any(r < 0 for r in rs):
        return False
    if not G.in_S(p):
        return False
    return all(G.orbit_value(p, r) == 0 for r in rs)
