"""Compile conditions on matrix powers into point-to-polytope instances.

A disjunct {P_0 = 0, P_1 > 0, ..., P_k > 0} over the entries A{i,j} of M^n
turns into sequences u_{i,n} = P_i(M^n), each an LRS by closure under sum and
product.  Each u_i is realised by a block N_i with u_{i,n} the upper-right
corner of N_i^n, and the blocks are assembled diagonally.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lrs import (RationalMatrix, RecurrenceRelation, companion_matrix, constant_sequence, entry_recurrence,
                  lrs_combine, minimize, scale_sequence)
from .poly import MPoly, parse_poly


def entry_names(d: int) -> list[str]:
    return [f"A{{{i},{j}}}" for i in range(1, d + 1) for j in range(1, d + 1)]


def _normalise_names(text: str, d: int) -> str:
    text = re.sub(r"A_(\d+)_(\d+)", r"A{\1,\2}", text)
    text = re.sub(r"A\{\s*(\d+)\s*,\s*(\d+)\s*\}", r"A{\1,\2}", text)
    if d <= 9:
        text = re.sub(r"A([1-9])([1-9])(?![0-9])", r"A{\1,\2}", text)
    return text


def parse_entry_poly(text: str, d: int) -> MPoly:
    """Parse a polynomial in A{i,j} (aliases A_i_j and, for d <= 9, Aij)."""
    return parse_poly(_normalise_names(text, d), entry_names(d))


@dataclass
class ConditionDisjunct:
    equation: MPoly | None = None
    strict: list = field(default_factory=list)

    def holds(self, P: RationalMatrix) -> bool:
        vals = [v for row in P.rows for v in row]
        if self.equation is not None and self.equation.evaluate(vals) != 0:
            return False
        return all(s.evaluate(vals) > 0 for s in self.strict)


@dataclass
class MatrixCondition:
    d: int
    disjuncts: list

    def __post_init__(self):
        for dj in self.disjuncts:
            for p in ([dj.equation] if dj.equation is not None else []) + list(dj.strict):
                if p.nvars != self.d * self.d:
                    raise ValueError(f"condition polynomial has {p.nvars} symbols, expected {self.d * self.d}")

    @classmethod
    def parse(cls, d: int, disjuncts: Sequence[dict]) -> "MatrixCondition":
        """disjuncts: [{"eq": "A11 - A22", "gt": ["A12"]}, ...]"""
        out = []
        for obj in disjuncts:
            eq = obj.get("eq")
            out.append(ConditionDisjunct(parse_entry_poly(eq, d) if eq else None,
                                         [parse_entry_poly(s, d) for s in obj.get("gt", [])]))
        return cls(d, out)

    def holds(self, P: RationalMatrix) -> bool:
        return any(dj.holds(P) for dj in self.disjuncts)

    def to_json(self):
        names = entry_names(self.d)
        return {"d": self.d, "disjuncts": [
            {"eq": dj.equation.to_str(names) if dj.equation is not None else None,
             "gt": [s.to_str(names) for s in dj.strict]} for dj in self.disjuncts]}


def condition_from_point_target(point: Sequence, target_disjuncts: Sequence[tuple]) -> MatrixCondition:
    """Singleton source: substitute x_k = sum_i p_i A{i,k} into the target's
    constraints (each disjunct is (equation or None, [strict polys]) in x_1..x_d)."""
    d = len(point)
    nv = d * d
    images = []
    for k in range(d):
        img = MPoly(nv)
        for i in range(d):
            img = img + MPoly.var(nv, i * d + k, Fraction(point[i]))
        images.append(img)
    out = []
    for eq, strict in target_disjuncts:
        out.append(ConditionDisjunct(eq.substitute(images) if eq is not None else None,
                                     [s.substitute(images) for s in strict]))
    return MatrixCondition(d, out)


@dataclass
class PointToPolytopeInstance:
    """Orbit of `point` under `matrix`; the polytope asks coordinate c to be 0
    for c in closed_pairs (the two closed halfspaces +-Delta) and > 0 for c in
    open_indices.  Indices are 0-based."""

    matrix: RationalMatrix
    point: list
    closed_pairs: list
    open_indices: list
    block_sizes: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.matrix.n

    def in_polytope(self, v: Sequence) -> bool:
        return all(v[c] == 0 for c in self.closed_pairs) and all(v[o] > 0 for o in self.open_indices)

    def orbit(self, horizon: int):
        """Yield (n, point . N^n) for n = 1..horizon."""
        v = list(self.point)
        for n in range(1, horizon + 1):
            v = self.matrix.rmul_vector(v)
            yield n, v

    def to_json(self):
        return {"schema": 1, "kind": "point-to-polytope", "matrix": self.matrix.to_json(),
                "point": [str(x) for x in self.point], "closed_pairs": list(self.closed_pairs),
                "open_indices": list(self.open_indices), "block_sizes": list(self.block_sizes),
                "index_base": 0}


class _SequenceBuilder:
    """LRS of P(M^n) for polynomials P in the entries of M, with caching."""

    def __init__(self, M: RationalMatrix):
        self.M = M
        self.d = M.n
        self.entries: dict = {}

    def entry(self, k: int) -> RecurrenceRelation:
        if k not in self.entries:
            i, j = divmod(k, self.d)
            self.entries[k] = entry_recurrence(self.M, i + 1, j + 1, minimal=True)
        return self.entries[k]

    def of(self, P: MPoly) -> RecurrenceRelation:
        total = None
        for e, c in sorted(P.terms.items()):
            seq = constant_sequence(1)
            for k, a in enumerate(e):
                if a < 0:
                    raise ValueError("negative exponent in a matrix condition")
                for _ in range(a):
                    seq = minimize(lrs_combine(seq, self.entry(k), "product"))
            seq = scale_sequence(seq, c)
            total = seq if total is None else minimize(lrs_combine(total, seq, "sum"))
        if total is None:
            total = RecurrenceRelation([0], [0], True)
        return total


def compile_to_polytope(cond: MatrixCondition, M: RationalMatrix) -> list[PointToPolytopeInstance]:
    """One point-to-polytope instance per disjunct; (M^n) satisfies the
    disjunct iff the instance's orbit point at step n lies in its polytope."""
    if M.n != cond.d:
        raise ValueError(f"condition is over {cond.d}x{cond.d} matrices, got {M.n}x{M.n}")
    builder = _SequenceBuilder(M)
    out = []
    for dj in cond.disjuncts:
        if dj.equation is None and not dj.strict:
            raise ValueError("empty disjunct")
        polys = ([dj.equation] if dj.equation is not None else []) + list(dj.strict)
        blocks = [companion_matrix(builder.of(P)) for P in polys]
        sizes = [b.n for b in blocks]
        N = RationalMatrix.block_diag(blocks)
        point = [Fraction(0)] * N.n
        corners = []
        off = 0
        for s in sizes:
            # row vector e_first . N^n picks the first row of each block; the
            # upper-right corner is its last coordinate
            point[off] = Fraction(1)
            corners.append(off + s - 1)
            off += s
        closed = corners[:1] if dj.equation is not None else []
        opened = corners[1:] if dj.equation is not None else corners
        out.append(PointToPolytopeInstance(N, point, closed, opened, sizes))
    return out


def brute_force_equivalence(cond: MatrixCondition, M: RationalMatrix, horizon: int) -> bool:
    """Direct evaluation of each disjunct on M^n against polytope membership of
    the compiled instance, for n = 1..horizon."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    instances = compile_to_polytope(cond, M)
    for dj, inst in zip(cond.disjuncts, instances):
        P = RationalMatrix.identity(M.n)
        for n, v in inst.orbit(horizon):
            P = P @ M
            if dj.holds(P) != inst.in_polytope(v):
                return False
    return True
