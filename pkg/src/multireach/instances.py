"""Instance files (JSON, schema 1) with a canonical byte-stable serialisation.

Matrices are arrays of arrays of strings holding exact rationals ("4/5"), sets
are {"dnf": [{"eq": "poly", "gt": ["poly", ...]}, ...]} in x and y.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .lrs import RationalMatrix
from .poly import ParseError
from .semialg import SemiAlgebraicSet2D

SCHEMA = 1
KINDS = ("planar", "rotation", "gadget", "reduction")


def _fraction(s, where: str) -> Fraction:
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: not an exact rational: {s!r}") from exc


def parse_matrix(obj, where: str = "matrix") -> RationalMatrix:
    """From a JSON array of arrays, or a string like "[[4/5,3/5],[-3/5,4/5]]"."""
    if isinstance(obj, str):
        rows = []
        body = obj.strip()
        if not (body.startswith("[[") and body.endswith("]]")):
            raise ParseError(f"{where}: expected [[a,b],[c,d]]", obj, 0)
        for chunk in body[2:-2].split("],"):
            rows.append([c for c in chunk.strip().lstrip("[").split(",")])
        obj = rows
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError(f"{where}: expected a nonempty array of arrays")
    rows = [[_fraction(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(obj)]
    if any(len(r) != len(rows) for r in rows):
        raise ParseError(f"{where}: matrix must be square")
    return RationalMatrix(rows)


def matrix_json(M: RationalMatrix) -> list:
    return [[str(v) for v in row] for row in M.rows]


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


@dataclass
class Instance:
    kind: str
    matrix: RationalMatrix | None = None
    source: SemiAlgebraicSet2D | None = None
    target: SemiAlgebraicSet2D | None = None
    visits: int = 1
    budget: int = 50
    metadata: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)       # kind-specific payload (gadget, reduction)

    def to_json(self) -> dict:
        out = {"schema": SCHEMA, "kind": self.kind}
        if self.matrix is not None:
            out["matrix"] = matrix_json(self.matrix)
        if self.source is not None:
            out["source"] = self.source.to_json()
        if self.target is not None:
            out["target"] = self.target.to_json()
        if self.kind in ("planar", "rotation"):
            out["visits"] = self.visits
            out["budget"] = self.budget
        if self.metadata:
            out["metadata"] = self.metadata
        out.update(self.extra)
        return out

    def dumps(self) -> str:
        return canonical_dumps(self.to_json())


def _set_from(obj, where: str) -> SemiAlgebraicSet2D:
    try:
        return SemiAlgebraicSet2D.from_json(obj)
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def load_instance(obj) -> Instance:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError("instance must be a JSON object")
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"unsupported schema {obj.get('schema')!r}")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ParseError(f"kind must be one of {', '.join(KINDS)}")
    meta = obj.get("metadata", {})
    if kind in ("planar", "rotation"):
        for key in ("matrix", "source", "target"):
            if key not in obj:
                raise ParseError(f"missing key {key!r}")
        M = parse_matrix(obj["matrix"])
        if M.n != 2:
            raise ParseError(f"{kind} instances need a 2x2 matrix")
        visits = obj.get("visits", 1)
        budget = obj.get("budget", 50)
        if not isinstance(visits, int) or visits < 1:
            raise ParseError("visits must be a positive integer")
        if not isinstance(budget, int) or budget < 1:
            raise ParseError("budget must be a positive integer")
        return Instance(kind, M, _set_from(obj["source"], "source"), _set_from(obj["target"], "target"),
                        visits, budget, meta)
    known = {"schema", "kind", "metadata", "matrix"}
    extra = {k: v for k, v in obj.items() if k not in known}
    M = parse_matrix(obj["matrix"]) if "matrix" in obj else None
    if kind == "reduction":
        if M is None or "condition" not in obj:
            raise ParseError("reduction instances need 'matrix' and 'condition'")
        if not isinstance(obj["condition"], list):
            raise ParseError("condition must be a list of {eq, gt} disjuncts")
        extra["condition"] = obj["condition"]
    return Instance(kind, M, None, None, 1, 50, meta, extra)


def read_instance(path: str) -> Instance:
    with open(path) as fh:
        return load_instance(fh.read())


def planar_instance(M, S, T, visits: int, budget: int = 50, kind: str = "planar", metadata=None) -> Instance:
    S = SemiAlgebraicSet2D.parse(S) if isinstance(S, str) else S
    T = SemiAlgebraicSet2D.parse(T) if isinstance(T, str) else T
    M = M if isinstance(M, RationalMatrix) else RationalMatrix(M)
    return Instance(kind, M, S, T, visits, budget, dict(metadata or {}))
