"""Linear recurrence sequences and the matrices that realise them.

Conventions: sequences are 1-based (u_1, u_2, ...), matrix powers 0-based.
A relation u_n = a_1 u_{n-1} + ... + a_d u_{n-d} holds for n > d.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .numeric import upoly


def _fr(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


class RationalMatrix:
    """Dense matrix over Q."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = [[_fr(v) for v in r] for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "RationalMatrix":
        return cls([[0] * c for _ in range(r)])

    @classmethod
    def diag(cls, entries) -> "RationalMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def n(self) -> int:
        r, c = self.shape
        if r != c:
            raise ValueError("matrix is not square")
        return r

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(map(tuple, self.rows)))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return RationalMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c) -> "RationalMatrix":
        c = _fr(c)
        return RationalMatrix([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other.rows))
        return RationalMatrix([[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows])

    def __pow__(self, k: int) -> "RationalMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        result = RationalMatrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def rmul_vector(self, v: Sequence) -> list[Fraction]:
        """Row vector times matrix: v·M."""
        if len(v) != self.shape[0]:
            raise ValueError("dimension mismatch")
        return [sum((_fr(v[i]) * self.rows[i][j] for i in range(len(v))), Fraction(0)) for j in range(self.shape[1])]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([list(c) for c in zip(*self.rows)])

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.n)), Fraction(0))

    def det(self) -> Fraction:
        a = [r[:] for r in self.rows]
        n = self.n
        d = Fraction(1)
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                d = -d
            d *= a[c][c]
            for r in range(c + 1, n):
                f = a[r][c] / a[c][c]
                if f:
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return d

    def inverse(self) -> "RationalMatrix":
        n = self.n
        a = [r[:] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                raise ZeroDivisionError("singular matrix")
            a[c], a[p] = a[p], a[c]
            piv = a[c][c]
            a[c] = [x / piv for x in a[c]]
            for r in range(n):
                if r != c and a[r][c]:
                    f = a[r][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return RationalMatrix([r[n:] for r in a])

    def charpoly(self) -> list[Fraction]:
        """det(xI - M), low-to-high, by Faddeev-LeVerrier."""
        n = self.n
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[n] = Fraction(1)
        Mk = RationalMatrix.zeros(n, n)
        I = RationalMatrix.identity(n)
        c = Fraction(1)
        for k in range(1, n + 1):
            Mk = self @ (Mk + I.scale(c))
            c = -Mk.trace() / k
            coeffs[n - k] = c
        return coeffs

    def kron(self, other: "RationalMatrix") -> "RationalMatrix":
        (r1, c1), (r2, c2) = self.shape, other.shape
        return RationalMatrix([[self.rows[i // r2][j // c2] * other.rows[i % r2][j % c2]
                                for j in range(c1 * c2)] for i in range(r1 * r2)])

    @staticmethod
    def block_diag(blocks: Sequence["RationalMatrix"]) -> "RationalMatrix":
        D = sum(b.n for b in blocks)
        rows = [[Fraction(0)] * D for _ in range(D)]
        off = 0
        for b in blocks:
            for i in range(b.n):
                rows[off + i][off:off + b.n] = b.rows[i]
            off += b.n
        return RationalMatrix(rows)

    def to_json(self):
        return [[str(v) for v in r] for r in self.rows]

    @classmethod
    def from_json(cls, obj) -> "RationalMatrix":
        return cls(obj)

    def __repr__(self):
        return "RationalMatrix(" + repr([[str(v) for v in r] for r in self.rows]) + ")"


# ---------------------------------------------------------------------------

@dataclass
class RecurrenceRelation:
    """u_n = a_1 u_{n-1} + ... + a_d u_{n-d} with initial terms u_1..u_d.

    An empty `initial_terms` marks a template (only the relation is known).
    """

    coefficients: list
    initial_terms: list = field(default_factory=list)
    minimal: bool = False

    def __post_init__(self):
        self.coefficients = [_fr(a) for a in self.coefficients]
        self.initial_terms = [_fr(u) for u in self.initial_terms]
        if not self.coefficients:
            raise ValueError("a recurrence needs order >= 1")
        if self.initial_terms and len(self.initial_terms) != len(self.coefficients):
            raise ValueError("need exactly d initial terms")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def characteristic_polynomial(self) -> list[Fraction]:
        """x^d - a_1 x^{d-1} - ... - a_d, low-to-high."""
        d = self.order
        return [-self.coefficients[d - 1 - k] for k in range(d)] + [Fraction(1)]

    def with_initial(self, terms) -> "RecurrenceRelation":
        return RecurrenceRelation(self.coefficients, list(terms)[:self.order], self.minimal)

    def terms(self, count: int) -> list[Fraction]:
        """u_1 .. u_count."""
        if not self.initial_terms:
            raise ValueError("template relation has no terms")
        out = list(self.initial_terms[:count])
        d = self.order
        while len(out) < count:
            out.append(sum((self.coefficients[i] * out[-1 - i] for i in range(d)), Fraction(0)))
        return out

    def satisfied_by(self, seq: Sequence) -> bool:
        """Whether seq (u_1, u_2, ...) satisfies the relation for every n > d in range."""
        d = self.order
        for n in range(d, len(seq)):
            if seq[n] != sum((self.coefficients[i] * seq[n - 1 - i] for i in range(d)), Fraction(0)):
                return False
        return True

    def to_json(self):
        return {"coefficients": [str(a) for a in self.coefficients],
                "initial_terms": [str(u) for u in self.initial_terms], "minimal": self.minimal}

    def __str__(self):
        parts = []
        for i, a in enumerate(self.coefficients, 1):
            if a:
                parts.append(f"{a}*u[n-{i}]")
        return "u[n] = " + (" + ".join(parts) if parts else "0")


def from_charpoly(cp: Sequence, initial_terms=()) -> RecurrenceRelation:
    """Relation from a monic characteristic polynomial (low-to-high)."""
    cp = [_fr(c) for c in cp]
    lead = cp[-1]
    cp = [c / lead for c in cp]
    d = len(cp) - 1
    if d < 1:
        raise ValueError("characteristic polynomial of degree 0")
    return RecurrenceRelation([-cp[d - i] for i in range(1, d + 1)], list(initial_terms))


def plain_companion(coefficients: Sequence) -> RationalMatrix:
    """The matrix C with e_1 C^n e_d^T the impulse response of the relation:
    ones on the subdiagonal, last column (a_d, ..., a_1)."""
    a = [_fr(x) for x in coefficients]
    d = len(a)
    rows = [[Fraction(0)] * d for _ in range(d)]
    for k in range(1, d):
        rows[k][k - 1] = Fraction(1)
    for k in range(d):
        rows[k][d - 1] = a[d - 1 - k]
    return RationalMatrix(rows)


def _shift_state(a: Sequence[Fraction], v: Sequence[Fraction]) -> list[Fraction]:
    D = len(a)
    return list(v[1:]) + [sum((a[i] * v[D - 1 - i] for i in range(D)), Fraction(0))]


def companion_matrix(r: RecurrenceRelation) -> RationalMatrix:
    """M with (M^n)_{1,D} = u_n for all n >= 1.

    D is the order d when the sequence, extended backwards by u_0 = 0 (u_0 = 1
    when d = 1), still satisfies the relation at n = d; otherwise the relation
    is padded with a_{d+1} = 0 and D = d + 1.
    """
    if not r.initial_terms:
        raise ValueError("companion matrix needs initial terms")
    a = list(r.coefficients)
    u = list(r.initial_terms)
    d = len(a)
    w0 = Fraction(1) if d == 1 else Fraction(0)
    ok = u[d - 1] == sum((a[i] * (u[d - 2 - i] if d - 2 - i >= 0 else w0) for i in range(d)), Fraction(0))
    if not ok:
        a = a + [Fraction(0)]
        u = r.terms(d + 1)
        d += 1
        w0 = Fraction(0)
    D = d
    if all(x == 0 for x in u):
        return RationalMatrix.zeros(D, D)
    if D == 1:
        return RationalMatrix([[a[0]]])
    # basis of the solution space (initial vectors at indices 0..D-1):
    # b_1 = the sequence itself, b_D = impulse at 0, middle ones taken from the
    # plain companion so that impulse-response inputs return it unchanged
    C = plain_companion(a)
    w = [w0] + u[:D - 1]
    powers = [RationalMatrix.identity(D)]
    for _ in range(D - 1):
        powers.append(powers[-1] @ C)
    std = [[powers[n][k, D - 1] for n in range(D)] for k in range(D)]
    basis = [w] + std[1:]
    try:
        B = RationalMatrix(basis)
        Binv = B.inverse()
    except ZeroDivisionError:
        basis = [w]
        for i in range(1, D):
            cand = [Fraction(int(j == i)) for j in range(D)]
            trial = basis + [cand]
            if _rank(trial) == len(trial):
                basis = trial
            if len(basis) == D - 1:
                break
        basis.append([Fraction(int(j == 0)) for j in range(D)])
        B = RationalMatrix(basis)
        Binv = B.inverse()
    shifted = RationalMatrix([_shift_state(a, b) for b in basis])
    return shifted @ Binv


def _rank(rows) -> int:
    a = [list(r) for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[rank], a[p] = a[p], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def entry_recurrence(M: RationalMatrix, i: int, j: int, minimal: bool = False) -> RecurrenceRelation:
    """Relation (from the characteristic polynomial, by Cayley-Hamilton) satisfied
    by (M^n)_{i,j}; i, j are 1-based."""
    d = M.n
    if not (1 <= i <= d and 1 <= j <= d):
        raise IndexError("entry index out of range")
    rel = from_charpoly(M.charpoly())
    terms = []
    P = M
    for _ in range(d):
        terms.append(P[i - 1, j - 1])
        P = P @ M
    rel = rel.with_initial(terms)
    return minimize(rel) if minimal else rel


def berlekamp_massey(seq: Sequence) -> list[Fraction]:
    """Shortest relation coefficients (a_1..a_L) generating seq, over Q."""
    s = [_fr(x) for x in seq]
    C = [Fraction(1)]
    B = [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n in range(len(s)):
        disc = s[n] + sum((C[i] * s[n - i] for i in range(1, L + 1)), Fraction(0))
        if disc == 0:
            m += 1
            continue
        coef = disc / b
        T = list(C)
        need = len(B) + m
        if len(C) < need:
            C = C + [Fraction(0)] * (need - len(C))
        for i, bi in enumerate(B):
            C[i + m] -= coef * bi
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, disc, 1
        else:
            m += 1
    C = C + [Fraction(0)] * (L + 1 - len(C))
    return [-C[i] for i in range(1, L + 1)]


def minimize(r: RecurrenceRelation) -> RecurrenceRelation:
    """Minimal-order relation of the sequence; 2d terms suffice since d bounds the order."""
    seq = r.terms(2 * r.order)
    a = berlekamp_massey(seq)
    if not a:
        # the zero sequence
        return RecurrenceRelation([Fraction(0)], [Fraction(0)], True)
    return RecurrenceRelation(a, seq[:len(a)], True)


def constant_sequence(c) -> RecurrenceRelation:
    return RecurrenceRelation([1], [c], True)


def lrs_combine(u: RecurrenceRelation, v: RecurrenceRelation, op: str) -> RecurrenceRelation:
    """Relation for the termwise sum or product of two sequences."""
    if op == "sum":
        cp = upoly.mul(u.characteristic_polynomial(), v.characteristic_polynomial())
        rel = from_charpoly(cp)
        k = rel.order
        return rel.with_initial([x + y for x, y in zip(u.terms(k), v.terms(k))])
    if op == "product":
        K = plain_companion(u.coefficients).kron(plain_companion(v.coefficients))
        rel = from_charpoly(K.charpoly())
        k = rel.order
        return rel.with_initial([x * y for x, y in zip(u.terms(k), v.terms(k))])
    raise ValueError(f"unknown combination {op!r}")


def scale_sequence(u: RecurrenceRelation, c) -> RecurrenceRelation:
    return RecurrenceRelation(u.coefficients, [_fr(c) * x for x in u.initial_terms], u.minimal)


# ---------------------------------------------------------------------------
# polynomial sequences

def binomial_recurrence(d: int) -> RecurrenceRelation:
    """Template with characteristic polynomial (x-1)^{d+1}: every polynomial
    sequence of degree <= d satisfies it."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    q = [Fraction((-1) ** (i + 1) * comb(d + 1, i)) for i in range(1, d + 2)]
    return RecurrenceRelation(q)


def md_matrix(d: int) -> RationalMatrix:
    """The (d+1)x(d+1) matrix with the shifted identity block and last column
    (q_{d+1}, q_d, ..., q_1)."""
    q = binomial_recurrence(d).coefficients
    D = d + 1
    rows = [[Fraction(0)] * D for _ in range(D)]
    for k in range(1, D):
        rows[k][k - 1] = Fraction(1)
    for k in range(D):
        rows[k][D - 1] = q[D - 1 - k]
    return RationalMatrix(rows)


def eval_poly_orbit(P: Sequence, n: int, d: int | None = None) -> Fraction:
    """(P(1), ..., P(d+1)) M_d^n h_d^T, which equals P(n+1).

    P is a coefficient list (low-to-high); d defaults to deg P.
    """
    P = upoly.trim([_fr(c) for c in P])
    deg = max(upoly.degree(P), 0)
    if d is None:
        d = deg
    if deg > d:
        raise ValueError(f"degree {deg} exceeds d = {d}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = [upoly.evaluate(P, Fraction(k)) if P else Fraction(0) for k in range(1, d + 2)]
    v = (md_matrix(d) ** n).rmul_vector(p) if n else p
    return v[0]
