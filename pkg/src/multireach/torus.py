"""Integer lattices, Laurent systems and linear tori of the multiplicative group.

A lattice L in Z^n presents the algebraic subgroup H_L = {z : z^a = 1 for a in L}.
Its identity component is parametrised by monomials t^W, where the rows of W
form a basis of the orthogonal complement of L.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .numeric import QuadraticNumber

log = logging.getLogger(__name__)

Q = QuadraticNumber


# ---------------------------------------------------------------------------
# integer normal forms with unimodular trackers

def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s a + t b = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _transpose(A):
    return [list(r) for r in zip(*A)] if A else []


def hermite_normal_form(A: Sequence[Sequence[int]]):
    """(H, U, rank) with U unimodular, U A = H in row Hermite form: the first
    rank rows are nonzero with positive pivots, entries above a pivot reduced
    into [0, pivot), and the remaining rows are zero."""
    m = len(A)
    n = len(A[0]) if m else 0
    H = [[int(v) for v in row] for row in A]
    U = _identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, s, t = _ext_gcd(a, b)
            p, q = -b // g, a // g
            H[r], H[i] = ([s * x + t * y for x, y in zip(H[r], H[i])],
                          [p * x + q * y for x, y in zip(H[r], H[i])])
            U[r], U[i] = ([s * x + t * y for x, y in zip(U[r], U[i])],
                          [p * x + q * y for x, y in zip(U[r], U[i])])
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            k = H[i][c] // H[r][c]
            if k:
                H[i] = [x - k * y for x, y in zip(H[i], H[r])]
                U[i] = [x - k * y for x, y in zip(U[i], U[r])]
        r += 1
    assert _matmul(U, [list(map(int, row)) for row in A]) == H if m and n else True
    return H, U, r


def smith_normal_form(A: Sequence[Sequence[int]]):
    """(S, U, V) with U, V unimodular and U A V = S diagonal, each diagonal
    entry dividing the next."""
    m = len(A)
    n = len(A[0]) if m else 0
    S = [[int(v) for v in row] for row in A]
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    for k in range(min(m, n)):
        while True:
            nz = [(abs(S[i][j]), i, j) for i in range(k, m) for j in range(k, n) if S[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(k, i)
            swap_cols(k, j)
            piv = S[k][k]
            done = True
            for i in range(k + 1, m):
                q = S[i][k] // piv
                if q:
                    S[i] = [x - q * y for x, y in zip(S[i], S[k])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[k])]
                if S[i][k]:
                    done = False
            for j in range(k + 1, n):
                q = S[k][j] // piv
                if q:
                    for row in S:
                        row[j] -= q * row[k]
                    for row in V:
                        row[j] -= q * row[k]
                if S[k][j]:
                    done = False
            if not done:
                continue
            # divisibility: fold an offending row into row k and repeat
            bad = next(((i, j) for i in range(k + 1, m) for j in range(k + 1, n) if S[i][j] % piv), None)
            if bad is None:
                break
            i = bad[0]
            S[k] = [x + y for x, y in zip(S[k], S[i])]
            U[k] = [x + y for x, y in zip(U[k], U[i])]
        if k < min(m, n) and S[k][k] < 0:
            S[k] = [-x for x in S[k]]
            U[k] = [-x for x in U[k]]
    if m and n:
        assert _matmul(_matmul(U, [list(map(int, r)) for r in A]), V) == S
    return S, U, V


def _unimodular_inverse(U):
    from .lrs import RationalMatrix

    inv = RationalMatrix([[Fraction(v) for v in row] for row in U]).inverse()
    out = [[int(v) for v in row] for row in inv.rows]
    assert all(v == int(v) for row in inv.rows for v in row)
    return out


def _det(A) -> int:
    from .lrs import RationalMatrix

    return int(RationalMatrix([[Fraction(v) for v in row] for row in A]).det()) if A else 1


def lll_reduce(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    if not rows:
        return []
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    dm = DomainMatrix([[ZZ(int(v)) for v in r] for r in rows], (len(rows), len(rows[0])), ZZ)
    return [[int(v) for v in r] for r in dm.lll().to_Matrix().tolist()]


# ---------------------------------------------------------------------------
# lattices

@dataclass(frozen=True)
class Lattice:
    """Row lattice of an integer basis, canonicalised by Hermite form."""
    basis: tuple
    ambient: int

    @classmethod
    def from_generators(cls, gens: Sequence[Sequence[int]], ambient: int | None = None) -> "Lattice":
        gens = [list(map(int, g)) for g in gens]
        if ambient is None:
            if not gens:
                raise ValueError("ambient dimension needed for an empty generating set")
            ambient = len(gens[0])
        if not gens:
            return cls((), ambient)
        H, _, r = hermite_normal_form(gens)
        return cls(tuple(tuple(row) for row in H[:r]), ambient)

    @classmethod
    def full(cls, n: int) -> "Lattice":
        return cls.from_generators(_identity(n), n)

    @classmethod
    def zero(cls, n: int) -> "Lattice":
        return cls((), n)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.basis]

    def contains(self, v: Sequence[int]) -> bool:
        v = [int(x) for x in v]
        if len(v) != self.ambient:
            raise ValueError("dimension mismatch")
        for row in self.basis:
            c = next(j for j, x in enumerate(row) if x)
            if v[c] % row[c]:
                return False
            k = v[c] // row[c]
            v = [a - k * b for a, b in zip(v, row)]
        return not any(v)

    def orthogonal_complement(self) -> "Lattice":
        if not self.basis:
            return Lattice.full(self.ambient)
        return kernel(_transpose(self.rows()))

    def saturation(self) -> "Lattice":
        return self.orthogonal_complement().orthogonal_complement()

    def is_saturated(self) -> bool:
        return self.saturation() == self

    def index_in_saturation(self) -> int:
        if not self.basis:
            return 1
        S, _, _ = smith_normal_form(self.rows())
        out = 1
        for i in range(self.rank):
            out *= S[i][i]
        return out

    def reduced_basis(self) -> list[list[int]]:
        return lll_reduce(self.rows())

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.from_generators(self.rows() + other.rows(), self.ambient)

    def to_json(self):
        return {"ambient": self.ambient, "basis": [list(r) for r in self.basis]}


def kernel(A: Sequence[Sequence[int]]) -> Lattice:
    """{x in Z^m : x A = 0} for an m x k integer matrix A."""
    m = len(A)
    H, U, r = hermite_normal_form(A)
    return Lattice.from_generators(U[r:], m)


# ---------------------------------------------------------------------------
# Laurent polynomials

def _coef(c):
    return c if isinstance(c, Q) else Q(c)


class LaurentPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != nvars:
                raise ValueError("exponent length mismatch")
            c = _coef(c)
            if c:
                self.terms[e] = self.terms.get(e, Q(0)) + c
                if not self.terms[e]:
                    del self.terms[e]

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, i, power=1, coef=1):
        e = [0] * nvars
        e[i] = power
        return cls(nvars, {tuple(e): coef})

    @classmethod
    def from_mpoly(cls, p) -> "LaurentPoly":
        return cls(p.nvars, {e: c for e, c in p.terms.items()})

    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(self.nvars, other)
        if other.nvars != self.nvars:
            raise ValueError("dimension mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Q(0)) + c
        return LaurentPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Q(0)) + c1 * c2
        return LaurentPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = LaurentPoly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def exponents(self) -> list[tuple]:
        return sorted(self.terms)

    def map_exponents(self, W: Sequence[Sequence[int]]) -> "LaurentPoly":
        """Exponent a goes to W a; W is k x nvars, giving k variables."""
        k = len(W)
        out: dict = {}
        for e, c in self.terms.items():
            new = tuple(sum(W[i][j] * e[j] for j in range(self.nvars)) for i in range(k))
            out[new] = out.get(new, Q(0)) + c
        return LaurentPoly(k, out)

    def evaluate(self, point: Sequence) -> QuadraticNumber:
        total = Q(0)
        for e, c in self.terms.items():
            term = c
            for z, a in zip(point, e):
                term = term * (_coef(z) ** a if a >= 0 else _coef(z).inverse() ** (-a))
            total = total + term
        return total

    def group_by_last(self, r: int) -> dict:
        """{last r exponents: Laurent poly in the first nvars - r variables}."""
        groups: dict = {}
        k = self.nvars - r
        for e, c in self.terms.items():
            groups.setdefault(e[k:], {})[e[:k]] = c
        return {key: LaurentPoly(k, t) for key, t in groups.items()}

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"z{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(f"{n}^{a}" if a != 1 else n for n, a in zip(names, e) if a)
            cs = f"({c})"
            parts.append(cs if not mono else f"{cs}*{mono}")
        return " + ".join(parts)

    def to_json(self):
        def q(c):
            return {"a": str(c.a), "b": str(c.b), "d": c.d}

        return {"nvars": self.nvars, "terms": [[list(e), q(c)] for e, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, obj) -> "LaurentPoly":
        terms = {}
        for e, c in obj["terms"]:
            terms[tuple(e)] = Q(Fraction(c["a"]), Fraction(c["b"]), int(c["d"]))
        return cls(int(obj["nvars"]), terms)

    def __repr__(self):
        return f"LaurentPoly({self.to_str()})"


@dataclass
class LaurentSystem:
    """Equations p = 0 in z_1..z_n, plus z_j z_{j+1} = 1 for each conjugate pair."""
    nvars: int
    polys: list
    conjugate_pairs: list = field(default_factory=list)

    def equations(self) -> list[LaurentPoly]:
        out = list(self.polys)
        for j, k in self.conjugate_pairs:
            out.append(LaurentPoly(self.nvars, {_unit(self.nvars, j, k): 1, (0,) * self.nvars: -1}))
        return out

    def satisfied_by(self, point: Sequence) -> bool:
        return all(not p.evaluate(point) for p in self.equations())

    def obviously_empty(self) -> bool:
        """Some equation is a single monomial, which never vanishes on the torus."""
        return any(p.is_monomial() for p in self.polys)

    def is_trivial(self) -> bool:
        return all(p.is_zero() for p in self.polys) and not self.conjugate_pairs

    def to_json(self):
        return {"nvars": self.nvars, "polys": [p.to_json() for p in self.polys],
                "conjugate_pairs": [list(p) for p in self.conjugate_pairs]}

    @classmethod
    def from_json(cls, obj) -> "LaurentSystem":
        return cls(int(obj["nvars"]), [LaurentPoly.from_json(p) for p in obj["polys"]],
                   [tuple(p) for p in obj.get("conjugate_pairs", [])])


def _unit(n, j, k):
    e = [0] * n
    e[j] += 1
    e[k] += 1
    return tuple(e)


# ---------------------------------------------------------------------------
# monoidal maps and tori

@dataclass
class MonoidalMap:
    """phi_A(z)_j = z^{A_j} with A_j the j-th column; exponents of f o phi_A
    are A a."""
    A: list
    _inverse: list | None = None

    def __post_init__(self):
        self.A = [[int(v) for v in row] for row in self.A]
        n = len(self.A)
        if any(len(r) != n for r in self.A):
            raise ValueError("monoidal map needs a square matrix")
        if abs(_det(self.A)) != 1:
            raise ValueError("monoidal map needs determinant +-1")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def inverse(self) -> "MonoidalMap":
        if self._inverse is None:
            self._inverse = _unimodular_inverse(self.A)
        return MonoidalMap(self._inverse, self.A)

    def apply(self, z: Sequence) -> list:
        """phi_A(z) for a torus point given by QuadraticNumbers."""
        out = []
        for j in range(self.n):
            val = Q(1)
            for i in range(self.n):
                a = self.A[i][j]
                zi = _coef(z[i])
                val = val * (zi ** a if a >= 0 else zi.inverse() ** (-a))
            out.append(val)
        return out

    def norm(self) -> int:
        """Largest l1 norm of a column."""
        return max(sum(abs(self.A[i][j]) for i in range(self.n)) for j in range(self.n))

    def to_json(self):
        return {"A": self.A}


def monoidal_transform(X: LaurentSystem, phi: MonoidalMap) -> LaurentSystem:
    """phi^-1(X): the polynomials f o phi_A (exponent a goes to A a).  Conjugate
    pair constraints are carried over as explicit equations."""
    if phi.n != X.nvars:
        raise ValueError("dimension mismatch between system and monoidal map")
    return LaurentSystem(X.nvars, [p.map_exponents(phi.A) for p in X.equations()])


@dataclass
class TorusParametrization:
    map: MonoidalMap
    r: int
    lattice: Lattice           # the saturated lattice whose torus is parametrised
    N: int                     # largest l1 norm of the reduced lattice basis
    norm_bound_ok: bool

    @property
    def W(self) -> list[list[int]]:
        """The last r rows: z = t^W parametrises the torus."""
        return self.map.A[self.map.n - self.r:]


def torus_parametrization(lat: Lattice) -> TorusParametrization:
    """A in SL_n(Z) (up to sign) with phi_A(1 x G_m^r) the linear torus of the
    saturation of lat, where r = n - rank."""
    n = lat.ambient
    r = n - lat.rank
    if r < 1:
        raise ValueError("lattice of full rank gives a zero-dimensional subgroup")
    sat = lat.saturation()
    if sat != lat:
        log.info("saturating lattice of index %d before parametrising", lat.index_in_saturation())
    if sat.rank == 0:
        A = _identity(n)
        return TorusParametrization(MonoidalMap(A), r, sat, 0, True)
    W = lll_reduce(sat.orthogonal_complement().rows())
    # SNF of the primitive W: U W V = [I | 0], so W = U^-1 [I | 0] V^-1
    S, U, V = smith_normal_form(W)
    if any(S[i][i] != 1 for i in range(r)):
        raise AssertionError("complement basis is not primitive")
    Vinv = _unimodular_inverse(V)
    head = Vinv[r:]
    head = _size_reduce(head, W)
    A = head + W
    if abs(_det(A)) != 1:
        raise AssertionError("completion is not unimodular")
    basis = lll_reduce(sat.rows())
    N = max(sum(abs(v) for v in row) for row in basis)
    phi = MonoidalMap(A)
    for a in sat.rows():
        if any(sum(w[j] * a[j] for j in range(n)) for w in W):
            raise AssertionError("parametrisation does not annihilate the lattice")
    ok = phi.norm() <= n ** 3 * N ** (n - r)
    return TorusParametrization(phi, r, sat, N, ok)


def _size_reduce(head, W):
    """Shorten completion rows by subtracting integer combinations of each
    other and of the rows of W (keeps the determinant)."""
    from .lrs import RationalMatrix

    if not head:
        return head
    head = lll_reduce(head) if len(head) > 1 else head
    if not W:
        return head
    G = RationalMatrix([[Fraction(sum(a * b for a, b in zip(u, v))) for v in W] for u in W])
    Ginv = G.inverse()
    out = []
    for h in head:
        proj = [sum(Fraction(h[k] * W[j][k]) for k in range(len(h))) for j in range(len(W))]
        coeffs = [sum(Ginv.rows[i][j] * proj[j] for j in range(len(W))) for i in range(len(W))]
        ks = [round(c) for c in coeffs]
        out.append([h[k] - sum(ks[i] * W[i][k] for i in range(len(W))) for k in range(len(h))])
    return out


def torus_contains(X: LaurentSystem, lat: Lattice) -> bool:
    """Whether the linear torus of sat(lat) lies inside X (exact substitution)."""
    r = lat.ambient - lat.rank
    if r == 0:
        return all(p.evaluate([1] * X.nvars) == 0 for p in X.equations())
    W = lll_reduce(lat.saturation().orthogonal_complement().rows())
    return all(p.map_exponents(W).is_zero() for p in X.equations())


def _set_partitions(items: list, min_block: int = 2):
    """Partitions of items into blocks of size >= min_block."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    from itertools import combinations

    for k in range(min_block - 1, len(rest) + 1):
        for others in combinations(range(len(rest)), k):
            block = [first] + [rest[i] for i in others]
            remaining = [rest[i] for i in range(len(rest)) if i not in others]
            for tail in _set_partitions(remaining, min_block):
                yield [block] + tail


def candidate_lattices_from_exponents(X: LaurentSystem, limit: int = 20000) -> list[Lattice]:
    """Lattices generated by exponent differences within blocks of a
    partition of each polynomial's exponent set (blocks of size >= 2: a torus
    inside X must cancel every monomial against another one).  Deduplicated by
    the Hermite form of the saturation."""
    eqs = [p for p in X.equations() if not p.is_zero()]
    if not eqs:
        return [Lattice.zero(X.nvars)]
    per_poly = []
    for p in eqs:
        parts = []
        for part in _set_partitions(p.exponents()):
            gens = []
            for block in part:
                a0 = block[0]
                gens.extend([tuple(x - y for x, y in zip(a, a0)) for a in block[1:]])
            parts.append(gens)
            if len(parts) > limit:
                raise OverflowError("too many exponent partitions")
        if not parts:
            return []
        per_poly.append(parts)
    seen = {}
    count = 0
    for choice in product(*per_poly):
        count += 1
        if count > limit:
            raise OverflowError("too many exponent partitions")
        gens = [g for gens in choice for g in gens if any(g)]
        lat = Lattice.from_generators(gens, X.nvars) if gens else Lattice.zero(X.nvars)
        sat = lat.saturation()
        seen.setdefault(sat.basis, sat)
    return sorted(seen.values(), key=lambda L: (-L.rank, L.basis))


def maximal_subtori(X: LaurentSystem) -> list[Lattice]:
    """Candidate lattices of positive-dimensional tori actually contained in X."""
    return [L for L in candidate_lattices_from_exponents(X)
            if L.rank < X.nvars and torus_contains(X, L)]


@dataclass
class CosetDecomposition:
    param: TorusParametrization
    X1: LaurentSystem

    @property
    def map(self) -> MonoidalMap:
        return self.param.map

    def lift(self, g: Sequence, t: Sequence) -> list:
        """phi_A(g x t), a point of the union of cosets."""
        return self.map.apply(list(g) + list(t))


def coset_union_decomposition(X: LaurentSystem, lat: Lattice) -> CosetDecomposition:
    """Union of the cosets gH inside X, H the linear torus of lat, as
    phi_A(X1 x G_m^r): X1 collects, for each polynomial of phi_A^-1(X), its
    coefficient polynomials with respect to the last r variables."""
    param = torus_parametrization(lat)
    r = param.r
    Xt = monoidal_transform(X, param.map)
    k = X.nvars - r
    polys = []
    for p in Xt.polys:
        for _, coeff in sorted(p.group_by_last(r).items()):
            if not coeff.is_zero() and coeff not in polys:
                polys.append(coeff)
    return CosetDecomposition(param, LaurentSystem(k, polys))
