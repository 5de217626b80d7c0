"""Multiple reachability for rotations: 2x2 rational matrices with det 1 and
eigenvalues lambda, conj(lambda) on the unit circle, lambda not a root of unity.

Pipeline: infinitely many visits are detected by level curves of the invariant
quadratic form; otherwise the visit times (x_1 < ... < x_m) solve a Laurent
system in z_{2i-1} = lambda^{x_i}, z_{2i} = lambda^{-x_i}, whose solutions
are bounded through a pluggable height-bound provider, and the bounded range
is searched exactly.
"""
from __future__ import annotations

import json
import logging
import math
import subprocess
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .lrs import RationalMatrix
from .numeric import QuadraticNumber, weil_height
from .planar import (NO, NO_WITHIN_BUDGET, UNSUPPORTED, YES, InvariantBreach, Verdict, _as_matrix,
                     classify_matrix, invariant_form)
from .poly import MPoly
from .semialg import SemiAlgebraicSet2D, circle_arc_test, is_empty
from .semialg.points import RationalPoint, as_point, simplest
from .semialg.radii import circle_arc_witness_level
from .semialg.sets import SignSystem, linear_coefficients
from .torus import (Lattice, LaurentPoly, LaurentSystem, candidate_lattices_from_exponents,
                    coset_union_decomposition, kernel)

log = logging.getLogger(__name__)

Q = QuadraticNumber


class BoundProviderError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# instances and bound providers

@dataclass
class UserBudget:
    B: int
    mode = "UserBudget"


@dataclass
class EffectiveOracle:
    """callback(LaurentSystem) -> b, a bound on the height of the points of
    the system lying outside its positive-dimensional torus cosets."""
    callback: Callable
    mode = "EffectiveOracle"

    def bound(self, X: LaurentSystem) -> int:
        try:
            b = self.callback(X)
        except Exception as exc:       # provider contract: any failure is reported as such
            raise BoundProviderError(f"bound provider failed: {exc}") from exc
        if not isinstance(b, (int, Fraction)) or b < 0:
            raise BoundProviderError(f"bound provider returned {b!r}")
        return b


def executable_oracle(path: str, timeout: float = 60.0) -> EffectiveOracle:
    """Provider backed by an executable that reads a serialised Laurent system
    on stdin and prints an integer."""

    def call(X: LaurentSystem) -> int:
        res = subprocess.run([path], input=json.dumps(X.to_json()), capture_output=True, text=True,
                             timeout=timeout, check=True)
        return int(res.stdout.strip())

    return EffectiveOracle(call)


@dataclass
class RotationInstance:
    S: SemiAlgebraicSet2D
    T: SemiAlgebraicSet2D
    M: RationalMatrix
    m: int
    budget: int = 50
    bound_provider: object = None

    def __post_init__(self):
        if isinstance(self.S, str):
            self.S = SemiAlgebraicSet2D.parse(self.S)
        if isinstance(self.T, str):
            self.T = SemiAlgebraicSet2D.parse(self.T)
        self.M = _as_matrix(self.M)
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.M.det() != 1:
            raise ValueError("a rotation needs determinant 1")
        ec = classify_matrix(self.M)
        if ec.kind != "ComplexPair":
            raise ValueError("a rotation needs a complex eigenvalue pair")
        if ec.degenerate:
            raise ValueError(f"degenerate rotation (order {ec.degenerate_order}); use residue classes")
        if self.bound_provider is None:
            self.bound_provider = UserBudget(self.budget)

    @property
    def eigenvalue(self) -> QuadraticNumber:
        return rotation_eigenvalue(self.M)


def rotation_eigenvalue(M) -> QuadraticNumber:
    """lambda = (tr + sqrt(tr^2 - 4)) / 2, the eigenvalue with positive imaginary part."""
    tr = _as_matrix(M).trace()
    a, q = tr.numerator, tr.denominator
    return Q(tr / 2, Fraction(1, 2 * q), a * a - 4 * q * q)


def eigenvalue_height(M, precision=Fraction(1, 10**9)):
    return weil_height(rotation_eigenvalue(M), precision)


class _Powers:
    def __init__(self, M: RationalMatrix):
        self.M = M
        self.cache = [RationalMatrix.identity(2)]

    def __getitem__(self, n: int) -> RationalMatrix:
        while len(self.cache) <= n:
            self.cache.append(self.cache[-1] @ self.M)
        return self.cache[n]


# ---------------------------------------------------------------------------
# infinitely many visits

def invariant_form_poly(M) -> MPoly:
    """Integer quadratic form Q with Q(v M) = Q(v)."""
    g11, g12, g22 = invariant_form(M)
    scale = math.lcm(g11.denominator, (2 * g12).denominator, g22.denominator)
    x, y = MPoly.var(2, 0, 1), MPoly.var(2, 1, 1)
    return x * x * (g11 * scale) + x * y * (2 * g12 * scale) + y * y * (g22 * scale)


def decide_infinite_visits(S, T, M) -> bool:
    """Some point of S visits T infinitely often.  Orbits run densely along
    level curves of the invariant form, so this holds iff some level curve
    meeting S has an open arc inside T."""
    S = _set(S)
    T = _set(T)
    return circle_arc_test(T, S, invariant_form_poly(M))


def _set(X) -> SemiAlgebraicSet2D:
    return SemiAlgebraicSet2D.parse(X) if isinstance(X, str) else X


def _member_after(T: SemiAlgebraicSet2D, point, A: RationalMatrix) -> bool:
    """p A in T, exactly."""
    if hasattr(point, "times"):
        return T.member(point.times(A.rows))
    return T.transform(A.rows).member(point)


def _infinite_witness(S, T, M, m: int, max_steps: int):
    """A point on an arc level together with its first m visit times."""
    Qf = invariant_form_poly(M)
    found = circle_arc_witness_level(T, S, Qf)
    if found is None:
        return None
    s, _ = found
    if s.is_rational():
        curve = Qf - s.to_fraction()
    else:
        # union of the level curves of s and its conjugates; the orbit check
        # below is exact either way
        curve = MPoly.const(2, 0)
        for k, ck in enumerate(s.poly):
            curve = curve + (Qf ** k) * ck
    res = is_empty(S.intersect(SemiAlgebraicSet2D.from_system([curve])))
    if res.empty:
        return None
    p = simplest(res.witness)
    visits = []
    if isinstance(p, RationalPoint):
        v = p
        for n in range(1, max_steps + 1):
            v = v.times(M.rows)
            if T.member(v):
                visits.append(n)
                if len(visits) == m:
                    return p, visits
        return None
    powers = _Powers(M)
    for n in range(1, max_steps + 1):
        if _member_after(T, p, powers[n]):
            visits.append(n)
            if len(visits) == m:
                return p, visits
    return None


# ---------------------------------------------------------------------------
# bounded witness search

@dataclass
class SearchResult:
    found: tuple | None          # (visits tuple, exact point)
    exhausted: bool
    checked: int = 0


def _single_line(T: SemiAlgebraicSet2D):
    """(c1, c2, c3) when T is exactly one line c1 x + c2 y + c3 = 0."""
    if len(T.disjuncts) != 1:
        return None
    d = T.disjuncts[0]
    if len(d.eqs) != 1 or d.strict:
        return None
    return linear_coefficients(d.eqs[0])


def _line_point(c, A1: RationalMatrix, A2: RationalMatrix):
    """The point p with p A_i c^T + c3 = 0 for i = 1, 2 (None if parallel)."""
    c1, c2, c3 = c
    w1 = [A1.rows[0][0] * c1 + A1.rows[0][1] * c2, A1.rows[1][0] * c1 + A1.rows[1][1] * c2]
    w2 = [A2.rows[0][0] * c1 + A2.rows[0][1] * c2, A2.rows[1][0] * c1 + A2.rows[1][1] * c2]
    det = w1[0] * w2[1] - w1[1] * w2[0]
    if det == 0:
        return None
    # p . w1 = -c3, p . w2 = -c3
    x = (-c3 * w2[1] + c3 * w1[1]) / det
    y = (-c3 * w1[0] + c3 * w2[0]) / det
    return RationalPoint(x, y)


def _line_visit(c, p: RationalPoint, A: RationalMatrix) -> bool:
    q = p.times(A.rows)
    return c[0] * q.x + c[1] * q.y + c[2] == 0


def bounded_witness_search(S, T, M, m: int, B: int) -> SearchResult:
    """Lexicographically first 1 <= x_1 < ... < x_m <= B with S meeting every
    preimage M^{-x_i} T, with an exact point."""
    S, T, M = _set(S), _set(T), _as_matrix(M)
    if B < m:
        return SearchResult(None, True)
    powers = _Powers(M)
    line = _single_line(T)
    if line is not None and m >= 2:
        checked = 0
        for x1 in range(1, B + 1):
            for x2 in range(x1 + 1, B + 1):
                checked += 1
                p = _line_point(line, powers[x1], powers[x2])
                if p is None:
                    # parallel preimages only happen for degenerate rotations
                    raise InvariantBreach("parallel preimage lines for a nondegenerate rotation")
                if not S.member(p):
                    continue
                rest = [x for x in range(x2 + 1, B + 1) if _line_visit(line, p, powers[x])][:m - 2]
                if len(rest) == m - 2:
                    return SearchResult(((x1, x2, *rest), p), False, checked)
        return SearchResult(None, True, checked)

    pre: dict = {}

    def preimage(x):
        if x not in pre:
            pre[x] = T.transform(powers[x].rows)
        return pre[x]

    counter = [0]

    def rec(start, chosen, R):
        for x in range(start, B - (m - len(chosen)) + 2):
            R2 = R.intersect(preimage(x))
            counter[0] += 1
            if not R2.disjuncts:
                continue
            res = is_empty(R2)
            if res.empty:
                continue
            if len(chosen) + 1 == m:
                return (tuple(chosen + [x]), simplest(res.witness))
            out = rec(x + 1, chosen + [x], R2)
            if out is not None:
                return out
        return None

    found = rec(1, [], S)
    return SearchResult(found, found is None, counter[0])


# ---------------------------------------------------------------------------
# elimination front end

def _decompose(M: RationalMatrix):
    """C1, C2 over Q(sqrt(tr^2 - 4)) with M^x = lambda^x C1 + lambda^-x C2."""
    lam = rotation_eigenvalue(M)
    lbar = lam.conjugate()
    diff = lam - lbar
    rows = [[Q(v) for v in r] for r in M.rows]
    C1 = [[(rows[i][j] - (lbar if i == j else Q(0))) / diff for j in range(2)] for i in range(2)]
    C2 = [[((lam if i == j else Q(0)) - rows[i][j]) / diff for j in range(2)] for i in range(2)]
    return lam, C1, C2


def _z_column(M, c, i: int, nvars: int):
    """M^{x_i} c^T as two Laurent polys in z."""
    _, C1, C2 = _decompose(M)
    zp = LaurentPoly.var(nvars, 2 * i)
    zm = LaurentPoly.var(nvars, 2 * i + 1)
    return [zp * (C1[k][0] * c[0] + C1[k][1] * c[1]) + zm * (C2[k][0] * c[0] + C2[k][1] * c[1]) for k in range(2)]


@dataclass
class EliminatedSystem:
    """Equations in z whose zeros at z = (lambda^{x_i}, lambda^{-x_i}) are the
    tuples for which some p on the equation part of one S disjunct meets all m
    lines.  Strict constraints of the disjunct are kept as polys required > 0."""
    m: int
    equations: LaurentSystem
    strict: list
    disjunct: SignSystem

    @property
    def Q0(self) -> LaurentPoly:
        return self.equations.polys[0]

    def holds_at(self, xs: Sequence[int], lam: QuadraticNumber) -> bool:
        z = []
        for x in xs:
            z += [lam ** x if x >= 0 else lam.inverse() ** -x, lam.inverse() ** x if x >= 0 else lam ** -x]
        return all(not p.evaluate(z) for p in self.equations.polys)


def eliminate_line_target(S, T, M, m: int) -> list[EliminatedSystem] | None:
    """Cramer elimination of p for a line target, one system per S disjunct
    carrying an equation.  None when the front end does not apply."""
    S, T, M = _set(S), _set(T), _as_matrix(M)
    line = _single_line(T)
    if line is None or m < 2:
        return None
    n = 2 * m
    c = line
    w = [_z_column(M, c, i, n) for i in range(m)]
    delta = w[0][0] * w[1][1] - w[0][1] * w[1][0]
    c3 = Q(c[2])
    # p = (-c3, -c3) adj(W) / delta with W = [w_0 w_1] as columns
    N0 = (w[1][1] * (-c3)) + (w[0][1] * c3)
    N1 = (w[1][0] * c3) + (w[0][0] * (-c3))
    out = []
    for d in S.disjuncts:
        if not d.eqs:
            return None
        E = d.equation
        deg = E.total_degree()

        def homog(P, k):
            total = LaurentPoly(n)
            for e, coef in P.terms.items():
                total = total + (N0 ** e[0]) * (N1 ** e[1]) * (delta ** (k - e[0] - e[1])) * Q(coef)
            return total

        polys = [homog(E, deg)]
        for i in range(2, m):
            polys.append(N0 * w[i][0] + N1 * w[i][1] + delta * c3)
        strict = [homog(P, P.total_degree() + P.total_degree() % 2) for P in d.strict]
        pairs = [(2 * i, 2 * i + 1) for i in range(m)]
        out.append(EliminatedSystem(m, LaurentSystem(n, polys, pairs), strict, d))
    return out


# ---------------------------------------------------------------------------
# subtori and bounds

def _x_lattice(L: Lattice, pairs) -> Lattice:
    """x-exponents whose lambda-point lies in the torus of L."""
    if pairs:
        if L.rank == 0:
            return Lattice.full(len(pairs))
        K = [[a[j1] - a[j2] for a in L.rows()] for (j1, j2) in pairs]
        return kernel(K)
    if L.rank == 0:
        return Lattice.full(L.ambient)
    return kernel(_transpose(L.rows()))


def _transpose(A):
    return [list(r) for r in zip(*A)]


def vanishes_on_subtorus(Q0, lat: Lattice) -> bool:
    """Q0 is identically zero on the lambda-points x in lat.  With conjugate
    pairs (z_j, z_k) each pair stands for (lambda^x, lambda^-x); otherwise
    variable i is lambda^{x_i}.  Substituting z = t^(basis) gives a Laurent
    poly in t that vanishes on a Zariski-dense set exactly when it is zero."""
    if isinstance(Q0, LaurentPoly):
        Q0 = LaurentSystem(Q0.nvars, [Q0])
    B = lat.rows()
    if not B:
        polys = [p for p in Q0.polys]
        return all(p.evaluate([1] * Q0.nvars) == 0 for p in polys)
    r = len(B)
    if Q0.conjugate_pairs:
        if lat.ambient != len(Q0.conjugate_pairs):
            raise ValueError("lattice dimension must match the number of conjugate pairs")
        W = [[0] * r for _ in range(Q0.nvars)]
        for i, (j1, j2) in enumerate(Q0.conjugate_pairs):
            for k in range(r):
                W[j1][k] = B[k][i]
                W[j2][k] = -B[k][i]
    else:
        if lat.ambient != Q0.nvars:
            raise ValueError("lattice dimension must match the number of variables")
        W = [[B[k][i] for k in range(r)] for i in range(Q0.nvars)]
    Wt = _transpose(W)         # r x nvars: exponent a goes to Wt a
    return all(p.map_exponents(Wt).is_zero() for p in Q0.polys)


@dataclass
class SearchBound:
    B: int
    complete: bool
    detail: list = field(default_factory=list)


def derive_search_bound(X: LaurentSystem, provider, h_lambda=None, max_depth: int = 6) -> SearchBound:
    """Bound on max |x_i| over the solutions of X.  UserBudget passes its B
    through (incomplete).  EffectiveOracle runs the descent: short points are
    bounded by ceil(b / h(lambda)); tall families live in torus cosets, which
    are discarded when the system vanishes on them and otherwise recursed into
    with strictly fewer variables."""
    if isinstance(provider, UserBudget):
        return SearchBound(int(provider.B), False, ["user budget"])
    if not isinstance(provider, EffectiveOracle):
        raise TypeError("unknown bound provider")
    if h_lambda is None:
        raise ValueError("h(lambda) enclosure required")
    h_lo = h_lambda.lo if hasattr(h_lambda, "lo") else Fraction(h_lambda)
    if h_lo <= 0:
        raise ValueError("lambda must have positive height")
    if X.conjugate_pairs and vanishes_on_subtorus(X, Lattice.full(len(X.conjugate_pairs))):
        raise ValueError("system vanishes identically on the conjugate torus")
    detail: list = []
    B, complete = _descend(X, provider, h_lo, max_depth, detail)
    return SearchBound(B, complete, detail)


def _descend(X: LaurentSystem, provider: EffectiveOracle, h_lo: Fraction, depth: int, detail):
    b = provider.bound(X)
    B = math.ceil(Fraction(b) / h_lo)
    detail.append(f"{X.nvars} vars: height bound {b} gives |x| <= {B}")
    if depth == 0:
        detail.append("depth cap reached")
        return B, False
    try:
        cands = [L for L in candidate_lattices_from_exponents(X) if L.rank < X.nvars]
    except OverflowError:
        detail.append("too many exponent partitions; tall families not bounded")
        return B, False
    complete = True
    for L in cands:
        lam_pts = _x_lattice(L, X.conjugate_pairs)
        assert lam_pts.rank > 0
        if vanishes_on_subtorus(X, lam_pts):
            detail.append(f"torus {L.basis}: vanishes, discarded")
            continue
        D = coset_union_decomposition(X, L)
        X1 = LaurentSystem(D.X1.nvars, [p for p in D.X1.polys if not p.is_zero()])
        if not X1.polys or X1.nvars == 0:
            detail.append(f"torus {L.basis}: coset family not cut down")
            complete = False
            continue
        if X1.obviously_empty():
            detail.append(f"torus {L.basis}: no cosets")
            continue
        B1, c1 = _descend(X1, provider, h_lo, depth - 1, detail)
        B = max(B, D.map.norm() * B1)
        complete = complete and c1
    return B, complete


# ---------------------------------------------------------------------------
# the decision procedure

SEARCH_CAP = 2000


def decide_rotation_multi(S, T, M, m: int, budget: int = 50, bound_provider=None,
                          max_steps: int = 200000) -> Verdict:
    """Does some p in S have p M^x in T for at least m distinct x >= 1?"""
    inst = RotationInstance(_set(S), _set(T), M, m, budget, bound_provider)
    S, T, M = inst.S, inst.T, inst.M
    if is_empty(S).empty:
        return Verdict(NO, certificate="source set is empty")
    if decide_infinite_visits(S, T, M):
        got = _infinite_witness(S, T, M, m, max_steps)
        cert = "a level curve of the invariant form meets S and has an open arc in T; the orbit is dense on it"
        if got is None:
            return Verdict(YES, None, cert + " (no witness within the step cap)")
        return _rot_yes(S, T, M, *got, cert)

    bounds = []
    systems = eliminate_line_target(S, T, M, m)
    if systems is not None:
        lam = inst.eigenvalue
        h = eigenvalue_height(M)
        for sysm in systems:
            if vanishes_on_subtorus(sysm.equations, Lattice.full(m)):
                bounds.append(SearchBound(0, isinstance(inst.bound_provider, EffectiveOracle),
                                          ["eliminated system vanishes identically"]))
                continue
            try:
                bounds.append(derive_search_bound(sysm.equations, inst.bound_provider, h))
            except BoundProviderError:
                raise
        log.debug("eliminated %d systems for lambda = %s", len(systems), lam)
    complete = systems is not None and all(b.complete for b in bounds)
    derived = max((b.B for b in bounds), default=0)
    B = max(derived, budget)
    if complete and derived > SEARCH_CAP:
        complete = False
        B = max(budget, SEARCH_CAP)
    res = bounded_witness_search(S, T, M, m, B)
    if res.found is not None:
        xs, p = res.found
        return _rot_yes(S, T, M, p, list(xs), f"exact search up to {B}")
    if complete:
        v = Verdict(NO, certificate=f"every solution has |x| <= {derived} and the search up to {B} is empty")
        v.budget = B
        return v
    reason = "no witness in 1..{} ({} candidates checked); ".format(B, res.checked)
    reason += "visit bound not certified" if systems is not None else "elimination front end does not apply"
    return Verdict(NO_WITHIN_BUDGET, certificate=reason, budget=B)


def _rot_yes(S, T, M, point, visits, cert) -> Verdict:
    point = simplest(as_point(point) if isinstance(point, (tuple, list)) else point)
    if not S.member(point):
        raise InvariantBreach(f"witness {point} is not in the source set")
    if len(set(visits)) != len(visits) or any(x < 1 for x in visits):
        raise InvariantBreach("visit times must be distinct positive integers")
    powers = _Powers(M)
    for x in visits:
        if not _member_after(T, point, powers[x]):
            raise InvariantBreach(f"witness {point} misses the target at step {x}")
    desc = point.to_json() if hasattr(point, "to_json") else str(point)
    return Verdict(YES, {"point": desc, "visits": sorted(visits)}, cert, point=point)


def verify_rotation_witness(S, T, M, point, visits) -> bool:
    S, T, M = _set(S), _set(T), _as_matrix(M)
    point = as_point(point) if isinstance(point, (tuple, list)) else point
    powers = _Powers(M)
    return S.member(point) and all(_member_after(T, point, powers[x]) for x in visits)
