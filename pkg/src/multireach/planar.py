"""Multiple reachability from a planar semialgebraic set to a halfplane.

Orbit points are row vectors: the n-th iterate of p is p M^n.  The target is
{c1 x + c2 y + c3 > 0}, so p visits at step n iff f_n(p) = p M^n c^T + c3 > 0.

Real spectra (and complex pairs whose ratio is a root of unity) are handled by
residue classes n = a + P t on which f_n is an exponential polynomial in t with
positive bases and coefficients affine in p.  Complex pairs of modulus other
than one are handled by growth arguments in an M-invariant quadratic form;
modulus one goes to the rotation solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .lrs import RationalMatrix
from .numeric import QuadraticNumber, RealAlgebraic
from .numeric.logs import rational_bracket
from .poly import MPoly
from .semialg import SemiAlgebraicSet2D, extremal_radii, is_empty
from .semialg.points import RationalPoint, as_point, simplest
from .semialg.sets import And, Atom, Or, linear_coefficients, normalize

Q = QuadraticNumber

YES, NO, NO_WITHIN_BUDGET, UNSUPPORTED = "Yes", "No", "NoWithinBudget", "Unsupported"


class InvariantBreach(AssertionError):
    """A produced witness failed exact re-verification."""


# ---------------------------------------------------------------------------
# eigen-classification

@dataclass
class EigenClass:
    kind: str                 # ComplexPair, RealDistinct, RealRepeatedDiagonalisable, RealRepeatedDefective, ZeroEigenvalue
    eigenvalues: tuple
    modulus_vs_one: str       # "<", "=" or ">" for the spectral radius
    degenerate_order: int | None = None
    trace: Fraction = Fraction(0)
    det: Fraction = Fraction(0)

    @property
    def discriminant(self) -> Fraction:
        return self.trace * self.trace - 4 * self.det

    @property
    def degenerate(self) -> bool:
        return self.degenerate_order is not None

    def to_json(self):
        return {"kind": self.kind, "eigenvalues": [str(e) for e in self.eigenvalues],
                "modulus_vs_one": self.modulus_vs_one, "degenerate_order": self.degenerate_order}


def _as_matrix(M) -> RationalMatrix:
    if isinstance(M, RationalMatrix):
        A = M
    else:
        A = RationalMatrix([[Fraction(v) for v in row] for row in M])
    if A.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    return A


def _cmp1(v) -> str:
    return "<" if v < 1 else (">" if v > 1 else "=")


def classify_matrix(M) -> EigenClass:
    M = _as_matrix(M)
    tr, det = M.trace(), M.det()
    disc = tr * tr - 4 * det
    if disc < 0:
        lam = Q(tr / 2) + Q.sqrt(disc) / 2
        ratio = lam * lam / det          # lambda / conj(lambda)
        order = None
        for k in (2, 3, 4, 6):
            if ratio ** k == 1:
                order = k
                break
        return EigenClass("ComplexPair", (lam, lam.conjugate()), _cmp1(det), order, tr, det)
    if det == 0:
        return EigenClass("ZeroEigenvalue", (Q(tr), Q(0)), _cmp1(abs(tr)), None, tr, det)
    if disc == 0:
        rho = tr / 2
        scalar = M.rows[0][1] == 0 and M.rows[1][0] == 0
        kind = "RealRepeatedDiagonalisable" if scalar else "RealRepeatedDefective"
        return EigenClass(kind, (Q(rho), Q(rho)), _cmp1(abs(rho)), None, tr, det)
    root = Q.sqrt(disc)
    r1, r2 = (Q(tr) + root) / 2, (Q(tr) - root) / 2
    order = 2 if tr == 0 else None       # rho2 = -rho1
    big = r1 if (r1 * r1 - r2 * r2).sign() >= 0 else r2
    sq = (big * big - 1).sign()
    cmp = "<" if sq < 0 else (">" if sq > 0 else "=")
    return EigenClass("RealDistinct", (r1, r2), cmp, order, tr, det)


# ---------------------------------------------------------------------------
# invariant quadratic form and polar data for complex pairs

def _null_vector(rows: list[list[Fraction]]) -> list[Fraction]:
    """A nonzero rational vector in the kernel of a rank-deficient matrix."""
    A = [list(r) for r in rows]
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = next(c for c in range(ncols) if c not in pivots)
    v = [Fraction(0)] * ncols
    v[free] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -A[i][free]
    return v


def invariant_form(M) -> tuple[Fraction, Fraction, Fraction]:
    """(g11, g12, g22) with g11 = 1 and M G M^T = det(M) G, G positive definite.
    Then p G p^T scales by exactly det M per step along every orbit."""
    M = _as_matrix(M)
    (p, q), (r, s) = M.rows
    d = M.det()
    if classify_matrix(M).kind != "ComplexPair":
        raise ValueError("invariant form needs a complex eigenvalue pair")
    rows = [[p * p - d, 2 * p * q, q * q],
            [p * r, p * s + q * r - d, q * s],
            [r * r, 2 * r * s, s * s - d]]
    a, b, c = _null_vector(rows)
    if a < 0:
        a, b, c = -a, -b, -c
    return Fraction(1), b / a, c / a


def _form_value(G, v) -> Fraction:
    g11, g12, g22 = G
    x, y = v
    return g11 * x * x + 2 * g12 * x * y + g22 * y * y


@dataclass
class PolarParams:
    """Polar data of p in the frame where M acts as |lambda| times a rotation.

    The frame is q = p C with C = [[1, 0], [g12, sqrt(det G)]] (G the invariant
    form), so |p M^n C| = s r |lambda|^n with r = |p| and s = sqrt(G(p)) / r.
    Each step turns q by -theta in the standard orientation, with theta taken
    so that sin(theta) has the sign of (C^-1 M C)[1][0].
    """

    s: RealAlgebraic
    r: RealAlgebraic
    modulus: RealAlgebraic
    angle_cos_sin: tuple
    form: tuple
    base_offset: dict
    M: RationalMatrix = None
    point: tuple = ()

    def frame_point(self, n: int = 0) -> tuple:
        """Exact coordinates of p M^n in the normal frame."""
        v = [Fraction(c) for c in self.point]
        for _ in range(n):
            v = self.M.rmul_vector(v)
        g11, g12, g22 = self.form
        root = Q.sqrt(g11 * g22 - g12 * g12)
        return Q(v[0] + g12 * v[1]), root * v[1]

    def orbit_modulus(self, n: int) -> RealAlgebraic:
        """s r |lambda|^n, exactly."""
        return RealAlgebraic.rational(_form_value(self.form, self.point) * self.M.det() ** n).sqrt()


def polar_params(M, p) -> PolarParams:
    M = _as_matrix(M)
    ec = classify_matrix(M)
    if ec.kind != "ComplexPair":
        raise ValueError(f"polar parameters need a complex pair, got {ec.kind}")
    x, y = Fraction(p[0]), Fraction(p[1])
    G = invariant_form(M)
    g11, g12, g22 = G
    det = M.det()
    norm_sq = x * x + y * y
    gp = _form_value(G, (x, y))
    r = RealAlgebraic.rational(norm_sq).sqrt()
    s = RealAlgebraic.rational(gp / norm_sq).sqrt() if norm_sq else RealAlgebraic.rational(1)
    cos = Q(ec.trace / 2) / Q.sqrt(det)
    sin = Q.sqrt(-ec.discriminant / (4 * det))
    (m00, m01), (m10, m11) = M.rows
    if -g12 * (m00 + m01 * g12) + (m10 + m11 * g12) < 0:
        sin = -sin
    dG = g11 * g22 - g12 * g12
    offset = {"frame": [["1", "0"], [str(g12), f"sqrt({dG})"]],
              "q0": [str(Q(x + g12 * y)), str(Q.sqrt(dG) * y)]}
    return PolarParams(s, r, RealAlgebraic.rational(det).sqrt(), (cos, sin), G, offset, M, (x, y))


# ---------------------------------------------------------------------------
# affine forms over a quadratic field

class _Affine:
    """u x + v y + w with u, v, w in one real quadratic field."""

    __slots__ = ("u", "v", "w")

    def __init__(self, u=0, v=0, w=0):
        self.u, self.v, self.w = Q.coerce(u), Q.coerce(v), Q.coerce(w)

    def __add__(self, o):
        return _Affine(self.u + o.u, self.v + o.v, self.w + o.w)

    def scale(self, k):
        k = Q.coerce(k)
        return _Affine(self.u * k, self.v * k, self.w * k)

    def is_zero(self) -> bool:
        return not (self.u or self.v or self.w)

    def at(self, x, y) -> QuadraticNumber:
        return self.u * x + self.v * y + self.w

    def split(self) -> tuple[MPoly, MPoly, int]:
        """(a, b, D) with the form equal to a + b sqrt(D), a and b rational."""
        D = next((c.d for c in (self.u, self.v, self.w) if c.d != 1), 1)

        def lin(pick):
            return (MPoly.var(2, 0, pick(self.u)) + MPoly.var(2, 1, pick(self.v))
                    + MPoly.const(2, pick(self.w)))

        return lin(lambda c: c.a), lin(lambda c: c.b), D

    def __repr__(self):
        return f"({self.u})x + ({self.v})y + ({self.w})"


@dataclass
class _Class:
    """f_{a + P t} = sum coef * t^power * base^t over the terms, t >= 0."""
    start: int
    period: int
    terms: list          # [(base, power, _Affine)], sorted by (base, power) descending

    def n_of(self, t: int) -> int:
        return self.start + self.period * t

    def shape(self) -> str:
        nonconst = [(b, e) for b, e, _ in self.terms if not (b == 1 and e == 0)]
        if len(self.terms) <= 1:
            return "prefix"
        if len(self.terms) == 2:
            (b1, e1, _), (b2, e2, _) = self.terms
            if (e1 == 1 or e2 == 1) and b1 != b2:
                return "other"
            return "prefix"
        if len(nonconst) == 2 and all(e == 0 for _, e in nonconst):
            return "two-exp"
        if len(nonconst) == 2 and nonconst[0][0] == nonconst[1][0]:
            return "defective"
        return "other"


@dataclass
class _Structure:
    period: int
    n0: int                      # classes cover n >= n0
    early: dict                  # n -> linear poly f_n for 1 <= n < n0
    classes: list


def _linear_poly(v, c3) -> MPoly:
    return MPoly.var(2, 0, Fraction(v[0])) + MPoly.var(2, 1, Fraction(v[1])) + MPoly.const(2, Fraction(c3))


class _Target:
    """Halfplane c1 x + c2 y + c3 > 0, or line c1 x + c2 y + c3 = 0."""

    def __init__(self, c1, c2, c3, relation=">"):
        self.c = (Fraction(c1), Fraction(c2))
        self.c3 = Fraction(c3)
        self.relation = relation
        if self.c == (0, 0):
            raise ValueError("degenerate target: zero normal vector")
        self._cols = [self.c]

    def column(self, M: RationalMatrix, n: int):
        """M^n c^T, memoised along the power sequence."""
        while len(self._cols) <= n:
            a, b = self._cols[-1]
            (m00, m01), (m10, m11) = M.rows
            self._cols.append((m00 * a + m01 * b, m10 * a + m11 * b))
        return self._cols[n]

    def poly_at(self, M, n) -> MPoly:
        return _linear_poly(self.column(M, n), self.c3)

    def visits(self, point, M, n) -> bool:
        s = point.sign(self.poly_at(M, n))
        return s > 0 if self.relation == ">" else s == 0

    def as_set(self) -> SemiAlgebraicSet2D:
        p = _linear_poly(self.c, self.c3)
        if self.relation == ">":
            return SemiAlgebraicSet2D.from_system(strict=[p])
        return SemiAlgebraicSet2D.from_system(eqs=[p])

    def region(self, M, n) -> SemiAlgebraicSet2D:
        p = self.poly_at(M, n)
        if p.is_constant():
            ok = (p.constant_term() > 0) if self.relation == ">" else (p.constant_term() == 0)
            return _plane() if ok else SemiAlgebraicSet2D.empty()
        if self.relation == ">":
            return SemiAlgebraicSet2D.from_system(strict=[p])
        return SemiAlgebraicSet2D.from_system(eqs=[p])


def _plane() -> SemiAlgebraicSet2D:
    return SemiAlgebraicSet2D.from_system(strict=[MPoly.const(2, 1)])


def halfplane_coefficients(T) -> tuple[Fraction, Fraction, Fraction]:
    """(c1, c2, c3) of a single strict linear inequality."""
    if isinstance(T, (tuple, list)) and len(T) == 3:
        return tuple(Fraction(v) for v in T)
    if isinstance(T, str):
        T = SemiAlgebraicSet2D.parse(T)
    if len(T.disjuncts) != 1:
        raise ValueError("target is not a single halfplane")
    d = T.disjuncts[0]
    if d.eqs or len(d.strict) != 1 or linear_coefficients(d.strict[0]) is None:
        raise ValueError("target is not a single strict linear inequality")
    return linear_coefficients(d.strict[0])


def line_coefficients(h) -> tuple[Fraction, Fraction, Fraction]:
    if isinstance(h, (tuple, list)) and len(h) == 3:
        return tuple(Fraction(v) for v in h)
    if isinstance(h, str):
        h = SemiAlgebraicSet2D.parse(h)
    if len(h.disjuncts) != 1:
        raise ValueError("target is not a single line")
    d = h.disjuncts[0]
    if d.strict or len(d.eqs) != 1 or linear_coefficients(d.eqs[0]) is None:
        raise ValueError("target is not a single linear equation")
    return linear_coefficients(d.eqs[0])


def _structure(M: RationalMatrix, c, c3, ec: EigenClass | None = None) -> _Structure:
    """Residue-class decomposition of f_n(p) = p M^n c^T + c3."""
    ec = ec or classify_matrix(M)
    c = (Fraction(c[0]), Fraction(c[1]))
    const = _Affine(0, 0, c3)

    def form_of(A):   # p A c^T for a 2x2 matrix A given by rows of QuadraticNumbers
        return _Affine(A[0][0] * c[0] + A[0][1] * c[1], A[1][0] * c[0] + A[1][1] * c[1], 0)

    rows = [[Q(v) for v in row] for row in M.rows]
    I = [[Q(1), Q(0)], [Q(0), Q(1)]]
    modes = []   # (rho, power, form): form * n^power * rho^n
    n0 = 1

    if ec.kind == "ComplexPair":
        if not ec.degenerate:
            raise ValueError("nondegenerate complex pairs have no class structure")
        k = ec.degenerate_order
        Mk = M ** k
        mu = Mk.rows[0][0]
        if Mk.rows[0][1] != 0 or Mk.rows[1][0] != 0 or Mk.rows[1][1] != mu:
            raise AssertionError("degenerate complex pair without a scalar power")
        P = k if mu > 0 else 2 * k
        base = Q(mu ** (P // k))
        classes = []
        for a in range(1, P + 1):
            Ma = M ** a
            terms = [(base, 0, form_of([[Q(v) for v in row] for row in Ma.rows])), (Q(1), 0, const)]
            classes.append(_Class(a, P, _merge(terms)))
        return _Structure(P, 1, {}, classes)

    if ec.kind in ("RealDistinct", "ZeroEigenvalue"):
        r1, r2 = ec.eigenvalues
        if r1 == 0 and r2 == 0:
            if M.rows == [[0, 0], [0, 0]]:
                n0 = 1
            else:
                n0 = 2
        else:
            if r1 == r2:
                raise AssertionError("repeated eigenvalue classified as distinct")
            for ra, rb in ((r1, r2), (r2, r1)):
                if ra == 0:
                    continue
                E = [[(rows[i][j] - rb * I[i][j]) / (ra - rb) for j in range(2)] for i in range(2)]
                modes.append((ra, 0, form_of(E)))
    elif ec.kind == "RealRepeatedDiagonalisable":
        rho = ec.eigenvalues[0]
        modes.append((rho, 0, form_of(I)))
    else:
        rho = ec.eigenvalues[0]
        N = [[rows[i][j] - rho * I[i][j] for j in range(2)] for i in range(2)]
        modes.append((rho, 0, form_of(I)))
        modes.append((rho, 1, form_of(N).scale(1 / rho)))

    P = 2 if any(rho.sign() < 0 for rho, _, _ in modes) else 1
    early = {}
    for n in range(1, n0):
        early[n] = _linear_poly(_power_column(M, c, n), c3)
    classes = []
    for a in range(n0, n0 + P):
        terms = [(Q(1), 0, const)]
        for rho, e, F in modes:
            base = rho ** P
            ra = rho ** a
            if e == 0:
                terms.append((base, 0, F.scale(ra)))
            else:
                terms.append((base, 0, F.scale(ra * a)))
                terms.append((base, 1, F.scale(ra * P)))
        classes.append(_Class(a, P, _merge(terms)))
    return _Structure(P, n0, early, classes)


def _power_column(M: RationalMatrix, c, n):
    a, b = c
    (m00, m01), (m10, m11) = M.rows
    for _ in range(n):
        a, b = m00 * a + m01 * b, m10 * a + m11 * b
    return a, b


def _merge(terms):
    acc: dict = {}
    for b, e, F in terms:
        key = (b, e)
        acc[key] = acc[key] + F if key in acc else F
    out = [(b, e, F) for (b, e), F in acc.items() if not F.is_zero()]
    out.sort(key=lambda t: (float(t[0]), t[1]), reverse=True)
    # exact tie-break for bases that agree in floating point
    for i in range(len(out) - 1):
        for j in range(len(out) - 1 - i):
            b1, e1, _ = out[j]
            b2, e2, _ = out[j + 1]
            if (b1 < b2) or (b1 == b2 and e1 < e2):
                out[j], out[j + 1] = out[j + 1], out[j]
    return out


# ---------------------------------------------------------------------------
# sign analysis of one class for a fixed point

def _iv(q: QuadraticNumber):
    from mpmath import iv

    a = iv.mpf(q.a.numerator) / q.a.denominator
    if q.b == 0:
        return a
    b = iv.mpf(q.b.numerator) / q.b.denominator
    return a + b * iv.sqrt(iv.mpf(q.d))


class _ivprec:
    """Temporarily set the working precision of mpmath's interval context."""

    def __init__(self, prec):
        self.prec = prec

    def __enter__(self):
        from mpmath import iv

        self.saved = iv.prec
        iv.prec = self.prec

    def __exit__(self, *exc):
        from mpmath import iv

        iv.prec = self.saved


def _exact_value(terms, t: int) -> QuadraticNumber:
    total = Q(0)
    for b, e, c in terms:
        total = total + c * (t ** e) * b ** t
    return total


def _sign_at(terms, t: int) -> int:
    """Exact sign of sum c t^e b^t (numeric coefficients c)."""
    if not terms:
        return 0
    if t <= 48:
        return _exact_value(terms, t).sign()
    from mpmath import iv

    for prec in (96, 384, 1536):
        with _ivprec(prec):
            total = iv.mpf(0)
            for b, e, c in terms:
                total += _iv(c) * iv.mpf(t) ** e * _iv(b) ** t
            if total.a > 0:
                return 1
            if total.b < 0:
                return -1
    return _exact_value(terms, t).sign()


def _critical_point(terms):
    """Certified enclosure (lo, hi) of the unique real critical point of the
    class function, or None when it is monotone on the reals."""
    from mpmath import iv

    nonconst = [(b, e, c) for b, e, c in terms if not (b == 1 and e == 0)]
    if not nonconst:
        return None
    if len(nonconst) == 1:
        b, e, c = nonconst[0]
        if e == 0 or b == 1:
            return None
        kind = "tb"
    elif len(nonconst) == 2:
        (b1, e1, c1), (b2, e2, c2) = nonconst
        if e1 == 0 and e2 == 0:
            # sign of the log argument -(c2 ln b2) / (c1 ln b1), decided exactly
            s = -c2.sign() * (b2 - 1).sign() * c1.sign() * (b1 - 1).sign()
            if s <= 0:
                return None
            kind = "two"
        elif b1 == b2 and b1 != 1:
            kind = "defective"
        else:
            raise NotImplementedError("class shape outside the 2x2 catalogue")
    else:
        raise NotImplementedError("class shape outside the 2x2 catalogue")

    for prec in (128, 512, 2048, 8192):
        with _ivprec(prec):
            if kind == "tb":
                t = -1 / iv.log(_iv(b))
            elif kind == "two":
                ratio = -(_iv(c2) * iv.log(_iv(b2))) / (_iv(c1) * iv.log(_iv(b1)))
                t = iv.log(ratio) / iv.log(_iv(b1) / _iv(b2))
            else:
                # (alpha + beta t) b^t: beta is the power-1 coefficient
                beta = c1 if e1 == 1 else c2
                alpha = c2 if e1 == 1 else c1
                t = -1 / iv.log(_iv(b1)) - _iv(alpha) / _iv(beta)
            lo, hi = t.a, t.b
            if hi - lo < 0.25:
                return math.floor(lo), math.ceil(hi)
    raise ArithmeticError("critical point not resolved")


def _first_true(pred, lo: int, hi: int) -> int:
    """Smallest t in [lo, hi] with pred(t) for a predicate monotone (False then
    True) on the range, pred(hi) known True."""
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def _class_visits(terms) -> list:
    """Sorted disjoint t-intervals [lo, hi] (hi None for an infinite tail)
    where the class function is positive, t >= 0."""
    if not terms:
        return []
    eventual = terms[0][2].sign() > 0

    @lru_cache(maxsize=None)
    def pos(t):
        return _sign_at(terms, t) > 0

    crit = _critical_point(terms)
    pieces = []     # monotone integer ranges, last one unbounded
    singles = []
    if crit is None or crit[1] < 0:
        pieces.append((0, None))
    else:
        lo_int, hi_int = crit
        if lo_int >= 0:
            pieces.append((0, lo_int))
        singles.extend(range(max(lo_int + 1, 0), hi_int))
        pieces.append((max(hi_int, 0), None))

    marks = []   # (t_lo, t_hi) positive ranges
    for t in singles:
        if pos(t):
            marks.append((t, t))
    for L, R in pieces:
        if R is not None:
            if R < L:
                continue
            a, b = pos(L), pos(R)
            if a and b:
                marks.append((L, R))
            elif a:
                k = _first_true(lambda t: not pos(t), L, R)
                marks.append((L, k - 1))
            elif b:
                k = _first_true(pos, L, R)
                marks.append((k, R))
            continue
        a = pos(L)
        if a == eventual:
            if a:
                marks.append((L, None))
            continue
        step = 1
        hi = L + 1
        while pos(hi) != eventual:
            step *= 2
            hi = L + step
        if eventual:
            k = _first_true(pos, L, hi)
            marks.append((k, None))
        else:
            k = _first_true(lambda t: not pos(t), L, hi)
            marks.append((L, k - 1))
    marks.sort(key=lambda m: m[0])
    merged = []
    for lo, hi in marks:
        if merged and merged[-1][1] is not None and lo <= merged[-1][1] + 1:
            plo, phi = merged[-1]
            merged[-1] = (plo, None if hi is None else max(phi, hi))
        else:
            merged.append((lo, hi))
    return merged


@dataclass
class VisitSet:
    """{n >= 1 : p M^n in H} as arithmetic runs (first, last or None, step)."""
    runs: list
    visits_zero: bool = False

    def contains(self, n: int) -> bool:
        for first, last, step in self.runs:
            if n >= first and (last is None or n <= last) and (n - first) % step == 0:
                return True
        return False

    @property
    def infinite(self) -> bool:
        return any(last is None for _, last, _ in self.runs)

    def count(self):
        if self.infinite:
            return math.inf
        return sum((last - first) // step + 1 for first, last, step in self.runs)

    def as_list(self, limit: int) -> list[int]:
        out = set()
        for first, last, step in self.runs:
            end = limit if last is None else min(last, limit)
            out.update(range(first, end + 1, step))
        return sorted(out)

    def first(self, k: int) -> list[int]:
        out: list[int] = []
        limit = 16
        while True:
            out = self.as_list(limit)
            if len(out) >= k or not self.infinite and limit > max(
                    (last for _, last, _ in self.runs), default=0):
                return out[:k]
            limit *= 4

    def intervals(self) -> list[tuple]:
        """Maximal runs merged across residue classes where they interleave."""
        return list(self.runs)

    def to_json(self):
        return {"runs": [[f, l, s] for f, l, s in self.runs], "infinite": self.infinite,
                "visits_zero": self.visits_zero}


def _point_coords(p):
    if isinstance(p, (tuple, list)):
        x, y = p
    else:
        x, y = p.x, p.y
    return Q.coerce(x) if isinstance(x, Q) else Fraction(x), Q.coerce(y) if isinstance(y, Q) else Fraction(y)


def eventual_sign_profile(M, p, H) -> VisitSet:
    """Exact visit set of p under M in the halfplane H = (c1, c2, c3)."""
    M = _as_matrix(M)
    c1, c2, c3 = halfplane_coefficients(H)
    ec = classify_matrix(M)
    if ec.kind == "ComplexPair" and not ec.degenerate:
        raise ValueError("eventual_sign_profile needs real eigenvalues (or a degenerate complex pair)")
    x, y = _point_coords(p)
    st = _structure(M, (c1, c2), c3, ec)
    runs = []
    pt = as_point((x, y))
    for n, f in st.early.items():
        if pt.sign(f) > 0:
            runs.append((n, n, 1))
    for cl in st.classes:
        terms = [(b, e, F.at(x, y)) for b, e, F in cl.terms]
        terms = [t for t in terms if t[2]]
        for lo, hi in _class_visits(terms):
            runs.append((cl.n_of(lo), None if hi is None else cl.n_of(hi), cl.period))
    runs.sort(key=lambda r: r[0])
    # single points in a period-1 neighbourhood read better as unit steps
    runs = [(f, l, 1 if l == f else s) for f, l, s in runs]
    zero = Q.coerce(c1 * x + c2 * y + c3).sign() > 0
    return VisitSet(runs, zero)


# ---------------------------------------------------------------------------
# verdicts

@dataclass
class Verdict:
    outcome: str
    witness: dict | None = None
    certificate: str = ""
    budget: int | None = None
    horizon: int | None = None
    point: object = None          # exact point object behind the witness

    @property
    def decided(self) -> bool:
        return self.outcome in (YES, NO)

    def to_json(self):
        out = {"outcome": self.outcome, "certificate": self.certificate}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.budget is not None:
            out["budget"] = self.budget
        if self.horizon is not None:
            out["horizon"] = self.horizon
        return out

    def __str__(self):
        s = self.outcome
        if self.witness:
            s += f" (point {self.witness['point']}, visits {self.witness['visits']})"
        return s


def _yes(S, target: _Target, M, point, visits, certificate) -> Verdict:
    point = simplest(as_point(point)) if not hasattr(point, "sign") else simplest(point)
    if not S.member(point):
        raise InvariantBreach(f"witness {point} is not in the source set")
    for n in visits:
        if not target.visits(point, M, n):
            raise InvariantBreach(f"witness {point} does not visit the target at step {n}")
    if len(set(visits)) != len(visits) or any(n < 1 for n in visits):
        raise InvariantBreach("visit times must be distinct positive integers")
    desc = point.to_json() if hasattr(point, "to_json") else str(point)
    return Verdict(YES, {"point": desc, "visits": sorted(visits)}, certificate, point=point)


def verify_witness(S, T, M, point, visits) -> bool:
    """Exact re-check of a witness: point in S and p M^n in T for each n."""
    M = _as_matrix(M)
    if isinstance(T, _Target):
        target = T
    else:
        try:
            target = _Target(*halfplane_coefficients(T))
        except ValueError:
            target = _Target(*line_coefficients(T), relation="=")
    pt = as_point(point) if isinstance(point, (tuple, list)) else point
    return S.member(pt) and all(target.visits(pt, M, n) for n in visits)


def _simulate(point, target: _Target, M, m: int, max_steps: int, stop=None) -> list[int] | None:
    """First m visit times of one exact point, or None within max_steps."""
    visits = []
    if isinstance(point, RationalPoint):
        v = (point.x, point.y)
        c1, c2 = target.c
        for n in range(1, max_steps + 1):
            v = tuple(M.rmul_vector(list(v)))
            val = c1 * v[0] + c2 * v[1] + target.c3
            if (val > 0) if target.relation == ">" else (val == 0):
                visits.append(n)
                if len(visits) >= m:
                    return visits
            if stop is not None and stop(v):
                return None
        return None
    for n in range(1, max_steps + 1):
        if target.visits(point, M, n):
            visits.append(n)
            if len(visits) >= m:
                return visits
    return None


def _source(S) -> SemiAlgebraicSet2D:
    return SemiAlgebraicSet2D.parse(S) if isinstance(S, str) else S


def _nonzero(S) -> SemiAlgebraicSet2D:
    return S.intersect(SemiAlgebraicSet2D.parse("x^2 + y^2 > 0"))


def _witness_point(S):
    res = is_empty(S)
    return None if res.empty else simplest(res.witness)


# ---------------------------------------------------------------------------
# formula building for eventual positivity

def _const_value(p: MPoly):
    return p.constant_term() if p.is_constant() else None


def _atom(p: MPoly, rel: str):
    v = _const_value(p)
    if v is None:
        return Atom(p, rel)
    return {"=": v == 0, ">": v > 0, ">=": v >= 0, "<": v < 0}[rel]


def _and(*parts):
    out = []
    for q in parts:
        if q is False:
            return False
        if q is True:
            continue
        out.append(q)
    if not out:
        return True
    return out[0] if len(out) == 1 else And(tuple(out))


def _or(*parts):
    out = []
    for q in parts:
        if q is True:
            return True
        if q is False:
            continue
        out.append(q)
    if not out:
        return False
    return out[0] if len(out) == 1 else Or(tuple(out))


def _is_zero_formula(F: _Affine):
    a, b, _ = F.split()
    return _and(_atom(a, "="), _atom(b, "="))


def _is_positive_formula(F: _Affine):
    a, b, D = F.split()
    if b.is_zero():
        return _atom(a, ">")
    na = a * a - b * b * D
    return _or(_and(_atom(a, ">"), _atom(b, ">=")),
               _and(_atom(a, ">="), _atom(b, ">")),
               _and(_atom(a, ">"), _atom(b, "<"), _atom(na, ">")),
               _and(_atom(a, "<"), _atom(b, ">"), _atom(-na, ">")))


def _eventually_positive_formula(cl: _Class):
    alts = []
    zeros = []
    for _, _, F in cl.terms:
        alts.append(_and(*zeros, _is_positive_formula(F)))
        zeros.append(_is_zero_formula(F))
    return _or(*alts)


def _formula_set(f) -> SemiAlgebraicSet2D:
    if f is True:
        return _plane()
    if f is False:
        return SemiAlgebraicSet2D.empty()
    return normalize(f)


def infinite_visitors(M, T) -> SemiAlgebraicSet2D:
    """The set of points whose orbit visits the halfplane T infinitely often
    (real spectra and degenerate complex pairs)."""
    M = _as_matrix(M)
    c1, c2, c3 = halfplane_coefficients(T)
    st = _structure(M, (c1, c2), c3)
    return _formula_set(_or(*[_eventually_positive_formula(cl) for cl in st.classes]))


# ---------------------------------------------------------------------------
# the real / degenerate decision procedure

class _Feasibility:
    """Cached emptiness of S intersected with the preimages of T at given steps."""

    def __init__(self, S, target: _Target, M):
        self.S, self.target, self.M = S, target, M
        self.cache: dict = {}
        self.calls = 0

    def check(self, steps):
        key = frozenset(steps)
        if key not in self.cache:
            self.calls += 1
            R = self.S
            for n in sorted(key):
                R = R.intersect(self.target.region(self.M, n))
                if not R.disjuncts:
                    break
            res = is_empty(R) if R.disjuncts else None
            self.cache[key] = None if res is None or res.empty else res.witness
        return self.cache[key]


def _upper(q) -> Fraction:
    """Rational upper bound for |q|."""
    q = Q.coerce(q)
    lo, hi = rational_bracket(q, Fraction(1, 10**12))
    return max(abs(lo), abs(hi))


def _affine_bound(F: _Affine, R: Fraction) -> Fraction:
    return (_upper(F.u) + _upper(F.v)) * R + _upper(F.w)


def _start_bound(cl: _Class, R: Fraction | None, cap: int):
    """Upper bound L such that a point of S with finitely many visits in this
    class starts visiting at some t <= L.  None when no certificate applies.
    R bounds |x| and |y| on S (None if S is unbounded)."""
    shape = cl.shape()
    if shape == "prefix":
        return 0, "prefix class (single switch)"
    if R is None:
        return None, "unbounded source with a three-term class"
    const = next((F for b, e, F in cl.terms if b == 1 and e == 0), None)
    if const is None or not const.w.is_rational():
        return None, "class without a rational constant"
    c3 = const.w.to_fraction()
    nonconst = [(b, e, F) for b, e, F in cl.terms if not (b == 1 and e == 0)]
    if shape == "two-exp":
        (a, _, A), (b, _, B) = nonconst
        KA, KB = _affine_bound(A, R), _affine_bound(B, R)
        a_lo, a_hi = rational_bracket(a, Fraction(1, 10**12))
        b_lo, b_hi = rational_bracket(b, Fraction(1, 10**12))
        if a_hi < 1:
            if c3 > 0:
                return None, "unreachable: constant term dominates positively"
            N = 0
            while KA * a_hi ** N + KB * b_hi ** N >= -c3:
                N += 1
                if N > cap:
                    return None, "decay horizon beyond budget"
            return N, f"both bases below 1, visits end before t = {N}"
        if a_lo > 1 and b_hi < 1:
            if c3 < 0:
                N = 0
                while KB * b_hi ** N >= -c3:
                    N += 1
                    if N > cap:
                        return None, "decay horizon beyond budget"
                return N, f"dominant base above 1, decaying base below 1, visits end before t = {N}"
            ln_inv_b = 1 / b_lo - 1          # >= ln(1/b)
            ln_a = 1 - 1 / a_lo              # <= ln a
            N = 0
            while KB * b_hi ** N >= c3 / 2 or KB * b_hi ** N * ln_inv_b >= c3 / 2 * ln_a:
                N += 1
                if N > cap:
                    return None, "switch horizon beyond budget"
            return N, f"dominant base above 1, late switch-on excluded after t = {N}"
        return None, "bases on the same side of 1 with growth"
    if shape == "defective":
        (B, _, _), = {(b, 0, None) for b, _, _ in nonconst}
        beta = next(F for b, e, F in nonconst if e == 1)
        alpha = next(F for b, e, F in nonconst if e == 0)
        b_lo, b_hi = rational_bracket(B, Fraction(1, 10**12))
        if b_hi < 1 and c3 < 0:
            Ka, Kb = _affine_bound(alpha, R), _affine_bound(beta, R)
            N = 1
            while N <= b_hi / (1 - b_hi) or (Ka + Kb * N) * b_hi ** N >= -c3:
                N += 1
                if N > cap:
                    return None, "decay horizon beyond budget"
            return N, f"defective decay, visits end before t = {N}"
        return None, "defective class with growth or positive constant"
    return None, "class shape without certificate"


def _decide_by_classes(S, target: _Target, M, m: int, budget: int, ec: EigenClass) -> Verdict:
    st = _structure(M, target.c, target.c3, ec)
    label = ec.kind + (f" (degenerate, order {ec.degenerate_order})" if ec.degenerate else "")

    # points visiting infinitely often
    f_inf = _or(*[_eventually_positive_formula(cl) for cl in st.classes])
    S_inf = S.intersect(_formula_set(f_inf)) if f_inf is not False else SemiAlgebraicSet2D.empty()
    res = is_empty(S_inf) if S_inf.disjuncts else None
    if res is not None and not res.empty:
        pt = simplest(res.witness)
        try:
            prof = eventual_sign_profile(M, _point_coords(pt), (*target.c, target.c3))
            visits = prof.first(m)
        except (ValueError, AttributeError):
            visits = _simulate(pt, target, M, m, 100000)
        if visits is None or len(visits) < m:
            return Verdict(UNSUPPORTED, certificate=f"{label}: infinite visitor found but visits not exhibited")
        return _yes(S, target, M, pt, visits[:m],
                    f"{label}: a source point's orbit is eventually in the halfplane along a residue class")

    # every source point visits finitely often; each class visit set is one run
    R = None
    radii = extremal_radii(S)
    if radii.bounded:
        R = radii.radius.interval()[1] if hasattr(radii.radius, "interval") else Fraction(radii.radius)
        R = max(Fraction(R), Fraction(0))
    notes = []
    items = []     # (kind, data, max start)
    for n in st.early:
        items.append(("early", n, 0))
    complete = True
    for cl in st.classes:
        L, why = _start_bound(cl, R, budget)
        if L is None:
            complete = False
            L = budget
            notes.append(f"class n = {cl.start} mod {cl.period}: no start bound ({why}); searched starts t < {budget}")
        else:
            notes.append(f"class n = {cl.start} mod {cl.period}: {why}")
        items.append(("class", cl, L))

    feas = _Feasibility(S, target, M)
    found = _search_runs(items, m, feas)
    if found is not None:
        steps, pt = found
        return _yes(S, target, M, pt, sorted(steps)[:m], f"{label}: " + "; ".join(notes))
    if complete:
        return Verdict(NO, certificate=f"{label}: all points visit finitely often; " + "; ".join(notes)
                       + f"; {feas.calls} run systems empty")
    return Verdict(UNSUPPORTED, budget=budget,
                   certificate=f"{label}: no witness within budget and no complete certificate; " + "; ".join(notes))


def _search_runs(items, m, feas: _Feasibility):
    """Choose per item a run of consecutive class elements (or an early step)
    with total length m, such that some source point visits all chosen steps."""

    def runs_for(item, rem):
        kind, data, L = item
        if kind == "early":
            if feas.check([data]) is not None:
                yield 1, [data]
            return
        for s in range(L + 1):
            steps = []
            for ln in range(1, rem + 1):
                steps.append(data.n_of(s + ln - 1))
                if feas.check(steps) is None:
                    break
                yield ln, list(steps)

    options = []
    for item in items:
        opts = sorted(runs_for(item, m), key=lambda o: -o[0])
        options.append(opts)

    def rec(i, rem, chosen):
        if rem <= 0:
            w = feas.check(chosen)
            return (chosen, w) if w is not None else None
        if i == len(options):
            return None
        if sum(max((o[0] for o in opts), default=0) for opts in options[i:]) < rem:
            return None
        for ln, steps in options[i]:
            if ln > rem:
                continue
            new = chosen + steps
            if feas.check(new) is None:
                continue
            got = rec(i + 1, rem - ln, new)
            if got is not None:
                return got
        return rec(i + 1, rem, chosen)

    got = rec(0, m, [])
    if got is None:
        return None
    steps, w = got
    return steps, simplest(w)


# ---------------------------------------------------------------------------
# complex pairs

def _subset_search(feas: _Feasibility, candidates: list[int], m: int):
    """Some m of the candidate steps with a common source point (depth-first
    over increasing tuples, pruning on empty prefixes)."""
    alive = [n for n in candidates if feas.check([n]) is not None]

    def rec(start, chosen):
        if len(chosen) == m:
            return chosen
        for i in range(start, len(alive)):
            if len(alive) - i < m - len(chosen):
                return None
            new = chosen + [alive[i]]
            if feas.check(new) is None:
                continue
            got = rec(i + 1, new)
            if got is not None:
                return got
        return None

    return rec(0, [])


def _far_points(S, Rsq: Fraction):
    return S.intersect(SemiAlgebraicSet2D.parse(f"x^2 + y^2 - {Rsq} > 0"))


def _complex_branch(S, target: _Target, M, m: int, ec: EigenClass, max_steps: int) -> Verdict:
    det = ec.det
    c3 = target.c3
    if det > 1:
        w = _witness_point(_nonzero(S))
        if w is None:
            if c3 > 0:
                return _yes(S, target, M, RationalPoint(0, 0), list(range(1, m + 1)),
                            "complex pair |lambda| > 1: source is the origin, which lies in the halfplane")
            return Verdict(NO, certificate="complex pair |lambda| > 1: source is the origin, outside the halfplane")
        visits = _simulate(w, target, M, m, max_steps)
        if visits is None:
            return Verdict(UNSUPPORTED, budget=max_steps,
                           certificate="complex pair |lambda| > 1: visits not exhibited within the step budget")
        return _yes(S, target, M, w, visits,
                    "complex pair |lambda| > 1, nondegenerate: the orbit spirals outwards with dense angles "
                    "and meets the far part of the halfplane infinitely often")

    # |lambda| < 1
    G = invariant_form(M)
    g11, g12, g22 = G
    dG = g11 * g22 - g12 * g12
    c1, c2 = target.c
    # min of G over the closed halfplane boundary distance: c3^2 / (c G^-1 c^T)
    cGc = (g22 * c1 * c1 - 2 * g12 * c1 * c2 + g11 * c2 * c2) / dG
    D_T = c3 * c3 / cGc
    if c3 > 0:
        w = _witness_point(S)
        if w is None:
            return Verdict(NO, certificate="source set is empty")
        visits = _simulate(w, target, M, m, max_steps)
        if visits is None:
            return Verdict(UNSUPPORTED, budget=max_steps, certificate="contracting orbit not yet inside the halfplane")
        return _yes(S, target, M, w, visits,
                    "complex pair |lambda| < 1: orbits converge to the origin, which is interior to the halfplane")
    if c3 == 0:
        w = _witness_point(_nonzero(S))
        if w is None:
            return Verdict(NO, certificate="complex pair |lambda| < 1: only the origin, which is on the boundary")
        visits = _simulate(w, target, M, m, max_steps)
        if visits is None:
            return Verdict(UNSUPPORTED, budget=max_steps, certificate="angular visits not exhibited within budget")
        return _yes(S, target, M, w, visits,
                    "complex pair |lambda| < 1, homogeneous halfplane: dense angles give infinitely many visits")

    radii = extremal_radii(S)
    if not radii.bounded:
        Rsq = Fraction(4)
        for _ in range(400):
            w = _witness_point(_far_points(S, Rsq))
            if w is None:
                break
            stop = (lambda v: _form_value(G, v) <= D_T) if isinstance(w, RationalPoint) else None
            visits = _simulate(w, target, M, m, max_steps, stop)
            if visits is not None:
                return _yes(S, target, M, w, visits,
                            "complex pair |lambda| < 1, unbounded source: far points spiral through the halfplane")
            Rsq *= 16
        return Verdict(UNSUPPORTED, budget=max_steps, certificate="unbounded source: far witness not exhibited")

    # bounded source: G(p M^n) = det^n G(p) <= det^n sup_S G, below D_T no visit
    scale = math.lcm(g11.denominator, g12.denominator, g22.denominator)
    x, y = MPoly.var(2, 0, 1), MPoly.var(2, 1, 1)
    Gint = x * x * (g11 * scale) + x * y * (2 * g12 * scale) + y * y * (g22 * scale)
    sup_hi = extremal_radii(S, Gint).radius_sq.interval()[1] / scale
    N = 1
    while det ** N * sup_hi > D_T:
        N += 1
    feas = _Feasibility(S, target, M)
    chosen = _subset_search(feas, list(range(1, N)), m)
    cert = (f"complex pair |lambda| < 1, bounded source: G-norm squared at most {sup_hi} shrinks by det {det} per step "
            f"and stays below {D_T} from step {N} on; checked steps 1..{N - 1}")
    if chosen is None:
        return Verdict(NO, certificate=cert + f"; no {m} of them share a source point", horizon=N)
    v = _yes(S, target, M, feas.check(chosen), chosen, cert)
    v.horizon = N
    return v


def decide_halfplane_multi(S, T, M, m: int, budget: int = 200, max_steps: int = 20000,
                           bound_provider=None) -> Verdict:
    """Does some p in S have p M^n in T for at least m distinct n >= 1?"""
    S = _source(S)
    M = _as_matrix(M)
    if m < 1:
        raise ValueError("m must be a positive integer")
    target = _Target(*halfplane_coefficients(T))
    if is_empty(S).empty:
        return Verdict(NO, certificate="source set is empty")
    ec = classify_matrix(M)
    if ec.kind == "ComplexPair" and not ec.degenerate:
        if ec.det == 1:
            from .rotation import decide_rotation_multi

            return decide_rotation_multi(S, target.as_set(), M, m, budget=budget, bound_provider=bound_provider)
        return _complex_branch(S, target, M, m, ec, max_steps)
    return _decide_by_classes(S, target, M, m, budget, ec)


# ---------------------------------------------------------------------------
# lines through the origin

def homogeneous_line_fastpath(S, h, M, m: int = 2) -> Verdict:
    """Multiple reachability (m >= 2) of a line through the origin."""
    S = _source(S)
    M = _as_matrix(M)
    c1, c2, c3 = line_coefficients(h)
    if c3 != 0:
        raise ValueError("line does not pass through the origin")
    if m < 2:
        raise ValueError("the fast path needs m >= 2")
    target = _Target(c1, c2, 0, relation="=")
    line = target.as_set()
    ec = classify_matrix(M)
    (m00, m01), (m10, m11) = M.rows

    def on_line_every_step(cert):
        w = _witness_point(S.intersect(line))
        if w is None:
            return Verdict(NO, certificate=cert + "; source misses the line")
        return _yes(S, target, M, w, list(range(1, m + 1)), cert)

    if ec.det == 0:
        if M.rows == [[0, 0], [0, 0]]:
            w = _witness_point(S)
            return _yes(S, target, M, w, list(range(1, m + 1)), "zero matrix: every orbit is the origin from step 1")
        # rank one: p M = (p . u) w for the nonzero row w and column u
        row = M.rows[0] if any(M.rows[0]) else M.rows[1]
        u = (m00 / row[0], m10 / row[0]) if row[0] else (m01 / row[1], m11 / row[1])
        wdot = row[0] * u[0] + row[1] * u[1]
        if c1 * row[0] + c2 * row[1] == 0 or wdot == 0:
            w = _witness_point(S)
            steps = list(range(1, m + 1)) if wdot != 0 else list(range(2, m + 2))
            if c1 * row[0] + c2 * row[1] == 0:
                steps = list(range(1, m + 1))
            return _yes(S, target, M, w, steps, "rank-one matrix: every orbit lies on the line (or at the origin)")
        kernel = SemiAlgebraicSet2D.from_system(eqs=[_linear_poly(u, 0)])
        w = _witness_point(S.intersect(kernel))
        if w is None:
            return Verdict(NO, certificate="rank-one matrix: only the kernel line reaches the target, and S misses it")
        return _yes(S, target, M, w, list(range(1, m + 1)), "rank-one matrix: kernel points map to the origin")

    if m01 == 0 and m10 == 0 and m00 == m11:
        return on_line_every_step("scalar matrix: p M^n is on the line iff p is")

    if ec.degenerate:
        k = ec.degenerate_order
        for r in range(1, k + 1):
            w = _witness_point(S.intersect(target.region(M, r)))
            if w is not None:
                return _yes(S, target, M, w, [r + k * i for i in range(m)],
                            f"M^{k} is scalar: one visit at step {r} repeats every {k} steps")
        return Verdict(NO, certificate=f"M^{k} is scalar and no residue step 1..{k} reaches the line")

    # nondegenerate, invertible, non-scalar: two visits force an invariant line or p = 0
    d = (-c2, c1)
    dM = (d[0] * m00 + d[1] * m10, d[0] * m01 + d[1] * m11)
    if c1 * dM[0] + c2 * dM[1] == 0:
        return on_line_every_step("the line is M-invariant (an eigenline)")
    origin = RationalPoint(0, 0)
    if S.member(origin):
        return _yes(S, target, M, origin, list(range(1, m + 1)), "the origin is fixed and on the line")
    return Verdict(NO, certificate="nondegenerate matrix, line not invariant, origin not in S: at most one visit per orbit")
