"""Thin bridge to sympy for polynomial factorisation and resultants.

Everything else (root isolation, sign determination, field arithmetic) is done
in-house; sympy is only asked for irreducible factors and eliminants.
"""
from __future__ import annotations

from fractions import Fraction

import sympy
from sympy import Poly, QQ, ZZ

_X, _Y, _S = sympy.symbols("x y s")


def _to_sympy_uni(p):
    coeffs = [sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
              for c in reversed(p)]
    return Poly(coeffs, _X, domain=QQ)


def _from_sympy_uni(P: Poly) -> list[int]:
    cs = [int(c) for c in reversed(P.all_coeffs())]
    return cs


def factor_univariate(p) -> list[list[int]]:
    """Distinct nonconstant irreducible factors over Q, as primitive integer
    coefficient lists (low-to-high, positive leading coefficient)."""
    P = _to_sympy_uni(p)
    if P.degree() <= 0:
        return []
    _, facs = P.clear_denoms()[1].set_domain(ZZ).factor_list()
    out = []
    for f, _mult in facs:
        if f.degree() <= 0:
            continue
        cs = _from_sympy_uni(f)
        if cs[-1] < 0:
            cs = [-c for c in cs]
        out.append(cs)
    out.sort(key=lambda c: (len(c), c))
    return out


def dict_to_sympy(terms: dict, gens) -> Poly:
    """terms: {(i, j, ...): int} -> sympy Poly over ZZ in gens."""
    return Poly.from_dict({k: sympy.Integer(v) for k, v in terms.items()}, *gens, domain=ZZ)


def sympy_to_dict(P: Poly) -> dict:
    return {k: int(v) for k, v in P.as_dict().items() if v != 0}


def factor_multivariate(terms: dict, nvars: int) -> list[dict]:
    """Distinct irreducible nonconstant factors of an integer polynomial."""
    gens = sympy.symbols(f"v0:{nvars}")
    P = dict_to_sympy(terms, gens)
    _, facs = P.factor_list()
    out = []
    for f, _mult in facs:
        if f.total_degree() <= 0:
            continue
        out.append(sympy_to_dict(f))
    return out


def resultant(f: dict, g: dict, nvars: int, var: int) -> dict:
    """Resultant of two integer polynomials with respect to variable `var`."""
    gens = sympy.symbols(f"v0:{nvars}")
    F = dict_to_sympy(f, gens)
    G = dict_to_sympy(g, gens)
    R = sympy.resultant(F.as_expr(), G.as_expr(), gens[var])
    R = Poly(R, *gens, domain=ZZ)
    return sympy_to_dict(R)


def gcd_multivariate(f: dict, g: dict, nvars: int) -> dict:
    gens = sympy.symbols(f"v0:{nvars}")
    return sympy_to_dict(dict_to_sympy(f, gens).gcd(dict_to_sympy(g, gens)))
