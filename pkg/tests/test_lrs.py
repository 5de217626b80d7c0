import random
from fractions import Fraction
from math import comb

import sympy
from hypothesis import given, settings, strategies as st

from multireach.lrs import (RationalMatrix, RecurrenceRelation, binomial_recurrence, companion_matrix,
                            entry_recurrence, eval_poly_orbit, lrs_combine, md_matrix, minimize)


def _sym_power_entry(M, n, i, j):
    return Fraction(str((sympy.Matrix(M) ** n)[i, j]))


def test_companion_examples():
    fib = RecurrenceRelation([1, 1], [1, 1])
    C = companion_matrix(fib)
    assert fib.terms(10) == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
    for n in range(1, 30):
        assert (C ** n).rows[0][-1] == fib.terms(n)[-1]
    one = companion_matrix(RecurrenceRelation([1], [1]))
    assert one.rows == [[1]]
    two = companion_matrix(RecurrenceRelation([2], [2]))
    assert all((two ** n).rows[0][0] == 2 ** n for n in range(1, 20))


def test_entry_recurrence_examples():
    M = RationalMatrix([[Fraction(4, 5), Fraction(3, 5)], [Fraction(-3, 5), Fraction(4, 5)]])
    r = entry_recurrence(M, 1, 1)
    assert r.coefficients == [Fraction(8, 5), -1]
    seq = [_sym_power_entry(M.rows, n, 0, 0) for n in range(1, 51)]
    assert r.satisfied_by(seq) and r.terms(50) == seq
    I = RationalMatrix.identity(2)
    assert entry_recurrence(I, 1, 1, minimal=True).terms(5) == [1] * 5
    D = RationalMatrix.diag([2, 3])
    rd = entry_recurrence(D, 1, 1)
    assert rd.satisfied_by([2 ** n for n in range(1, 40)])


def test_combine_examples():
    fib = RecurrenceRelation([1, 1], [1, 1])
    pow2 = RecurrenceRelation([2], [2])
    s = lrs_combine(fib, pow2, "sum")
    ref = [a + b for a, b in zip(fib.terms(200), pow2.terms(200))]
    assert s.terms(200) == ref
    assert minimize(s).coefficients == [3, -1, -2]
    p = minimize(lrs_combine(fib, pow2, "product"))
    assert p.coefficients == [2, 4]
    assert p.terms(200) == [a * b for a, b in zip(fib.terms(200), pow2.terms(200))]
    zero = RecurrenceRelation([1], [0])
    assert lrs_combine(fib, zero, "sum").terms(50) == fib.terms(50)


relations = st.integers(1, 4).flatmap(lambda d: st.tuples(
    st.lists(st.fractions(-3, 3, max_denominator=4), min_size=d, max_size=d),
    st.lists(st.fractions(-5, 5, max_denominator=3), min_size=d, max_size=d)))


@settings(max_examples=50, deadline=None)
@given(relations, relations)
def test_combine_matches_termwise(ra, rb):
    u, v = RecurrenceRelation(*ra), RecurrenceRelation(*rb)
    su, sv = u.terms(200), v.terms(200)
    s = lrs_combine(u, v, "sum")
    p = lrs_combine(u, v, "product")
    assert s.order <= u.order + v.order and p.order <= u.order * v.order
    assert s.terms(200) == [a + b for a, b in zip(su, sv)]
    assert p.terms(200) == [a * b for a, b in zip(su, sv)]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3), st.randoms(use_true_random=False))
def test_companion_entry_round_trip(d, rnd):
    rows = [[Fraction(rnd.randint(-4, 4), rnd.randint(1, 3)) for _ in range(d)] for _ in range(d)]
    M = RationalMatrix(rows)
    i, j = rnd.randint(1, d), rnd.randint(1, d)
    r = entry_recurrence(M, i, j)
    direct, P = [], RationalMatrix.identity(d)
    for _ in range(200):
        P = P @ M
        direct.append(P.rows[i - 1][j - 1])
    C = companion_matrix(r)
    Q, via = RationalMatrix.identity(C.n), []
    for _ in range(200):
        Q = Q @ C
        via.append(Q.rows[0][-1])
    assert via == direct


def test_binomial_recurrence():
    assert binomial_recurrence(2).coefficients == [3, -3, 1]
    assert binomial_recurrence(0).coefficients == [1]
    assert binomial_recurrence(2).with_initial([1, 4, 9]).terms(4)[-1] == 16
    for d in range(7):
        q = binomial_recurrence(d).coefficients
        assert q == [(-1) ** (i + 1) * comb(d + 1, i) for i in range(1, d + 2)]


def test_md_matrix_examples():
    assert md_matrix(1).rows == [[0, -1], [1, 2]]
    for n in range(101):
        assert eval_poly_orbit([0, 1], n, 1) == n + 1
    assert eval_poly_orbit([0, 0, 1], 2, 2) == 9
    rnd = random.Random(5)
    P = [rnd.randint(-9, 9) for _ in range(4)]
    assert eval_poly_orbit(P, 0, 3) == sum(P)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=7))
def test_eval_poly_orbit_pinned_shift(P):
    d = max(len(P) - 1, 1)
    for n in range(0, 101, 7):
        assert eval_poly_orbit(P, n, d) == sum(c * (n + 1) ** k for k, c in enumerate(P))
