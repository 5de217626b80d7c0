import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from multireach.lrs import RationalMatrix
from multireach.reduction import (MatrixCondition, brute_force_equivalence, compile_to_polytope,
                                  condition_from_point_target, parse_entry_poly)
from multireach.poly import MPoly


def _reachable(inst, horizon):
    return [n for n, v in inst.orbit(horizon) if inst.in_polytope(v)]


def test_compile_examples():
    D = RationalMatrix.diag([2, 3])
    pos = MatrixCondition.parse(2, [{"gt": ["A11"]}])
    (inst,) = compile_to_polytope(pos, D)
    assert inst.matrix.rows == [[2]]
    assert _reachable(inst, 50) == list(range(1, 51))
    eq = MatrixCondition.parse(2, [{"eq": "A11 - A22"}])
    (inst,) = compile_to_polytope(eq, D)
    assert _reachable(inst, 200) == []
    assert brute_force_equivalence(eq, D, 200)
    I = RationalMatrix.identity(2)
    one = MatrixCondition.parse(2, [{"eq": "A11"}])
    assert _reachable(compile_to_polytope(one, I)[0], 200) == []
    assert brute_force_equivalence(one, I, 200)


def test_block_sizes_sum():
    M = RationalMatrix([[1, 1], [0, 2]])
    cond = MatrixCondition.parse(2, [{"eq": "A12 - 7", "gt": ["A11*A22 - 3", "A_2_2"]}])
    (inst,) = compile_to_polytope(cond, M)
    assert inst.dimension == sum(inst.block_sizes)
    assert brute_force_equivalence(cond, M, 120)


def test_errors():
    with pytest.raises(ValueError):
        MatrixCondition.parse(2, [{"eq": "A31"}])
    cond = MatrixCondition.parse(2, [{"gt": ["A11"]}])
    with pytest.raises(ValueError):
        compile_to_polytope(cond, RationalMatrix.identity(3))
    with pytest.raises(ValueError):
        brute_force_equivalence(cond, RationalMatrix.identity(2), 0)


def test_singleton_source():
    cond = condition_from_point_target([1, 0], [(None, [MPoly.var(2, 0, 1)])])     # x > 0 after p M^n
    M = RationalMatrix([[Fraction(4, 5), Fraction(3, 5)], [Fraction(-3, 5), Fraction(4, 5)]])
    (inst,) = compile_to_polytope(cond, M)
    P, direct = RationalMatrix.identity(2), []
    for n in range(1, 101):
        P = P @ M
        if P.rows[0][0] > 0:
            direct.append(n)
    assert _reachable(inst, 100) == direct


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_linear_conditions(rnd):
    M = RationalMatrix([[Fraction(rnd.randint(-3, 3), rnd.randint(1, 2)) for _ in range(2)] for _ in range(2)])
    names = ["A11", "A12", "A21", "A22"]
    eq = f"{rnd.randint(-2, 2)}*{rnd.choice(names)} + {rnd.randint(-2, 2)}*{rnd.choice(names)}"
    gt = f"{rnd.choice(names)} - {rnd.randint(-2, 2)}"
    disjuncts = [{"gt": [gt]}]
    if not parse_entry_poly(eq, 2).is_zero():
        disjuncts.insert(0, {"eq": eq, "gt": [gt]})
    cond = MatrixCondition.parse(2, disjuncts)
    assert brute_force_equivalence(cond, M, 100)
