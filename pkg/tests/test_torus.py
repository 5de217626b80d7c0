import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from multireach.numeric import QuadraticNumber as Q
from multireach.torus import (Lattice, LaurentPoly, LaurentSystem, MonoidalMap, candidate_lattices_from_exponents,
                              coset_union_decomposition, hermite_normal_form, kernel, maximal_subtori,
                              monoidal_transform, smith_normal_form, torus_contains, torus_parametrization)


def z(n, i, k=1):
    return LaurentPoly.var(n, i, k)


def sym_rank(A):
    return sympy.Matrix(A).rank() if A else 0


def test_lattice_examples():
    assert kernel([[1], [-1]]) == Lattice.from_generators([[1, 1]])
    assert Lattice.from_generators([[2, 2]]).saturation() == Lattice.from_generators([[1, 1]])
    assert Lattice.from_generators([[2, 2]]).index_in_saturation() == 2
    assert Lattice.from_generators([[2, 4], [0, 6]]).contains([2, 10])
    assert not Lattice.from_generators([[2, 4], [0, 6]]).contains([1, 2])
    L = Lattice.from_generators([[1, 2, 3]])
    C = L.orthogonal_complement()
    assert C.rank == 2 and all(sum(a * b for a, b in zip(r, [1, 2, 3])) == 0 for r in C.rows())


def test_candidate_examples():
    X = LaurentSystem(2, [z(2, 0) - z(2, 1)])
    assert candidate_lattices_from_exponents(X) == [Lattice.from_generators([[1, -1]])]
    assert maximal_subtori(X) == [Lattice.from_generators([[1, -1]])]
    X = LaurentSystem(2, [z(2, 0) + z(2, 1) + 1])
    assert maximal_subtori(X) == []
    X = LaurentSystem(2, [z(2, 0) * z(2, 1, 3)])
    assert candidate_lattices_from_exponents(X) == []
    # z1 z2 - 1 = 0 with the conjugate pair constraint: torus {z1 z2 = 1}
    X = LaurentSystem(2, [], conjugate_pairs=[(0, 1)])
    assert maximal_subtori(X) == [Lattice.from_generators([[1, 1]])]


def test_parametrization_examples():
    P = torus_parametrization(Lattice.from_generators([[1, 1]]))
    assert P.r == 1 and P.norm_bound_ok
    W = P.W[0]
    assert W in ([1, -1], [-1, 1])
    # t^W lies on z1 z2 = 1
    t = Q(Fraction(3, 7))
    pt = P.map.apply([Q(1), t])
    assert pt[0] * pt[1] == 1
    P0 = torus_parametrization(Lattice.zero(3))
    assert P0.map.A == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    with pytest.raises(ValueError):
        torus_parametrization(Lattice.full(2))


def test_monoidal_maps():
    swap = MonoidalMap([[0, 1], [1, 0]])
    assert swap.apply([Q(2), Q(3)]) == [Q(3), Q(2)]
    with pytest.raises(ValueError):
        MonoidalMap([[2, 0], [0, 1]])
    A = MonoidalMap([[1, 2], [1, 3]])
    p = [Q(Fraction(2, 3)), Q(5)]
    assert A.inverse.apply(A.apply(p)) == p
    f = z(2, 0) * z(2, 1) - 2
    X = LaurentSystem(2, [f])
    Xt = monoidal_transform(X, A)
    # f o phi_A vanishes at phi_A^{-1}(q) exactly when f(q) = 0
    for q in ([Q(2), Q(1)], [Q(1), Q(1)], [Q(Fraction(1, 2)), Q(4)]):
        assert (Xt.polys[0].evaluate(A.inverse.apply(q)) == 0) == (f.evaluate(q) == 0)


def test_coset_decomposition_random_points():
    # X = {(z1 z2)^2 - 3 z1 z2 + 2 = 0}: the cosets z1 z2 = 1 and z1 z2 = 2
    w = z(2, 0) * z(2, 1)
    X = LaurentSystem(2, [w * w - 3 * w + 2])
    dec = coset_union_decomposition(X, Lattice.from_generators([[1, 1]]))
    assert dec.param.r == 1 and dec.X1.nvars == 1
    rnd = random.Random(11)
    for _ in range(100):
        s = Q(Fraction(rnd.choice([-1, 1]) * rnd.randint(1, 50), rnd.randint(1, 50)))
        c = rnd.choice([1, 2])
        pt = [s * c, s.inverse()]
        assert X.satisfied_by(pt)
        gt = dec.map.inverse.apply(pt)
        assert dec.X1.satisfied_by(gt[:1])
        # and any t lifts back into X
        t = Q(rnd.randint(1, 9))
        assert X.satisfied_by(dec.lift(gt[:1], [t]))
    # a point off X does not satisfy X1
    assert not dec.X1.satisfied_by(dec.map.inverse.apply([Q(3), Q(1)])[:1])


matrices = st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda k: st.lists(st.lists(st.integers(-9, 9), min_size=k, max_size=k), min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_hnf_certificate(A):
    H, U, r = hermite_normal_form(A)
    assert abs(sympy.Matrix(U).det()) == 1
    assert (sympy.Matrix(U) * sympy.Matrix(A)).tolist() == H
    assert r == sym_rank(A)
    assert all(not any(row) for row in H[r:])
    pivots = [next(j for j, x in enumerate(row) if x) for row in H[:r]]
    assert pivots == sorted(set(pivots))
    for i, c in enumerate(pivots):
        assert H[i][c] > 0
        assert all(0 <= H[k][c] < H[i][c] for k in range(i))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_certificate(A):
    S, U, V = smith_normal_form(A)
    assert abs(sympy.Matrix(U).det()) == 1 and abs(sympy.Matrix(V).det()) == 1
    assert (sympy.Matrix(U) * sympy.Matrix(A) * sympy.Matrix(V)).tolist() == S
    d = [S[i][i] for i in range(min(len(S), len(S[0])))]
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz) and len(nz) == sym_rank(A)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    # oracle: sympy's invariant factors
    from sympy.matrices.normalforms import smith_normal_form as sym_snf
    ref = sym_snf(sympy.Matrix(A), domain=sympy.ZZ)
    ref_d = sorted(abs(ref[i, i]) for i in range(min(ref.shape)) if ref[i, i])
    assert sorted(nz) == ref_d


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.lists(
    st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=1, max_size=n - 1)))
def test_parametrization_bound_and_annihilation(gens):
    lat = Lattice.from_generators(gens)
    if lat.rank == lat.ambient:
        return
    P = torus_parametrization(lat)
    n = lat.ambient
    assert P.r == n - lat.rank
    assert abs(sympy.Matrix(P.map.A).det()) == 1
    for w in P.W:
        for a in gens:
            assert sum(x * y for x, y in zip(w, a)) == 0
    assert P.norm_bound_ok and P.map.norm() <= n ** 3 * max(P.N, 1) ** (n - P.r)
    # the rows of W span the full complement (saturation check)
    assert Lattice.from_generators(P.W, n) == lat.saturation().orthogonal_complement()


def test_torus_contains_agrees_with_sampling():
    X = LaurentSystem(3, [z(3, 0) * z(3, 1) - z(3, 2) ** 2])
    L = Lattice.from_generators([[1, 1, -2]])
    assert torus_contains(X, L)
    assert not torus_contains(X, Lattice.from_generators([[1, -1, 0]]))
