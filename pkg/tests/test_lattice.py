import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperroots import lattice
from hyperroots.matfmt import load_data_matrix

A2 = [[2, -1], [-1, 2]]
D4 = [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]
E8 = [
    [2, -1, 0, 0, 0, 0, 0, 0], [-1, 2, -1, 0, 0, 0, 0, 0], [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0], [0, 0, 0, -1, 2, -1, 0, 0], [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0], [0, 0, -1, 0, 0, 0, 0, 2],
]


def random_unimodular(n, rng, steps=12):
    U = np.eye(n, dtype=object)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        U[i] += rng.choice([-1, 1]) * U[j]
    return U


def congruent(A, U):
    A = np.array(A, dtype=object)
    return (U @ A @ U.T).tolist()


@pytest.mark.parametrize("A,det,level,dq", [
    (A2, 3, 3, [3]), (D4, 4, 2, [2, 2]), (E8, 1, 1, []),
    ([[6, -3], [-3, 6]], 27, 9, [3, 9]),
])
def test_root_lattice_invariants(A, det, level, dq):
    inv = lattice.invariants(A)
    assert inv.discriminant == det
    assert inv.level == level
    assert inv.dual_quotient == dq
    assert inv.weight == len(A) // 2


@pytest.mark.parametrize("name,det,level", [("L1", 4096, 16), ("L2", 5 ** 9, 25), ("L3", 6 ** 12, 18)])
def test_published_levels(name, det, level):
    inv = lattice.invariants(load_data_matrix("gram", name))
    assert (inv.discriminant, inv.level) == (det, level)


def test_level_is_minimal():
    A = load_data_matrix("gram", "L1")
    inv = lattice.inverse(A)
    l = lattice.modular_level(A)
    assert lattice.is_even_integral([[l * x for x in r] for r in inv])
    for d in range(1, l):
        assert not lattice.is_even_integral([[d * x for x in r] for r in inv])


def test_invariants_reject_bad_input():
    with pytest.raises(ValueError):
        lattice.invariants([[2, 1], [0, 2]])
    with pytest.raises(ValueError):
        lattice.invariants([[1, 0], [0, 2]])
    with pytest.raises(ValueError):
        lattice.invariants([[2, 3], [3, 2]])


def test_legendre():
    assert lattice.legendre_symbol(2, 7) == 1
    assert lattice.legendre_symbol(3, 7) == -1
    prof = lattice.legendre_profile(4096, 16, 4)
    assert prof == [(3, 1), (5, 1), (7, 1), (11, 1)]


def test_inverse_exact():
    A = load_data_matrix("gram", "L1")
    inv = lattice.inverse(A)
    n = len(A)
    for i in range(n):
        for j in range(n):
            assert sum(A[i][k] * inv[k][j] for k in range(n)) == (1 if i == j else 0)
    assert isinstance(inv[0][0], Fraction)


def test_smith_product_is_determinant():
    A = load_data_matrix("gram", "L2")
    assert np.prod(lattice.smith_invariants(A)) == lattice.determinant(A)


def test_ldl_pivots_positive():
    assert all(p > 0 for p in lattice.ldl_pivots(E8))
    assert not lattice.is_positive_definite([[2, 3], [3, 2]])


def test_signed_permutation_witness():
    rng = random.Random(11)
    A = load_data_matrix("gram", "L1")
    n = len(A)
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice([-1, 1]) for _ in range(n)]
    B = [[signs[i] * signs[j] * A[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
    w = lattice.signed_perm_equivalent(A, B)
    assert w is not None
    assert lattice.apply_signed_perm(A, w) == B


def test_signed_permutation_rejects_different_lattices():
    assert lattice.signed_perm_equivalent(A2, [[2, 1], [1, 4]]) is None
    assert lattice.signed_perm_equivalent(D4, [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]) is None


@pytest.mark.parametrize("reducer", ["lll", "bkz"])
def test_reduction_is_congruence(reducer):
    rng = random.Random(5)
    A = load_data_matrix("gram", "L1")
    U0 = random_unimodular(len(A), rng, steps=30)
    B = congruent(A, U0)
    if reducer == "lll":
        G, U = lattice.lll_gram(B)
    else:
        G, U = lattice.bkz_gram(B, block=4)
    assert abs(lattice.determinant(U)) == 1
    assert congruent(B, np.array(U, dtype=object)) == [list(r) for r in G]
    assert sum(G[i][i] for i in range(len(G))) <= sum(B[i][i] for i in range(len(B)))


def test_bkz_finds_short_diagonal():
    rng = random.Random(8)
    B = congruent(E8, random_unimodular(8, rng, steps=40))
    G, _ = lattice.bkz_gram(B, block=8)
    assert all(G[i][i] == 2 for i in range(8))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=5).filter(lambda c: any(c)))
def test_unimodular_completion(c):
    from math import gcd
    from functools import reduce
    g = reduce(gcd, c)
    c = [x // g for x in c]
    T = lattice.unimodular_completion(c)
    assert list(T[0]) == c
    assert abs(lattice.determinant(T)) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_hermite_columns(M):
    if lattice.determinant(M) == 0:
        return
    H, V = lattice.hermite_columns(M)
    n = len(M)
    assert abs(lattice.determinant(V)) == 1
    assert (np.array(M, dtype=object) @ np.array(V, dtype=object)).tolist() == [list(r) for r in H]
    for i in range(n):
        assert H[i][i] > 0
        assert all(H[i][j] == 0 for j in range(i + 1, n))
