import numpy as np
import pytest

from hyperroots.errors import NotShipped, UngradedModule
from hyperroots.fusion import (
    build_alcove,
    build_alcove_su2,
    grading,
    load_fusion_system,
    make_su3_system,
    su3_alcove_fundamental,
    su3_alcove_weights,
    su3_names,
)
from hyperroots.matfmt import load_data_matrix


def table(name):
    return build_alcove(load_fusion_system(name))


@pytest.mark.parametrize("name,k,N,r,R", [
    ("A0", 0, 3, 1, 6), ("A1", 1, 4, 3, 32), ("A2", 2, 5, 6, 100), ("A4", 4, 7, 15, 490),
    ("D3", 3, 6, 6, 144), ("E21", 21, 24, 24, 9216),
])
def test_counts(name, k, N, r, R):
    s = load_fusion_system(name)
    assert (s.level, s.N, s.rank, s.root_count) == (k, N, r, R)
    assert s.lattice_rank == 2 * r


def test_a1_is_cyclic_permutation():
    F = load_fusion_system("A1").fundamental
    assert F.shape == (3, 3)
    assert (F.sum(axis=0) == 1).all() and (F.sum(axis=1) == 1).all()
    assert np.array_equal(np.linalg.matrix_power(F, 3), np.eye(3, dtype=int))


def test_d3_row_and_triality():
    s = load_fusion_system("D3")
    # fifth row, counting from one
    assert list(s.fundamental[4]) == [0, 0, 0, 0, 0, 2]
    assert s.triality == (0, 0, 0, 0, 1, 2)


@pytest.mark.parametrize("name", su3_names())
def test_triality_is_a_grading(name):
    s = load_fusion_system(name)
    F = s.fundamental
    for a, b in zip(*np.nonzero(F)):
        assert s.triality[b] == (s.triality[a] + 1) % 3


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_generated_alcove_graph_matches_shipped(k):
    # the shipped matrices list vertices in the alcove order of the generator
    F = su3_alcove_fundamental(k)
    assert np.array_equal(F, load_data_matrix("fusion", f"A{k}"))


def test_alcove_weights_count():
    assert len(su3_alcove_weights(4)) == 15
    assert su3_alcove_weights(0) == [(0, 0)]


def test_unknown_name():
    with pytest.raises(NotShipped) as err:
        load_fusion_system("A9")
    assert "E21" in str(err.value)


def test_ungraded_module_rejected():
    with pytest.raises(UngradedModule):
        grading(np.ones((1, 1), dtype=int), 3)
    with pytest.raises(UngradedModule):
        make_su3_system("bad", 1, [[1, 0], [0, 1]])


def test_identity_and_walls():
    t = table("A2")
    N = t.N
    assert np.array_equal(t.lookup(1, 1), np.eye(6, dtype=int))
    for q in range(-3, 8):
        assert not t.lookup(0, q).any()
        assert not t.lookup(q, N).any()


def test_a2_adjoint_is_product_minus_identity():
    t = table("A2")
    F10 = t.lookup(2, 1)
    F01 = t.lookup(1, 2)
    assert np.array_equal(t.lookup(2, 2), F10 @ F01 - np.eye(6, dtype=int))


def test_a1_square_is_conjugate():
    t = table("A1")
    F10 = t.lookup(2, 1)
    assert np.array_equal(F10 @ F10, F10.T)
    assert np.array_equal(t.lookup(1, 2), F10.T)


def test_periodicity_and_rotation():
    t = table("A2")
    N = t.N
    P = t.lookup(N - 2, 1)
    assert np.array_equal(P @ P @ P, np.eye(6, dtype=int))
    for p, q in [(1, 1), (2, 1), (3, 1), (1, 3), (2, 2), (4, 3), (-2, 5)]:
        M = t.lookup(p, q)
        assert np.array_equal(t.lookup(p + 3 * N, q), M)
        assert np.array_equal(t.lookup(p, q + 3 * N), M)
        assert np.array_equal(t.lookup(p + N, q + N), M)


@pytest.mark.parametrize("name", ["A2", "A3", "D3", "E5"])
def test_tensor_recursion_everywhere(name):
    # F(1,0) F{p,q} = F{p+1,q} + F{p-1,q+1} + F{p,q-1} holds on the extended labels
    t = table(name)
    F10 = t.system.fundamental
    N = t.N
    for p in range(-N, 2 * N):
        for q in range(-N, 2 * N):
            lhs = F10 @ t.lookup(p, q)
            rhs = t.lookup(p + 1, q) + t.lookup(p - 1, q + 1) + t.lookup(p, q - 1)
            assert np.array_equal(lhs, rhs), (p, q)


def test_alcove_entries_non_negative():
    t = table("E9")
    assert all((M >= 0).all() for M in t.alcove.values())


def test_su2_chebyshev():
    s = load_fusion_system("SU2:A4")
    t = build_alcove_su2(s)
    N = t.N
    assert N == 5
    r = s.rank
    assert np.array_equal(t.lookup(1), np.eye(r, dtype=int))
    assert np.array_equal(t.lookup(2), s.fundamental)
    assert np.array_equal(t.lookup(2 * N - 1), -np.eye(r, dtype=int))
    assert not t.lookup(N).any()


@pytest.mark.parametrize("name,N", [("E6", 12), ("D5", 8), ("A4", 5)])
def test_su2_coxeter(name, N):
    assert load_fusion_system(name, group="SU2").N == N
