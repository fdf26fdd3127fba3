import random
from fractions import Fraction

import numpy as np
import pytest

from hyperroots import lattice
from hyperroots.errors import BasisDegenerate
from hyperroots.matfmt import load_data_matrix
from hyperroots.ribbon import (
    RibbonPoint,
    all_pairs_table,
    certified_rank,
    check_harmonicity,
    enumerate_ribbon,
    express_in_basis,
    field_of_coefficients,
    inner_product,
    is_admissible,
    project_dirac,
    project_function,
    root_field,
    select_basis,
    system_gram,
    system_table,
)


@pytest.mark.parametrize("name,count", [("A0", 3), ("A1", 16), ("A2", 50), ("D3", 72), ("SU2:A4", 20)])
def test_ribbon_point_counts(name, count):
    assert len(enumerate_ribbon(system_table(name))) == count


def test_admissibility():
    t = system_table("A1")
    assert is_admissible(t, RibbonPoint(0, 0, 0))
    assert not is_admissible(t, RibbonPoint(1, 0, 0))


@pytest.mark.parametrize("name", ["A0", "A1", "A2", "D3", "E5"])
def test_self_pairing_is_six(name):
    t = system_table(name)
    assert all(inner_product(t, p, p) == 6 for p in enumerate_ribbon(t))


def test_su2_self_pairing_is_two():
    t = system_table("SU2:E6")
    assert all(inner_product(t, p, p) == 2 for p in enumerate_ribbon(t))


@pytest.mark.parametrize("name", ["A1", "A2", "D3"])
def test_pairing_symmetric_and_sign(name):
    t = system_table(name)
    pts = enumerate_ribbon(t)
    T = all_pairs_table(t, pts)
    assert np.array_equal(T, T.T)
    a, b = pts[1], pts[-1]
    assert inner_product(t, a, b, -1, 1) == -inner_product(t, a, b)


@pytest.mark.parametrize("name,rank", [("A1", 6), ("A2", 12), ("D3", 12)])
def test_rank_of_pair_table(name, rank):
    t = system_table(name)
    pts = enumerate_ribbon(t)
    full = all_pairs_table(t, pts)
    assert lattice.rank(full) == rank
    assert certified_rank(t, pts, select_basis(t)) == rank


def test_a0_gram():
    assert system_gram("A0").rows() == [[6, -3], [-3, 6]]


@pytest.mark.parametrize("name,size", [("A1", 6), ("A2", 12), ("D3", 12), ("E21", 48), ("SU2:E6", 6)])
def test_basis_sizes(name, size):
    assert system_gram(name).size == size


@pytest.mark.parametrize("name,label", [("A1", "B2"), ("D3", "B2"), ("A2", "B3"), ("E21", "B3")])
def test_bases_give_the_same_lattice(name, label):
    A = system_gram(name, "B1").rows()
    B = system_gram(name, label).rows()
    assert lattice.determinant(A) == lattice.determinant(B)
    assert lattice.smith_invariants(A) == lattice.smith_invariants(B)


@pytest.mark.parametrize("name", ["A1", "A3", "A5", "E5", "E9"])
def test_b3_positions_degenerate(name):
    # the six B3 positions only span a corank-2 sublattice for these modules
    with pytest.raises(BasisDegenerate):
        system_gram(name, "B3")


def test_unknown_basis_label():
    with pytest.raises(ValueError):
        select_basis(system_table("A1"), "B7")


@pytest.mark.parametrize("name", ["L1", "L2", "D3"])
def test_published_gram_equivalent(name):
    G = system_gram(name).rows()
    P = load_data_matrix("gram", name)
    w = lattice.signed_perm_equivalent(G, P)
    assert w is not None
    assert lattice.apply_signed_perm(G, w) == P


def test_every_root_is_integral():
    g = system_gram("A2")
    t = system_table("A2")
    for p in enumerate_ribbon(t):
        x = express_in_basis(g, t, p)
        assert g.norm(x) == 6


def test_su2_gram_is_cartan_up_to_signs():
    g = system_gram("SU2:A4").rows()
    assert lattice.determinant(g) == 5
    assert all(g[i][i] == 2 for i in range(4))


@pytest.mark.parametrize("name", ["A1", "A2"])
def test_root_fields_harmonic(name):
    t = system_table(name)
    for p in enumerate_ribbon(t)[:8]:
        assert check_harmonicity(t, root_field(t, p))


def test_dirac_mass_not_harmonic():
    t = system_table("A1")
    ok, witness = check_harmonicity(t, {RibbonPoint(0, 0, 0): 1}, return_witness=True)
    assert not ok and witness is not None


def test_dirac_projection_recovers_root():
    g = system_gram("A1")
    t = system_table("A1")
    N2 = t.N ** 2
    for u in enumerate_ribbon(t):
        x = project_dirac(g, t, u)
        assert [N2 * c for c in x] == express_in_basis(g, t, u)


def test_projection_is_idempotent():
    g = system_gram("A1")
    t = system_table("A1")
    rng = random.Random(3)
    f = {p: rng.randint(-3, 3) for p in enumerate_ribbon(t)}
    x = project_function(g, t, f)
    p = field_of_coefficients(g, t, x)
    assert project_function(g, t, p) == x
    assert all(isinstance(c, Fraction) for c in x)


def test_b3_is_a_proper_sublattice_for_d3():
    d1 = lattice.determinant(system_gram("D3", "B1").rows())
    d3 = lattice.determinant(system_gram("D3", "B3").rows())
    assert d3 == 9 * d1
