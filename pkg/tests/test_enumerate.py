import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperroots import enumerate as en
from hyperroots import lattice, ribbon
from hyperroots.errors import BudgetExceeded
from hyperroots.matfmt import load_data_matrix

BACKENDS = ["python"] + (["cython"] if en._kernel is not None else [])
A2 = [[2, -1], [-1, 2]]
E8 = [
    [2, -1, 0, 0, 0, 0, 0, 0], [-1, 2, -1, 0, 0, 0, 0, 0], [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0], [0, 0, 0, -1, 2, -1, 0, 0], [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0], [0, 0, -1, 0, 0, 0, 0, 2],
]


def random_even_gram(rng, n):
    B = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
    while lattice.determinant(B) == 0:
        B = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
    M = np.array(B) @ np.array(B).T
    return (2 * M).tolist()


@pytest.mark.parametrize("backend", BACKENDS)
def test_a2_hexagonal(backend):
    th = en.theta_series(A2, 14, backend=backend)
    # x^2 + xy + y^2 represents 1, 3, 4, 7 with 6, 6, 6, 12 solutions
    assert th.dense(2) == [1, 6, 0, 6, 6, 0, 0, 12]


@pytest.mark.parametrize("backend", BACKENDS)
def test_e8_eisenstein(backend):
    th = en.theta_series(E8, 8, backend=backend)
    # 240 sigma_3(m)
    assert th.dense(2) == [1, 240, 2160, 6720, 17520]


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("seed", range(6))
def test_matches_brute_force(backend, seed):
    rng = random.Random(seed)
    A = random_even_gram(rng, rng.randint(2, 4))
    bound = 2 * min(A[i][i] for i in range(len(A)))
    th = en.theta_series(A, bound, backend=backend)
    assert th.coefficients == en.naive_theta(A, bound)


@pytest.mark.parametrize("name,upto", [("L1", 12), ("D3", 12)])
def test_backends_agree(name, upto):
    A = ribbon.system_gram(name).rows()
    series = {b: en.theta_series(A, upto, backend=b).coefficients for b in BACKENDS}
    assert len({tuple(sorted(s.items())) for s in series.values()}) == 1


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5])
def test_coset_split_matches_plain_walk(backend, k):
    A = load_data_matrix("gram", "L1")
    plain, _, _ = en._run(A, 16, 1, en.DEFAULT_BUDGET, 1, False, backend, split=0)
    hist, _, _ = en._run(A, 16, 1, en.DEFAULT_BUDGET, 1, False, backend, split=k)
    assert np.array_equal(plain, hist)


def test_split_disabled_for_odd_lattices():
    Ai, mu, d = en._prepare([[1, 0], [0, 1]])
    assert en.choose_split(Ai, d, 10, 2)[0] == 0


def test_reduction_does_not_change_counts():
    A = ribbon.system_gram("D3").rows()
    a, _, _ = en._run(A, 10, 1, en.DEFAULT_BUDGET, 1, False, None, reduce=False, split=0)
    b, _, _ = en._run(A, 10, 1, en.DEFAULT_BUDGET, 1, False, None)
    assert np.array_equal(a, b)


def test_threads_give_same_counts():
    A = ribbon.system_gram("L2").rows()
    assert en.theta_series(A, 12, threads=3).coefficients == en.theta_series(A, 12).coefficients


@pytest.mark.parametrize("backend", BACKENDS)
def test_shell_vectors_have_the_norm(backend):
    A = ribbon.system_gram("D3").rows()
    sh = en.shell(A, 4, backend=backend)
    assert len(sh) == 18 and sh.count_with_signs == 36
    M = np.array(A)
    assert all(int(v @ M @ v) == 4 for v in sh.vectors)
    assert all(v[np.flatnonzero(v)[0]] > 0 for v in sh.vectors)


def test_budget_exceeded():
    A = ribbon.system_gram("L1").rows()
    with pytest.raises(BudgetExceeded):
        en.theta_series(A, 40, budget=1000)


def test_budget_exceeded_python_kernel():
    A = ribbon.system_gram("L1").rows()
    with pytest.raises(BudgetExceeded):
        en.theta_series(A, 20, budget=200, backend="python")


def test_rejects_indefinite():
    with pytest.raises(ValueError):
        en.theta_series([[2, 3], [3, 2]], 4)


def test_kissing_a1():
    t = ribbon.system_table("A1")
    g = ribbon.system_gram("A1")
    k = en.kissing_data(g.rows(), t, g.basis)
    assert k["min_norm"] == 6
    assert k["kissing_number"] == 32
    assert k["min_vectors_are_hyperroots"]


def test_theta_json_round_trip():
    th = en.theta_series(A2, 8, name="hex")
    assert en.ThetaSeries.from_json(th.to_json()) == th
    assert str(th).endswith("O(q^9)")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_property_counts_match_oracle(seed, n):
    rng = random.Random(seed)
    A = random_even_gram(rng, n)
    bound = min(A[i][i] for i in range(n)) + 2
    assert en.theta_series(A, bound).coefficients == en.naive_theta(A, bound)


def test_d6_norm6_shell_decomposition():
    # the printed "3522 - 648" does not match the printed norm-6 coefficient 2322
    t = ribbon.system_table("D6")
    g = ribbon.system_gram("D6")
    d = en.shell_decomposition(g.rows(), t, g.basis, 6)
    assert d == {"norm": 6, "total": 2322, "hyperroot_count": 648, "other_count": 1674,
                 "cumulative_nonzero": 2484}
