import pytest
from hypothesis import given, settings, strategies as st

from hyperroots import enumerate as en
from hyperroots.errors import FractionalExponent, NotShipped
from hyperroots.qseries import (
    QSeries,
    combine,
    elliptic_theta,
    from_counts,
    published_names,
    published_theta,
    reference_series,
)


def series(max_t=12):
    return st.integers(0, max_t).flatmap(
        lambda t: st.lists(st.integers(-50, 50), min_size=t + 1, max_size=t + 1).map(
            lambda c: QSeries(tuple(c), t)))


@settings(max_examples=80, deadline=None)
@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QSeries((), a.truncation)


@settings(max_examples=40, deadline=None)
@given(series(8), st.integers(0, 4))
def test_power_is_repeated_product(a, k):
    p = QSeries.one(a.truncation)
    for _ in range(k):
        p = p * a
    assert a ** k == p


def test_truncation_is_respected():
    a = QSeries((1, 2, 3, 4), 3)
    b = QSeries((1, 1), 1)
    assert (a * b).truncation == 1
    with pytest.raises(IndexError):
        (a + b)[2]
    with pytest.raises(ValueError):
        b.truncate(5)


def test_unit_mismatch():
    with pytest.raises(ValueError):
        QSeries((1,), 2, "q") + QSeries((1,), 2, "q2")


def test_theta3_squared_sums_of_two_squares():
    t = elliptic_theta(3, 1, 10)
    assert (t * t).coefficients == (1, 4, 4, 0, 4, 8, 0, 0, 4, 4, 8)


def test_jacobi_identity():
    T = 40
    t2, t3, t4 = (elliptic_theta(k, 4, T) for k in (2, 3, 4))
    assert t3 ** 4 == t2 ** 4 + t4 ** 4


@pytest.mark.parametrize("m", [1, 2, 3, 6])
def test_theta2_needs_multiple_of_four(m):
    with pytest.raises(FractionalExponent):
        elliptic_theta(2, m, 10)


def test_theta2_at_four():
    assert elliptic_theta(2, 4, 10).terms() == [(1, 2), (9, 2)]


def test_substitute_and_units():
    s = QSeries((1, 6, 0, 6), 3)
    u = s.substitute(3)
    assert u.truncation == 11
    assert u.terms() == [(0, 1), (3, 6), (9, 6)]
    h = QSeries((1, 2), 1, "q2").to_unit("q")
    assert h.terms() == [(0, 1), (2, 2)] and h.truncation == 3
    with pytest.raises(FractionalExponent):
        QSeries((1, 1), 1).to_unit("q2")


def test_str_and_json():
    s = QSeries((1, 0, -3, 1), 3)
    assert str(s) == "1 - 3 q^2 + q^3 + O(q^4)"
    assert QSeries.from_json(s.to_json()) == s
    assert str(QSeries((0, 0), 1, "q2")) == "O(q2^2)"


def test_halve():
    assert QSeries((2, 4), 1).halve() == QSeries((1, 2), 1)
    with pytest.raises(ArithmeticError):
        QSeries((1, 4), 1).halve()


def test_hexagonal_reference_is_a2_theta():
    ref = reference_series("hexagonal")
    th = en.theta_series([[2, -1], [-1, 2]], ref.truncation)
    assert from_counts(th.coefficients, ref.truncation) == ref


def test_l1_closed_forms():
    L1 = published_theta("L1")
    b = [reference_series(f"b{i}") for i in (1, 4, 5)]
    assert combine([1, 32, 60], b).truncate(L1.truncation) == L1
    t = [elliptic_theta(k, 4, L1.truncation) for k in (2, 3, 4)]
    assert (t[0] ** 6 + t[1] ** 6 + t[2] ** 6).halve() == L1
    assert reference_series("L1_D6plus").truncate(L1.truncation) == L1


def test_published_fixtures():
    names = published_names()
    assert {"L1", "L2", "L3", "D3", "E21"} <= set(names)
    for n in names:
        s = published_theta(n)
        assert s[0] == 1 and s.unit == "q"
        assert all(e % 2 == 0 for e, _ in s.terms())
    with pytest.raises(NotShipped):
        published_theta("L9")
