import pytest

from askey_zeros.hyper import (
    SeriesDomainError,
    SeriesParams,
    hyp_F,
    hyp_phi,
    hyper_F,
    hyper_phi,
    pochhammer,
    q_pochhammer,
)


@pytest.mark.parametrize("a, n, expected", [(3, 2, 12), (0.7, 0, 1), (2.5 + 1j, 0, 1), (1, 4, 24)])
def test_pochhammer(a, n, expected):
    assert pochhammer(a, n) == expected


@pytest.mark.parametrize(
    "a, q, n, expected",
    [(0.3, 0.5, 0, 1), (0.5, 0.5, 2, 3 / 8), (0.0, 0.5, 3, 1), (0.0, 0.9, 7, 1)],
)
def test_q_pochhammer(a, q, n, expected):
    assert q_pochhammer(a, q, n) == pytest.approx(expected, abs=1e-15)


def test_2F1_single_step():
    assert hyp_F([-1, 2], [4], 1.0, 1) == pytest.approx(0.5)


def test_2F1_binomial_at_one():
    # (1 - z)^2 at z = 1
    assert hyp_F([-2, 1], [1], 1.0, 2) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n", [0, 1, 3, 5])
def test_3F2_hahn_at_origin(n):
    a, b, N = 1.3, 2.1, 7
    assert hyp_F([-n, n + a + b - 1, 0.0], [a, -N], 1.0, n) == pytest.approx(1.0)


def test_phi_with_zero_terms_is_one():
    assert hyp_phi([1.0, 0.3], [0.2], 0.5, 0.7, 0) == 1


def test_2phi1_two_terms():
    assert hyp_phi([2.0, 0.25], [0.125], 0.5, 1.0, 1) == pytest.approx(-5 / 7, rel=1e-15)


@pytest.mark.parametrize("n", [1, 2, 4])
def test_3phi2_collapses_when_x_factor_vanishes(n):
    # (q^-x; q)_k with x = 0 is (1; q)_k = 0 for k >= 1
    q, d, dt, a, b = 0.6, 0.3, 0.05, 0.2, 0.4
    value = hyp_phi([q**-n, dt * q**n, 1.0, d], [a, b], q, q, n)
    assert value == pytest.approx(1.0, abs=1e-14)


def test_compensated_agrees_with_plain():
    p = SeriesParams((-6, 6.5, 0.3 + 0.2j), (1.7, 2.2), 1.0, 6)
    assert hyper_F(p, compensated=True) == pytest.approx(hyper_F(p), rel=1e-12)


def test_vanishing_denominator_raises():
    with pytest.raises(SeriesDomainError):
        hyp_F([-3, 1], [-1], 1.0, 3)


def test_vanishing_q_denominator_raises():
    q = 0.5
    with pytest.raises(SeriesDomainError):
        hyp_phi([q**-3, 0.2], [q**-1], q, q, 3)


@pytest.mark.parametrize("q", [0.0, 1.0, 1.5, -0.2])
def test_q_outside_unit_interval(q):
    with pytest.raises(ValueError):
        SeriesParams((0.5,), (), 1.0, 2, q=q)


def test_negative_term_count():
    with pytest.raises(ValueError):
        SeriesParams((0.5,), (), 1.0, -1)


def test_wrong_series_kind():
    with pytest.raises(ValueError):
        hyper_F(SeriesParams((0.5,), (), 1.0, 2, q=0.5))
    with pytest.raises(ValueError):
        hyper_phi(SeriesParams((0.5,), (), 1.0, 2))
