import math

import numpy as np
import pytest

from askey_zeros.families import family_names, resolve_family, sample_params
from askey_zeros.zeros import (
    classical_zero_equation_residual,
    compute_zeros,
    interlaces,
    inverse_square_sums,
    monic_coefficients,
    poly_derivative_at,
    zero_equation_residual,
)

# frozen from numpy.polynomial.hermite.hermroots
HERMITE_6 = [
    -2.3506049736744923, -1.3358490740136977, -0.4360774119276167,
    0.43607741192761657, 1.3358490740136968, 2.3506049736744936,
]
# frozen from scipy.special.roots_genlaguerre(4, 0.5) and roots_genlaguerre(5, 0.5)
LAGUERRE_4_HALF = [0.5235260767382691, 2.1566487632690943, 5.137387546176711, 10.182437613815926]
LAGUERRE_5_HALF = [0.43139880714785145, 1.7597536984236963, 4.104465362828315,
                   7.746703779542558, 13.457678352057581]
# frozen from scipy.special.roots_jacobi(5, 0.3, 1.2)
JACOBI_5 = [-0.7922196204677404, -0.3909452082864273, 0.10494161460941961,
            0.5727436377974487, 0.8967839241733865]
# frozen from scipy: (5 L_5 - 5.5 L_4)(y) / y at the third zero of L_5^(1/2)
SZEGO_LAGUERRE_5 = -2.4449286552515397

HERMITE = resolve_family("hermite")
LAG_HALF = resolve_family("laguerre", {"alpha": 0.5})


def test_monic_hermite_2():
    c = monic_coefficients(HERMITE, 2).coeffs
    assert np.allclose(c, [-0.5, 0.0, 1.0], atol=1e-14)


def test_monic_laguerre_1():
    assert np.allclose(monic_coefficients(LAG_HALF, 1).coeffs, [-1.5, 1.0])


def test_monic_jacobi_1():
    alpha, beta = 0.5, 1.5
    spec = resolve_family("jacobi", {"alpha": alpha, "beta": beta})
    root = (beta - alpha) / (alpha + beta + 2)
    assert np.allclose(monic_coefficients(spec, 1).coeffs, [-root, 1.0])


def test_hermite_2_zeros():
    zs = compute_zeros(HERMITE, 2)
    assert np.allclose(zs.y, [-math.sqrt(0.5), math.sqrt(0.5)], rtol=0, atol=1e-16)
    assert np.array_equal(zs.x, zs.y)


def test_laguerre_1_zero():
    assert compute_zeros(LAG_HALF, 1).y == pytest.approx([1.5])


def test_hermite_6_zeros():
    zs = compute_zeros(HERMITE, 6)
    assert np.all(zs.y.imag == 0)
    assert np.allclose(zs.y.real, HERMITE_6, rtol=0, atol=1e-14)
    x = zs.x.real
    for n in range(6):
        assert np.sum(1 / (x[n] - np.delete(x, n))) == pytest.approx(x[n], abs=1e-10)


@pytest.mark.parametrize("N, oracle", [(4, LAGUERRE_4_HALF), (5, LAGUERRE_5_HALF)])
def test_laguerre_zeros(N, oracle):
    assert np.allclose(compute_zeros(LAG_HALF, N).y.real, oracle, rtol=1e-14)


def test_jacobi_zeros():
    spec = resolve_family("jacobi", {"alpha": 0.3, "beta": 1.2})
    assert np.allclose(compute_zeros(spec, 5).y.real, JACOBI_5, rtol=0, atol=1e-14)


def test_zero_equation_hermite_2_exact():
    # exact up to the rounding of +-1/sqrt(2)
    eps = np.finfo(float).eps
    assert np.all(zero_equation_residual(HERMITE, compute_zeros(HERMITE, 2)) <= 2 * eps)
    assert np.all(classical_zero_equation_residual(HERMITE, compute_zeros(HERMITE, 2)) <= 2 * eps)


def test_zero_equation_laguerre_1():
    assert classical_zero_equation_residual(LAG_HALF, compute_zeros(LAG_HALF, 1))[0] == 0


def test_zero_equation_legendre_2():
    spec = resolve_family("jacobi", {"alpha": 0.0, "beta": 0.0})
    zs = compute_zeros(spec, 2)
    assert np.allclose(zs.y.real, [-1 / math.sqrt(3), 1 / math.sqrt(3)])
    assert np.max(classical_zero_equation_residual(spec, zs)) <= 1e-12


def test_inverse_square_sums_hermite():
    assert np.max(inverse_square_sums(HERMITE, compute_zeros(HERMITE, 2))) <= 1e-15
    assert np.max(inverse_square_sums(HERMITE, compute_zeros(HERMITE, 1))) == 0


def test_inverse_square_sums_laguerre():
    assert np.max(inverse_square_sums(LAG_HALF, compute_zeros(LAG_HALF, 4))) <= 1e-10


def test_derivative_values():
    assert abs(poly_derivative_at(HERMITE, 2, 0.0)) <= 1e-14
    assert poly_derivative_at(LAG_HALF, 1, 0.37, family_normalization=True) == pytest.approx(-1.0)


def test_szego_derivative_laguerre():
    y = compute_zeros(LAG_HALF, 5).y[2]
    d = poly_derivative_at(LAG_HALF, 5, y, family_normalization=True)
    assert d == pytest.approx(SZEGO_LAGUERRE_5, rel=1e-10)


def test_degree_zero_has_no_zeros():
    with pytest.raises(ValueError):
        compute_zeros(HERMITE, 0)


def test_degree_beyond_lattice():
    spec = resolve_family("hahn", {"a": 1.0, "b": 1.0, "N": 4})
    with pytest.raises(ValueError):
        compute_zeros(spec, 4)


@pytest.mark.parametrize("family", ["hermite", "laguerre", "jacobi", "meixner", "q_hahn", "wilson"])
def test_consecutive_degrees_interlace(family):
    spec = resolve_family(family, sample_params(family, np.random.default_rng(8), 7))
    for N in range(2, 8):
        assert interlaces(compute_zeros(spec, N - 1).y, compute_zeros(spec, N).y)


@pytest.mark.parametrize("family", family_names())
def test_zeros_real_distinct_inside_domain(family):
    spec = resolve_family(family, sample_params(family, np.random.default_rng(21), 6))
    zs = compute_zeros(spec, 6)
    lo, hi = spec.zero_domain
    assert np.all(zs.y.imag == 0)
    assert np.all((zs.y.real > lo) & (zs.y.real < hi))
    assert np.all(np.diff(zs.y.real) > 0)
    assert np.max(zero_equation_residual(spec, zs)) <= 1e-9
