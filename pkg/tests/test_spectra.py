import math

import numpy as np
import pytest

from askey_zeros.families import poly_eval, resolve_family, sample_params
from askey_zeros.perturb import build_explicit, build_generic, points_from_zeros, random_points
from askey_zeros.spectra import (
    NumericalError,
    analyse,
    collinearity_residual,
    eigenvector_target,
    diophantine_experiment,
    eigen_decompose,
    lagrange_interpolate,
    match_spectrum,
    multiprecision_eigenvalues,
    normalize_phase,
    reconstruct_polynomial,
    theoretical_spectrum,
)
from askey_zeros.zeros import compute_zeros

HERMITE = resolve_family("hermite")
S = 1 / math.sqrt(2)


def _hermite_pairs(N):
    zs = compute_zeros(HERMITE, N)
    return zs, eigen_decompose(build_generic(HERMITE, points_from_zeros(zs), N))


def test_eigen_decompose_2x2():
    pairs = sorted(eigen_decompose(np.array([[3.0, -1.0], [-1.0, 3.0]])), key=lambda p: p[0].real)
    (l2, v2), (l4, v4) = pairs
    assert l2 == pytest.approx(2) and l4 == pytest.approx(4)
    assert np.allclose(v2, [S, S]) and np.allclose(v4, [S, -S])


def test_eigen_decompose_identity_and_scalar():
    assert [p[0] for p in eigen_decompose(np.eye(3))] == [1, 1, 1]
    ((lam, vec),) = eigen_decompose(np.array([[2.0]]))
    assert lam == 2 and np.array_equal(vec, [1])


def test_eigen_decompose_rejects_non_finite():
    with pytest.raises(NumericalError):
        eigen_decompose(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_normalize_phase():
    v = normalize_phase(np.array([0.0, -2j, 1.0]))
    assert np.linalg.norm(v) == pytest.approx(1)
    assert v[1].imag == 0 and v[1].real > 0


@pytest.mark.parametrize(
    "family, raw, N, expected",
    [
        ("hermite", {}, 2, [4, 2]),
        ("hermite", {}, 3, [6, 4, 2]),
        ("jacobi", {"alpha": 1.0, "beta": 1.0}, 2, [40, 24]),
        ("jacobi", {"alpha": 0.5, "beta": 0.5}, 2, [32, 20]),
    ],
)
def test_theoretical_spectrum(family, raw, N, expected):
    assert np.allclose(theoretical_spectrum(resolve_family(family, raw), N), expected)


def test_match_spectrum_hermite_2():
    _, pairs = _hermite_pairs(2)
    rep = match_spectrum(pairs, HERMITE, 2)
    assert list(rep.theoretical) == [4, 2]
    assert np.all(rep.eigenvalue_residuals <= 1e-15)
    assert rep.passed["eigenvalues"]


def test_match_spectrum_count_mismatch():
    with pytest.raises(ValueError):
        match_spectrum([(1.0, np.ones(1))], HERMITE, 2)


def test_eigenvector_targets_hermite_2():
    zs = compute_zeros(HERMITE, 2)
    assert np.allclose(eigenvector_target(HERMITE, zs, 0), [S, -S])
    assert np.allclose(eigenvector_target(HERMITE, zs, 1), [S, S])
    with pytest.raises(ValueError):
        eigenvector_target(HERMITE, zs, 2)


@pytest.mark.parametrize(
    "v, t, expected",
    [([1, -1], [-math.sqrt(2), math.sqrt(2)], 0.0), ([1, 0], [0, 1], 1.0), ([1j, 2], [-1, 2j], 0.0)],
)
def test_collinearity(v, t, expected):
    assert collinearity_residual(v, t) == pytest.approx(expected, abs=1e-15)


def test_collinearity_of_top_eigenvector():
    zs, pairs = _hermite_pairs(2)
    v = max(pairs, key=lambda p: p[0].real)[1]
    assert collinearity_residual(v, eigenvector_target(HERMITE, zs, 0)) <= 1e-15


def test_reconstruct_hermite_2():
    zs = compute_zeros(HERMITE, 2)
    coef0, r0 = reconstruct_polynomial(HERMITE, zs, [1, -1])
    assert np.allclose(coef0, [1, 0]) and r0 <= 1e-15
    coef1, r1 = reconstruct_polynomial(HERMITE, zs, [1, 1])
    assert np.allclose(coef1, [0, 1], atol=1e-15) and r1 <= 1e-15


@pytest.mark.parametrize("family", ["hermite", "laguerre", "jacobi", "wilson", "askey_wilson",
                                    "meixner", "racah", "q_hahn", "little_q_jacobi"])
def test_reconstruct_eigenvector_targets(family):
    N = 10
    spec = resolve_family(family, sample_params(family, np.random.default_rng(13), N))
    zs = compute_zeros(spec, N)
    for m in range(N):
        assert reconstruct_polynomial(spec, zs, eigenvector_target(spec, zs, m), m)[1] <= 1e-8


def test_lagrange_interpolation():
    assert lagrange_interpolate([(x, x * x) for x in (0, 1, 2, 3)], 5) == pytest.approx(25)
    assert lagrange_interpolate([(x, 7) for x in (0.3, -1, 2.5j)], 0.9 - 4j) == pytest.approx(7)
    zs = compute_zeros(HERMITE, 4)
    samples = [(x, poly_eval(HERMITE, 2, x)) for x in zs.x]
    assert lagrange_interpolate(samples, 0.3) == pytest.approx(-1.64, rel=1e-13)


def test_lagrange_repeated_nodes():
    with pytest.raises(ValueError):
        lagrange_interpolate([(1, 1), (1, 2)], 0)


def test_analyse_hermite_6():
    zs = compute_zeros(HERMITE, 6)
    rep = analyse(HERMITE, build_generic(HERMITE, points_from_zeros(zs), 6), zs)
    assert list(rep.theoretical) == [12, 10, 8, 6, 4, 2]
    assert all(rep.passed.values())
    assert rep.excluded == []


@pytest.mark.parametrize(
    "family, raw, N, expected",
    [
        ("hermite", {}, 3, [6, 4, 2]),
        ("laguerre", {"alpha": 0.7}, 2, [8, 4]),
        ("jacobi", {"alpha": 1.0, "beta": 1.0}, 2, [40, 24]),
    ],
)
def test_diophantine(family, raw, N, expected):
    rep = diophantine_experiment(resolve_family(family, raw), N, 100, seed=0)
    assert np.allclose(rep.spectrum, expected)
    assert rep.max_residual <= 1e-8 and rep.passed


def test_diophantine_scope():
    with pytest.raises(ValueError):
        diophantine_experiment(resolve_family("hahn", {"a": 1.0, "b": 1.0, "N": 5}), 3, 10, 0)
    with pytest.raises(ValueError):
        diophantine_experiment(HERMITE, 11, 10, 0)


def test_multiprecision_eigenvalues_agree_with_double():
    spec = resolve_family("jacobi", {"alpha": 0.4, "beta": 1.1})
    pts = random_points(spec, 5, np.random.default_rng(3))
    double = np.sort_complex(np.linalg.eigvals(build_explicit(spec, pts, 5).entries))
    multi = np.sort_complex(np.array(multiprecision_eigenvalues(spec, pts, 5)))
    assert np.allclose(multi, double, rtol=1e-9)
    assert np.allclose(multi, np.sort(theoretical_spectrum(spec, 5)), rtol=1e-14)


def test_diophantine_recomputes_ill_conditioned_trials():
    # the third point cloud for this draw is clustered; double entries miss by 1.5e-8
    spec = resolve_family("laguerre", sample_params("laguerre", np.random.default_rng(0), 8))
    rep = diophantine_experiment(spec, 8, 3, seed=0)
    assert rep.refined == 1
    assert rep.residuals[2] <= 1e-14
