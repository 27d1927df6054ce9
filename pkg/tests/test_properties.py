"""Property-based checks of identities that hold for every admissible input."""

import json

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from askey_zeros.families import family_names, eta, eta_inverse, resolve_family, sample_params
from askey_zeros.hyper import hyp_F, hyp_phi, pochhammer, q_pochhammer
from askey_zeros.runner import dumps
from askey_zeros.spectra import (
    collinearity_residual,
    diophantine_experiment,
    lagrange_interpolate,
    normalize_phase,
    theoretical_spectrum,
)

FAST = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

moderate = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
positive = st.floats(min_value=0.1, max_value=4.0, allow_nan=False)
unit_q = st.floats(min_value=0.05, max_value=0.95)
small_n = st.integers(min_value=0, max_value=8)
complex_vals = st.builds(complex, moderate, moderate)


@FAST
@given(a=complex_vals, m=small_n, n=small_n)
def test_pochhammer_splits(a, m, n):
    assert pochhammer(a, m + n) == pytest.approx(pochhammer(a, m) * pochhammer(a + m, n), rel=1e-10, abs=1e-10)


@FAST
@given(a=complex_vals, q=unit_q, m=small_n, n=small_n)
def test_q_pochhammer_splits(a, q, m, n):
    lhs = q_pochhammer(a, q, m + n)
    rhs = q_pochhammer(a, q, m) * q_pochhammer(a * q**m, q, n)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


@FAST
@given(n=small_n, b=positive, c=positive)
def test_chu_vandermonde(n, b, c):
    expected = pochhammer(c - b, n) / pochhammer(c, n)
    assert hyp_F([-n, b], [c], 1.0, n) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@FAST
@given(n=small_n, q=unit_q, b=st.floats(0.1, 0.9), c=st.floats(0.1, 0.9))
def test_q_chu_vandermonde(n, q, b, c):
    expected = q_pochhammer(c / b, q, n) / q_pochhammer(c, q, n) * b**n
    # small q gives huge alternating terms; judge the error against the largest one
    terms = [q_pochhammer(q**-n, q, k) * q_pochhammer(b, q, k) / (q_pochhammer(q, q, k) * q_pochhammer(c, q, k))
             * q**k for k in range(n + 1)]
    scale = max(abs(t) for t in terms)
    assert abs(hyp_phi([q**-n, b], [c], q, q, n) - expected) <= 1e-12 * scale


@FAST
@given(family=st.sampled_from(family_names()), seed=st.integers(0, 2**32 - 1), t=st.floats(0.05, 0.95))
def test_coordinate_round_trip(family, seed, t):
    spec = resolve_family(family, sample_params(family, np.random.default_rng(seed), 4))
    lo, hi = spec.zero_domain
    lo, hi = max(lo, -10.0), min(hi, 10.0)
    y = lo + t * (hi - lo)
    assert eta(spec, eta_inverse(spec, y)) == pytest.approx(y, rel=1e-9, abs=1e-11)


vectors = st.lists(complex_vals, min_size=1, max_size=8).map(np.array)


@FAST
@given(v=vectors)
def test_normalize_phase_is_idempotent(v):
    assume(np.linalg.norm(v) > 1e-6)
    once = normalize_phase(v)
    assert np.allclose(normalize_phase(once), once, atol=1e-14)
    assert np.linalg.norm(once) == pytest.approx(1.0)


@FAST
@given(v=vectors, scale=complex_vals)
def test_scalar_multiples_are_collinear(v, scale):
    assume(np.linalg.norm(v) > 1e-6 and abs(scale) > 1e-3)
    assert collinearity_residual(v, scale * v) <= 1e-12


@FAST
@given(coeffs=st.lists(moderate, min_size=1, max_size=6), probe=complex_vals)
def test_lagrange_reproduces_low_degree_polynomials(coeffs, probe):
    nodes = np.linspace(-2.0, 2.0, len(coeffs) + 1)
    p = np.polynomial.Polynomial(coeffs)
    got = lagrange_interpolate([(x, p(x)) for x in nodes], probe)
    assert got == pytest.approx(p(probe), rel=1e-8, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(
    family=st.sampled_from(["hermite", "laguerre", "jacobi"]),
    N=st.integers(2, 10),
    seed=st.integers(0, 2**32 - 1),
)
def test_classical_spectra_ignore_the_points(family, N, seed):
    rng = np.random.default_rng(seed)
    spec = resolve_family(family, sample_params(family, rng, N))
    rep = diophantine_experiment(spec, N, trials=3, seed=seed)
    assert rep.max_residual <= 1e-8


@FAST
@given(family=st.sampled_from(family_names()), seed=st.integers(0, 2**32 - 1), N=st.integers(1, 8))
def test_theoretical_spectrum_distinct_and_nonzero(family, seed, N):
    spec = resolve_family(family, sample_params(family, np.random.default_rng(seed), N))
    spectrum = theoretical_spectrum(spec, N)
    assert len(spectrum) == N
    assert np.all(np.abs(spectrum) > 0)
    assert len(np.unique(np.round(spectrum, 12))) == N


json_floats = st.floats(allow_nan=False, allow_infinity=False)
json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | json_floats | st.text(max_size=8),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=6), inner, max_size=4),
    max_leaves=20,
)


@FAST
@given(obj=json_values)
def test_report_text_round_trips(obj):
    text = dumps(obj)
    assert json.loads(text) == obj
    assert dumps(json.loads(text)) == text
