import cmath
import math

import numpy as np
import pytest

from askey_zeros.families import (
    REGISTRY,
    ExtraParameterError,
    MissingParameterError,
    ParameterRangeError,
    UnknownFamilyError,
    describe,
    energy,
    eta,
    eta_inverse,
    family_names,
    operator_data,
    parse_number,
    poly_eval,
    reference_markdown,
    resolve_family,
    sample_params,
)
from askey_zeros.zeros import check_energy_monotone

ALL = family_names()


def test_registry_has_32_families():
    assert len(ALL) == 32
    assert set(ALL) == set(REGISTRY)


def test_hermite_spec():
    spec = resolve_family("hermite", {})
    assert spec.operator_kind == "differential"
    assert eta(spec, 0.7) == 0.7
    assert [energy(spec, n) for n in range(4)] == [0, 2, 4, 6]


def test_racah_derived_parameter():
    spec = resolve_family("racah", {"a": 12, "b": 1.5, "d": 1, "N": 10})
    assert spec.operator_kind == "real_shift"
    assert spec.lattice == 10
    # E(1) = 1 + d~ with d~ = a + b + c - d - 1 and c = -N
    assert energy(spec, 1) == pytest.approx(2.5)


def test_jacobi_range_violation():
    with pytest.raises(ParameterRangeError, match="g > -1/2"):
        resolve_family("jacobi", {"g": -1})


def test_unknown_family():
    with pytest.raises(UnknownFamilyError):
        resolve_family("legendre", {})


def test_missing_parameter():
    with pytest.raises(MissingParameterError):
        resolve_family("hahn", {"a": 1.0})


def test_extra_parameter():
    with pytest.raises(ExtraParameterError):
        resolve_family("hermite", {"a": 1.0})


@pytest.mark.parametrize(
    "family, raw, x, y",
    [
        ("laguerre", {"g": 1.0}, 3.0, 9.0),
        ("racah", {"a": 13, "b": 1.5, "d": 2, "N": 10}, 1.0, 3.0),
        ("askey_wilson", {"a1": 0.3, "a2": 0.2, "a3": 0.1, "a4": 0.4, "q": 0.5}, 0.0, 1.0),
    ],
)
def test_eta_values(family, raw, x, y):
    assert eta(resolve_family(family, raw), x) == pytest.approx(y)


@pytest.mark.parametrize("family", ALL)
def test_energy_vanishes_at_zero(family):
    spec = resolve_family(family, sample_params(family, np.random.default_rng(3), 4))
    assert energy(spec, 0) == pytest.approx(0.0, abs=1e-14)


def test_hermite_energy():
    assert energy(resolve_family("hermite"), 3) == 6


def test_poly_values():
    assert poly_eval(resolve_family("hermite"), 2, 1.0) == pytest.approx(2.0)
    # L_1^(alpha)(y) = 1 + alpha - y at y = 0
    assert poly_eval(resolve_family("laguerre", {"alpha": 0.5}), 1, 0.0) == pytest.approx(1.5)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("n", [0, 1, 3, 5])
def test_krawtchouk_at_origin(p, n):
    spec = resolve_family("krawtchouk", {"p": p, "N": 6})
    assert poly_eval(spec, n, 0.0) == pytest.approx(1.0)


def test_hahn_boundary_data():
    a, N = 1.5, 6
    od = operator_data(resolve_family("hahn", {"a": a, "b": 2.0, "N": N}), 0.0)
    assert od.B == pytest.approx(a * N)
    assert od.D == 0


def test_krawtchouk_upper_boundary():
    assert operator_data(resolve_family("krawtchouk", {"p": 0.3, "N": 6}), 6.0).B == 0


def test_meixner_pollaczek_potential():
    a, phi = 0.7, 1.0
    od = operator_data(resolve_family("meixner_pollaczek", {"a": a, "phi": phi}), 0.0)
    assert od.V == pytest.approx(cmath.exp(1j * (math.pi / 2 - phi)) * a)
    assert od.Vstar == pytest.approx(od.V.conjugate())


@pytest.mark.parametrize("family", ALL)
def test_eta_inverse_round_trip(family):
    spec = resolve_family(family, sample_params(family, np.random.default_rng(11), 5))
    lo, hi = spec.zero_domain
    lo, hi = max(lo, -5.0), min(hi, 5.0)
    for t in (0.2, 0.5, 0.8):
        y = lo + t * (hi - lo)
        assert eta(spec, eta_inverse(spec, y)) == pytest.approx(y, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("family", ALL)
def test_sampled_draws_are_valid(family):
    rng = np.random.default_rng(5)
    for degree in (2, 5, 8):
        spec = resolve_family(family, sample_params(family, rng, degree))
        assert spec.max_degree >= degree
        assert check_energy_monotone(spec, degree)


@pytest.mark.parametrize(
    "text, value",
    [("1.5", 1.5), ("-2", -2), ("0.2+0.1i", 0.2 + 0.1j), ("0.3-0.4j", 0.3 - 0.4j)],
)
def test_parse_number(text, value):
    assert parse_number(text) == value


def test_parse_number_rejects_garbage():
    with pytest.raises(ValueError):
        parse_number("abc")


def test_describe_fields():
    d = describe("hermite")
    assert d["parameters"] == []
    assert d["eta"] == "x"
    assert d["energy"] == "2n"
    qr = describe("q_racah")
    assert qr["parameters"][:4] == ["a", "b", "d", "N"]
    assert qr["derived"] == "c = q^-N"


def test_reference_markdown_lists_every_family():
    text = reference_markdown()
    for name in ALL:
        assert f"`{name}`" in text or name in text
