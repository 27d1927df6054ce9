"""Verification runs and their JSON-ready reports."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .families import (
    FamilySpec,
    energy,
    family_names,
    resolve_family,
    sample_params,
)
from .perturb import (
    DIAGNOSTIC_FORMS,
    build_explicit,
    build_generic,
    default_form,
    explicit_forms_for,
    max_relative_deviation,
    points_from_zeros,
    similarity_residual,
)
from .spectra import (
    DEFAULT_TOL_EIG,
    DEFAULT_TOL_RECON,
    DEFAULT_TOL_VEC,
    analyse,
    eigenvector_target,
)
from .zeros import (
    classical_zero_equation_residual,
    compute_zeros,
    inverse_square_sums,
    zero_equation_residual,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Tolerances:
    eig: float = DEFAULT_TOL_EIG
    vec: float = DEFAULT_TOL_VEC
    recon: float = DEFAULT_TOL_RECON
    zero_equation: float = 1e-9
    explicit: float = 1e-9
    similarity: float = 1e-9
    row_sum: float = 1e-8


def _num(v):
    """JSON-safe number: NaN/inf become None, complex becomes [re, im]."""
    if isinstance(v, (complex, np.complexfloating)):
        return [_num(float(v.real)), _num(float(v.imag))]
    v = float(v)
    return v if math.isfinite(v) else None


def _nums(seq):
    return [_num(v) for v in seq]


def encode_params(raw: dict) -> dict:
    out = {}
    for k, v in sorted(raw.items()):
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            out[k] = int(v)
        elif isinstance(v, complex) and v.imag != 0:
            out[k] = _num(v)
        else:
            out[k] = _num(np.real(v))
    return out


def _check(value: float, tol: float) -> dict:
    value = float(value)
    return {"value": _num(value), "tolerance": tol, "passed": bool(value <= tol)}


def verify(spec: FamilySpec, N: int, raw_params: dict, tol: Tolerances = Tolerances(),
           seed: int | None = None, timing: bool = False, want_matrix: bool = False):
    """Zeros, both matrix builds, spectrum checks and (classical) similarity.

    Returns the report dict, and the generic matrix as well if ``want_matrix``.
    """
    t0 = time.perf_counter()
    zeros = compute_zeros(spec, N)
    zres = zero_equation_residual(spec, zeros)
    pts = points_from_zeros(zeros)
    generic = build_generic(spec, pts, N)

    checks = {"zero_equation": _check(np.max(zres), tol.zero_equation)}
    explicit = {}
    for form in explicit_forms_for(spec):
        dev = max_relative_deviation(build_explicit(spec, pts, N, form).entries, generic.entries)
        diagnostic = form in DIAGNOSTIC_FORMS
        explicit[form] = {"deviation": _num(dev), "diagnostic": diagnostic}
        if not diagnostic:
            checks[f"explicit:{form}"] = _check(dev, tol.explicit)

    report = analyse(spec, generic, zeros, tol.eig, tol.vec, tol.recon)
    kept = [m for m in range(N) if m not in report.excluded]
    checks["eigenvalues"] = _check(np.max(report.eigenvalue_residuals), tol.eig)
    if kept:
        checks["collinearity"] = _check(np.max(report.collinearity_residuals[kept]), tol.vec)
        checks["reconstruction"] = _check(np.max(report.reconstruction_residuals[kept]), tol.recon)

    # M u = E(N) u for u the m = 0 target (E(0) = 0)
    u = eigenvector_target(spec, zeros, 0)
    EN = energy(spec, N)
    row = np.linalg.norm(generic.entries @ u - EN * u) / max(1.0, abs(EN))
    checks["row_sum"] = _check(row, tol.row_sum)

    similarity = None
    if spec.is_classical:
        similarity = similarity_residual(spec, zeros)
        checks["similarity"] = _check(similarity, tol.similarity)
        checks["classical_zero_equation"] = _check(np.max(classical_zero_equation_residual(spec, zeros)),
                                                   tol.zero_equation)
        checks["inverse_square_sums"] = _check(np.max(inverse_square_sums(spec, zeros)), tol.zero_equation)

    out = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "family": spec.name,
        "params": encode_params(raw_params),
        "q": _num(spec.q) if spec.q is not None else None,
        "N": N,
        "seed": seed,
        "zeros": [
            {"y": _num(complex(y)), "x": _num(complex(x)), "zero_equation_residual": _num(r)}
            for y, x, r in zip(zeros.y, zeros.x, zres)
        ],
        "zero_method": zeros.method,
        "provenance": ["generic", f"explicit:{default_form(spec)}"],
        "explicit_vs_generic": explicit,
        "spectrum": {
            "theoretical": _nums(report.theoretical),
            "computed": _nums(report.computed),
            "assignment": [int(k) for k in report.assignment],
            "eigenvalue_residuals": _nums(report.eigenvalue_residuals),
            "collinearity_residuals": _nums(report.collinearity_residuals),
            "reconstruction_residuals": _nums(report.reconstruction_residuals),
            "excluded": [int(m) for m in report.excluded],
            "near_degenerate": bool(report.near_degenerate),
        },
        "similarity_residual": _num(similarity) if similarity is not None else None,
        "checks": checks,
        "passed": bool(all(c["passed"] for c in checks.values())),
    }
    if timing:
        out["wall_time"] = time.perf_counter() - t0
    return (out, generic) if want_matrix else out


def draw_rng(seed: int, family: str, N: int, draw: int) -> np.random.Generator:
    """Independent stream per (seed, family, N, draw)."""
    return np.random.default_rng([seed, family_names().index(family), N, draw])


def _sweep_one(job):
    family, N, draw, seed, tol, timing = job
    raw = sample_params(family, draw_rng(seed, family, N, draw), N)
    try:
        spec = resolve_family(family, dict(raw))
        rep = verify(spec, N, raw, tol, seed=seed, timing=timing)
    except (ValueError, ArithmeticError) as exc:
        rep = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "family": family,
            "params": encode_params(raw),
            "N": N,
            "seed": seed,
            "error": f"{type(exc).__name__}: {exc}",
            "checks": {},
            "passed": False,
        }
    rep["draw"] = draw
    return rep


def sweep(families: list[str], degrees: list[int], draws: int, seed: int,
          tol: Tolerances = Tolerances(), jobs: int = 1, timing: bool = False):
    """All runs, in (family, N, draw) order, plus a summary dict."""
    plan = [(f, N, d, seed, tol, timing) for f in families for N in degrees for d in range(draws)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_sweep_one, plan, chunksize=4))
    else:
        runs = [_sweep_one(job) for job in plan]
    return runs, summarize(runs, seed)


def summarize(runs: list[dict], seed: int) -> dict:
    worst: dict[str, float] = {}
    failures = []
    for r in runs:
        for name, c in r["checks"].items():
            v = c["value"]
            worst[name] = max(worst.get(name, 0.0), math.inf if v is None else v)
        if not r["passed"]:
            failed = sorted(k for k, c in r["checks"].items() if not c["passed"])
            failures.append({"family": r["family"], "N": r["N"], "draw": r["draw"],
                             "failed": failed, "error": r.get("error")})
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "seed": seed,
        "runs": len(runs),
        "passed_runs": sum(r["passed"] for r in runs),
        "max_residuals": {k: _num(v) for k, v in sorted(worst.items())},
        "failures": failures,
        "passed": not failures,
    }


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
