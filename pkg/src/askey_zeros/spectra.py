"""Spectrum of M: eigenpairs, matching against E(N) - E(m), eigenvector and
polynomial checks, and Lagrange interpolation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .families import MULTIPRECISION_DPS, FamilySpec, energy, eta, eta_dot, poly_eval
from .perturb import PerturbationMatrix, PointSet, build_explicit, random_points
from .zeros import DegeneracyError, ZeroSet, _interpolate

DEFAULT_TOL_EIG = 1e-7
DEFAULT_TOL_VEC = 1e-6
DEFAULT_TOL_RECON = 1e-7
DEFAULT_TOL_DIOPHANTINE = 1e-8
# an entry counts as significant for the phase convention above this fraction of the max
PHASE_FLOOR = 1e-8
# reconstructed coefficients below this (relative) are treated as zero
NULL_COMBINATION = 1e-12


class NumericalError(ArithmeticError):
    """A dense eigen-solve failed or produced non-finite output."""


@dataclass
class SpectrumReport:
    theoretical: np.ndarray
    computed: np.ndarray
    assignment: list[int]
    eigenvalue_residuals: np.ndarray
    near_degenerate: bool = False
    collinearity_residuals: np.ndarray | None = None
    reconstruction_residuals: np.ndarray | None = None
    excluded: list[int] = field(default_factory=list)
    passed: dict[str, bool] = field(default_factory=dict)


def normalize_phase(v: np.ndarray) -> np.ndarray:
    """Unit 2-norm, first significant entry real and positive."""
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0 or not np.isfinite(norm):
        raise ValueError("cannot normalize a zero or non-finite vector")
    v = v / norm
    mags = np.abs(v)
    k = int(np.argmax(mags > PHASE_FLOOR * mags.max()))
    return v * (abs(v[k]) / v[k])


def eigen_decompose(M: PerturbationMatrix | np.ndarray) -> list[tuple[complex, np.ndarray]]:
    """All eigenpairs of a dense complex matrix, vectors phase-normalized."""
    A = M.entries if isinstance(M, PerturbationMatrix) else np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix has non-finite entries")
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from None
    return [(complex(w[k]), normalize_phase(V[:, k])) for k in range(len(w))]


def theoretical_spectrum(spec: FamilySpec, N: int) -> np.ndarray:
    EN = energy(spec, N)
    return np.array([EN - energy(spec, m) for m in range(N)], dtype=float)


def match_spectrum(pairs, spec: FamilySpec, N: int, tol: float = DEFAULT_TOL_EIG) -> SpectrumReport:
    """Greedy nearest-neighbour assignment, largest theoretical value first.

    ``assignment[m]`` is the index into ``pairs`` matched to ``E(N) - E(m)``.
    """
    if len(pairs) != N:
        raise ValueError(f"expected {N} eigenpairs, got {len(pairs)}")
    theory = theoretical_spectrum(spec, N)
    values = np.array([p[0] for p in pairs], dtype=complex)
    free = list(range(N))
    assignment = [-1] * N
    for m in sorted(range(N), key=lambda k: -abs(theory[k])):
        k = min(free, key=lambda i: abs(values[i] - theory[m]))
        assignment[m] = k
        free.remove(k)
    computed = values[assignment]
    resid = np.abs(computed - theory) / np.maximum(1.0, np.abs(theory))
    gaps = [abs(theory[i] - theory[j]) / max(1.0, abs(theory[i]))
            for i in range(N) for j in range(i + 1, N)]
    report = SpectrumReport(theory, computed, assignment, resid,
                            near_degenerate=bool(gaps and min(gaps) < 10 * tol))
    report.passed["eigenvalues"] = bool(np.all(resid <= tol))
    return report


def derivative_at_zeros(zeros: ZeroSet) -> np.ndarray:
    """Derivative of the monic P_N at each of its zeros, prod_{j != n} (y_n - y_j)."""
    y = np.asarray(zeros.y, dtype=complex)
    return np.array([np.prod(y[n] - np.delete(y, n)) for n in range(len(y))])


def eigenvector_target(spec: FamilySpec, zeros: ZeroSet, m: int) -> np.ndarray:
    """``P_m(y_n) / (eta'(x_n) P_N'(y_n))``, phase-normalized."""
    N = zeros.degree
    if not 0 <= m < N:
        raise ValueError(f"m must lie in [0, {N}), got {m}")
    d = np.array([eta_dot(spec, x) for x in zeros.x], dtype=complex)
    if np.any(np.abs(d) == 0):
        raise DegeneracyError(f"{spec.name}: eta' vanishes at a zero")
    pm = np.array([poly_eval(spec, m, x) for x in zeros.x])
    return normalize_phase(pm / (d * derivative_at_zeros(zeros)))


def collinearity_residual(v: Sequence[complex], t: Sequence[complex]) -> float:
    """Sine of the angle between two complex vectors; 0 when proportional."""
    v = np.asarray(v, dtype=complex)
    t = np.asarray(t, dtype=complex)
    if v.shape != t.shape:
        raise ValueError("vectors differ in length")
    nv, nt = np.linalg.norm(v), np.linalg.norm(t)
    if nv == 0 or nt == 0:
        raise ValueError("collinearity of a zero vector is undefined")
    # norm of the component of t orthogonal to v; avoids sqrt(1 - c^2) cancellation
    u, w = v / nv, t / nt
    return float(min(1.0, np.linalg.norm(w - np.vdot(u, w) * u)))


def _scaled_variable(zeros: ZeroSet) -> tuple[float, float]:
    """Centre and half-width of the zeros, so that eta = c + s t with t in [-1, 1]."""
    y = np.asarray(zeros.y).real
    lo, hi = float(y.min()), float(y.max())
    if hi - lo <= 0:
        return lo, max(1.0, abs(lo))
    return (hi + lo) / 2, (hi - lo) / 2


def reconstruct_polynomial(spec: FamilySpec, zeros: ZeroSet, v: Sequence[complex],
                           degree: int | None = None) -> tuple[np.ndarray, float]:
    """Coefficients of ``sum_n eta'(x_n) v_n prod_{j != n}(eta - y_j)`` and the
    deviation from ``P_degree``.

    Both polynomials are written in ``t = (eta - c)/s`` with c, s centring the
    zeros on [-1, 1] and normalized to a unit coefficient of ``t^degree``; the
    residual is the largest coefficient difference (coefficients above
    ``degree`` must vanish) relative to the largest reference coefficient.
    ``degree`` defaults to the highest coefficient above 1e-6 of the maximum.
    Returns (monic coefficients in t, ascending; residual).
    """
    v = np.asarray(v, dtype=complex)
    N = zeros.degree
    c, s = _scaled_variable(zeros)
    t = (np.asarray(zeros.y, dtype=complex) - c) / s
    w = np.array([eta_dot(spec, x) for x in zeros.x], dtype=complex) * v
    coef = np.zeros(N, dtype=complex)
    size = 0.0
    for n in range(N):
        basis = np.poly(np.delete(t, n))[::-1] if N > 1 else np.ones(1)
        coef += w[n] * basis
        size += abs(w[n]) * np.max(np.abs(basis))
    big = np.max(np.abs(coef))
    if big <= NULL_COMBINATION * max(size, 1e-300):
        raise ValueError("reconstruction is a null combination")
    if degree is None:
        degree = int(np.nonzero(np.abs(coef) > 1e-6 * big)[0].max())
    coef = coef / coef[degree]
    ref_t, _, _ = _interpolate(spec, degree, c - s, c + s)
    ref = np.zeros(N, dtype=complex)
    ref[: degree + 1] = np.asarray(ref_t) / ref_t[degree]
    resid = float(np.max(np.abs(coef - ref)) / np.max(np.abs(ref)))
    return coef, resid


def lagrange_interpolate(samples: Sequence[tuple[complex, complex]], probe: complex) -> complex:
    """``sum_n Q(x_n)/W'(x_n) * W(probe)/(probe - x_n)`` with ``W = prod (x - x_n)``."""
    nodes = np.array([s[0] for s in samples], dtype=complex)
    vals = np.array([s[1] for s in samples], dtype=complex)
    if len(set(nodes.tolist())) != len(nodes):
        raise ValueError("interpolation nodes must be distinct")
    hit = np.nonzero(nodes == probe)[0]
    if len(hit):
        return complex(vals[hit[0]])
    w_probe = np.prod(probe - nodes)
    total = 0j
    for n in range(len(nodes)):
        wprime = np.prod(nodes[n] - np.delete(nodes, n))
        total += vals[n] / wprime * w_probe / (probe - nodes[n])
    return complex(total)


def analyse(spec: FamilySpec, M: PerturbationMatrix, zeros: ZeroSet,
            tol_eig: float = DEFAULT_TOL_EIG, tol_vec: float = DEFAULT_TOL_VEC,
            tol_recon: float = DEFAULT_TOL_RECON) -> SpectrumReport:
    """Eigenvalues, eigenvector collinearity and polynomial reconstruction at true zeros."""
    N = zeros.degree
    pairs = eigen_decompose(M)
    report = match_spectrum(pairs, spec, N, tol_eig)
    col = np.full(N, np.nan)
    rec = np.full(N, np.nan)
    excluded = []
    for m in range(N):
        others = np.delete(report.theoretical, m)
        if len(others) and np.min(np.abs(others - report.theoretical[m])) < 10 * tol_eig * max(
                1.0, abs(report.theoretical[m])):
            excluded.append(m)
            continue
        v = pairs[report.assignment[m]][1]
        col[m] = collinearity_residual(v, eigenvector_target(spec, zeros, m))
        rec[m] = reconstruct_polynomial(spec, zeros, v, m)[1]
    report.collinearity_residuals = col
    report.reconstruction_residuals = rec
    report.excluded = excluded
    kept = [m for m in range(N) if m not in excluded]
    report.passed["collinearity"] = bool(np.all(col[kept] <= tol_vec))
    report.passed["reconstruction"] = bool(np.all(rec[kept] <= tol_recon))
    return report


@dataclass
class DiophantineReport:
    family: str
    degree: int
    trials: int
    seed: int
    spectrum: np.ndarray
    residuals: np.ndarray
    tolerance: float
    # trials whose double-precision spectrum missed the tolerance and were redone
    refined: int = 0

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def diophantine_experiment(spec: FamilySpec, N: int, trials: int, seed: int,
                           tol: float = DEFAULT_TOL_DIOPHANTINE) -> DiophantineReport:
    """Spectrum of the closed-form M at random complex points, trial by trial."""
    if not spec.is_classical:
        raise ValueError(f"{spec.name}: point-independent spectra are claimed for hermite, laguerre, jacobi only")
    if not 1 <= N <= 10:
        raise ValueError(f"N must lie in [1, 10], got {N}")
    rng = np.random.default_rng(seed)
    resid = np.empty(trials)
    refined = 0
    for k in range(trials):
        pts = random_points(spec, N, rng)
        pairs = eigen_decompose(build_explicit(spec, pts, N))
        resid[k] = float(np.max(match_spectrum(pairs, spec, N, tol).eigenvalue_residuals))
        if resid[k] > tol:
            # clustered points make M badly non-normal; double entries alone can miss by ~1e-8
            pairs = [(v, None) for v in multiprecision_eigenvalues(spec, pts, N)]
            resid[k] = float(np.max(match_spectrum(pairs, spec, N, tol).eigenvalue_residuals))
            refined += 1
    return DiophantineReport(spec.name, N, trials, seed, theoretical_spectrum(spec, N), resid, tol, refined)


def multiprecision_eigenvalues(spec: FamilySpec, points: PointSet, N: int) -> list[complex]:
    """Eigenvalues of the closed-form M at ``points``, with entries and solve in mpmath."""
    with mpmath.workdps(MULTIPRECISION_DPS):
        x = np.array([mpmath.mpc(complex(v)) for v in points.x], dtype=object)
        y = np.array([eta(spec, v) for v in x], dtype=object)
        M = build_explicit(spec, PointSet(x, y, "random"), N).entries
        values = mpmath.eig(mpmath.matrix(M.tolist()), left=False, right=False)
        return [complex(v) for v in values]
