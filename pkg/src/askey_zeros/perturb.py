"""The perturbation matrix M around N points, generic and in closed form per operator group.

For points ``x_1..x_N`` with ``y_n = eta(x_n)`` and Lagrange numerators
``pi_m(x) = prod_{j != m} (eta(x) - y_j)``::

    M[n, m] = -eta'(x_m) ((H~ - E(N)) pi_m)(x_n) / (eta'(x_n) prod_{j != n} (y_n - y_j))
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .families import (
    FamilySpec,
    PoleError,
    energy,
    eta,
    eta_ddot,
    eta_dot,
    operator_data,
)
from .zeros import ZeroSet

RANDOM_RADIUS = 2.0
RANDOM_GUARD = 1e-3


@dataclass(frozen=True)
class PointSet:
    x: np.ndarray
    y: np.ndarray
    source: str  # "zeros" or "random"
    # long-double zeros, for forms that rely on the zero equations
    x_ext: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.x)


@dataclass(frozen=True)
class PerturbationMatrix:
    family: FamilySpec
    degree: int
    entries: np.ndarray
    provenance: str  # "generic" or "explicit"
    points: PointSet
    form: str = "generic"


def points_from_zeros(zeros: ZeroSet) -> PointSet:
    return PointSet(np.asarray(zeros.x, dtype=complex), np.asarray(zeros.y, dtype=complex), "zeros",
                    zeros.x_ext)


def points_from_x(spec: FamilySpec, x) -> PointSet:
    x = np.asarray(x, dtype=complex)
    return PointSet(x, np.array([eta(spec, v) for v in x], dtype=complex), "random")


def _point_ok(spec: FamilySpec, x: complex) -> bool:
    try:
        operator_data(spec, x, guard=RANDOM_GUARD)
    except PoleError:
        return False
    return abs(eta_dot(spec, x)) >= RANDOM_GUARD


def random_points(spec: FamilySpec, N: int, rng: np.random.Generator) -> PointSet:
    """N uniform points in the complex disc of radius 2, away from poles and each other."""
    xs: list[complex] = []
    ys: list[complex] = []
    while len(xs) < N:
        r = RANDOM_RADIUS * np.sqrt(rng.random())
        th = 2 * np.pi * rng.random()
        x = complex(r * np.cos(th), r * np.sin(th))
        if not _point_ok(spec, x):
            continue
        y = complex(eta(spec, x))
        if any(abs(x - o) < RANDOM_GUARD for o in xs) or any(abs(y - o) < RANDOM_GUARD for o in ys):
            continue
        xs.append(x)
        ys.append(y)
    return PointSet(np.array(xs), np.array(ys), "random")


def _check(points: PointSet, N: int):
    if len(points) != N:
        raise ValueError(f"need {N} points, got {len(points)}")


def _deltas(y: np.ndarray) -> np.ndarray:
    N = len(y)
    return np.array([np.prod(y[n] - np.delete(y, n)) for n in range(N)])


def _elementary(ds) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_s of ``ds``, without division."""
    e = np.zeros(len(ds) + 1, dtype=complex)
    e[0] = 1.0
    for k, d in enumerate(ds, start=1):
        e[1:k + 1] = e[1:k + 1] + d * e[0:k]
    return e


def lagrange_numerator(spec: FamilySpec, y: np.ndarray, m: int, z: complex) -> complex:
    return complex(np.prod(eta(spec, z) - np.delete(y, m)))


def _operator_on_numerator(spec: FamilySpec, pts: PointSet, n: int, m: int, EN: float, data) -> complex:
    """``((H~ - E(N)) pi_m)(x_n)``."""
    x, y = pts.x, pts.y
    xn = x[n]
    others = np.delete(y, m)
    base = complex(np.prod(y[n] - others))  # pi_m(x_n): Delta_n on the diagonal, 0 off it
    kind = spec.operator_kind
    if kind == "differential":
        e = _elementary(y[n] - others)
        s = len(others)
        e1 = e[s - 1] if s >= 1 else 0.0
        e2 = e[s - 2] if s >= 2 else 0.0
        d1 = eta_dot(spec, xn)
        f1 = d1 * e1
        f2 = eta_ddot(spec, xn) * e1 + 2 * d1 * d1 * e2
        return data.second * f2 + data.first * f1 - EN * base
    if kind == "imaginary_shift":
        g = spec.gamma
        fm = lagrange_numerator(spec, y, m, xn - 1j * g)
        fp = lagrange_numerator(spec, y, m, xn + 1j * g)
        return data.V * (fm - base) + data.Vstar * (fp - base) - EN * base
    fp = lagrange_numerator(spec, y, m, xn + 1)
    fm = lagrange_numerator(spec, y, m, xn - 1)
    return data.B * (base - fp) + data.D * (base - fm) - EN * base


def build_generic(spec: FamilySpec, points: PointSet, N: int) -> PerturbationMatrix:
    """M from its definition, applying the operator to each Lagrange numerator."""
    _check(points, N)
    EN = energy(spec, N)
    dots = np.array([eta_dot(spec, v) for v in points.x], dtype=complex)
    deltas = _deltas(points.y)
    M = np.empty((N, N), dtype=complex)
    for n in range(N):
        try:
            data = operator_data(spec, points.x[n])
        except PoleError as exc:
            raise PoleError(f"row {n}: {exc}") from None
        for m in range(N):
            h = _operator_on_numerator(spec, points, n, m, EN, data)
            M[n, m] = -dots[m] * h / (dots[n] * deltas[n])
    return PerturbationMatrix(spec, N, M, "generic", points, "generic")


# ---------------------------------------------------------------------------
# closed forms per operator group


def _pair_sum(inv: np.ndarray) -> complex:
    """sum_{j<k} inv_j inv_k."""
    s = inv.sum()
    return (s * s - np.sum(inv * inv)) / 2


def _classical(spec: FamilySpec, pts: PointSet, N: int, jacobi_drift_shift: float = 2.0) -> np.ndarray:
    x, y = pts.x, pts.y
    p = spec.params.named_params
    # object arrays carry mpmath entries through unchanged
    M = np.zeros((N, N), dtype=object if x.dtype == object else complex)
    if spec.name == "hermite":
        for n in range(N):
            inv = 1 / (x[n] - np.delete(x, n))
            M[n, n] = 2 * (N + _pair_sum(inv) - x[n] * inv.sum())
            for m in range(N):
                if m != n:
                    sub = 1 / (x[n] - np.delete(x, [n, m]))
                    M[n, m] = 2 / (x[n] - x[m]) * (sub.sum() - x[n])
        return M
    if spec.name == "laguerre":
        alpha = p["g"] - 0.5
        for n in range(N):
            inv = 1 / (y[n] - np.delete(y, n))
            M[n, n] = 4 * (N + 2 * y[n] * _pair_sum(inv) - (y[n] - alpha - 1) * inv.sum())
            for m in range(N):
                if m != n:
                    sub = 1 / (y[n] - np.delete(y, [n, m]))
                    M[n, m] = 4 * x[m] / x[n] / (y[n] - y[m]) * (2 * y[n] * sub.sum() - (y[n] - alpha - 1))
        return M
    alpha, beta = p["g"] - 0.5, p["h"] - 0.5
    # drift term of the Jacobi operator in eta: (alpha + beta + 2) eta + alpha - beta
    lin = lambda v: (alpha + beta + jacobi_drift_shift) * v + alpha - beta
    s2 = np.array([eta_dot(spec, v) for v in x])
    for n in range(N):
        inv = 1 / (y[n] - np.delete(y, n))
        w = 1 - y[n] ** 2
        M[n, n] = 4 * (N * (N + alpha + beta + 1) + 2 * w * _pair_sum(inv) - lin(y[n]) * inv.sum())
        for m in range(N):
            if m != n:
                sub = 1 / (y[n] - np.delete(y, [n, m]))
                M[n, m] = 4 * s2[m] / s2[n] / (y[n] - y[m]) * (2 * w * sub.sum() - lin(y[n]))
    return M


def _imag_linear(spec, pts, N, EN):
    x = pts.x
    M = np.zeros((N, N), dtype=complex)
    for n in range(N):
        d = operator_data(spec, x[n])
        V, Vs = d.V, d.Vstar
        rest = np.delete(x, n)
        den = np.prod(x[n] - rest)
        M[n, n] = -(V * np.prod(x[n] - 1j - rest) + Vs * np.prod(x[n] + 1j - rest)) / den + EN + V + Vs
        for m in range(N):
            if m != n:
                r2 = np.delete(x, [n, m])
                M[n, m] = 1j * (V * np.prod(x[n] - 1j - r2) - Vs * np.prod(x[n] + 1j - r2)) / den
    return M


def _imag_quadratic(spec, pts, N, EN):
    x, y = pts.x, pts.y
    M = np.zeros((N, N), dtype=complex)
    for n in range(N):
        d = operator_data(spec, x[n])
        V, Vs = d.V, d.Vstar
        rest = np.delete(y, n)
        den = np.prod(y[n] - rest)
        lo, hi = (x[n] - 1j) ** 2, (x[n] + 1j) ** 2
        M[n, n] = -(V * np.prod(lo - rest) + Vs * np.prod(hi - rest)) / den + EN + V + Vs
        for m in range(N):
            if m != n:
                r2 = np.delete(y, [n, m])
                M[n, m] = x[m] / x[n] / den * (
                    V * (1 + 2j * x[n]) * np.prod(lo - r2) + Vs * (1 - 2j * x[n]) * np.prod(hi - r2)
                )
    return M


def _imag_cos(spec, pts, N, EN, double_angle: bool = False):
    """Askey-Wilson group. The off-diagonal ratio is -sin x_m / sin x_n;
    ``double_angle`` swaps in sin 2x_m / sin 2x_n, which does not match the definition."""
    x, y = pts.x, pts.y
    q = spec.q
    z = np.exp(1j * x)
    M = np.zeros((N, N), dtype=complex)
    for n in range(N):
        d = operator_data(spec, x[n])
        V, Vs = d.V, d.Vstar
        zn = z[n]
        rest = np.delete(y, n)
        den = np.prod(y[n] - rest)
        lo = (q * zn + 1 / (q * zn)) / 2
        hi = (zn / q + q / zn) / 2
        M[n, n] = EN + V + Vs - (V * np.prod(lo - rest) + Vs * np.prod(hi - rest)) / den
        for m in range(N):
            if m != n:
                r2 = np.delete(y, [n, m])
                ratio = np.sin(2 * x[m]) / np.sin(2 * x[n]) if double_angle else -np.sin(x[m]) / np.sin(x[n])
                M[n, m] = ratio * (1 / q - 1) / (2 * den) * (
                    V / zn * (1 - q * zn * zn) * np.prod(lo - r2) + Vs * zn * (1 - q / (zn * zn)) * np.prod(hi - r2)
                )
    return M


def _real_linear(spec, pts, N, EN):
    x = pts.x
    M = np.zeros((N, N), dtype=complex)
    for n in range(N):
        d = operator_data(spec, x[n])
        B, D = d.B, d.D
        rest = np.delete(x, n)
        den = np.prod(x[n] - rest)
        M[n, n] = (B * np.prod(x[n] + 1 - rest) + D * np.prod(x[n] - 1 - rest)) / den + EN - B - D
        for m in range(N):
            if m != n:
                r2 = np.delete(x, [n, m])
                M[n, m] = (B * np.prod(x[n] + 1 - r2) - D * np.prod(x[n] - 1 - r2)) / den
    return M


def _real_linear_simplified(spec, pts, N, EN, diagonal_factor: float = 1.0):
    """Form that uses the zero equations; valid only at true zeros.

    Factors ``1 + 1/(x_n - x_j)`` cancel when a zero sits next to a lattice
    point, so the long-double zeros are used when present.
    """
    x = pts.x_ext if pts.x_ext is not None else pts.x
    M = np.zeros((N, N), dtype=complex)
    for n in range(N):
        d = operator_data(spec, x[n])
        B, D = d.B, d.D
        rest = np.delete(x, n)
        core = B * np.prod(1 + 1 / (x[n] - rest))
        M[n, n] = diagonal_factor * core + EN - B - D
        for m in range(N):
            if m != n:
                M[n, m] = core * (1 / (x[n] + 1 - x[m]) - 1 / (x[n] - 1 - x[m]))
    return M


def _real_general(spec, pts, N, EN):
    x, y = pts.x, pts.y
    dots = np.array([eta_dot(spec, v) for v in x], dtype=complex)
    M = np.zeros((N, N), dtype=complex)
    for n in range(N):
        d = operator_data(spec, x[n])
        B, D = d.B, d.D
        rest = np.delete(y, n)
        den = np.prod(y[n] - rest)
        up, dn = eta(spec, x[n] + 1), eta(spec, x[n] - 1)
        M[n, n] = (B * np.prod(up - rest) + D * np.prod(dn - rest)) / den + EN - B - D
        for m in range(N):
            if m != n:
                r2 = np.delete(y, m)
                M[n, m] = dots[m] / dots[n] / den * (B * np.prod(up - r2) + D * np.prod(dn - r2))
    return M


# form name -> (groups it applies to, needs true zeros)
EXPLICIT_FORMS = {
    "classical": (("hermite", "laguerre", "jacobi"), False),
    "jacobi_short_drift": (("jacobi",), False),
    "imag_linear": (("imag_linear",), False),
    "imag_quadratic": (("imag_quadratic",), False),
    "imag_cos_double_angle": (("imag_cos",), False),
    "imag_cos": (("imag_cos",), False),
    "real_linear": (("real_linear",), False),
    "real_linear_simplified_half_diagonal": (("real_linear",), True),
    "real_linear_simplified": (("real_linear",), True),
    "real_general": (("real_general",), False),
}

# variants kept for comparison only: they disagree with the definition of M
DIAGNOSTIC_FORMS = ("jacobi_short_drift", "imag_cos_double_angle", "real_linear_simplified_half_diagonal")


def explicit_forms_for(spec: FamilySpec) -> list[str]:
    return [name for name, (groups, _) in EXPLICIT_FORMS.items() if spec.group in groups]


def default_form(spec: FamilySpec) -> str:
    """The explicit form used for cross-checks; never a diagnostic variant."""
    return {"hermite": "classical", "laguerre": "classical", "jacobi": "classical"}.get(spec.group, spec.group)


def build_explicit(spec: FamilySpec, points: PointSet, N: int, form: str | None = None) -> PerturbationMatrix:
    """M from the closed form for the family's group.

    ``form`` selects among the variants listed by :func:`explicit_forms_for`;
    the ``*_simplified*`` forms are valid only at true zeros. The variants in
    ``DIAGNOSTIC_FORMS`` disagree with the definition and exist for comparison:
    ``jacobi_short_drift`` has drift (alpha+beta) eta instead of
    (alpha+beta+2) eta, ``imag_cos_double_angle`` uses sin 2x ratios, and
    ``real_linear_simplified_half_diagonal`` drops a factor 2 on the diagonal sum.
    """
    _check(points, N)
    form = form or default_form(spec)
    groups, needs_zeros = EXPLICIT_FORMS[form]
    if spec.group not in groups:
        raise ValueError(f"{spec.name}: form {form!r} does not apply to group {spec.group!r}")
    if needs_zeros and points.source != "zeros":
        raise ValueError(f"form {form!r} is valid only at true zeros")
    EN = energy(spec, N)
    if form == "classical":
        M = _classical(spec, points, N)
    elif form == "jacobi_short_drift":
        M = _classical(spec, points, N, jacobi_drift_shift=0.0)
    elif form == "imag_linear":
        M = _imag_linear(spec, points, N, EN)
    elif form == "imag_quadratic":
        M = _imag_quadratic(spec, points, N, EN)
    elif form == "imag_cos_double_angle":
        M = _imag_cos(spec, points, N, EN, double_angle=True)
    elif form == "imag_cos":
        M = _imag_cos(spec, points, N, EN)
    elif form == "real_linear":
        M = _real_linear(spec, points, N, EN)
    elif form == "real_linear_simplified_half_diagonal":
        M = _real_linear_simplified(spec, points, N, EN)
    elif form == "real_linear_simplified":
        M = _real_linear_simplified(spec, points, N, EN, diagonal_factor=2.0)
    else:
        M = _real_general(spec, points, N, EN)
    return PerturbationMatrix(spec, N, M, "explicit", points, form)


def max_relative_deviation(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.max(np.abs(b)))
    return float(np.max(np.abs(a - b))) / scale if scale > 0 else float(np.max(np.abs(a - b)))


# ---------------------------------------------------------------------------
# classical zero matrices and the similarity relations


def zero_matrix(spec: FamilySpec, zeros: ZeroSet) -> np.ndarray:
    """The zero-based matrix A (hermite), B (laguerre) or C (jacobi)."""
    y = np.asarray(zeros.y, dtype=complex)
    N = len(y)
    if spec.name == "hermite":
        w = np.ones(N, dtype=complex)
    elif spec.name == "laguerre":
        w = y
    elif spec.name == "jacobi":
        w = 1 - y * y
    else:
        raise ValueError(f"{spec.name}: zero matrix defined for hermite, laguerre, jacobi only")
    out = np.zeros((N, N), dtype=complex)
    for n in range(N):
        for m in range(N):
            if m == n:
                idx = [j for j in range(N) if j != n]
                out[n, n] = np.sum(w[idx] / (y[n] - y[idx]) ** 2)
            else:
                out[n, m] = -w[m] / (y[n] - y[m]) ** 2
    return out


def similarity_target(spec: FamilySpec, zeros: ZeroSet) -> np.ndarray:
    """2(A + I), 4 D (2B + I) D^-1 or 4 D (2C + 2N + alpha + beta) D^-1."""
    Z = zero_matrix(spec, zeros)
    N = len(Z)
    I = np.eye(N)
    if spec.name == "hermite":
        return 2 * (Z + I)
    x = np.asarray(zeros.x, dtype=complex)
    if spec.name == "laguerre":
        D = np.diag(x)
        inner = 2 * Z + I
    else:
        p = spec.params.named_params
        alpha, beta = p["g"] - 0.5, p["h"] - 0.5
        D = np.diag(np.sin(2 * x))
        inner = 2 * Z + (2 * N + alpha + beta) * I
    return 4 * D @ inner @ np.linalg.inv(D)


def similarity_residual(spec: FamilySpec, zeros: ZeroSet) -> float:
    """Max-norm relative residual between the closed-form M and the transformed zero matrix."""
    N = zeros.degree
    M = build_explicit(spec, points_from_zeros(zeros), N, "classical").entries
    return max_relative_deviation(similarity_target(spec, zeros), M)


# ---------------------------------------------------------------------------
# export


def matrix_csv(M: PerturbationMatrix | np.ndarray) -> str:
    entries = M.entries if isinstance(M, PerturbationMatrix) else np.asarray(M)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for (i, j), v in np.ndenumerate(entries):
        w.writerow([i, j, f"{v.real:.17g}", f"{v.imag:.17g}"])
    return buf.getvalue()
