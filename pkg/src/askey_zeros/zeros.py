"""Zeros of P_N in the coordinate variable eta, and the equations they satisfy."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .families import (
    DEFAULT_MAX_DEGREE,
    MULTIPRECISION_DPS,
    BranchError,
    FamilySpec,
    energy,
    eta,
    eta_ddot,
    eta_dot,
    eta_inverse,
    operator_data,
    poly_eval,
    poly_in_eta,
)

NEWTON_STEPS = 10
REFINE_PASSES = 3
EXTENDED_STEPS = 6
MULTIPRECISION_STEPS = 6


class DegeneracyError(ValueError):
    """Polynomial or zero set is degenerate (vanishing leading term, repeated roots)."""


@dataclass(frozen=True)
class MonicPoly:
    """Monic polynomial in eta, coefficients in ascending order (``coeffs[-1] == 1``)."""

    degree: int
    coeffs: np.ndarray
    lead: complex = 1.0  # leading coefficient of the family normalization

    def __call__(self, y):
        return horner(self.coeffs, y)

    def derivative(self, y):
        return horner(P.polyder(self.coeffs), y) if self.degree > 0 else 0.0 * y


@dataclass(frozen=True)
class ZeroSet:
    family: FamilySpec
    degree: int
    y: np.ndarray
    x: np.ndarray
    refinement_residual: float
    monic: MonicPoly
    method: str = "companion"
    # long-double copies after the extended polish; used by the residual checks
    y_ext: np.ndarray | None = field(default=None, repr=False, compare=False)
    x_ext: np.ndarray | None = field(default=None, repr=False, compare=False)


def horner(coeffs, y):
    out = 0.0 * y
    for c in coeffs[::-1]:
        out = out * y + c
    return out


def _check_degree(spec: FamilySpec, N: int, allow_high_degree: bool):
    if N < 0:
        raise ValueError(f"degree must be non-negative, got {N}")
    if spec.lattice is not None and N >= spec.lattice:
        raise ValueError(f"{spec.name}: degree {N} needs N < lattice size {spec.lattice}")
    if N > spec.max_degree:
        if not allow_high_degree:
            raise ValueError(f"{spec.name}: degree {N} exceeds max_degree {spec.max_degree}")
        warnings.warn(f"degree {N} > {DEFAULT_MAX_DEGREE}: companion roots lose accuracy", stacklevel=3)


def _initial_bracket(spec: FamilySpec, N: int) -> tuple[float, float]:
    lo, hi = spec.zero_domain
    if spec.lattice is not None:
        return lo, hi
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    s = spec.scale_hint
    k = spec.coordinate.kind
    if k == "x":
        if spec.operator_kind == "real_shift":
            return 0.0, 2.0 * N + 4.0 * s
        r = math.sqrt(2.0 * N + 2.0) + s
        return -r, r
    if k == "x^2":
        return 0.0, 4.0 * N + 4.0 * s
    # remaining infinite lattices: image of x in [0, 2N + 4]
    top = float(np.real(eta(spec, 2.0 * N + 4.0)))
    return min(lo, 0.0), top


def _interpolate(spec: FamilySpec, N: int, lo: float, hi: float):
    """Coefficients of P_N in t, where eta = c + s t, from Chebyshev samples."""
    c, s = (hi + lo) / 2, (hi - lo) / 2
    k = np.arange(N + 1)
    t = np.cos(np.pi * (2 * k + 1) / (2 * (N + 1)))
    vals = np.array([poly_in_eta(spec, N, c + s * tk) for tk in t])
    cheb = C.chebfit(t, vals, N)
    return C.cheb2poly(cheb), c, s


def _to_eta(coef_t, c: float, s: float) -> np.ndarray:
    """Re-expand a polynomial in t = (eta - c)/s as a polynomial in eta."""
    out = np.zeros(1, dtype=complex)
    basis = np.ones(1, dtype=complex)
    lin = np.array([-c / s, 1 / s], dtype=complex)
    for a in coef_t:
        out = P.polyadd(out, a * basis)
        basis = P.polymul(basis, lin)
    return out


def monic_coefficients(spec: FamilySpec, N: int, allow_high_degree: bool = False,
                       bracket: tuple[float, float] | None = None) -> MonicPoly:
    """Monic form of P_N in eta, by interpolation at Chebyshev points of ``bracket``."""
    _check_degree(spec, N, allow_high_degree)
    if N == 0:
        return MonicPoly(0, np.array([1.0 + 0j]), poly_in_eta(spec, 0, 0.0))
    lo, hi = bracket or _initial_bracket(spec, N)
    coef_t, c, s = _interpolate(spec, N, lo, hi)
    _check_lead(spec, N, coef_t)
    coeffs = _to_eta(coef_t, c, s)
    lead = coeffs[-1]
    return MonicPoly(N, coeffs / lead, lead)


def _check_lead(spec: FamilySpec, N: int, coef_t):
    # judged in the bracket-scaled variable, where coefficient sizes are comparable
    if abs(coef_t[-1]) < 1e-12 * np.max(np.abs(coef_t)):
        raise DegeneracyError(f"{spec.name}: leading coefficient of P_{N} vanishes")


def _roots_in_bracket(spec: FamilySpec, N: int, lo: float, hi: float):
    coef_t, c, s = _interpolate(spec, N, lo, hi)
    _check_lead(spec, N, coef_t)
    roots_t = P.polyroots(coef_t)
    return c + s * roots_t, coef_t[-1] / s**N


def _polish(spec: FamilySpec, N: int, monic: MonicPoly, roots: np.ndarray) -> np.ndarray:
    """Newton steps on the series value, derivative by Horner on the monic form."""
    lead = monic.lead

    def f(y):
        return poly_in_eta(spec, N, y) / lead

    y = roots.astype(complex)
    for i in range(N):
        yi = y[i]
        fi = f(yi)
        for _ in range(NEWTON_STEPS):
            d = monic.derivative(yi)
            if d == 0 or fi == 0:
                break
            cand = yi - fi / d
            fc = f(cand)
            # a step that does not reduce the residual means rounding level was reached
            if abs(fc) >= abs(fi):
                break
            yi, fi = cand, fc
        y[i] = yi
    return _polish_extended(spec, N, monic, y)


def _polish_extended(spec: FamilySpec, N: int, monic: MonicPoly, y0: np.ndarray) -> np.ndarray:
    """Weierstrass corrections with the series summed in long double.

    Near-lattice zeros of q-families need more digits than double precision
    provides. The derivative of the monic form at a zero is the product of its
    distances to the other zeros, so no double-precision coefficients enter.
    """
    lead = np.clongdouble(monic.lead)
    y = np.asarray(y0, dtype=np.clongdouble).copy()
    try:
        f = np.array([poly_in_eta(spec, N, v) / lead for v in y], dtype=np.clongdouble)
        for _ in range(EXTENDED_STEPS):
            moved = False
            for i in range(N):
                d = np.prod(y[i] - np.delete(y, i)) if N > 1 else np.clongdouble(1)
                if d == 0 or f[i] == 0:
                    continue
                cand = y[i] - f[i] / d
                fc = poly_in_eta(spec, N, cand) / lead
                if np.isfinite(fc) and abs(fc) < abs(f[i]):
                    y[i], f[i] = cand, fc
                    moved = True
            if not moved:
                break
    except (ValueError, ZeroDivisionError, FloatingPointError):
        return np.asarray(y0, dtype=np.clongdouble)
    return y


def _finish(spec: FamilySpec, N: int, y_ext: np.ndarray, real: bool):
    """Snap, sort, check distinctness and lift to x; returns (y, x, y_ext, x_ext)."""
    y_ext = np.asarray(y_ext, dtype=np.clongdouble)
    y = y_ext.astype(complex)
    span = float(np.max(y.real) - np.min(y.real)) if N > 1 else 1.0
    scale = max(span, float(np.max(np.abs(y))), 1e-300)
    if real:
        snap = np.abs(y.imag) < 1e-7 * scale
        y_ext = np.where(snap, y_ext.real + np.clongdouble(0), y_ext)
        y = y_ext.astype(complex)
    order = np.lexsort((y.imag, y.real))
    y, y_ext = y[order], y_ext[order]
    if N > 1:
        gaps = np.abs(np.diff(y))
        if np.min(gaps) <= 1e-10 * max(span, 1e-300):
            raise DegeneracyError(f"{spec.name}: zeros of P_{N} are not distinct after polish")
    try:
        x = np.array([eta_inverse(spec, yi) for yi in y], dtype=complex)
    except BranchError as exc:
        raise BranchError(f"{spec.name}: zero outside the principal branch: {exc}") from None
    return y, x, y_ext, _lift_extended(spec, y_ext, x)


def _lift_extended(spec: FamilySpec, y_ext: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Long-double x on the same branch as the double-precision lift."""
    with np.errstate(all="ignore"):
        xe = np.array([spec.coordinate.preimage(v) for v in y_ext], dtype=np.clongdouble)
    bad = ~(np.abs(xe.astype(complex) - x) <= 1e-8 * (1 + np.abs(x)))
    xe[bad] = x[bad]
    real = x.imag == 0
    xe[real] = xe[real].real
    return xe


def _companion_zeros(spec: FamilySpec, N: int):
    lo, hi = _initial_bracket(spec, N)
    for _ in range(REFINE_PASSES):
        roots, _ = _roots_in_bracket(spec, N, lo, hi)
        re = np.sort(roots.real)
        span = re[-1] - re[0] if N > 1 else max(1.0, abs(re[0]))
        pad = 0.05 * span if N > 1 else 0.5 * span
        new_lo, new_hi = re[0] - pad, re[-1] + pad
        dlo, dhi = spec.zero_domain
        if spec.lattice is not None or (math.isfinite(dlo) and math.isfinite(dhi)):
            new_lo, new_hi = max(new_lo, dlo), min(new_hi, dhi)
        if not new_hi > new_lo:
            break
        lo, hi = new_lo, new_hi
    monic = monic_coefficients(spec, N, allow_high_degree=True, bracket=(lo, hi))
    y = _polish(spec, N, monic, roots)
    return y, monic


def _base_interval(spec: FamilySpec, N: int) -> tuple[float, float] | None:
    """Interval of the real base variable x holding all zeros, or None if unknown."""
    k = spec.coordinate.kind
    if spec.lattice is not None:
        return 0.0, float(spec.lattice)
    if k == "cos2x":
        return 0.0, math.pi / 2
    if k == "cosx":
        return 0.0, math.pi
    if spec.infinite_lattice:
        return 0.0, None
    if k == "x^2":
        return 0.0, None
    return None


def _scan_zeros(spec: FamilySpec, N: int) -> np.ndarray | None:
    """Real zeros from sign changes of P_N(eta(x)) on a grid in x, refined by Brent."""
    iv = _base_interval(spec, N)
    if iv is None:
        return None
    lo, hi = iv

    def g(x):
        return poly_eval(spec, N, x).real

    top = hi if hi is not None else 2.0 * N + 4.0 + 4.0 * spec.scale_hint
    for _ in range(6):
        xs = np.linspace(lo, top, 400 * N + 1)[1:-1] if hi is not None else np.linspace(lo, top, 400 * N + 1)[1:]
        vals = np.array([g(x) for x in xs])
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if len(idx) >= N or hi is not None:
            break
        top *= 2
    if len(idx) != N:
        return None
    roots = [brentq(g, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200) for i in idx]
    return np.array([eta(spec, r) for r in roots], dtype=complex)


def _acceptable(spec: FamilySpec, zs: ZeroSet, tol: float) -> bool:
    lo, hi = spec.zero_domain
    y = zs.y
    if np.any(y.imag != 0) or np.any(y.real <= lo) or np.any(y.real >= hi):
        return False
    return float(np.max(zero_equation_residual(spec, zs))) <= tol


def compute_zeros(spec: FamilySpec, N: int, allow_high_degree: bool = False,
                  accept_tol: float = 1e-11) -> ZeroSet:
    """Zeros of P_N: companion roots on a refined Chebyshev bracket, Newton-polished.

    When those roots are not N distinct real zeros inside the orthogonality
    domain satisfying the zero equations to ``accept_tol``, the zeros are
    recomputed by bracketing sign changes in the base variable and kept if
    they do better. If that still misses ``accept_tol``, the best set is
    refined with the series summed in mpmath.
    """
    zs = _locate_zeros(spec, N, allow_high_degree, accept_tol)
    if _acceptable(spec, zs, accept_tol):
        return zs
    refined = _refine_multiprecision(spec, zs)
    if refined is not None and _score(spec, refined) < _score(spec, zs):
        return refined
    return zs


def _refine_multiprecision(spec: FamilySpec, zs: ZeroSet) -> ZeroSet | None:
    """Weierstrass corrections with the series summed at MULTIPRECISION_DPS digits.

    For zeros pressed against a lattice point the series cancels below
    long-double resolution.
    """
    if spec.poly_hp_fn is None:
        return None
    N = zs.degree
    start = zs.y_ext if zs.y_ext is not None else zs.y
    try:
        with mpmath.workdps(MULTIPRECISION_DPS):
            lead = mpmath.mpc(complex(zs.monic.lead))
            y = [mpmath.mpc(mpmath.mpf(str(v.real)), mpmath.mpf(str(v.imag))) for v in start]

            def f(v):
                return poly_in_eta(spec, N, v) / lead

            for _ in range(MULTIPRECISION_STEPS):
                for i in range(N):
                    d = mpmath.fprod(y[i] - y[j] for j in range(N) if j != i)
                    if d != 0:
                        y[i] -= f(y[i]) / d
            y_ext = np.array([np.clongdouble(np.longdouble(mpmath.nstr(v.real, 30)))
                              + 1j * np.longdouble(mpmath.nstr(v.imag, 30)) for v in y])
        y, x, ye, xe = _finish(spec, N, y_ext, True)
    except (ValueError, ZeroDivisionError, ArithmeticError):
        return None
    return ZeroSet(spec, N, y, x, float(np.max(np.abs(zs.monic(y)))), zs.monic, "multiprecision", ye, xe)


def _locate_zeros(spec: FamilySpec, N: int, allow_high_degree: bool, accept_tol: float) -> ZeroSet:
    _check_degree(spec, N, allow_high_degree)
    if N == 0:
        raise ValueError("degree 0 has no zeros")
    best = None
    err = None
    try:
        y, monic = _companion_zeros(spec, N)
        y, x, ye, xe = _finish(spec, N, y, True)
        best = ZeroSet(spec, N, y, x, float(np.max(np.abs(monic(y)))), monic, "companion", ye, xe)
        if _acceptable(spec, best, accept_tol):
            return best
    except (DegeneracyError, BranchError) as exc:
        err = exc
    ys = _scan_zeros(spec, N)
    if ys is not None:
        monic = monic_coefficients(spec, N, allow_high_degree=True,
                                   bracket=(float(ys.real.min()), float(ys.real.max())) if N > 1 else None)
        y, x, ye, xe = _finish(spec, N, _polish(spec, N, monic, ys), True)
        scanned = ZeroSet(spec, N, y, x, float(np.max(np.abs(monic(y)))), monic, "bracketing", ye, xe)
        if best is None or _score(spec, scanned) < _score(spec, best):
            return scanned
    if best is None:
        raise err
    return best


def _score(spec: FamilySpec, zs: ZeroSet) -> float:
    try:
        r = float(np.max(zero_equation_residual(spec, zs)))
    except ValueError:
        return math.inf
    lo, hi = spec.zero_domain
    inside = np.all(zs.y.imag == 0) and np.all((zs.y.real > lo) & (zs.y.real < hi))
    return r if inside else math.inf


def poly_derivative_at(spec: FamilySpec, N: int, y: complex, family_normalization: bool = False,
                       monic: MonicPoly | None = None) -> complex:
    """d/d eta of the monic P_N at ``y``; optionally rescaled to the family's normalization."""
    m = monic or monic_coefficients(spec, N)
    d = complex(m.derivative(y))
    return d * m.lead if family_normalization else d


# ---------------------------------------------------------------------------
# algebraic equations satisfied by the zeros


def _balanced(lhs: complex, rhs: complex) -> float:
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0 else abs(lhs - rhs) / scale


def zero_equation_residual(spec: FamilySpec, zeros: ZeroSet) -> np.ndarray:
    """Per-zero relative residual of ``(H~ - E(N)) P_N`` vanishing at each zero.

    Shift kinds use the balanced two-sided form: the forward and backward
    shifted terms of the operator must cancel. The differential kind balances
    the second-derivative term against the first-derivative term.
    """
    N = zeros.degree
    y, x = zeros.y, zeros.x
    if zeros.y_ext is not None:
        y, x = zeros.y_ext, zeros.x_ext
    out = np.empty(N)
    kind = spec.operator_kind
    for n in range(N):
        others = np.delete(y, n)
        if kind == "differential":
            xn = x[n]
            # with f = prod_j (eta - y_j): f'(x_n) = eta' pi_n, f'' = eta'' pi_n + 2 eta'^2 pi_n S_n
            d = eta_dot(spec, xn)
            s1 = np.sum(1.0 / (y[n] - others))
            od = operator_data(spec, xn)
            dd = eta_ddot(spec, xn)
            lhs = od.second * (dd + 2 * d * d * s1)
            rhs = -od.first * d
            # a zero at a symmetry point makes both sides vanish; use term magnitudes
            size = abs(od.second) * (abs(dd) + 2 * abs(d) ** 2 * np.sum(np.abs(1.0 / (y[n] - others))))
            out[n] = abs(lhs - rhs) / max(size, abs(rhs), 1e-300)
            continue
        od = operator_data(spec, x[n])
        if kind == "imaginary_shift":
            g = spec.gamma
            fm = np.prod(eta(spec, x[n] - 1j * g) - y)
            fp = np.prod(eta(spec, x[n] + 1j * g) - y)
            lhs, rhs = od.V * fm, -od.Vstar * fp
        else:
            fp = np.prod(eta(spec, x[n] + 1) - y)
            fm = np.prod(eta(spec, x[n] - 1) - y)
            lhs, rhs = od.B * fp, -od.D * fm
        out[n] = _balanced(lhs, rhs)
    return out


def classical_zero_equation_residual(spec: FamilySpec, zeros: ZeroSet) -> np.ndarray:
    """Residual of the specialised first-order sum identities for the classical three."""
    y = zeros.y.real
    N = zeros.degree
    p = spec.params.named_params
    out = np.empty(N)
    for n in range(N):
        inv = 1.0 / (y[n] - np.delete(y, n))
        s, s_abs = float(np.sum(inv)), float(np.sum(np.abs(inv)))
        # scale by term magnitudes: a zero at a symmetry point makes both sides vanish
        if spec.name == "hermite":
            lhs, rhs, scale = s, y[n], s_abs
        elif spec.name == "laguerre":
            alpha = p["g"] - 0.5
            lhs, rhs = y[n] * s, 0.5 * (y[n] - (alpha + 1))
            scale = max(abs(y[n]) * s_abs, 0.5 * (abs(y[n]) + abs(alpha + 1)))
        elif spec.name == "jacobi":
            alpha, beta = p["g"] - 0.5, p["h"] - 0.5
            lhs = (1 - y[n] ** 2) * s
            rhs = 0.5 * ((alpha + beta + 2) * y[n] + alpha - beta)
            scale = max((1 - y[n] ** 2) * s_abs, 0.5 * (abs((alpha + beta + 2) * y[n]) + abs(alpha - beta)))
        else:
            raise ValueError(f"{spec.name}: no specialised zero equation")
        scale = max(scale, abs(lhs), abs(rhs))
        # a single zero at the origin leaves nothing to compare against
        out[n] = abs(lhs - rhs) / scale if scale > 1e-12 else abs(lhs - rhs)
    return out


def inverse_square_sums(spec: FamilySpec, zeros: ZeroSet) -> np.ndarray:
    """Per-zero residual of the inverse-square sum identity of the classical three.

    ``|LHS - RHS|`` divided by the larger of ``|LHS|`` and the sum of the
    absolute values of the right-hand terms.
    """
    y = zeros.y.real
    N = zeros.degree
    p = spec.params.named_params
    out = np.empty(N)
    for n in range(N):
        s2 = float(np.sum(1.0 / (y[n] - np.delete(y, n)) ** 2))
        yn = y[n]
        if spec.name == "hermite":
            lhs = s2
            terms = [2.0 / 3.0 * (N - 1), -yn * yn / 3.0]
        elif spec.name == "laguerre":
            a = p["g"] - 0.5
            lhs = yn * yn * s2
            terms = [-(a + 1) * (a + 5) / 12.0, 2 * (2 * N + a + 1) * yn / 12.0, -yn * yn / 12.0]
        elif spec.name == "jacobi":
            a, b = p["g"] - 0.5, p["h"] - 0.5
            lhs = (1 - yn * yn) ** 2 * s2
            terms = [
                (N - 1) * (N + a + b + 2) / 3.0,
                -(a - b) ** 2 / 12.0,
                -(a - b) * (a + b + 6) * yn / 6.0,
                -(4 * N * (N + a + b + 1) + (a + b + 2) * (a + b + 6)) * yn * yn / 12.0,
            ]
        else:
            raise ValueError(f"{spec.name}: inverse-square identity is for hermite, laguerre, jacobi")
        scale = max(abs(lhs), sum(abs(t) for t in terms), 1e-300)
        out[n] = abs(lhs - sum(terms)) / scale
    return out


def interlaces(lower: np.ndarray, upper: np.ndarray) -> bool:
    """True when the real zeros ``lower`` (degree N-1) strictly separate ``upper`` (degree N)."""
    a, b = np.sort(np.real(lower)), np.sort(np.real(upper))
    return all(b[k] < a[k] < b[k + 1] for k in range(len(a)))


def check_energy_monotone(spec: FamilySpec, top: int) -> bool:
    e = [energy(spec, n) for n in range(top + 1)]
    return e[0] == 0 and all(e[k] < e[k + 1] for k in range(top))

