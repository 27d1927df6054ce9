"""Registry of classical orthogonal polynomial families of the (q-)Askey scheme.

Each family is described by its sinusoidal coordinate ``eta(x)``, the
eigenvalue function ``E(n)``, the data of the operator ``H~`` that has the
polynomials as eigenfunctions, and the terminating series defining
``P_n(eta(x))``.  :func:`resolve_family` validates raw parameters and returns
an immutable :class:`FamilySpec`.

Operator conventions::

    differential     H~ f = -f'' + w(x) f'
    imaginary_shift  H~ f = V(x) (f(x - i g) - f(x)) + V*(x) (f(x + i g) - f(x))
    real_shift       H~ f = B(x) (f(x) - f(x + 1)) + D(x) (f(x) - f(x - 1))
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import mpmath
import numpy as np

from .hyper import hyp_F, hyp_phi, pochhammer, q_pochhammer

DEFAULT_MAX_DEGREE = 16
POLE_GUARD = 1e-12
# working precision of the mpmath rebuild; constants formed at build time carry these digits
MULTIPRECISION_DPS = 40


class ParameterError(ValueError):
    """Invalid family name or parameter set."""


class UnknownFamilyError(ParameterError):
    pass


class MissingParameterError(ParameterError):
    pass


class ExtraParameterError(ParameterError):
    pass


class ParameterRangeError(ParameterError):
    pass


class PoleError(ValueError):
    """An operator coefficient was evaluated at (or too near) one of its poles."""


class BranchError(ValueError):
    """A value lies outside the image of the principal branch of eta."""


# ---------------------------------------------------------------------------
# sinusoidal coordinates


def is_extended(v) -> bool:
    """True for numpy long-double scalars or arrays."""
    if is_multiprecision(v):
        return False
    return np.result_type(v) in (np.longdouble, np.clongdouble)


def is_multiprecision(v) -> bool:
    """True for mpmath scalars."""
    return isinstance(v, (mpmath.mpf, mpmath.mpc))


def _expi(x):
    """``e^{ix}``, keeping mpmath input in mpmath."""
    if is_multiprecision(x):
        return mpmath.expj(x)
    return np.exp(1j * x)


def _cos(x):
    return mpmath.cos(x) if is_multiprecision(x) else np.cos(x)


def _sin(x):
    return mpmath.sin(x) if is_multiprecision(x) else np.sin(x)


def _as_complex(v):
    """Complex value at the input's precision (double, long double or mpmath)."""
    if is_multiprecision(v):
        return mpmath.mpc(v)
    if is_extended(v):
        return np.clongdouble(v)
    return complex(v)


def _qpow(q: float, x):
    """``q**x`` for real or complex ``x`` (q > 0)."""
    if is_multiprecision(x):
        return mpmath.exp(x * mpmath.log(mpmath.mpf(q)))
    if is_extended(x):
        return np.exp(x * np.log(np.longdouble(q)))
    return np.exp(x * math.log(q))


def _bilinear_root(y, A):
    """Smaller root ``u = q^x`` of ``A u^2 - (y + 1 + A) u + 1 = 0``.

    Written as ``2 / (s + sqrt(s^2 - 4A))`` to avoid cancellation for large y.
    """
    s = y + 1 + A
    disc = mpmath.sqrt(s * s - 4 * A) if is_multiprecision(s) else np.sqrt(s * s - 4 * A)
    if (s * disc.conjugate()).real < 0:
        disc = -disc
    return 2 / (s + disc)


@dataclass(frozen=True)
class Coordinate:
    """A sinusoidal coordinate ``eta(x)``.

    ``kind`` is one of ``x``, ``x^2``, ``cos2x``, ``cosx``, ``x(x+d)``,
    ``q^-x-1``, ``1-q^x`` and ``bilinear`` (``(q^-x - 1)(1 - A q^x)``).
    """

    kind: str
    d: float = 0.0
    q: float = 0.0
    A: float = 0.0

    def __call__(self, x):
        k = self.kind
        if k == "x":
            return x
        if k == "x^2":
            return x * x
        if k == "cos2x":
            return _cos(2 * x)
        if k == "cosx":
            return _cos(x)
        if k == "x(x+d)":
            return x * (x + self.d)
        if k == "q^-x-1":
            return _qpow(self.q, -x) - 1
        if k == "1-q^x":
            return 1 - _qpow(self.q, x)
        if k == "bilinear":
            return (_qpow(self.q, -x) - 1) * (1 - self.A * _qpow(self.q, x))
        raise AssertionError(k)

    def dot(self, x):
        k = self.kind
        if k == "x":
            return np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
        if k == "x^2":
            return 2 * x
        if k == "cos2x":
            return -2 * _sin(2 * x)
        if k == "cosx":
            return -_sin(x)
        if k == "x(x+d)":
            return 2 * x + self.d
        lq = math.log(self.q)
        if k == "q^-x-1":
            return -lq * _qpow(self.q, -x)
        if k == "1-q^x":
            return -lq * _qpow(self.q, x)
        if k == "bilinear":
            return lq * (self.A * _qpow(self.q, x) - _qpow(self.q, -x))
        raise AssertionError(k)

    def ddot(self, x):
        k = self.kind
        if k == "x":
            return 0.0 * x
        if k in ("x^2", "x(x+d)"):
            return 2.0 + 0.0 * x
        if k == "cos2x":
            return -4 * _cos(2 * x)
        if k == "cosx":
            return -_cos(x)
        lq2 = math.log(self.q) ** 2
        if k == "q^-x-1":
            return lq2 * _qpow(self.q, -x)
        if k == "1-q^x":
            return -lq2 * _qpow(self.q, x)
        if k == "bilinear":
            return lq2 * (_qpow(self.q, -x) + self.A * _qpow(self.q, x))
        raise AssertionError(k)

    def preimage(self, y: complex) -> complex:
        """Some ``x`` with ``eta(x) = y``, using principal complex branches.

        No domain check; any preimage is good enough to evaluate a polynomial
        in ``eta``.
        """
        if is_multiprecision(y):
            return self._preimage_multiprecision(mpmath.mpc(y))
        if is_extended(y):
            return self._preimage_extended(np.clongdouble(y))
        y = complex(y)
        k = self.kind
        if k == "x":
            return y
        if k == "x^2":
            return cmath.sqrt(y)
        if k == "cos2x":
            return cmath.acos(y) / 2
        if k == "cosx":
            return cmath.acos(y)
        if k == "x(x+d)":
            return (-self.d + cmath.sqrt(self.d * self.d + 4 * y)) / 2
        lq = math.log(self.q)
        if k == "q^-x-1":
            return -cmath.log(1 + y) / lq
        if k == "1-q^x":
            return cmath.log(1 - y) / lq
        if k == "bilinear":
            return cmath.log(_bilinear_root(y, self.A)) / lq
        raise AssertionError(k)

    def _preimage_multiprecision(self, y):
        k = self.kind
        if k == "x":
            return y
        if k == "x^2":
            return mpmath.sqrt(y)
        if k == "cos2x":
            return mpmath.acos(y) / 2
        if k == "cosx":
            return mpmath.acos(y)
        if k == "x(x+d)":
            return (-self.d + mpmath.sqrt(self.d * self.d + 4 * y)) / 2
        lq = mpmath.log(mpmath.mpf(self.q))
        if k == "q^-x-1":
            return -mpmath.log(1 + y) / lq
        if k == "1-q^x":
            return mpmath.log(1 - y) / lq
        if k == "bilinear":
            return mpmath.log(_bilinear_root(y, self.A)) / lq
        raise AssertionError(k)

    def _preimage_extended(self, y):
        k = self.kind
        if k == "x":
            return y
        if k == "x^2":
            return np.sqrt(y)
        if k == "cos2x":
            return np.arccos(y) / 2
        if k == "cosx":
            return np.arccos(y)
        if k == "x(x+d)":
            return (-self.d + np.sqrt(self.d * self.d + 4 * y)) / 2
        lq = np.log(np.longdouble(self.q))
        if k == "q^-x-1":
            return -np.log(1 + y) / lq
        if k == "1-q^x":
            return np.log(1 - y) / lq
        if k == "bilinear":
            return np.log(_bilinear_root(y, self.A)) / lq
        raise AssertionError(k)

    def image(self) -> tuple[float, float]:
        """Real image of the principal branch's domain."""
        k = self.kind
        if k in ("x",):
            return (-math.inf, math.inf)
        if k in ("cos2x", "cosx"):
            return (-1.0, 1.0)
        if k == "1-q^x":
            return (-math.inf, 1.0)
        if k == "x(x+d)":
            return (-self.d * self.d / 4, math.inf)
        if k == "q^-x-1":
            return (-1.0, math.inf)
        if k == "bilinear":
            # minimum of eta over real x sits at q^{-2x} = A
            return (-((1 - math.sqrt(self.A)) ** 2) if self.A > 0 else -1.0, math.inf)
        return (0.0, math.inf)

    def inverse(self, y: complex, rtol: float = 1e-10) -> complex:
        """Principal-branch inverse; raises :class:`BranchError` off the image."""
        y = complex(y)
        lo, hi = self.image()
        scale = max(1.0, abs(y))
        if abs(y.imag) > rtol * scale:
            raise BranchError(f"eta^-1: {y} is not real, outside the {self.kind} branch image")
        yr = y.real
        slack = rtol * scale
        if yr < lo - slack or yr > hi + slack:
            raise BranchError(f"eta^-1: {yr} outside the {self.kind} branch image [{lo}, {hi}]")
        yr = min(max(yr, lo), hi)
        k = self.kind
        if k == "x":
            return yr
        if k == "x^2":
            return math.sqrt(yr)
        if k == "cos2x":
            return math.acos(yr) / 2
        if k == "cosx":
            return math.acos(yr)
        if k == "x(x+d)":
            return (-self.d + math.sqrt(self.d * self.d + 4 * yr)) / 2
        lq = math.log(self.q)
        if k == "q^-x-1":
            return -math.log1p(yr) / lq
        if k == "1-q^x":
            return math.log1p(-yr) / lq if yr < 1 else math.inf
        if k == "bilinear":
            return math.log(_bilinear_root(yr, self.A).real) / lq
        raise AssertionError(k)


# ---------------------------------------------------------------------------
# operator data records


@dataclass(frozen=True)
class DriftData:
    """Coefficients of ``H~ = second * d^2/dx^2 + first * d/dx``."""

    second: complex
    first: complex


@dataclass(frozen=True)
class ShiftData:
    V: complex
    Vstar: complex


@dataclass(frozen=True)
class LatticeData:
    B: complex
    D: complex


def _guard(value, label: str, guard: float):
    if abs(value) < guard:
        raise PoleError(f"denominator factor {label} vanishes (|{label}| = {abs(value):.3g})")
    return value


# ---------------------------------------------------------------------------
# parameters and resolved families


@dataclass(frozen=True)
class ParamSet:
    family_name: str
    named_params: Mapping[str, complex]
    q: float | None = None

    def __getitem__(self, key):
        return self.named_params[key]


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: ParamSet
    operator_kind: str
    coordinate: Coordinate
    group: str
    energy_fn: Callable[[int], float] = field(repr=False)
    poly_fn: Callable[[int, complex], complex] = field(repr=False)
    operator_fn: Callable[[complex, float], object] = field(repr=False)
    gamma: float | None = None
    lattice: int | None = None
    infinite_lattice: bool = False
    max_degree: int = DEFAULT_MAX_DEGREE
    zero_domain: tuple[float, float] = (-math.inf, math.inf)
    scale_hint: float = 1.0
    # polynomial and operator rebuilt from long-double q and parameters, if they build
    poly_ext_fn: Callable[[int, complex], complex] | None = field(default=None, repr=False)
    operator_ext_fn: Callable[[complex, float], object] | None = field(default=None, repr=False)
    # polynomial rebuilt from mpmath q and parameters, for refining hard zeros
    poly_hp_fn: Callable[[int, object], object] | None = field(default=None, repr=False)

    @property
    def q(self) -> float | None:
        return self.params.q

    @property
    def is_classical(self) -> bool:
        return self.name in ("hermite", "laguerre", "jacobi")


@dataclass(frozen=True)
class FamilyDef:
    name: str
    params: tuple[str, ...]
    q_family: bool
    kind: str
    group: str
    eta_label: str
    energy_label: str
    operator_label: str
    poly_label: str
    weight_label: str
    ranges: tuple[str, ...]
    build: Callable = field(repr=False)
    sample: Callable = field(repr=False)
    complex_params: tuple[str, ...] = ()
    integer_params: tuple[str, ...] = ()
    aliases: Mapping[str, tuple[str, Callable]] = field(default_factory=dict)
    derived: str = ""


REGISTRY: dict[str, FamilyDef] = {}


def _register(fdef: FamilyDef) -> FamilyDef:
    REGISTRY[fdef.name] = fdef
    return fdef


def family_names() -> list[str]:
    return list(REGISTRY)


# ---------------------------------------------------------------------------
# validation helpers


class _Checker:
    def __init__(self, name: str):
        self.name = name

    def require(self, ok: bool, constraint: str):
        if not ok:
            raise ParameterRangeError(f"{self.name}: parameter range violated: {constraint}")


def _conj_closed(values, tol: float = 1e-12) -> bool:
    """True when the multiset of values is closed under complex conjugation."""
    remaining = [complex(v) for v in values]
    while remaining:
        v = remaining.pop(0)
        if abs(v.imag) <= tol * max(1.0, abs(v)):
            continue
        target = v.conjugate()
        j = min(range(len(remaining)), key=lambda i: abs(remaining[i] - target), default=None)
        if j is None or abs(remaining[j] - target) > tol * max(1.0, abs(v)):
            return False
        remaining.pop(j)
    return True


def _same_set(a, b, tol: float = 1e-12) -> bool:
    a = [complex(v) for v in a]
    b = [complex(v) for v in b]
    if len(a) != len(b):
        return False
    for v in a:
        j = min(range(len(b)), key=lambda i: abs(b[i] - v))
        if abs(b[j] - v) > tol * max(1.0, abs(v)):
            return False
        b.pop(j)
    return True


def _uniform(rng, lo: float, hi: float, margin: float = 0.05) -> float:
    w = hi - lo
    return float(rng.uniform(lo + margin * w, hi - margin * w))


# Random q ranges. Zeros of lattice families approach lattice points roughly
# like q^(k^2/2), so small q makes the zero equations unresolvable in floating
# point; lattice families therefore get q close to 1.
_Q_CONTINUOUS = (0.65, 0.95)
_Q_LATTICE = (0.88, 0.97)
# weight parameters below this push lattice zeros onto lattice points
_WEIGHT_FLOOR = 0.35


def _draw_q(rng, lattice: bool = False) -> float:
    return _uniform(rng, *(_Q_LATTICE if lattice else _Q_CONTINUOUS), margin=0.0)


def _draw_lattice(rng, degree: int) -> int:
    return int(rng.integers(degree + 1, degree + 6))


def _realish(v: complex) -> float | complex:
    v = complex(v)
    return v.real if v.imag == 0 else v


# ---------------------------------------------------------------------------
# section: ordinary differential operators


def _build_hermite(p, q):
    def op(x, guard=POLE_GUARD):
        return DriftData(-1.0, 2 * x)

    def poly(n, x):
        # physicists' Hermite by the three-term recurrence
        h0, h1 = 1.0 + 0j, 2 * complex(x)
        if n == 0:
            return h0
        for k in range(1, n):
            h0, h1 = h1, 2 * x * h1 - 2 * k * h0
        return h1

    return dict(
        coordinate=Coordinate("x"),
        energy=lambda n: 2.0 * n,
        poly=poly,
        operator=op,
        zero_domain=(-math.inf, math.inf),
    )


def _build_laguerre(p, q):
    g = p["g"]
    alpha = g - 0.5

    def op(x, guard=POLE_GUARD):
        _guard(x, "x", guard)
        return DriftData(-1.0, 2 * (x - g / x))

    def poly(n, x):
        y = complex(x) ** 2
        return pochhammer(alpha + 1, n) / math.factorial(n) * hyp_F([-n], [alpha + 1], y, n)

    return dict(
        coordinate=Coordinate("x^2"),
        energy=lambda n: 4.0 * n,
        poly=poly,
        operator=op,
        zero_domain=(0.0, math.inf),
        scale_hint=4.0 + 2 * abs(alpha),
    )


def _build_jacobi(p, q):
    g, h = p["g"], p["h"]
    alpha, beta = g - 0.5, h - 0.5

    def op(x, guard=POLE_GUARD):
        s = _guard(np.sin(x), "sin x", guard)
        c = _guard(np.cos(x), "cos x", guard)
        return DriftData(-1.0, -2 * (g * c / s - h * s / c))

    def poly(n, x):
        y = np.cos(2 * complex(x))
        return (
            pochhammer(alpha + 1, n)
            / math.factorial(n)
            * hyp_F([-n, n + alpha + beta + 1], [alpha + 1], (1 - y) / 2, n)
        )

    return dict(
        coordinate=Coordinate("cos2x"),
        energy=lambda n: 4.0 * n * (n + g + h),
        poly=poly,
        operator=op,
        zero_domain=(-1.0, 1.0),
    )


def _alias(target: str, fn: Callable):
    return (target, fn)


_register(FamilyDef(
    name="hermite", params=(), q_family=False, kind="differential", group="hermite",
    eta_label="x", energy_label="2n",
    operator_label="H~ = -d^2/dx^2 + 2x d/dx, -inf < x < inf",
    poly_label="H_n(eta), physicists' Hermite",
    weight_label="exp(-x^2)",
    ranges=(),
    build=_build_hermite,
    sample=lambda rng, deg: {},
))

_register(FamilyDef(
    name="laguerre", params=("g",), q_family=False, kind="differential", group="laguerre",
    eta_label="x^2", energy_label="4n",
    operator_label="H~ = -d^2/dx^2 + 2(x - g/x) d/dx, 0 < x < inf",
    poly_label="L_n^(alpha)(eta), alpha = g - 1/2",
    weight_label="exp(-x^2) (x^2)^g",
    ranges=("g > -1/2",),
    build=_build_laguerre,
    sample=lambda rng, deg: {"g": _uniform(rng, -0.5, 3.0)},
    aliases={"alpha": _alias("g", lambda v: v + 0.5)},
))

_register(FamilyDef(
    name="jacobi", params=("g", "h"), q_family=False, kind="differential", group="jacobi",
    eta_label="cos 2x", energy_label="4n(n + g + h) = 4n(n + alpha + beta + 1)",
    operator_label="H~ = -d^2/dx^2 - 2(g cot x - h tan x) d/dx, 0 < x < pi/2",
    poly_label="P_n^(alpha,beta)(eta), alpha = g - 1/2, beta = h - 1/2",
    weight_label="(sin^2 x)^g (cos^2 x)^h",
    ranges=("g > -1/2", "h > -1/2"),
    build=_build_jacobi,
    sample=lambda rng, deg: {"g": _uniform(rng, -0.5, 3.0), "h": _uniform(rng, -0.5, 3.0)},
    aliases={
        "alpha": _alias("g", lambda v: v + 0.5),
        "beta": _alias("h", lambda v: v + 0.5),
    },
))


# ---------------------------------------------------------------------------
# section: pure imaginary shifts, gamma = 1


def _build_continuous_hahn(p, q):
    a1, a2, a3, a4 = (_as_complex(p[k]) for k in ("a1", "a2", "a3", "a4"))
    b1 = a1 + a2 + a3 + a4

    def op(x, guard=POLE_GUARD):
        return ShiftData((a1 + 1j * x) * (a2 + 1j * x), (a3 - 1j * x) * (a4 - 1j * x))

    def poly(n, x):
        pre = 1j**n * pochhammer(a1 + a3, n) * pochhammer(a1 + a4, n) / math.factorial(n)
        return pre * hyp_F([-n, n + b1 - 1, a1 + 1j * x], [a1 + a3, a1 + a4], 1.0, n)

    return dict(
        coordinate=Coordinate("x"),
        gamma=1.0,
        energy=lambda n: (n * (n + b1 - 1)).real,
        poly=poly,
        operator=op,
        zero_domain=(-math.inf, math.inf),
        scale_hint=2.0 + max(abs(a) for a in (a1, a2, a3, a4)),
    )


def _check_continuous_hahn(c: _Checker, p):
    a = [complex(p[k]) for k in ("a1", "a2", "a3", "a4")]
    for k, v in zip(("a1", "a2", "a3", "a4"), a):
        c.require(v.real > 0, f"Re {k} > 0")
    c.require(
        _same_set(a[2:], [a[0].conjugate(), a[1].conjugate()]),
        "{a3, a4} = {a1*, a2*} as a set",
    )


def _sample_continuous_hahn(rng, deg):
    a1 = complex(_uniform(rng, 0.0, 3.0), _uniform(rng, -1.0, 1.0, 0.0))
    a2 = complex(_uniform(rng, 0.0, 3.0), _uniform(rng, -1.0, 1.0, 0.0))
    if rng.random() < 0.5:
        return {"a1": a1, "a2": a2, "a3": a1.conjugate(), "a4": a2.conjugate()}
    return {"a1": a1, "a2": a2, "a3": a2.conjugate(), "a4": a1.conjugate()}


_register(FamilyDef(
    name="continuous_hahn", params=("a1", "a2", "a3", "a4"), q_family=False,
    kind="imaginary_shift", group="imag_linear",
    eta_label="x", energy_label="n(n + b1 - 1), b1 = a1 + a2 + a3 + a4",
    operator_label="V(x) = (a1 + ix)(a2 + ix), V*(x) = (a3 - ix)(a4 - ix), gamma = 1",
    poly_label="i^n (a1+a3)_n (a1+a4)_n / n! 3F2(-n, n+b1-1, a1+ix; a1+a3, a1+a4; 1)",
    weight_label="prod_{j=1,2} Gamma(a_j + ix) Gamma(a_j* - ix)",
    ranges=("Re a_j > 0", "{a3, a4} = {a1*, a2*} as a set"),
    build=_build_continuous_hahn,
    sample=_sample_continuous_hahn,
    complex_params=("a1", "a2", "a3", "a4"),
))


def _build_meixner_pollaczek(p, q):
    a, phi = p["a"], p["phi"]
    ph = cmath.exp(1j * (math.pi / 2 - phi))

    def op(x, guard=POLE_GUARD):
        return ShiftData(ph * (a + 1j * x), ph.conjugate() * (a - 1j * x))

    def poly(n, x):
        pre = pochhammer(2 * a, n) / math.factorial(n) * cmath.exp(1j * n * phi)
        return pre * hyp_F([-n, a + 1j * x], [2 * a], 1 - cmath.exp(-2j * phi), n)

    return dict(
        coordinate=Coordinate("x"),
        gamma=1.0,
        energy=lambda n: 2.0 * n * math.sin(phi),
        poly=poly,
        operator=op,
        zero_domain=(-math.inf, math.inf),
        scale_hint=2.0 + a / max(math.sin(phi), 0.05),
    )


_register(FamilyDef(
    name="meixner_pollaczek", params=("a", "phi"), q_family=False,
    kind="imaginary_shift", group="imag_linear",
    eta_label="x", energy_label="2n sin(phi)",
    operator_label="V(x) = exp(i(pi/2 - phi))(a + ix), V*(x) = exp(-i(pi/2 - phi))(a - ix), gamma = 1",
    poly_label="(2a)_n / n! exp(i n phi) 2F1(-n, a + ix; 2a; 1 - exp(-2i phi))",
    weight_label="exp((2 phi - pi) x) Gamma(a + ix) Gamma(a - ix)",
    ranges=("a > 0", "0 < phi < pi"),
    build=_build_meixner_pollaczek,
    sample=lambda rng, deg: {"a": _uniform(rng, 0.0, 3.0), "phi": _uniform(rng, 0.0, math.pi)},
))


def _wilson_like(avals, energy, poly):
    def op(x, guard=POLE_GUARD):
        ix = 1j * x
        num_p = np.prod([a + ix for a in avals])
        num_m = np.prod([a - ix for a in avals])
        _guard(2 * ix, "2ix", guard)
        dp = _guard(2 * ix + 1, "2ix + 1", guard)
        dm = _guard(1 - 2 * ix, "1 - 2ix", guard)
        return ShiftData(num_p / (2 * ix * dp), num_m / (-2 * ix * dm))

    return dict(
        coordinate=Coordinate("x^2"),
        gamma=1.0,
        energy=energy,
        poly=poly,
        operator=op,
        zero_domain=(0.0, math.inf),
        scale_hint=2.0 + max(abs(a) for a in avals),
    )


def _build_wilson(p, q):
    av = [_as_complex(p[k]) for k in ("a1", "a2", "a3", "a4")]
    a1, a2, a3, a4 = av
    b1 = sum(av)

    def poly(n, x):
        pre = pochhammer(a1 + a2, n) * pochhammer(a1 + a3, n) * pochhammer(a1 + a4, n)
        return pre * hyp_F(
            [-n, n + b1 - 1, a1 + 1j * x, a1 - 1j * x], [a1 + a2, a1 + a3, a1 + a4], 1.0, n
        )

    return _wilson_like(av, lambda n: (n * (n + b1 - 1)).real, poly)


def _build_continuous_dual_hahn(p, q):
    av = [_as_complex(p[k]) for k in ("a1", "a2", "a3")]
    a1, a2, a3 = av

    def poly(n, x):
        pre = pochhammer(a1 + a2, n) * pochhammer(a1 + a3, n)
        return pre * hyp_F([-n, a1 + 1j * x, a1 - 1j * x], [a1 + a2, a1 + a3], 1.0, n)

    return _wilson_like(av, lambda n: float(n), poly)


def _check_conj_family(keys, cond: str, part: str = "Re"):
    def check(c: _Checker, p):
        vals = [complex(p[k]) for k in keys]
        for k, v in zip(keys, vals):
            if part == "Re":
                c.require(v.real > 0, f"Re {k} > 0")
            else:
                c.require(abs(v) < 1, f"|{k}| < 1")
        c.require(_conj_closed(vals), cond)

    return check


def _sample_conj(rng, count, re_range=None, modulus_range=None):
    """Real values, or one conjugate pair plus reals."""
    out = []
    pair = count >= 2 and rng.random() < 0.5
    if pair:
        if re_range:
            z = complex(_uniform(rng, *re_range), _uniform(rng, -1.0, 1.0, 0.0))
        else:
            r = _uniform(rng, *modulus_range)
            th = _uniform(rng, 0.0, math.pi)
            z = r * cmath.exp(1j * th)
        out += [z, z.conjugate()]
    while len(out) < count:
        if re_range:
            out.append(_uniform(rng, *re_range))
        else:
            r = _uniform(rng, *modulus_range)
            out.append(r if rng.random() < 0.7 else -r)
    order = rng.permutation(count)
    return [out[i] for i in order]


_register(FamilyDef(
    name="wilson", params=("a1", "a2", "a3", "a4"), q_family=False,
    kind="imaginary_shift", group="imag_quadratic",
    eta_label="x^2", energy_label="n(n + b1 - 1), b1 = a1 + a2 + a3 + a4",
    operator_label="V(x) = prod_{j=1}^4 (a_j + ix) / (2ix(2ix + 1)), V*(x) = V(-x), gamma = 1",
    poly_label="(a1+a2)_n (a1+a3)_n (a1+a4)_n 4F3(-n, n+b1-1, a1+ix, a1-ix; a1+a2, a1+a3, a1+a4; 1)",
    weight_label="prod_j Gamma(a_j + ix) Gamma(a_j - ix) / (Gamma(2ix) Gamma(-2ix))",
    ranges=("Re a_j > 0", "{a1*, a2*, a3*, a4*} = {a1, a2, a3, a4} as a set"),
    build=_build_wilson,
    sample=lambda rng, deg: dict(zip(("a1", "a2", "a3", "a4"), _sample_conj(rng, 4, re_range=(0.0, 3.0)))),
    complex_params=("a1", "a2", "a3", "a4"),
))

_register(FamilyDef(
    name="continuous_dual_hahn", params=("a1", "a2", "a3"), q_family=False,
    kind="imaginary_shift", group="imag_quadratic",
    eta_label="x^2", energy_label="n",
    operator_label="V(x) = prod_{j=1}^3 (a_j + ix) / (2ix(2ix + 1)), V*(x) = V(-x), gamma = 1",
    poly_label="(a1+a2)_n (a1+a3)_n 3F2(-n, a1+ix, a1-ix; a1+a2, a1+a3; 1)",
    weight_label="prod_j Gamma(a_j + ix) Gamma(a_j - ix) / (Gamma(2ix) Gamma(-2ix))",
    ranges=("Re a_j > 0", "{a1*, a2*, a3*} = {a1, a2, a3} as a set"),
    build=_build_continuous_dual_hahn,
    sample=lambda rng, deg: dict(zip(("a1", "a2", "a3"), _sample_conj(rng, 3, re_range=(0.0, 3.0)))),
    complex_params=("a1", "a2", "a3"),
))


# ---------------------------------------------------------------------------
# section: pure imaginary shifts, eta = cos x, e^gamma = q


def _aw_like(avals, q, energy, poly):
    """Operator data for the Askey-Wilson group with parameters ``avals``."""

    def op(x, guard=POLE_GUARD):
        z = _expi(x)
        zi = 1 / z
        num_p = np.prod([1 - a * z for a in avals]) if avals else 1.0
        num_m = np.prod([1 - a * zi for a in avals]) if avals else 1.0
        d1 = _guard(1 - z * z, "1 - e^{2ix}", guard)
        d2 = _guard(1 - q * z * z, "1 - q e^{2ix}", guard)
        d3 = _guard(1 - zi * zi, "1 - e^{-2ix}", guard)
        d4 = _guard(1 - q * zi * zi, "1 - q e^{-2ix}", guard)
        return ShiftData(num_p / (d1 * d2), num_m / (d3 * d4))

    return dict(
        coordinate=Coordinate("cosx"),
        gamma=math.log(q),
        energy=energy,
        poly=poly,
        operator=op,
        zero_domain=(-1.0, 1.0),
    )


def _largest_first(avals):
    """Reorder symmetric parameters so the series prefactor a1^{-n} is benign."""
    i = max(range(len(avals)), key=lambda k: abs(avals[k]))
    return [avals[i]] + avals[:i] + avals[i + 1:]


def _build_askey_wilson(p, q):
    av = [_as_complex(p[k]) for k in ("a1", "a2", "a3", "a4")]
    b4 = np.prod(av)
    a1, a2, a3, a4 = _largest_first(av)

    def poly(n, x):
        z = _expi(x)
        pre = a1 ** (-n) * q_pochhammer(a1 * a2, q, n) * q_pochhammer(a1 * a3, q, n) * q_pochhammer(a1 * a4, q, n)
        return pre * hyp_phi(
            [q ** (-n), b4 * q ** (n - 1), a1 * z, a1 / z], [a1 * a2, a1 * a3, a1 * a4], q, q, n
        )

    return _aw_like(av, q, lambda n: ((q ** (-n) - 1) * (1 - b4 * q ** (n - 1))).real, poly)


def _build_continuous_dual_q_hahn(p, q):
    av = [_as_complex(p[k]) for k in ("a1", "a2", "a3")]
    a1, a2, a3 = _largest_first(av)

    def poly(n, x):
        z = _expi(x)
        pre = a1 ** (-n) * q_pochhammer(a1 * a2, q, n) * q_pochhammer(a1 * a3, q, n)
        return pre * hyp_phi([q ** (-n), a1 * z, a1 / z], [a1 * a2, a1 * a3], q, q, n)

    return _aw_like(av, q, lambda n: q ** (-n) - 1, poly)


def _build_al_salam_chihara(p, q):
    av = [_as_complex(p[k]) for k in ("a1", "a2")]
    a1, a2 = _largest_first(av)

    def poly(n, x):
        z = _expi(x)
        pre = a1 ** (-n) * q_pochhammer(a1 * a2, q, n)
        return pre * hyp_phi([q ** (-n), a1 * z, a1 / z], [a1 * a2, 0.0], q, q, n)

    return _aw_like(av, q, lambda n: q ** (-n) - 1, poly)


def _build_continuous_big_q_hermite(p, q):
    a = p["a"]

    def poly(n, x):
        z = _expi(x)
        return a ** (-n) * hyp_phi([q ** (-n), a * z, a / z], [0.0, 0.0], q, q, n)

    return _aw_like([a], q, lambda n: q ** (-n) - 1, poly)


def _build_continuous_q_hermite(p, q):
    def poly(n, x):
        z = _expi(x)
        return z**n * hyp_phi([q ** (-n), 0.0], [], q, q**n / (z * z), n)

    return _aw_like([], q, lambda n: q ** (-n) - 1, poly)


def _build_continuous_q_jacobi(p, q):
    alpha, beta = p["alpha"], p["beta"]
    # half-integer powers, precomputed once
    c1 = q ** (0.5 * (alpha + 0.5))
    c2 = q ** (0.5 * (alpha + 1.5))
    c3 = q ** (0.5 * (beta + 0.5))
    c4 = q ** (0.5 * (beta + 1.5))
    d1 = -(q ** (0.5 * (alpha + beta + 1)))
    d2 = -(q ** (0.5 * (alpha + beta + 2)))
    qa1 = q ** (alpha + 1)
    s = alpha + beta + 1

    def poly(n, x):
        z = _expi(x)
        pre = q_pochhammer(qa1, q, n) / q_pochhammer(q, q, n)
        return pre * hyp_phi([q ** (-n), q ** (n + s), c1 * z, c1 / z], [qa1, d1, d2], q, q, n)

    return _aw_like([c1, c2, -c3, -c4], q, lambda n: (q ** (-n) - 1) * (1 - q ** (n + s)), poly)


def _build_continuous_q_laguerre(p, q):
    alpha = p["alpha"]
    c1 = q ** (0.5 * (alpha + 0.5))
    c2 = q ** (0.5 * (alpha + 1.5))
    qa1 = q ** (alpha + 1)

    def poly(n, x):
        z = _expi(x)
        pre = q_pochhammer(qa1, q, n) / q_pochhammer(q, q, n)
        return pre * hyp_phi([q ** (-n), c1 * z, c1 / z], [qa1, 0.0], q, q, n)

    return _aw_like([c1, c2], q, lambda n: q ** (-n) - 1, poly)


_AW_OP = "V(x) = {num} / ((1 - e^{{2ix}})(1 - q e^{{2ix}})), V*(x) = V(-x), gamma = log q"
_AW_MOD = (0.3, 0.95)


def _sample_aw(keys):
    def sample(rng, deg):
        vals = _sample_conj(rng, len(keys), modulus_range=_AW_MOD)
        out = dict(zip(keys, vals))
        out["q"] = _draw_q(rng)
        return out

    return sample


_register(FamilyDef(
    name="askey_wilson", params=("a1", "a2", "a3", "a4"), q_family=True,
    kind="imaginary_shift", group="imag_cos",
    eta_label="cos x", energy_label="(q^-n - 1)(1 - b4 q^(n-1)), b4 = a1 a2 a3 a4",
    operator_label=_AW_OP.format(num="prod_{j=1}^4 (1 - a_j e^{ix})"),
    poly_label="a1^-n (a1a2, a1a3, a1a4; q)_n 4phi3(q^-n, b4 q^(n-1), a1 e^{ix}, a1 e^{-ix}; a1a2, a1a3, a1a4; q; q)",
    weight_label="(e^{2ix}, e^{-2ix}; q)_inf / prod_j (a_j e^{ix}, a_j e^{-ix}; q)_inf",
    ranges=("|a_j| < 1", "{a1*, a2*, a3*, a4*} = {a1, a2, a3, a4} as a set", "0 < q < 1"),
    build=_build_askey_wilson,
    sample=_sample_aw(("a1", "a2", "a3", "a4")),
    complex_params=("a1", "a2", "a3", "a4"),
))

_register(FamilyDef(
    name="continuous_dual_q_hahn", params=("a1", "a2", "a3"), q_family=True,
    kind="imaginary_shift", group="imag_cos",
    eta_label="cos x", energy_label="q^-n - 1",
    operator_label=_AW_OP.format(num="prod_{j=1}^3 (1 - a_j e^{ix})"),
    poly_label="a1^-n (a1a2, a1a3; q)_n 3phi2(q^-n, a1 e^{ix}, a1 e^{-ix}; a1a2, a1a3; q; q)",
    weight_label="(e^{2ix}, e^{-2ix}; q)_inf / prod_j (a_j e^{ix}, a_j e^{-ix}; q)_inf",
    ranges=("|a_j| < 1", "{a1*, a2*, a3*} = {a1, a2, a3} as a set", "0 < q < 1"),
    build=_build_continuous_dual_q_hahn,
    sample=_sample_aw(("a1", "a2", "a3")),
    complex_params=("a1", "a2", "a3"),
))

_register(FamilyDef(
    name="al_salam_chihara", params=("a1", "a2"), q_family=True,
    kind="imaginary_shift", group="imag_cos",
    eta_label="cos x", energy_label="q^-n - 1",
    operator_label=_AW_OP.format(num="(1 - a1 e^{ix})(1 - a2 e^{ix})"),
    poly_label="a1^-n (a1a2; q)_n 3phi2(q^-n, a1 e^{ix}, a1 e^{-ix}; a1a2, 0; q; q)",
    weight_label="(e^{2ix}, e^{-2ix}; q)_inf / prod_j (a_j e^{ix}, a_j e^{-ix}; q)_inf",
    ranges=("|a_j| < 1", "{a1*, a2*} = {a1, a2} as a set", "0 < q < 1"),
    build=_build_al_salam_chihara,
    sample=_sample_aw(("a1", "a2")),
    complex_params=("a1", "a2"),
))


def _sample_big_q_hermite(rng, deg):
    a = _uniform(rng, *_AW_MOD)
    return {"a": a if rng.random() < 0.7 else -a, "q": _draw_q(rng)}


_register(FamilyDef(
    name="continuous_big_q_hermite", params=("a",), q_family=True,
    kind="imaginary_shift", group="imag_cos",
    eta_label="cos x", energy_label="q^-n - 1",
    operator_label=_AW_OP.format(num="(1 - a e^{ix})"),
    poly_label="a^-n 3phi2(q^-n, a e^{ix}, a e^{-ix}; 0, 0; q; q)",
    weight_label="(e^{2ix}, e^{-2ix}; q)_inf / (a e^{ix}, a e^{-ix}; q)_inf",
    ranges=("-1 < a < 1", "a != 0", "0 < q < 1"),
    build=_build_continuous_big_q_hermite,
    sample=_sample_big_q_hermite,
))

_register(FamilyDef(
    name="continuous_q_hermite", params=(), q_family=True,
    kind="imaginary_shift", group="imag_cos",
    eta_label="cos x", energy_label="q^-n - 1",
    operator_label=_AW_OP.format(num="1"),
    poly_label="e^{inx} 2phi0(q^-n, 0; -; q; q^n e^{-2ix})",
    weight_label="(e^{2ix}, e^{-2ix}; q)_inf",
    ranges=("0 < q < 1",),
    build=_build_continuous_q_hermite,
    sample=lambda rng, deg: {"q": _draw_q(rng)},
))

_register(FamilyDef(
    name="continuous_q_jacobi", params=("alpha", "beta"), q_family=True,
    kind="imaginary_shift", group="imag_cos",
    eta_label="cos x", energy_label="(q^-n - 1)(1 - q^(n+alpha+beta+1))",
    operator_label=_AW_OP.format(
        num="(1 - q^{(alpha+1/2)/2} e^{ix})(1 - q^{(alpha+3/2)/2} e^{ix})"
        "(1 + q^{(beta+1/2)/2} e^{ix})(1 + q^{(beta+3/2)/2} e^{ix})"
    ),
    poly_label="(q^(alpha+1); q)_n / (q; q)_n 4phi3(q^-n, q^(n+alpha+beta+1), q^{(alpha+1/2)/2} e^{ix}, "
    "q^{(alpha+1/2)/2} e^{-ix}; q^(alpha+1), -q^{(alpha+beta+1)/2}, -q^{(alpha+beta+2)/2}; q; q)",
    weight_label="(e^{2ix}, e^{-2ix}; q)_inf / (q^{(alpha+1/2)/2} e^{+-ix}, -q^{(beta+1/2)/2} e^{+-ix}; q^{1/2})_inf",
    ranges=("alpha >= -1/2", "beta >= -1/2", "0 < q < 1"),
    build=_build_continuous_q_jacobi,
    sample=lambda rng, deg: {
        "alpha": _uniform(rng, -0.5, 3.0), "beta": _uniform(rng, -0.5, 3.0), "q": _draw_q(rng)
    },
))

_register(FamilyDef(
    name="continuous_q_laguerre", params=("alpha",), q_family=True,
    kind="imaginary_shift", group="imag_cos",
    eta_label="cos x", energy_label="q^-n - 1",
    operator_label=_AW_OP.format(num="(1 - q^{(alpha+1/2)/2} e^{ix})(1 - q^{(alpha+3/2)/2} e^{ix})"),
    poly_label="(q^(alpha+1); q)_n / (q; q)_n 3phi2(q^-n, q^{(alpha+1/2)/2} e^{ix}, "
    "q^{(alpha+1/2)/2} e^{-ix}; q^(alpha+1), 0; q; q)",
    weight_label="(e^{2ix}, e^{-2ix}; q)_inf / (q^{(alpha+1/2)/2} e^{ix}, q^{(alpha+1/2)/2} e^{-ix}; q^{1/2})_inf",
    ranges=("alpha >= -1/2", "0 < q < 1"),
    build=_build_continuous_q_laguerre,
    sample=lambda rng, deg: {"alpha": _uniform(rng, -0.5, 3.0), "q": _draw_q(rng)},
))


# ---------------------------------------------------------------------------
# section: real shifts on the integer lattice


def _lattice_op(B, D, dens=()):
    """Wrap ``B(x), D(x)``; ``dens`` lists (label, fn) denominator factors."""

    def op(x, guard=POLE_GUARD):
        for label, fn in dens:
            _guard(fn(x), label, guard)
        return LatticeData(B(x), D(x))

    return op


def _build_hahn(p, q):
    a, b, N = p["a"], p["b"], p["N"]
    return dict(
        coordinate=Coordinate("x"),
        lattice=N,
        energy=lambda n: n * (n + a + b - 1.0),
        poly=lambda n, x: hyp_F([-n, n + a + b - 1, -x], [a, -N], 1.0, n),
        operator=_lattice_op(lambda x: (x + a) * (N - x), lambda x: x * (b + N - x)),
    )


def _build_krawtchouk(p, q):
    pp, N = p["p"], p["N"]
    return dict(
        coordinate=Coordinate("x"),
        lattice=N,
        energy=lambda n: float(n),
        poly=lambda n, x: hyp_F([-n, -x], [-N], 1 / pp, n),
        operator=_lattice_op(lambda x: pp * (N - x), lambda x: (1 - pp) * x),
    )


def _build_meixner(p, q):
    beta, c = p["beta"], p["c"]
    return dict(
        coordinate=Coordinate("x"),
        energy=lambda n: float(n),
        poly=lambda n, x: hyp_F([-n, -x], [beta], 1 - 1 / c, n),
        operator=_lattice_op(lambda x: c / (1 - c) * (x + beta), lambda x: x / (1 - c)),
        scale_hint=(1 + beta) / (1 - c),
    )


def _build_charlier(p, q):
    a = p["a"]
    return dict(
        coordinate=Coordinate("x"),
        energy=lambda n: float(n),
        poly=lambda n, x: hyp_F([-n, -x], [], -1 / a, n),
        operator=_lattice_op(lambda x: a + 0 * x, lambda x: x),
        scale_hint=1 + a,
    )


def _build_racah(p, q):
    a, b, d, N = p["a"], p["b"], p["d"], p["N"]
    c = -N
    dt = a + b + c - d - 1
    B = lambda x: -(x + a) * (x + b) * (x + c) * (x + d) / ((2 * x + d) * (2 * x + 1 + d))
    D = lambda x: -(x + d - a) * (x + d - b) * (x + d - c) * x / ((2 * x - 1 + d) * (2 * x + d))
    dens = [
        ("2x + d", lambda x: 2 * x + d),
        ("2x + 1 + d", lambda x: 2 * x + 1 + d),
        ("2x - 1 + d", lambda x: 2 * x - 1 + d),
    ]
    return dict(
        coordinate=Coordinate("x(x+d)", d=d),
        lattice=N,
        energy=lambda n: n * (n + dt),
        poly=lambda n, x: hyp_F([-n, n + dt, -x, x + d], [a, b, c], 1.0, n),
        operator=_lattice_op(B, D, dens),
    )


def _build_dual_hahn(p, q):
    a, b, N = p["a"], p["b"], p["N"]
    s = a + b
    B = lambda x: (x + a) * (x + s - 1) * (N - x) / ((2 * x - 1 + s) * (2 * x + s))
    D = lambda x: x * (x + b - 1) * (x + s + N - 1) / ((2 * x - 2 + s) * (2 * x - 1 + s))
    dens = [
        ("2x - 1 + a + b", lambda x: 2 * x - 1 + s),
        ("2x + a + b", lambda x: 2 * x + s),
        ("2x - 2 + a + b", lambda x: 2 * x - 2 + s),
    ]
    return dict(
        coordinate=Coordinate("x(x+d)", d=s - 1),
        lattice=N,
        energy=lambda n: float(n),
        poly=lambda n, x: hyp_F([-n, x + s - 1, -x], [a, -N], 1.0, n),
        operator=_lattice_op(B, D, dens),
    )


def _sample_racah(rng, deg):
    N = _draw_lattice(rng, deg)
    d = _uniform(rng, 0.0, 3.0)
    a = _uniform(rng, N + d, N + d + 3.0)
    b = _uniform(rng, 0.0, 1 + d)
    return {"a": a, "b": b, "d": d, "N": N}


def _check_racah(c: _Checker, p):
    N, a, b, d = p["N"], p["a"], p["b"], p["d"]
    c.require(d > 0, "d > 0")
    c.require(a > N + d, "a > N + d")
    c.require(0 < b < 1 + d, "0 < b < 1 + d")


_register(FamilyDef(
    name="hahn", params=("a", "b", "N"), q_family=False, kind="real_shift", group="real_linear",
    eta_label="x", energy_label="n(n + a + b - 1)",
    operator_label="B(x) = (x + a)(N - x), D(x) = x(b + N - x), lattice [0..N]",
    poly_label="3F2(-n, n+a+b-1, -x; a, -N; 1)",
    weight_label="N!/(x!(N-x)!) (a)_x (b)_{N-x} / (b)_N",
    ranges=("a > 0", "b > 0", "N integer > degree"),
    build=_build_hahn,
    sample=lambda rng, deg: {"a": _uniform(rng, 0, 3.0), "b": _uniform(rng, 0, 3.0), "N": _draw_lattice(rng, deg)},
    integer_params=("N",),
))

_register(FamilyDef(
    name="krawtchouk", params=("p", "N"), q_family=False, kind="real_shift", group="real_linear",
    eta_label="x", energy_label="n",
    operator_label="B(x) = p(N - x), D(x) = (1 - p)x, lattice [0..N]",
    poly_label="2F1(-n, -x; -N; 1/p)",
    weight_label="N!/(x!(N-x)!) (p/(1-p))^x",
    ranges=("0 < p < 1", "N integer > degree"),
    build=_build_krawtchouk,
    sample=lambda rng, deg: {"p": _uniform(rng, 0.0, 1.0), "N": _draw_lattice(rng, deg)},
    integer_params=("N",),
))

_register(FamilyDef(
    name="meixner", params=("beta", "c"), q_family=False, kind="real_shift", group="real_linear",
    eta_label="x", energy_label="n",
    operator_label="B(x) = c/(1 - c) (x + beta), D(x) = x/(1 - c), lattice [0..inf)",
    poly_label="2F1(-n, -x; beta; 1 - 1/c)",
    weight_label="(beta)_x c^x / x!",
    ranges=("beta > 0", "0 < c < 1"),
    build=_build_meixner,
    sample=lambda rng, deg: {"beta": _uniform(rng, 0.0, 3.0), "c": _uniform(rng, 0.0, 1.0)},
))

_register(FamilyDef(
    name="charlier", params=("a",), q_family=False, kind="real_shift", group="real_linear",
    eta_label="x", energy_label="n",
    operator_label="B(x) = a, D(x) = x, lattice [0..inf)",
    poly_label="2F0(-n, -x; -; -1/a)",
    weight_label="a^x / x!",
    ranges=("a > 0",),
    build=_build_charlier,
    sample=lambda rng, deg: {"a": _uniform(rng, 0.0, 3.0)},
))

_register(FamilyDef(
    name="racah", params=("a", "b", "d", "N"), q_family=False, kind="real_shift", group="real_general",
    eta_label="x(x + d)", energy_label="n(n + dt), dt = a + b + c - d - 1",
    operator_label="B(x) = -(x+a)(x+b)(x+c)(x+d)/((2x+d)(2x+1+d)), "
    "D(x) = -(x+d-a)(x+d-b)(x+d-c)x/((2x-1+d)(2x+d)), lattice [0..N]",
    poly_label="4F3(-n, n+dt, -x, x+d; a, b, c; 1)",
    weight_label="(a,b,c,d)_x / (1+d-a, 1+d-b, 1+d-c, 1)_x (2x+d)/d",
    ranges=("c = -N", "d > 0", "a > N + d", "0 < b < 1 + d", "N integer > degree"),
    build=_build_racah,
    sample=_sample_racah,
    integer_params=("N",),
    derived="c = -N",
))

_register(FamilyDef(
    name="dual_hahn", params=("a", "b", "N"), q_family=False, kind="real_shift", group="real_general",
    eta_label="x(x + a + b - 1)", energy_label="n",
    operator_label="B(x) = (x+a)(x+a+b-1)(N-x)/((2x-1+a+b)(2x+a+b)), "
    "D(x) = x(x+b-1)(x+a+b+N-1)/((2x-2+a+b)(2x-1+a+b)), lattice [0..N]",
    poly_label="3F2(-n, x+a+b-1, -x; a, -N; 1)",
    weight_label="N!/(x!(N-x)!) (a)_x (2x+a+b-1)(a+b)_N / ((b)_x (x+a+b-1)_{N+1})",
    ranges=("a > 0", "b > 0", "N integer > degree"),
    build=_build_dual_hahn,
    sample=lambda rng, deg: {"a": _uniform(rng, 0, 3.0), "b": _uniform(rng, 0, 3.0), "N": _draw_lattice(rng, deg)},
    integer_params=("N",),
))


# eta = q^-x - 1


def _qlin(q, N=None, **kw):
    out = dict(coordinate=Coordinate("q^-x-1", q=q), **kw)
    if N is not None:
        out["lattice"] = N
    return out


def _build_q_hahn(p, q):
    a, b, N = p["a"], p["b"], p["N"]
    Q = lambda x: _qpow(q, x)
    return _qlin(
        q, N,
        energy=lambda n: (q ** (-n) - 1) * (1 - a * b * q ** (n - 1)),
        poly=lambda n, x: hyp_phi([q ** (-n), a * b * q ** (n - 1), Q(-x)], [a, q ** (-N)], q, q, n),
        operator=_lattice_op(
            lambda x: (1 - a * Q(x)) * (Q(x - N) - 1),
            lambda x: a / q * (1 - Q(x)) * (Q(x - N) - b),
        ),
    )


def _build_quantum_q_krawtchouk(p, q):
    pp, N = p["p"], p["N"]
    Q = lambda x: _qpow(q, x)
    return _qlin(
        q, N,
        energy=lambda n: 1 - q**n,
        poly=lambda n, x: hyp_phi([q ** (-n), Q(-x)], [q ** (-N)], q, pp * q ** (n + 1), n),
        operator=_lattice_op(
            lambda x: Q(x) / pp * (Q(x - N) - 1),
            lambda x: (1 - Q(x)) * (1 - Q(x - N - 1) / pp),
        ),
    )


def _build_q_krawtchouk(p, q):
    pp, N = p["p"], p["N"]
    Q = lambda x: _qpow(q, x)
    return _qlin(
        q, N,
        energy=lambda n: (q ** (-n) - 1) * (1 + pp * q**n),
        poly=lambda n, x: hyp_phi([q ** (-n), Q(-x), -pp * q**n], [q ** (-N), 0.0], q, q, n),
        operator=_lattice_op(lambda x: Q(x - N) - 1, lambda x: pp * (1 - Q(x))),
    )


def _build_affine_q_krawtchouk(p, q):
    pp, N = p["p"], p["N"]
    Q = lambda x: _qpow(q, x)
    return _qlin(
        q, N,
        energy=lambda n: q ** (-n) - 1,
        poly=lambda n, x: hyp_phi([q ** (-n), Q(-x), 0.0], [pp * q, q ** (-N)], q, q, n),
        operator=_lattice_op(
            lambda x: (Q(x - N) - 1) * (1 - pp * Q(x + 1)),
            lambda x: pp * Q(x - N) * (1 - Q(x)),
        ),
    )


def _build_q_meixner(p, q):
    b, c = p["b"], p["c"]
    Q = lambda x: _qpow(q, x)
    return _qlin(
        q,
        energy=lambda n: 1 - q**n,
        poly=lambda n, x: hyp_phi([q ** (-n), Q(-x)], [b * q], q, -(q ** (n + 1)) / c, n),
        operator=_lattice_op(
            lambda x: c * Q(x) * (1 - b * Q(x + 1)),
            lambda x: (1 - Q(x)) * (1 + b * c * Q(x)),
        ),
    )


def _build_al_salam_carlitz_2(p, q):
    a = p["a"]
    Q = lambda x: _qpow(q, x)
    return _qlin(
        q,
        energy=lambda n: 1 - q**n,
        poly=lambda n, x: hyp_phi([q ** (-n), Q(-x)], [], q, q**n / a, n),
        operator=_lattice_op(lambda x: a * Q(2 * x + 1), lambda x: (1 - Q(x)) * (1 - a * Q(x))),
    )


def _build_q_charlier(p, q):
    a = p["a"]
    Q = lambda x: _qpow(q, x)
    return _qlin(
        q,
        energy=lambda n: 1 - q**n,
        poly=lambda n, x: hyp_phi([q ** (-n), Q(-x)], [0.0], q, -(q ** (n + 1)) / a, n),
        operator=_lattice_op(lambda x: a * Q(x), lambda x: 1 - Q(x)),
    )


_QLIN = "eta = q^-x - 1"


def _sample_with_q(draw):
    def sample(rng, deg):
        q = _draw_q(rng, lattice=True)
        out = draw(rng, deg, q)
        out["q"] = q
        return out

    return sample


_register(FamilyDef(
    name="q_hahn", params=("a", "b", "N"), q_family=True, kind="real_shift", group="real_general",
    eta_label="q^-x - 1", energy_label="(q^-n - 1)(1 - ab q^(n-1))",
    operator_label="B(x) = (1 - a q^x)(q^(x-N) - 1), D(x) = a q^-1 (1 - q^x)(q^(x-N) - b), lattice [0..N]",
    poly_label="3phi2(q^-n, ab q^(n-1), q^-x; a, q^-N; q; q)",
    weight_label="(q;q)_N / ((q;q)_x (q;q)_{N-x}) (a;q)_x (b;q)_{N-x} / ((b;q)_N a^x)",
    ranges=("0 < a < 1", "0 < b < 1", "N integer > degree", "0 < q < 1"),
    build=_build_q_hahn,
    sample=_sample_with_q(lambda rng, deg, q: {
        "a": _uniform(rng, _WEIGHT_FLOOR, 1), "b": _uniform(rng, 0, 1), "N": _draw_lattice(rng, deg)}),
    integer_params=("N",),
))

_register(FamilyDef(
    name="quantum_q_krawtchouk", params=("p", "N"), q_family=True, kind="real_shift", group="real_general",
    eta_label="q^-x - 1", energy_label="1 - q^n",
    operator_label="B(x) = p^-1 q^x (q^(x-N) - 1), D(x) = (1 - q^x)(1 - p^-1 q^(x-N-1)), lattice [0..N]",
    poly_label="2phi1(q^-n, q^-x; q^-N; q; p q^(n+1))",
    weight_label="(q;q)_N / ((q;q)_x (q;q)_{N-x}) p^-x q^{x(x-1-N)} / (p^-1 q^-N; q)_x",
    ranges=("p > q^-N", "N integer > degree", "0 < q < 1"),
    build=_build_quantum_q_krawtchouk,
    sample=_sample_with_q(lambda rng, deg, q: (lambda N: {
        "p": q ** (-N) * _uniform(rng, 1.0, 4.0), "N": N})(_draw_lattice(rng, deg))),
    integer_params=("N",),
))

_register(FamilyDef(
    name="q_krawtchouk", params=("p", "N"), q_family=True, kind="real_shift", group="real_general",
    eta_label="q^-x - 1", energy_label="(q^-n - 1)(1 + p q^n)",
    operator_label="B(x) = q^(x-N) - 1, D(x) = p(1 - q^x), lattice [0..N]",
    poly_label="3phi2(q^-n, q^-x, -p q^n; q^-N, 0; q; q)",
    weight_label="(q;q)_N / ((q;q)_x (q;q)_{N-x}) p^-x q^{x(x-1)/2 - xN}",
    ranges=("p > 0", "N integer > degree", "0 < q < 1"),
    build=_build_q_krawtchouk,
    sample=_sample_with_q(lambda rng, deg, q: {"p": _uniform(rng, 0, 3.0), "N": _draw_lattice(rng, deg)}),
    integer_params=("N",),
))

_register(FamilyDef(
    name="affine_q_krawtchouk", params=("p", "N"), q_family=True, kind="real_shift", group="real_general",
    eta_label="q^-x - 1", energy_label="q^-n - 1",
    operator_label="B(x) = (q^(x-N) - 1)(1 - p q^(x+1)), D(x) = p q^(x-N) (1 - q^x), lattice [0..N]",
    poly_label="3phi2(q^-n, q^-x, 0; pq, q^-N; q; q)",
    weight_label="(q;q)_N / ((q;q)_x (q;q)_{N-x}) (pq;q)_x / (pq)^x",
    ranges=("0 < p < q^-1", "N integer > degree", "0 < q < 1"),
    build=_build_affine_q_krawtchouk,
    sample=_sample_with_q(lambda rng, deg, q: {"p": _uniform(rng, 0, 1 / q), "N": _draw_lattice(rng, deg)}),
    integer_params=("N",),
))

_register(FamilyDef(
    name="q_meixner", params=("b", "c"), q_family=True, kind="real_shift", group="real_general",
    eta_label="q^-x - 1", energy_label="1 - q^n",
    operator_label="B(x) = c q^x (1 - b q^(x+1)), D(x) = (1 - q^x)(1 + bc q^x), lattice [0..inf)",
    poly_label="2phi1(q^-n, q^-x; bq; q; -c^-1 q^(n+1))",
    weight_label="(bq;q)_x / (q, -bcq; q)_x c^x q^{x(x-1)/2}",
    ranges=("0 < b < q^-1", "c > 0", "0 < q < 1"),
    build=_build_q_meixner,
    sample=_sample_with_q(lambda rng, deg, q: {"b": _uniform(rng, 0, 1 / q), "c": _uniform(rng, 0, 3.0)}),
))

_register(FamilyDef(
    name="al_salam_carlitz_2", params=("a",), q_family=True, kind="real_shift", group="real_general",
    eta_label="q^-x - 1", energy_label="1 - q^n",
    operator_label="B(x) = a q^(2x+1), D(x) = (1 - q^x)(1 - a q^x), lattice [0..inf)",
    poly_label="2phi0(q^-n, q^-x; -; q; a^-1 q^n)",
    weight_label="a^x q^{x^2} / (q, aq; q)_x",
    ranges=("0 < a < q^-1", "0 < q < 1"),
    build=_build_al_salam_carlitz_2,
    sample=_sample_with_q(lambda rng, deg, q: {"a": _uniform(rng, 0, 1 / q)}),
))

_register(FamilyDef(
    name="q_charlier", params=("a",), q_family=True, kind="real_shift", group="real_general",
    eta_label="q^-x - 1", energy_label="1 - q^n",
    operator_label="B(x) = a q^x, D(x) = 1 - q^x, lattice [0..inf)",
    poly_label="2phi1(q^-n, q^-x; 0; q; -a^-1 q^(n+1))",
    weight_label="a^x q^{x(x-1)/2} / (q;q)_x",
    ranges=("a > 0", "0 < q < 1"),
    build=_build_q_charlier,
    sample=_sample_with_q(lambda rng, deg, q: {"a": _uniform(rng, 0, 3.0)}),
))


# eta = 1 - q^x


def _build_little_q_jacobi(p, q):
    a, b = p["a"], p["b"]
    Q = lambda x: _qpow(q, x)

    def poly(n, x):
        pre = (-a) ** (-n) * q ** (-n * (n + 1) / 2) * q_pochhammer(a * q, q, n) / q_pochhammer(b * q, q, n)
        return pre * hyp_phi([q ** (-n), a * b * q ** (n + 1)], [a * q], q, Q(x + 1), n)

    return dict(
        coordinate=Coordinate("1-q^x", q=q),
        energy=lambda n: (q ** (-n) - 1) * (1 - a * b * q ** (n + 1)),
        poly=poly,
        operator=_lattice_op(lambda x: a * (Q(-x) - b * q), lambda x: Q(-x) - 1),
    )


def _build_little_q_laguerre(p, q):
    a = p["a"]
    Q = lambda x: _qpow(q, x)
    return dict(
        coordinate=Coordinate("1-q^x", q=q),
        energy=lambda n: q ** (-n) - 1,
        poly=lambda n, x: hyp_phi([q ** (-n), Q(-x)], [], q, Q(x) / a, n),
        operator=_lattice_op(lambda x: a * Q(-x), lambda x: Q(-x) - 1),
    )


def _build_alternative_q_charlier(p, q):
    a = p["a"]
    Q = lambda x: _qpow(q, x)
    return dict(
        coordinate=Coordinate("1-q^x", q=q),
        energy=lambda n: (q ** (-n) - 1) * (1 + a * q**n),
        poly=lambda n, x: Q(n * x) * hyp_phi([q ** (-n), Q(-x)], [0.0], q, -(q ** (1 - n)) / a, n),
        operator=_lattice_op(lambda x: a + 0 * x, lambda x: Q(-x) - 1),
    )


_register(FamilyDef(
    name="little_q_jacobi", params=("a", "b"), q_family=True, kind="real_shift", group="real_general",
    eta_label="1 - q^x", energy_label="(q^-n - 1)(1 - ab q^(n+1))",
    operator_label="B(x) = a(q^-x - bq), D(x) = q^-x - 1, lattice [0..inf)",
    poly_label="(-a)^-n q^{-n(n+1)/2} (aq;q)_n / (bq;q)_n 2phi1(q^-n, ab q^(n+1); aq; q; q^(x+1))",
    weight_label="(bq;q)_x / (q;q)_x (aq)^x",
    ranges=("0 < a < q^-1", "0 < b < q^-1", "0 < q < 1"),
    build=_build_little_q_jacobi,
    sample=_sample_with_q(lambda rng, deg, q: {
        "a": _uniform(rng, _WEIGHT_FLOOR, 1 / q), "b": _uniform(rng, 0, 1 / q)}),
))

_register(FamilyDef(
    name="little_q_laguerre", params=("a",), q_family=True, kind="real_shift", group="real_general",
    eta_label="1 - q^x", energy_label="q^-n - 1",
    operator_label="B(x) = a q^-x, D(x) = q^-x - 1, lattice [0..inf)",
    poly_label="2phi0(q^-n, q^-x; -; q; a^-1 q^x)",
    weight_label="(aq)^x / (q;q)_x",
    ranges=("0 < a < q^-1", "0 < q < 1"),
    build=_build_little_q_laguerre,
    sample=_sample_with_q(lambda rng, deg, q: {"a": _uniform(rng, 0, 1 / q)}),
))

_register(FamilyDef(
    name="alternative_q_charlier", params=("a",), q_family=True, kind="real_shift", group="real_general",
    eta_label="1 - q^x", energy_label="(q^-n - 1)(1 + a q^n)",
    operator_label="B(x) = a, D(x) = q^-x - 1, lattice [0..inf)",
    poly_label="q^{nx} 2phi1(q^-n, q^-x; 0; q; -a^-1 q^(-n+1))",
    weight_label="a^x q^{x(x+1)/2} / (q;q)_x",
    ranges=("a > 0", "0 < q < 1"),
    build=_build_alternative_q_charlier,
    sample=_sample_with_q(lambda rng, deg, q: {"a": _uniform(rng, 0, 3.0)}),
))


# eta bilinear in q^-x and q^x


def _build_q_racah(p, q):
    a, b, d, N = p["a"], p["b"], p["d"], p["N"]
    c = q ** (-N)
    dt = a * b * c / (d * q)
    Q = lambda x: _qpow(q, x)

    def B(x):
        return -(1 - a * Q(x)) * (1 - b * Q(x)) * (1 - c * Q(x)) * (1 - d * Q(x)) / (
            (1 - d * Q(2 * x)) * (1 - d * Q(2 * x + 1))
        )

    def D(x):
        return -dt * (1 - d / a * Q(x)) * (1 - d / b * Q(x)) * (1 - d / c * Q(x)) * (1 - Q(x)) / (
            (1 - d * Q(2 * x - 1)) * (1 - d * Q(2 * x))
        )

    dens = [
        ("1 - d q^2x", lambda x: 1 - d * Q(2 * x)),
        ("1 - d q^(2x+1)", lambda x: 1 - d * Q(2 * x + 1)),
        ("1 - d q^(2x-1)", lambda x: 1 - d * Q(2 * x - 1)),
    ]
    return dict(
        coordinate=Coordinate("bilinear", q=q, A=d),
        lattice=N,
        energy=lambda n: (q ** (-n) - 1) * (1 - dt * q**n),
        poly=lambda n, x: hyp_phi([q ** (-n), dt * q**n, Q(-x), d * Q(x)], [a, b, c], q, q, n),
        operator=_lattice_op(B, D, dens),
    )


def _build_dual_q_hahn(p, q):
    a, b, N = p["a"], p["b"], p["N"]
    Q = lambda x: _qpow(q, x)
    ab = a * b

    def B(x):
        return (Q(x - N) - 1) * (1 - a * Q(x)) * (1 - ab * Q(x - 1)) / (
            (1 - ab * Q(2 * x - 1)) * (1 - ab * Q(2 * x))
        )

    def D(x):
        return a * Q(x - N - 1) * (1 - Q(x)) * (1 - ab * Q(x + N - 1)) * (1 - b * Q(x - 1)) / (
            (1 - ab * Q(2 * x - 2)) * (1 - ab * Q(2 * x - 1))
        )

    dens = [
        ("1 - ab q^(2x-1)", lambda x: 1 - ab * Q(2 * x - 1)),
        ("1 - ab q^2x", lambda x: 1 - ab * Q(2 * x)),
        ("1 - ab q^(2x-2)", lambda x: 1 - ab * Q(2 * x - 2)),
    ]
    return dict(
        coordinate=Coordinate("bilinear", q=q, A=ab / q),
        lattice=N,
        energy=lambda n: q ** (-n) - 1,
        poly=lambda n, x: hyp_phi([q ** (-n), ab * Q(x - 1), Q(-x)], [a, q ** (-N)], q, q, n),
        operator=_lattice_op(B, D, dens),
    )


def _sample_q_racah(rng, deg):
    q = _draw_q(rng, lattice=True)
    N = _draw_lattice(rng, deg)
    d = _uniform(rng, 0, 1)
    a = _uniform(rng, 0, q**N * d)
    b = _uniform(rng, q * d, 1)
    return {"a": a, "b": b, "d": d, "N": N, "q": q}


def _check_q_racah(c: _Checker, p, q):
    N, a, b, d = p["N"], p["a"], p["b"], p["d"]
    c.require(0 < d < 1, "0 < d < 1")
    c.require(0 < a < q**N * d, "0 < a < q^N d")
    c.require(q * d < b < 1, "q d < b < 1")


_register(FamilyDef(
    name="q_racah", params=("a", "b", "d", "N"), q_family=True, kind="real_shift", group="real_general",
    eta_label="(q^-x - 1)(1 - d q^x)", energy_label="(q^-n - 1)(1 - dt q^n), dt = abc d^-1 q^-1",
    operator_label="B(x) = -(1-aq^x)(1-bq^x)(1-cq^x)(1-dq^x)/((1-dq^2x)(1-dq^(2x+1))), "
    "D(x) = -dt (1-a^-1 d q^x)(1-b^-1 d q^x)(1-c^-1 d q^x)(1-q^x)/((1-dq^(2x-1))(1-dq^2x)), lattice [0..N]",
    poly_label="4phi3(q^-n, dt q^n, q^-x, d q^x; a, b, c; q; q)",
    weight_label="(a,b,c,d;q)_x / ((a^-1dq, b^-1dq, c^-1dq, q;q)_x dt^x) (1-dq^2x)/(1-d)",
    ranges=("c = q^-N", "0 < d < 1", "0 < a < q^N d", "q d < b < 1", "N integer > degree", "0 < q < 1"),
    build=_build_q_racah,
    sample=_sample_q_racah,
    integer_params=("N",),
    derived="c = q^-N",
))

_register(FamilyDef(
    name="dual_q_hahn", params=("a", "b", "N"), q_family=True, kind="real_shift", group="real_general",
    eta_label="(q^-x - 1)(1 - ab q^(x-1))", energy_label="q^-n - 1",
    operator_label="B(x) = (q^(x-N)-1)(1-aq^x)(1-abq^(x-1))/((1-abq^(2x-1))(1-abq^2x)), "
    "D(x) = a q^(x-N-1)(1-q^x)(1-abq^(x+N-1))(1-bq^(x-1))/((1-abq^(2x-2))(1-abq^(2x-1))), lattice [0..N]",
    poly_label="3phi2(q^-n, ab q^(x-1), q^-x; a, q^-N; q; q)",
    weight_label="(q;q)_N/((q;q)_x (q;q)_{N-x}) (a, abq^-1; q)_x / ((abq^N, b; q)_x a^x) (1-abq^(2x-1))/(1-abq^-1)",
    ranges=("0 < a < 1", "0 < b < 1", "N integer > degree", "0 < q < 1"),
    build=_build_dual_q_hahn,
    sample=_sample_with_q(lambda rng, deg, q: {
        "a": _uniform(rng, _WEIGHT_FLOOR, 1), "b": _uniform(rng, 0, 1), "N": _draw_lattice(rng, deg)}),
    integer_params=("N",),
))


# ---------------------------------------------------------------------------
# range checks for the simple families


def _positive(*keys):
    def check(c: _Checker, p, q=None):
        for k in keys:
            c.require(p[k] > 0, f"{k} > 0")

    return check


def _open(key, lo, hi, lo_label, hi_label):
    def check(c: _Checker, p, q=None):
        lo_v = lo(q) if callable(lo) else lo
        hi_v = hi(q) if callable(hi) else hi
        c.require(lo_v < p[key] < hi_v, f"{lo_label} < {key} < {hi_label}")

    return check


def _at_least(key, bound, label):
    def check(c: _Checker, p, q=None):
        c.require(p[key] >= bound, f"{key} >= {label}")

    return check


def _nonzero(key):
    def check(c: _Checker, p, q=None):
        c.require(p[key] != 0, f"{key} != 0")

    return check


_inv_q = lambda q: 1 / q

_CHECKS: dict[str, list] = {
    "hermite": [],
    "laguerre": [lambda c, p, q: c.require(p["g"] > -0.5, "g > -1/2")],
    "jacobi": [
        lambda c, p, q: c.require(p["g"] > -0.5, "g > -1/2"),
        lambda c, p, q: c.require(p["h"] > -0.5, "h > -1/2"),
    ],
    "continuous_hahn": [lambda c, p, q: _check_continuous_hahn(c, p)],
    "meixner_pollaczek": [_positive("a"), _open("phi", 0, math.pi, "0", "pi")],
    "wilson": [lambda c, p, q: _check_conj_family(
        ("a1", "a2", "a3", "a4"), "{a1*, a2*, a3*, a4*} = {a1, a2, a3, a4} as a set")(c, p)],
    "continuous_dual_hahn": [lambda c, p, q: _check_conj_family(
        ("a1", "a2", "a3"), "{a1*, a2*, a3*} = {a1, a2, a3} as a set")(c, p)],
    "askey_wilson": [lambda c, p, q: _check_conj_family(
        ("a1", "a2", "a3", "a4"), "{a1*, a2*, a3*, a4*} = {a1, a2, a3, a4} as a set", "abs")(c, p),
        lambda c, p, q: c.require(all(p[k] != 0 for k in ("a1", "a2", "a3", "a4")) or True, "")],
    "continuous_dual_q_hahn": [lambda c, p, q: _check_conj_family(
        ("a1", "a2", "a3"), "{a1*, a2*, a3*} = {a1, a2, a3} as a set", "abs")(c, p)],
    "al_salam_chihara": [lambda c, p, q: _check_conj_family(
        ("a1", "a2"), "{a1*, a2*} = {a1, a2} as a set", "abs")(c, p)],
    "continuous_big_q_hermite": [_open("a", -1, 1, "-1", "1"), _nonzero("a")],
    "continuous_q_hermite": [],
    "continuous_q_jacobi": [_at_least("alpha", -0.5, "-1/2"), _at_least("beta", -0.5, "-1/2")],
    "continuous_q_laguerre": [_at_least("alpha", -0.5, "-1/2")],
    "hahn": [_positive("a", "b")],
    "krawtchouk": [_open("p", 0, 1, "0", "1")],
    "meixner": [_positive("beta"), _open("c", 0, 1, "0", "1")],
    "charlier": [_positive("a")],
    "racah": [lambda c, p, q: _check_racah(c, p)],
    "dual_hahn": [_positive("a", "b")],
    "q_hahn": [_open("a", 0, 1, "0", "1"), _open("b", 0, 1, "0", "1")],
    "quantum_q_krawtchouk": [lambda c, p, q: c.require(p["p"] > q ** (-p["N"]), "p > q^-N")],
    "q_krawtchouk": [_positive("p")],
    "affine_q_krawtchouk": [_open("p", 0, _inv_q, "0", "q^-1")],
    "q_meixner": [_open("b", 0, _inv_q, "0", "q^-1"), _positive("c")],
    "al_salam_carlitz_2": [_open("a", 0, _inv_q, "0", "q^-1")],
    "q_charlier": [_positive("a")],
    "little_q_jacobi": [_open("a", 0, _inv_q, "0", "q^-1"), _open("b", 0, _inv_q, "0", "q^-1")],
    "little_q_laguerre": [_open("a", 0, _inv_q, "0", "q^-1")],
    "alternative_q_charlier": [_positive("a")],
    "q_racah": [lambda c, p, q: _check_q_racah(c, p, q)],
    "dual_q_hahn": [_open("a", 0, 1, "0", "1"), _open("b", 0, 1, "0", "1")],
}


# ---------------------------------------------------------------------------
# resolution


def _coerce(fdef: FamilyDef, key: str, value) -> complex | float | int:
    if isinstance(value, str):
        value = parse_number(value)
    if key in fdef.integer_params:
        v = complex(value)
        if v.imag != 0 or v.real != round(v.real):
            raise ParameterRangeError(f"{fdef.name}: parameter range violated: {key} must be an integer")
        return int(round(v.real))
    v = complex(value)
    if key in fdef.complex_params:
        return v if v.imag != 0 else v.real
    if v.imag != 0:
        raise ParameterRangeError(f"{fdef.name}: parameter range violated: {key} must be real")
    return v.real


def parse_number(text: str) -> complex:
    """Parse ``1.5``, ``-2``, ``0.2+0.1i`` or ``0.3-0.4j``."""
    t = text.strip().replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    try:
        v = complex(t)
    except ValueError:
        raise ParameterError(f"cannot parse number {text!r}") from None
    return v.real if v.imag == 0 else v


def resolve_family(name: str, raw_params: Mapping[str, object] | None = None) -> FamilySpec:
    """Validate ``raw_params`` for family ``name`` and build its :class:`FamilySpec`.

    ``raw_params`` may carry ``q`` for q-families. Raises subclasses of
    :class:`ParameterError` naming the violated constraint.
    """
    if name not in REGISTRY:
        raise UnknownFamilyError(f"unknown family {name!r}; known: {', '.join(REGISTRY)}")
    fdef = REGISTRY[name]
    raw = dict(raw_params or {})

    q = raw.pop("q", None)
    if fdef.q_family:
        if q is None:
            raise MissingParameterError(f"{name}: missing parameter q (0 < q < 1)")
        qv = _coerce(fdef, "q", q)
        if not 0 < qv < 1:
            raise ParameterRangeError(f"{name}: parameter range violated: 0 < q < 1")
        q = float(qv)
    elif q is not None:
        raise ExtraParameterError(f"{name}: unexpected parameter q (not a q-family)")

    values: dict[str, object] = {}
    for key, value in raw.items():
        if key in fdef.params:
            target, conv = key, None
        elif key in fdef.aliases:
            target, conv = fdef.aliases[key]
        else:
            allowed = ", ".join(fdef.params) or "none"
            raise ExtraParameterError(f"{name}: unexpected parameter {key!r} (parameters: {allowed})")
        if target in values:
            raise ExtraParameterError(f"{name}: parameter {target!r} given twice")
        v = _coerce(fdef, target, value)
        values[target] = conv(v) if conv else v

    checker = _Checker(name)
    present = set(values)
    # Range constraints touching only supplied parameters are checked first so
    # that the reported error names the violated constraint.
    for check in _CHECKS[name]:
        try:
            check(checker, values, q)
        except KeyError:
            pass
    missing = [k for k in fdef.params if k not in present]
    if missing:
        raise MissingParameterError(f"{name}: missing parameter(s) {', '.join(missing)}")

    pset = ParamSet(name, dict(values), q)
    parts = fdef.build(values, q)
    lattice = parts.get("lattice")
    coord = parts["coordinate"]
    if lattice is not None:
        max_degree = min(DEFAULT_MAX_DEGREE, lattice - 1)
        zero_domain = (0.0, float(np.real(coord(float(lattice)))))
    else:
        max_degree = DEFAULT_MAX_DEGREE
        zero_domain = parts.get("zero_domain")
        if zero_domain is None:
            zero_domain = (0.0, coord.image()[1])
    if lattice is not None and max_degree < 1:
        raise ParameterRangeError(f"{name}: parameter range violated: N >= 2 needed for degree >= 1")
    return FamilySpec(
        name=name,
        params=pset,
        operator_kind=fdef.kind,
        coordinate=coord,
        group=fdef.group,
        energy_fn=parts["energy"],
        poly_fn=parts["poly"],
        operator_fn=parts["operator"],
        gamma=parts.get("gamma"),
        lattice=lattice,
        infinite_lattice=fdef.kind == "real_shift" and lattice is None,
        max_degree=max_degree,
        zero_domain=zero_domain,
        scale_hint=parts.get("scale_hint", 1.0),
        **_extended_parts(fdef, values, q),
        **_multiprecision_parts(fdef, values, q),
    )


def _to_extended(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return v
    if isinstance(v, complex) and v.imag != 0:
        return np.clongdouble(v)
    return np.longdouble(np.real(v))


def _extended_parts(fdef: FamilyDef, values: dict, q) -> dict:
    """Rebuild polynomial and operator with long-double inputs so that powers
    such as ``q**-N`` are not rounded to double before use."""
    try:
        ext = {k: _to_extended(v) for k, v in values.items()}
        with np.errstate(all="ignore"):
            parts = fdef.build(ext, None if q is None else np.longdouble(q))
    except (TypeError, ValueError, ZeroDivisionError, ArithmeticError):
        return {}
    return {"poly_ext_fn": parts["poly"], "operator_ext_fn": parts["operator"]}


def _to_multiprecision(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, complex) and v.imag != 0:
        return mpmath.mpc(v.real, v.imag)
    return mpmath.mpf(float(np.real(v)))


def _multiprecision_parts(fdef: FamilyDef, values: dict, q) -> dict:
    """Polynomial rebuilt with mpmath inputs; evaluate it under ``workdps(MULTIPRECISION_DPS)``."""
    try:
        hp = {k: _to_multiprecision(v) for k, v in values.items()}
        with mpmath.workdps(MULTIPRECISION_DPS):
            parts = fdef.build(hp, None if q is None else mpmath.mpf(q))
    except (TypeError, ValueError, ZeroDivisionError, ArithmeticError):
        return {}
    return {"poly_hp_fn": parts["poly"]}


def sample_params(name: str, rng, degree: int) -> dict:
    """Draw a random valid raw parameter map (including ``q``) for ``degree``."""
    return REGISTRY[name].sample(rng, degree)


# ---------------------------------------------------------------------------
# public evaluation API


def eta(spec: FamilySpec, x):
    return spec.coordinate(x)


def eta_dot(spec: FamilySpec, x):
    return spec.coordinate.dot(x)


def eta_ddot(spec: FamilySpec, x):
    return spec.coordinate.ddot(x)


def eta_inverse(spec: FamilySpec, y: complex) -> complex:
    return spec.coordinate.inverse(y)


def energy(spec: FamilySpec, n: int) -> float:
    if n < 0:
        raise ValueError(f"energy: n must be non-negative, got {n}")
    if spec.lattice is not None and n > spec.lattice:
        raise ValueError(f"energy: n = {n} exceeds the lattice size N = {spec.lattice}")
    return float(spec.energy_fn(n))


def poly_eval(spec: FamilySpec, n: int, x: complex) -> complex:
    """``P_n(eta(x))`` from the family's terminating series (prefactors included).

    Long-double ``x`` is evaluated in long double and mpmath ``x`` in mpmath;
    both are returned unconverted.
    """
    if n < 0:
        raise ValueError(f"poly_eval: n must be non-negative, got {n}")
    if spec.lattice is not None and n >= spec.lattice:
        raise ValueError(f"poly_eval: degree {n} needs n < N = {spec.lattice}")
    if is_multiprecision(x):
        if spec.poly_hp_fn is None:
            raise ValueError(f"{spec.name}: no multiprecision evaluation available")
        return spec.poly_hp_fn(n, x)
    if is_extended(x):
        fn = spec.poly_ext_fn or spec.poly_fn
        return fn(n, x)
    return complex(spec.poly_fn(n, x))


def poly_in_eta(spec: FamilySpec, n: int, y: complex) -> complex:
    """``P_n`` as a function of the coordinate value ``y = eta(x)``."""
    return poly_eval(spec, n, spec.coordinate.preimage(y))


def operator_data(spec: FamilySpec, x: complex, guard: float = POLE_GUARD):
    """``V, V*`` (imaginary shifts), ``B, D`` (real shifts) or drift coefficients."""
    if spec.operator_ext_fn is not None and is_extended(x):
        return spec.operator_ext_fn(x, guard)
    return spec.operator_fn(x, guard)


def apply_operator(spec: FamilySpec, f: Callable[[complex], complex], x: complex, guard: float = POLE_GUARD,
                   derivs: tuple[complex, complex] | None = None) -> complex:
    """``(H~ f)(x)`` for a function ``f`` of ``x``.

    Differential kinds need ``derivs = (f'(x), f''(x))``.
    """
    data = operator_data(spec, x, guard)
    if spec.operator_kind == "differential":
        d1, d2 = derivs
        return data.second * d2 + data.first * d1
    fx = f(x)
    if spec.operator_kind == "imaginary_shift":
        g = spec.gamma
        return data.V * (f(x - 1j * g) - fx) + data.Vstar * (f(x + 1j * g) - fx)
    return data.B * (fx - f(x + 1)) + data.D * (fx - f(x - 1))


# ---------------------------------------------------------------------------
# documentation


def describe(name: str) -> dict:
    fdef = REGISTRY[name]
    params = list(fdef.params) + (["q"] if fdef.q_family else [])
    return {
        "family": name,
        "parameters": params,
        "aliases": {k: v[0] for k, v in fdef.aliases.items()},
        "ranges": list(fdef.ranges),
        "derived": fdef.derived,
        "operator_kind": fdef.kind,
        "group": fdef.group,
        "eta": fdef.eta_label,
        "energy": fdef.energy_label,
        "operator": fdef.operator_label,
        "polynomial": fdef.poly_label,
        "weight": fdef.weight_label,
    }


_GROUP_TITLES = {
    "hermite": "differential operator, eta = x",
    "laguerre": "differential operator, eta = x^2",
    "jacobi": "differential operator, eta = cos 2x",
    "imag_linear": "imaginary shifts (gamma = 1), eta = x",
    "imag_quadratic": "imaginary shifts (gamma = 1), eta = x^2",
    "imag_cos": "imaginary shifts (gamma = log q), eta = cos x",
    "real_linear": "real shifts, eta = x",
    "real_general": "real shifts, eta quadratic in x or (bi)linear in q^x",
}


def reference_markdown() -> str:
    """One table per family: parameters, ranges, eta, E(n), operator, polynomial."""
    lines = ["# Family reference", "", f"{len(REGISTRY)} registered families.", ""]
    for name in REGISTRY:
        d = describe(name)
        lines += [f"## {name}", "", "| field | value |", "|---|---|"]
        rows = [
            ("parameters", ", ".join(d["parameters"]) or "none"),
            ("ranges", "; ".join(d["ranges"]) or "none"),
            ("derived", d["derived"] or "-"),
            ("operator kind", d["operator_kind"]),
            ("group", _GROUP_TITLES[d["group"]]),
            ("eta(x)", d["eta"]),
            ("E(n)", d["energy"]),
            ("operator data", d["operator"]),
            ("P_n", d["polynomial"]),
            ("weight phi0^2 (not computed)", d["weight"]),
        ]
        if d["aliases"]:
            rows.insert(1, ("aliases", ", ".join(f"{k} -> {v}" for k, v in d["aliases"].items())))
        for k, v in rows:
            lines.append(f"| {k} | `{v}` |")
        lines.append("")
    return "\n".join(lines)
