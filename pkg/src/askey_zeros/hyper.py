"""Terminating hypergeometric and basic hypergeometric series.

Every polynomial in the registry is a finite ``rFs`` or ``r phi s`` sum, so
only the terminating case is supported. Sums are accumulated through term
ratios rather than fresh Pochhammer products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

# Magnitude below which a denominator factor counts as a structural zero.
VANISHING = 1e-300


class SeriesDomainError(ValueError):
    """A denominator Pochhammer factor vanished before the series terminated."""


@dataclass(frozen=True)
class SeriesParams:
    numerator: Sequence[complex]
    denominator: Sequence[complex]
    argument: complex
    term_count: int
    q: float | None = None

    def __post_init__(self):
        if self.term_count < 0:
            raise ValueError(f"term_count must be non-negative, got {self.term_count}")
        if self.q is not None and not 0.0 < self.q < 1.0:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")


def pochhammer(a: complex, n: int) -> complex:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``."""
    out = 1
    for k in range(n):
        out *= a + k
    return out


def q_pochhammer(a: complex, q: float, n: int) -> complex:
    """q-shifted factorial ``(a; q)_n = (1-a)(1-aq)...(1-aq^{n-1})``."""
    out = 1
    qk = 1.0
    for _ in range(n):
        out *= 1 - a * qk
        qk *= q
    return out


def _total(terms: list[complex], compensated: bool) -> complex:
    if not compensated:
        # plain summation keeps extended-precision inputs extended
        return sum(terms[1:], terms[0])
    return complex(
        math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)
    )


def hyper_F(params: SeriesParams, compensated: bool = False) -> complex:
    """Sum ``rFs(a; b; z)`` over ``k = 0..term_count``."""
    if params.q is not None:
        raise ValueError("hyper_F takes an ordinary series; use hyper_phi for q-series")
    z = params.argument
    term = 1 + 0 * z
    terms = [term]
    for k in range(params.term_count):
        den = k + 1.0
        for b in params.denominator:
            factor = b + k
            if abs(factor) < VANISHING:
                raise SeriesDomainError(
                    f"denominator parameter {b!r} gives (b)_{k + 1} = 0 before termination"
                )
            den *= factor
        num = z
        for a in params.numerator:
            num *= a + k
        term = term * num / den
        terms.append(term)
    return _total(terms, compensated)


def hyper_phi(params: SeriesParams, compensated: bool = False) -> complex:
    """Sum ``r phi s(a; b; q; z)`` over ``k = 0..term_count``.

    Each term carries ``(-1)^{(1+s-r)k} q^{(1+s-r)k(k-1)/2}``.
    """
    q = params.q
    if q is None:
        raise ValueError("hyper_phi requires q")
    r, s = len(params.numerator), len(params.denominator)
    excess = 1 + s - r
    z = params.argument
    term = 1 + 0 * z
    terms = [term]
    qk = 1.0
    for k in range(params.term_count):
        den = 1 - qk * q
        for b in params.denominator:
            factor = 1 - b * qk
            if abs(factor) < VANISHING:
                raise SeriesDomainError(
                    f"denominator parameter {b!r} gives (b;q)_{k + 1} = 0 before termination"
                )
            den *= factor
        num = z
        for a in params.numerator:
            num *= 1 - a * qk
        if excess:
            num *= (-qk) ** excess
        term = term * num / den
        terms.append(term)
        qk *= q
    return _total(terms, compensated)


def hyp_F(num: Sequence[complex], den: Sequence[complex], z: complex, n: int) -> complex:
    """Shorthand for a terminating ``rFs`` whose leading numerator is ``-n``."""
    return hyper_F(SeriesParams(tuple(num), tuple(den), z, n))


def hyp_phi(
    num: Sequence[complex], den: Sequence[complex], q: float, z: complex, n: int
) -> complex:
    """Shorthand for a terminating ``r phi s`` whose leading numerator is ``q^{-n}``."""
    return hyper_phi(SeriesParams(tuple(num), tuple(den), z, n, q))
