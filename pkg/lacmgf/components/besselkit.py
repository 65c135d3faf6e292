# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Modified Bessel functions of the first kind and the Taylor series of `log I₀(√2 λ)`."""

from __future__ import annotations

__all__: tuple[str, ...] = (
    "MAX_ORDER",
    "MAX_ARGUMENT",
    "bessel_i",
    "bessel_table",
    "log_i0_coefficients",
    "log_i0_taylor",
    "log_i0_series",
)

import fractions
import functools
import logging
import math
import typing

from lacmgf import models
from lacmgf.std import errors

_LOG: typing.Final[logging.Logger] = logging.getLogger("lacmgf.besselkit")

MAX_ORDER: typing.Final[int] = 64
MAX_ARGUMENT: typing.Final[float] = 4.0
_DEFAULT: typing.Final[models.BesselSeriesConfig] = models.BesselSeriesConfig()


def bessel_i(
    m: int, x: float, cfg: models.BesselSeriesConfig = _DEFAULT
) -> float:
    """`I_m(x) = Σ_j (x/2)^{2j+m} / (j! (j+m)!)` by its power series.

    Terms are generated by their ratio and summed with `math.fsum`. The sum
    stops once the next term drops below `cfg.tail_tolerance`; on `|x| ≤ 4`
    the remaining tail is dominated by a geometric series of ratio below 1/2.
    """
    if not 0 <= m <= MAX_ORDER:
        raise errors.DomainError(f"Bessel order {m} outside 0..{MAX_ORDER}")
    if not abs(x) <= MAX_ARGUMENT:
        raise errors.DomainError(f"Bessel argument {x!r} outside [-{MAX_ARGUMENT}, {MAX_ARGUMENT}]")

    if x == 0:
        return 1.0 if m == 0 else 0.0

    half = abs(x) / 2
    quarter = half * half
    term = half**m / math.factorial(m)
    terms = [term]
    for j in range(1, cfg.max_terms):
        term *= quarter / (j * (j + m))
        if term < cfg.tail_tolerance:
            break
        terms.append(term)

    value = math.fsum(terms)
    if x < 0 and m % 2 == 1:
        return -value
    return value


def bessel_table(
    x: float, m_max: int, cfg: models.BesselSeriesConfig = _DEFAULT
) -> tuple[float, ...]:
    """`(I_0(x), I_1(x), ..., I_{m_max}(x))`."""
    return tuple(bessel_i(m, x, cfg) for m in range(m_max + 1))


@functools.cache
def _i0_log_series(terms: int) -> tuple[fractions.Fraction, ...]:
    # I₀(√2 λ) = Σ_m u^m / (2^m (m!)²) with u = λ². Its logarithm f
    # satisfies n f_n = n a_n - Σ_{k<n} k f_k a_{n-k} (a_0 = 1).
    a = [fractions.Fraction(1, 2**m * math.factorial(m) ** 2) for m in range(terms + 1)]
    f = [fractions.Fraction(0)] * (terms + 1)
    for n in range(1, terms + 1):
        acc = n * a[n] - sum((k * f[k] * a[n - k] for k in range(1, n)), fractions.Fraction(0))
        f[n] = acc / n
    return tuple(f[1:])


def log_i0_coefficients(order: int) -> list[fractions.Fraction]:
    """Exact coefficients of `λ², λ⁴, ..., λ^order` in `log I₀(√2 λ)`."""
    if order not in (2, 4, 6, 8):
        raise errors.DomainError(f"order must be one of 2, 4, 6, 8, got {order}")
    return list(_i0_log_series(order // 2))


def log_i0_taylor(order: int) -> list[fractions.Fraction]:
    """Dense coefficients `[c_0, c_1, ..., c_order]`; the odd ones are exactly zero."""
    even = log_i0_coefficients(order)
    dense = [fractions.Fraction(0)] * (order + 1)
    for i, c in enumerate(even, start=1):
        dense[2 * i] = c
    return dense


def log_i0_series(lam: float, order: int = 8) -> float:
    """Evaluates the truncated series at `lam`."""
    coeffs = log_i0_coefficients(order)
    u = lam * lam
    return math.fsum(float(c) * u ** (i + 1) for i, c in enumerate(coeffs))
