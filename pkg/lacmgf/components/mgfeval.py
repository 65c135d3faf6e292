# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Moment generating function of `Σ_k √2 cos(2π n_k x)` over the unit interval.

Two independent evaluations are provided.

* `mgf_quadrature` averages the integrand over an equispaced grid. For a
  1-periodic entire function this is exact up to aliasing of Fourier modes
  at multiples of the grid size, which is bounded from the Bessel expansion.
* `mgf_diophantine` expands every factor as `Σ_m I_m(√2 λ) e^{2πi m n_k x}`
  and keeps the order tuples with `Σ_k m_k n_k = 0`, largest frequency first.

Both give results that do not depend on the worker count: work is cut into
fixed pieces and the partial results are reduced with `math.fsum` in order.
"""

from __future__ import annotations

__all__: tuple[str, ...] = (
    "MAX_FREQUENCY",
    "MAX_TERMS",
    "MAX_ORDER",
    "quadrature_grid",
    "auto_order",
    "mgf_quadrature",
    "mgf_diophantine",
    "mgf",
    "lambda_n",
    "evaluate_grid",
    "QuadratureRunner",
    "DiophantineRunner",
    "AutoRunner",
    "runner_for",
)

import logging
import math
import sys
import typing

import attrs
import numpy as np

from lacmgf import models
from lacmgf.components import besselkit
from lacmgf.std import boxed
from lacmgf.std import cache
from lacmgf.std import config as config_
from lacmgf.std import errors
from lacmgf.std import traits

if typing.TYPE_CHECKING:
    import collections.abc as collections

    import numpy.typing as npt

_LOG: typing.Final[logging.Logger] = logging.getLogger("lacmgf.mgfeval")

MAX_FREQUENCY: typing.Final[int] = 2**32
MAX_TERMS: typing.Final[int] = 16
MAX_ORDER: typing.Final[int] = 16

_SHARD: typing.Final[int] = 1 << 20
# Phases j * (n mod M) must stay inside int64.
_MAX_PHASE_GRID: typing.Final[int] = 2**31
# Largest |Σ m_k n_k| handled with int64 state arrays.
_INT64_SAFE: typing.Final[int] = 2**60
_EPS: typing.Final[float] = sys.float_info.epsilon
_TAUS: typing.Final[npt.NDArray[np.float64]] = np.linspace(0.05, 40.0, 800)


def _default_config() -> config_.Config:
    return config_.Config.into_dotenv()


def _check_lambda(lam: float) -> None:
    if not -1.0 <= lam <= 1.0:
        raise errors.DomainError(f"lambda must lie in [-1, 1], got {lam!r}")


# Quadrature.


def quadrature_grid(n_max: int, lam: float, oversample: int) -> tuple[int, int]:
    """`(B, M)`: the bandwidth bound `n_N (1 + 2⌈√2|λ|e⌉)` and grid size `oversample · B`."""
    reach = math.ceil(math.sqrt(2) * abs(lam) * math.e)
    bandwidth = n_max * (1 + 2 * reach)
    return bandwidth, oversample * bandwidth


def _aliasing_log_bound(terms: tuple[int, ...], x: float, grid: int) -> float:
    """Log of a bound on `Σ_{j≠0} |f̂(jM)|`.

    For any `τ > 0`, `|f̂(r)| ≤ e^{-τ r / n_N} Π_k g_k(τ)` with
    `g_k(τ) ≤ I₀(|x|) (2 exp(|x| e^{τ n_k / n_N} / 2) - 1)`, using
    `I_m(y) ≤ (y/2)^m / m! · I₀(y)`. The bound is minimised over a τ grid.
    """
    ax = abs(x)
    n_max = terms[-1]
    ratios = np.array([n / n_max for n in terms], dtype=np.float64)
    rate = grid / n_max

    a = (ax / 2) * np.exp(_TAUS[:, None] * ratios[None, :])
    log_g = math.log(besselkit.bessel_i(0, ax)) + a + np.log(2 - np.exp(-a))
    total = (
        log_g.sum(axis=1)
        - _TAUS * rate
        + np.log(2.0)
        - np.log(-np.expm1(-_TAUS * rate))
    )
    return float(total.min())


def _integrand_sum(
    terms: tuple[int, ...], x: float, grid: int, start: int, stop: int
) -> float:
    j = np.arange(start, stop, dtype=np.int64)
    total = np.zeros(stop - start, dtype=np.float64)
    step = 2 * math.pi / grid
    for n in terms:
        phase = (j * (n % grid)) % grid
        total += np.cos(phase * step)
    return float(np.sum(np.exp(x * total)))


def mgf_quadrature(
    seq: models.LacunarySequence,
    lam: float,
    oversample: int | None = None,
    *,
    config: config_.Config | None = None,
    threads: int | None = None,
) -> models.MgfEstimate:
    """Equispaced average of `exp(λ Σ √2 cos(2π n_k x))` over `oversample · B` points."""
    config = config or _default_config()
    oversample = config.OVERSAMPLE if oversample is None else oversample
    threads = config.THREADS if threads is None else threads

    _check_lambda(lam)
    if oversample < 4:
        raise errors.DomainError(f"oversample must be at least 4, got {oversample}")
    if seq.max_frequency > MAX_FREQUENCY:
        raise errors.Infeasible(
            f"quadrature needs n_N ≤ 2^32, got n_N = {boxed.fmt_brief(seq.max_frequency)}",
            required=seq.max_frequency,
            limit=MAX_FREQUENCY,
        )

    if lam == 0:
        return models.MgfEstimate.from_value(
            1.0,
            method=models.Method.QUADRATURE,
            error_bound=0.0,
            lam=lam,
            N=seq.N,
            metadata={"grid_points": 1, "bandwidth": 0, "oversample": oversample},
        )

    bandwidth, grid = quadrature_grid(seq.max_frequency, lam, oversample)
    limit = min(config.MAX_GRID, _MAX_PHASE_GRID)
    if grid > limit:
        raise errors.Infeasible(
            f"quadrature grid of {grid} points exceeds the limit of {limit} "
            f"(LACMGF_MAX_GRID); n_N = {boxed.fmt_brief(seq.max_frequency)}",
            required=grid,
            limit=limit,
        )

    x = math.sqrt(2) * lam
    _LOG.debug(
        "quadrature N=%d lambda=%r bandwidth=%d grid=%d threads=%d",
        seq.N,
        lam,
        bandwidth,
        grid,
        threads,
    )

    pieces = boxed.spawn(
        lambda piece: _integrand_sum(seq.terms, x, grid, *piece),
        boxed.shards(grid, _SHARD),
        threads=threads,
    )
    value = math.fsum(pieces) / grid

    log_alias = _aliasing_log_bound(seq.terms, x, grid)
    alias = math.exp(log_alias) if log_alias > -700 else 0.0
    if alias > value / 2:
        raise errors.Infeasible(
            f"aliasing bound {alias:.3g} is not small against {value:.3g}; raise the oversample"
        )
    rounding = (math.log2(grid) + 4 * seq.N * (1 + abs(x)) + 4) * _EPS
    error_bound = 2 * alias / value + rounding

    return models.MgfEstimate.from_value(
        value,
        method=models.Method.QUADRATURE,
        error_bound=error_bound,
        lam=lam,
        N=seq.N,
        metadata={"grid_points": grid, "bandwidth": bandwidth, "oversample": oversample},
    )


# Diophantine expansion.


def auto_order(x: float, tail_tol: float) -> int:
    """Smallest order `m ≥ 1` with `I_{m+1}(|x|) ≤ tail_tol`, capped at `MAX_ORDER`."""
    for m in range(1, MAX_ORDER + 1):
        if besselkit.bessel_i(m + 1, abs(x)) <= tail_tol:
            return m
    return MAX_ORDER


def _bessel_tail(x: float, m_max: int) -> float:
    """`2 Σ_{m > m_max} I_m(|x|)`."""
    top = min(besselkit.MAX_ORDER, m_max + 40)
    return 2 * math.fsum(besselkit.bessel_i(m, abs(x)) for m in range(m_max + 1, top + 1))


@attrs.frozen(kw_only=True, weakref_slot=False)
class _Expansion:
    frequencies: tuple[int, ...]
    """Largest first."""
    reach: tuple[int, ...]
    """`reach[d]`: largest `|P|` that can still be cancelled after `d` frequencies are assigned."""
    orders: tuple[int, ...]
    weights: tuple[float, ...]
    budget: int
    dense: bool


def _layer_dense(
    keys: npt.NDArray[np.int64],
    values: npt.NDArray[np.float64],
    n: int,
    reach: int,
    orders: npt.NDArray[np.int64],
    weights: npt.NDArray[np.float64],
    budget: int,
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    if keys.size * orders.size > 8 * budget:
        raise errors.Infeasible(
            f"Diophantine expansion would visit {keys.size * orders.size} states, "
            f"budget is {budget} (LACMGF_MEMO_BUDGET)",
            required=keys.size * orders.size,
            limit=budget,
        )

    new_keys = (keys[:, None] + orders[None, :] * n).ravel()
    new_values = (values[:, None] * weights[None, :]).ravel()
    keep = np.abs(new_keys) <= reach
    new_keys, new_values = new_keys[keep], new_values[keep]

    unique, inverse = np.unique(new_keys, return_inverse=True)
    if unique.size > budget:
        raise errors.Infeasible(
            f"Diophantine expansion needs {unique.size} partial sums, "
            f"budget is {budget} (LACMGF_MEMO_BUDGET)",
            required=int(unique.size),
            limit=budget,
        )
    return unique, np.bincount(inverse.ravel(), weights=new_values, minlength=unique.size)


def _layer_sparse(
    layer: cache.Memory[int, float],
    n: int,
    reach: int,
    orders: tuple[int, ...],
    weights: tuple[float, ...],
    budget: int,
) -> cache.Memory[int, float]:
    out: cache.Memory[int, float] = cache.Memory(budget, name="Diophantine expansion")
    for partial, value in layer.items():
        for m, w in zip(orders, weights):
            key = partial + m * n
            if abs(key) <= reach:
                out.add(key, value * w)
    return out


def _expand_root(expansion: _Expansion, m: int, weight: float) -> tuple[float, int]:
    """Sum of all completions of the root choice `m` for the largest frequency.

    Returns the null-sum weight and the largest layer size seen.
    """
    start = m * expansion.frequencies[0]
    rest = zip(expansion.frequencies[1:], expansion.reach[2:])
    peak = 1

    if expansion.dense:
        keys = np.array([start], dtype=np.int64)
        values = np.array([weight], dtype=np.float64)
        orders = np.array(expansion.orders, dtype=np.int64)
        weights = np.array(expansion.weights, dtype=np.float64)
        for n, reach in rest:
            keys, values = _layer_dense(
                keys, values, n, reach, orders, weights, expansion.budget
            )
            peak = max(peak, int(keys.size))
            if not keys.size:
                return 0.0, peak
        hit = np.flatnonzero(keys == 0)
        return (float(values[hit[0]]) if hit.size else 0.0), peak

    layer: cache.Memory[int, float] = cache.Memory(expansion.budget, name="Diophantine expansion")
    layer.put(start, weight)
    for n, reach in rest:
        layer = _layer_sparse(layer, n, reach, expansion.orders, expansion.weights, expansion.budget)
        peak = max(peak, len(layer))
        if not layer:
            return 0.0, peak
    _LOG.debug("root order %d finished with %s", m, layer.view())
    return layer.get(0, 0.0), peak


def mgf_diophantine(
    seq: models.LacunarySequence,
    lam: float,
    m_max: int | None = None,
    tail_tol: float | None = None,
    *,
    config: config_.Config | None = None,
    threads: int | None = None,
) -> models.MgfEstimate:
    """`Σ Π_k I_{|m_k|}(√2 λ)` over order tuples `|m_k| ≤ m_max` with `Σ_k m_k n_k = 0`.

    Frequencies are assigned largest first. After `d` of them are fixed, a
    partial sum `P` survives only while `|P| ≤ m_max · Σ_{remaining} n_k`, and
    equal partial sums at the same depth are merged. `m_max=None` picks the
    smallest order whose next Bessel term is below `tail_tol`.
    """
    config = config or _default_config()
    tail_tol = config.TAIL_TOL if tail_tol is None else tail_tol
    threads = config.THREADS if threads is None else threads

    _check_lambda(lam)
    if seq.N > MAX_TERMS:
        raise errors.Infeasible(
            f"Diophantine expansion supports N ≤ {MAX_TERMS}, got N = {seq.N}",
            required=seq.N,
            limit=MAX_TERMS,
        )

    x = math.sqrt(2) * lam
    if m_max is None:
        m_max = auto_order(x, tail_tol)
    if not 0 <= m_max <= MAX_ORDER:
        raise errors.Infeasible(
            f"Diophantine order cap must lie in 0..{MAX_ORDER}, got m_max = {m_max} "
            "(orders past 8 are kept so |λ| up to 1 stays within 1e-9 of quadrature)",
            required=m_max,
            limit=MAX_ORDER,
        )

    if lam == 0:
        return models.MgfEstimate.from_value(
            1.0,
            method=models.Method.DIOPHANTINE,
            error_bound=0.0,
            lam=lam,
            N=seq.N,
            metadata={"m_max": m_max, "max_states": 1, "roots": 1},
        )

    table = besselkit.bessel_table(x, m_max)
    orders = tuple(range(-m_max, m_max + 1))
    weights = tuple(table[abs(m)] for m in orders)

    frequencies = tuple(reversed(seq.terms))
    reach = [m_max * sum(frequencies[d:]) for d in range(len(frequencies) + 1)]
    expansion = _Expansion(
        frequencies=frequencies,
        reach=tuple(reach),
        orders=orders,
        weights=weights,
        budget=config.MEMO_BUDGET,
        dense=2 * reach[0] < _INT64_SAFE and seq.max_frequency < _INT64_SAFE,
    )

    roots = [
        (m, w)
        for m, w in zip(orders, weights)
        if abs(m * frequencies[0]) <= reach[1] and w != 0.0
    ]
    _LOG.debug(
        "diophantine N=%d lambda=%r m_max=%d roots=%d dense=%s threads=%d",
        seq.N,
        lam,
        m_max,
        len(roots),
        expansion.dense,
        threads,
    )

    results = boxed.spawn(lambda root: _expand_root(expansion, *root), roots, threads=threads)
    value = math.fsum(v for v, _ in results)
    peak = max((p for _, p in results), default=1)

    if not value > 0:
        raise errors.Infeasible(
            f"Diophantine expansion lost positivity at m_max = {m_max}; raise --m-max"
        )

    # Every dropped tuple has some |m_k| > m_max; the other factors sum to at most e^{|x|}.
    truncation = seq.N * _bessel_tail(x, m_max) * math.exp(abs(x) * (seq.N - 1))
    if truncation >= value / 2:
        truncation_log = math.log(2) + math.log(truncation) - math.log(value)
    else:
        truncation_log = 2 * truncation / value
    rounding = (seq.N + 4) * _EPS * math.exp(abs(x) * seq.N) / value
    error_bound = truncation_log + rounding

    return models.MgfEstimate.from_value(
        value,
        method=models.Method.DIOPHANTINE,
        error_bound=error_bound,
        lam=lam,
        N=seq.N,
        metadata={"m_max": m_max, "max_states": peak, "roots": len(roots)},
    )


# Runners.


@attrs.frozen(kw_only=True, weakref_slot=False)
class QuadratureRunner(traits.MgfRunner):
    config: config_.Config = attrs.field(factory=_default_config)
    oversample: int | None = None
    threads: int | None = None

    @property
    def method(self) -> models.Method:
        return models.Method.QUADRATURE

    def feasible(self, seq: models.LacunarySequence, lam: float) -> bool:
        if seq.max_frequency > MAX_FREQUENCY:
            return False
        oversample = self.config.OVERSAMPLE if self.oversample is None else self.oversample
        _, grid = quadrature_grid(seq.max_frequency, lam, oversample)
        return grid <= min(self.config.MAX_GRID, _MAX_PHASE_GRID)

    def evaluate(self, seq: models.LacunarySequence, lam: float) -> models.MgfEstimate:
        return mgf_quadrature(
            seq, lam, self.oversample, config=self.config, threads=self.threads
        )


@attrs.frozen(kw_only=True, weakref_slot=False)
class DiophantineRunner(traits.MgfRunner):
    config: config_.Config = attrs.field(factory=_default_config)
    m_max: int | None = None
    tail_tol: float | None = None
    threads: int | None = None

    @property
    def method(self) -> models.Method:
        return models.Method.DIOPHANTINE

    def feasible(self, seq: models.LacunarySequence, lam: float) -> bool:
        return seq.N <= MAX_TERMS

    def evaluate(self, seq: models.LacunarySequence, lam: float) -> models.MgfEstimate:
        return mgf_diophantine(
            seq,
            lam,
            self.m_max,
            self.tail_tol,
            config=self.config,
            threads=self.threads,
        )


@attrs.frozen(kw_only=True, weakref_slot=False)
class AutoRunner(traits.MgfRunner):
    """Quadrature whenever its grid fits, the Diophantine expansion otherwise."""

    quadrature: QuadratureRunner
    diophantine: DiophantineRunner

    @property
    def method(self) -> models.Method:
        return models.Method.AUTO

    def pick(self, seq: models.LacunarySequence, lam: float) -> traits.MgfRunner:
        if self.quadrature.feasible(seq, lam):
            return self.quadrature
        if self.diophantine.feasible(seq, lam):
            return self.diophantine
        raise errors.Infeasible(
            f"no method fits: n_N = {boxed.fmt_brief(seq.max_frequency)} is too large for the quadrature grid "
            f"and N = {seq.N} exceeds the Diophantine limit of {MAX_TERMS}"
        )

    def feasible(self, seq: models.LacunarySequence, lam: float) -> bool:
        return self.quadrature.feasible(seq, lam) or self.diophantine.feasible(seq, lam)

    def evaluate(self, seq: models.LacunarySequence, lam: float) -> models.MgfEstimate:
        return self.pick(seq, lam).evaluate(seq, lam)


def runner_for(
    method: models.Method | str = models.Method.AUTO,
    *,
    config: config_.Config | None = None,
    oversample: int | None = None,
    m_max: int | None = None,
    threads: int | None = None,
) -> traits.MgfRunner:
    config = config or _default_config()
    if isinstance(method, str) and not isinstance(method, models.Method):
        method = models.Method.parse(method)

    quadrature = QuadratureRunner(config=config, oversample=oversample, threads=threads)
    diophantine = DiophantineRunner(config=config, m_max=m_max, threads=threads)
    match method:
        case models.Method.QUADRATURE:
            return quadrature
        case models.Method.DIOPHANTINE:
            return diophantine
        case _:
            return AutoRunner(quadrature=quadrature, diophantine=diophantine)


def mgf(
    seq: models.LacunarySequence,
    lam: float,
    method: models.Method | str = models.Method.AUTO,
    **kwargs: typing.Any,
) -> models.MgfEstimate:
    return runner_for(method, **kwargs).evaluate(seq, lam)


def lambda_n(
    seq: models.LacunarySequence,
    lam: float,
    method: models.Method | str = models.Method.AUTO,
    **kwargs: typing.Any,
) -> float:
    """`Λ_N(λ) = (1/N) log MGF`. The estimate's `cumulant_error` carries its bound."""
    return mgf(seq, lam, method, **kwargs).cumulant


def evaluate_grid(
    runner: traits.MgfRunner,
    seq: models.LacunarySequence,
    lambdas: collections.Iterable[float],
) -> list[models.MgfEstimate]:
    """Evaluates `runner` at every lambda, in order."""
    return [runner.evaluate(seq, lam) for lam in lambdas]
