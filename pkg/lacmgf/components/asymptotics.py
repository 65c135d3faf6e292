# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Small-lambda behaviour of `Λ_N` and finite-N moderate deviation probes.

The probes here are consistency checks at desk scale. None of them takes a
limit: tolerances in the tests account for finite `N` and finite `λ`.
"""

from __future__ import annotations

__all__: tuple[str, ...] = (
    "DEFAULT_FIT_GRID",
    "BLOCK_LIMITS",
    "validate_fit_grid",
    "fit_values",
    "fit_series",
    "fit_increment",
    "block_limit_lambda",
    "fit_block_limit",
    "envelope_check",
    "legendre_rate",
    "rate_curve",
    "empirical_tail",
    "mdp_probe",
)

import logging
import math
import typing

import numpy as np

from lacmgf import models
from lacmgf.components import mgfeval
from lacmgf.components import seqgen
from lacmgf.std import boxed
from lacmgf.std import config as config_
from lacmgf.std import errors

if typing.TYPE_CHECKING:
    import collections.abc as collections

    import numpy.typing as npt

    from lacmgf.std import traits

_LOG: typing.Final[logging.Logger] = logging.getLogger("lacmgf.asymptotics")

DEFAULT_FIT_GRID: typing.Final[tuple[float, ...]] = boxed.symmetric_grid(0.05, 0.25, 0.05)
"""`{±0.05, ±0.10, ±0.15, ±0.20, ±0.25}`."""

BLOCK_LIMITS: typing.Final[collections.Mapping[str, tuple[int, ...]]] = {
    "pair": (1, 2),
    "triple": (1, 2, 3),
}
"""One period of the repeating block pattern of the pair and triple constructions."""

_FIT_DEGREES: typing.Final[frozenset[int]] = frozenset({4, 6, 8})
_FIT_MAX_LAMBDA: typing.Final[float] = 0.3
_TAIL_SHARD: typing.Final[int] = 1 << 20


def validate_fit_grid(lambdas: collections.Sequence[float]) -> None:
    if len(lambdas) < 8:
        raise errors.GridError(f"a fit grid needs at least 8 points, got {len(lambdas)}")
    if any(lam == 0 for lam in lambdas):
        raise errors.GridError("a fit grid must exclude lambda = 0")
    if any(abs(lam) > _FIT_MAX_LAMBDA for lam in lambdas):
        raise errors.GridError(f"every fit point must satisfy |lambda| ≤ {_FIT_MAX_LAMBDA}")
    if all(lam > 0 for lam in lambdas) or all(lam < 0 for lam in lambdas):
        raise errors.GridError("a fit grid with a single sign cannot separate odd and even terms")
    points = set(lambdas)
    if any(-lam not in points for lam in points):
        raise errors.GridError("a fit grid must be symmetric about 0")


def fit_values(
    lambdas: collections.Sequence[float],
    values: collections.Sequence[float],
    degree: int = 6,
) -> tuple[float, ...]:
    """Least-squares coefficients of `λ², λ³, ..., λ^degree`, with no constant or linear term."""
    if degree < 2:
        raise errors.DomainError(f"fit degree must be at least 2, got {degree}")
    if len(lambdas) != len(values):
        raise errors.GridError("lambdas and values differ in length")
    if len(lambdas) < degree - 1:
        raise errors.GridError(f"{len(lambdas)} points cannot determine {degree - 1} coefficients")

    x = np.asarray(lambdas, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    design = np.stack([x**p for p in range(2, degree + 1)], axis=1)
    # Column scaling keeps the high powers from dominating the condition number.
    scale = np.linalg.norm(design, axis=0)
    coeffs, *_ = np.linalg.lstsq(design / scale, y, rcond=None)
    return tuple(float(c) for c in coeffs / scale)


def _residual_max(
    lambdas: collections.Sequence[float],
    values: collections.Sequence[float],
    coeffs: tuple[float, ...],
) -> float:
    x = np.asarray(lambdas, dtype=np.float64)
    fitted = sum(c * x ** (p + 2) for p, c in enumerate(coeffs))
    return float(np.max(np.abs(np.asarray(values) - fitted)))


def _series_fit(
    lambdas: tuple[float, ...],
    values: list[float],
    degree: int,
    *,
    N: int,  # noqa: N803
    label: str,
    increment: bool = False,
) -> models.SeriesFit:
    if degree not in _FIT_DEGREES:
        raise errors.DomainError(f"fit degree must be one of 4, 6, 8, got {degree}")

    coeffs = fit_values(lambdas, values, degree)
    residual = _residual_max(lambdas, values, coeffs)
    _LOG.info("fit %s N=%d degree=%d residual=%.3g", label, N, degree, residual)
    return models.SeriesFit(
        c2=coeffs[0],
        c3=coeffs[1],
        c4=coeffs[2],
        higher=coeffs[3:],
        degree=degree,
        lambda_grid=lambdas,
        values=tuple(values),
        residual_max=residual,
        N=N,
        seq_label=label,
        increment=increment,
    )


def _runner(runner: traits.MgfRunner | None) -> traits.MgfRunner:
    return runner if runner is not None else mgfeval.runner_for(models.Method.AUTO)


def fit_series(
    seq: models.LacunarySequence,
    N: int | None = None,  # noqa: N803
    lambda_grid: collections.Sequence[float] | None = None,
    runner: traits.MgfRunner | None = None,
    *,
    degree: int = 6,
) -> models.SeriesFit:
    """Fits `Λ_N` of the first `N` terms on a symmetric small-lambda grid."""
    lambdas = tuple(sorted(lambda_grid if lambda_grid is not None else DEFAULT_FIT_GRID))
    validate_fit_grid(lambdas)

    head = seq.take(N if N is not None else seq.N)
    runner = _runner(runner)
    values = [runner.evaluate(head, lam).cumulant for lam in lambdas]
    return _series_fit(lambdas, values, degree, N=head.N, label=head.label)


def fit_increment(
    seq: models.LacunarySequence,
    N: int | None = None,  # noqa: N803
    lambda_grid: collections.Sequence[float] | None = None,
    runner: traits.MgfRunner | None = None,
    *,
    degree: int = 6,
) -> models.SeriesFit:
    """Fits the cumulant the `N`-th term adds, `N Λ_N(λ) - (N - 1) Λ_{N-1}(λ)`.

    Relations among the terms are counted once per position, so their share
    of `N Λ_N` grows like `a N + b`. `Λ_N` itself only reaches `a` as
    `N → ∞`, the difference removes the boundary term `b` at finite `N`.
    """
    lambdas = tuple(sorted(lambda_grid if lambda_grid is not None else DEFAULT_FIT_GRID))
    validate_fit_grid(lambdas)

    head = seq.take(N if N is not None else seq.N)
    if head.N < 2:
        raise errors.DomainError("an increment fit needs at least 2 terms")
    previous = head.take(head.N - 1)
    runner = _runner(runner)
    values = [
        runner.evaluate(head, lam).log_value - runner.evaluate(previous, lam).log_value
        for lam in lambdas
    ]
    return _series_fit(lambdas, values, degree, N=head.N, label=head.label, increment=True)


def block_limit_lambda(
    kind: typing.Literal["pair", "triple"],
    lam: float,
    *,
    oversample: int | None = None,
    config: config_.Config | None = None,
) -> float:
    """Limit cumulant of the pair or triple construction.

    `(1/g) log ∫₀¹ exp(λ√2 Σ_{j≤g} cos(2π j x)) dx` with `g` = 2 or 3, evaluated
    by quadrature on the frequencies `1..g`.
    """
    if kind not in BLOCK_LIMITS:
        raise errors.DomainError(f"block limit kind must be 'pair' or 'triple', got {kind!r}")
    if abs(lam) > 1:
        raise errors.DomainError(f"lambda must lie in [-1, 1], got {lam!r}")

    terms = BLOCK_LIMITS[kind]
    seq = models.LacunarySequence(
        terms=terms, q_certified=seqgen.verify_hadamard(terms), label=f"{kind}-limit"
    )
    estimate = mgfeval.mgf_quadrature(seq, lam, oversample, config=config)
    return estimate.log_value / len(terms)


def fit_block_limit(
    kind: typing.Literal["pair", "triple"],
    lambda_grid: collections.Sequence[float] | None = None,
    *,
    degree: int = 6,
    config: config_.Config | None = None,
) -> models.SeriesFit:
    lambdas = tuple(sorted(lambda_grid if lambda_grid is not None else DEFAULT_FIT_GRID))
    validate_fit_grid(lambdas)
    values = [block_limit_lambda(kind, lam, config=config) for lam in lambdas]
    return _series_fit(lambdas, values, degree, N=len(BLOCK_LIMITS[kind]), label=f"{kind}-limit")


def envelope_check(
    seq: models.LacunarySequence,
    N: int | None = None,  # noqa: N803
    lambda_grid: collections.Sequence[float] | None = None,
    runner: traits.MgfRunner | None = None,
) -> models.EnvelopeResult:
    """`max_λ |Λ_N(λ) - λ²/2| / |λ|³` and the lambda attaining it."""
    lambdas = tuple(sorted(lambda_grid if lambda_grid is not None else DEFAULT_FIT_GRID))
    if not lambdas:
        raise errors.GridError("envelope grid is empty")
    if any(lam == 0 or abs(lam) > 1 for lam in lambdas):
        raise errors.GridError("envelope grid must lie in [-1, 1] without 0")

    head = seq.take(N if N is not None else seq.N)
    runner = _runner(runner)
    ratios = tuple(
        abs(runner.evaluate(head, lam).cumulant - lam * lam / 2) / abs(lam) ** 3
        for lam in lambdas
    )
    best = max(range(len(lambdas)), key=lambda i: (ratios[i], -i))
    _LOG.info("envelope %s N=%d ratio=%.6g at lambda=%r", head.label, head.N, ratios[best], lambdas[best])
    return models.EnvelopeResult(
        ratio=ratios[best],
        argmax=lambdas[best],
        N=head.N,
        seq_label=head.label,
        lambda_grid=lambdas,
        ratios=ratios,
    )


def legendre_rate(
    lambdas: collections.Sequence[float],
    values: collections.Sequence[float],
    t: float,
) -> models.RateResult:
    """`max_i (t λ_i - Λ(λ_i))` over the sampled points.

    When the maximum sits on either end of the sampled range the true
    supremum may lie outside it, and the result is flagged.
    """
    if len(lambdas) != len(values) or not lambdas:
        raise errors.GridError("legendre_rate needs matching, nonempty samples")

    x = np.asarray(lambdas, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    x = x[order]
    y = np.asarray(values, dtype=np.float64)[order]

    objective = t * x - y
    best = int(np.argmax(objective))
    boundary = best in (0, x.size - 1)
    if boundary:
        _LOG.warning("Legendre supremum for t=%r attained at the grid edge lambda=%r", t, float(x[best]))
    return models.RateResult(
        t=t, rate=float(objective[best]), argmax=float(x[best]), boundary=boundary
    )


def rate_curve(
    lambdas: collections.Sequence[float],
    values: collections.Sequence[float],
    ts: collections.Iterable[float],
) -> list[models.RateResult]:
    return [legendre_rate(lambdas, values, t) for t in ts]


def _tail_shard(
    terms: tuple[int, ...],
    grid: int,
    scale: float,
    levels: npt.NDArray[np.float64],
    start: int,
    stop: int,
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.bool_], npt.NDArray[np.bool_]]:
    j = np.arange(start, stop, dtype=np.int64)
    total = np.zeros(stop - start, dtype=np.float64)
    step = 2 * math.pi / grid
    for n in terms:
        total += np.cos(((j * (n % grid)) % grid) * step)
    total *= scale

    above = total[None, :] >= levels[:, None]
    hits = above.sum(axis=1)
    flips = (above[:, 1:] != above[:, :-1]).sum(axis=1)
    return hits, flips, above[:, 0], above[:, -1]


def _tail_counts(
    seq: models.LacunarySequence,
    lambda_scale: float,
    ts: collections.Sequence[float],
    grid_points: int,
    threads: int,
) -> tuple[list[int], list[int]]:
    scale = lambda_scale * math.sqrt(2) / math.sqrt(seq.N)
    levels = np.asarray(ts, dtype=np.float64)
    pieces = boxed.spawn(
        lambda piece: _tail_shard(seq.terms, grid_points, scale, levels, *piece),
        boxed.shards(grid_points, _TAIL_SHARD),
        threads=threads,
    )

    hits = np.zeros(levels.size, dtype=np.int64)
    crossings = np.zeros(levels.size, dtype=np.int64)
    for i, (h, flips, first, last) in enumerate(pieces):
        hits += h
        crossings += flips
        # Joins between consecutive shards, cyclically.
        following = pieces[(i + 1) % len(pieces)][2]
        crossings += last != following
    return [int(h) for h in hits], [int(c) for c in crossings]


def _check_tail_grid(seq: models.LacunarySequence, grid_points: int, config: config_.Config) -> None:
    if grid_points < 10 * seq.max_frequency:
        raise errors.DomainError(
            f"tail grid needs at least 10·n_N = {boxed.fmt_brief(10 * seq.max_frequency)} points, got {grid_points}"
        )
    limit = min(config.MAX_GRID, 2**31)
    if grid_points > limit:
        raise errors.Infeasible(
            f"tail grid of {grid_points} points exceeds the limit of {limit} (LACMGF_MAX_GRID)",
            required=grid_points,
            limit=limit,
        )


def mdp_probe(
    seq: models.LacunarySequence,
    N: int | None,  # noqa: N803
    lambda_scale: float,
    ts: collections.Sequence[float],
    grid_points: int,
    *,
    config: config_.Config | None = None,
    threads: int | None = None,
) -> list[models.TailEstimate]:
    """Tail estimates of `(λ/√N) Σ √2 cos(2π n_k x) ≥ t` for several `t` from one pass over the grid."""
    config = config or config_.Config.into_dotenv()
    threads = config.THREADS if threads is None else threads
    if lambda_scale <= 0:
        raise errors.DomainError(f"lambda_scale must be positive, got {lambda_scale!r}")

    head = seq.take(N if N is not None else seq.N)
    _check_tail_grid(head, grid_points, config)
    hits, crossings = _tail_counts(head, lambda_scale, ts, grid_points, threads)

    results: list[models.TailEstimate] = []
    for t, h, c in zip(ts, hits, crossings):
        flagged = h == 0
        if flagged:
            _LOG.warning(
                "no grid point reaches t=%r at %d points; reporting the bound 1/%d",
                t,
                grid_points,
                grid_points,
            )
        results.append(
            models.TailEstimate(
                t=t,
                lam=lambda_scale,
                N=head.N,
                measure=(1 if flagged else h) / grid_points,
                grid_points=grid_points,
                hits=h,
                crossings=c,
                flagged=flagged,
            )
        )
    return results


def empirical_tail(
    seq: models.LacunarySequence,
    N: int | None,  # noqa: N803
    lambda_scale: float,
    t: float,
    grid_points: int,
    *,
    config: config_.Config | None = None,
    threads: int | None = None,
) -> models.TailEstimate:
    """Measure of `{x : (λ/√N) Σ √2 cos(2π n_k x) ≥ t}` on an equispaced grid."""
    (estimate,) = mdp_probe(
        seq, N, lambda_scale, [t], grid_points, config=config, threads=threads
    )
    return estimate
