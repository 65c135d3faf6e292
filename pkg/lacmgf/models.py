# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Frozen records passed between the numerical components and the command line."""

from __future__ import annotations

__all__ = (
    "LacunarySequence",
    "BlockDecomposition",
    "EquationKind",
    "SolutionCount",
    "ProbeRow",
    "BesselSeriesConfig",
    "Method",
    "MgfEstimate",
    "SeriesFit",
    "EnvelopeResult",
    "RateResult",
    "TailEstimate",
    "OutputFormat",
    "RunConfig",
)

import enum
import fractions
import math
import pathlib
import typing

import attrs

from lacmgf.std import boxed
from lacmgf.std import errors

if typing.TYPE_CHECKING:
    import collections.abc as collections
    from typing import Self


def _fraction_str(value: fractions.Fraction) -> str:
    return boxed.fmt_fraction(value)


def _check_terms(
    instance: LacunarySequence,
    _: attrs.Attribute[typing.Any],
    terms: tuple[int, ...],
) -> None:
    if not terms:
        raise errors.DomainError("a lacunary sequence needs at least one term")

    for k, n in enumerate(terms, start=1):
        if n < 1:
            raise errors.NonPositiveTerm(f"n_{k} = {n} is not a positive integer")

    q = instance.q_certified
    if q <= 1:
        raise errors.NotLacunary(f"q_certified = {boxed.fmt_brief(q)} must exceed 1")

    for k, (lo, hi) in enumerate(zip(terms, terms[1:]), start=1):
        # n_{k+1} >= q n_k with q = a/b, in integers.
        if hi * q.denominator < lo * q.numerator:
            raise errors.NotLacunary(
                f"n_{k + 1} / n_{k} = {boxed.fmt_brief(fractions.Fraction(hi, lo))} "
                f"is below q = {boxed.fmt_brief(q)}"
            )


@attrs.frozen(kw_only=True, weakref_slot=False)
class LacunarySequence:
    """Strictly increasing positive frequencies `n_1 < n_2 < ...` with a certified gap ratio."""

    q_certified: fractions.Fraction = attrs.field(converter=fractions.Fraction)
    terms: tuple[int, ...] = attrs.field(converter=tuple, validator=_check_terms)
    label: str = "custom"

    @property
    def N(self) -> int:  # noqa: N802
        return len(self.terms)

    @property
    def max_frequency(self) -> int:
        return self.terms[-1]

    def __len__(self) -> int:
        return len(self.terms)

    def frequency(self, k: int) -> int:
        """Returns `n_k` for a 1-based index."""
        if not 1 <= k <= len(self.terms):
            raise errors.DomainError(f"index {k} outside 1..{len(self.terms)}")
        return self.terms[k - 1]

    def take(self, n: int) -> LacunarySequence:
        """The first `n` terms, with the gap ratio recertified for the prefix."""
        if not 1 <= n <= len(self.terms):
            raise errors.DomainError(
                f"cannot take {n} terms of a {len(self.terms)}-term sequence"
            )
        if n == len(self.terms):
            return self

        head = self.terms[:n]
        ratios = [fractions.Fraction(b, a) for a, b in zip(head, head[1:])]
        return LacunarySequence(
            terms=head,
            q_certified=min(ratios, default=self.q_certified),
            label=self.label,
        )

    def as_dict(self) -> dict[str, typing.Any]:
        return {
            "label": self.label,
            "N": self.N,
            "q_certified": _fraction_str(self.q_certified),
            "terms": list(self.terms),
        }


@attrs.frozen(kw_only=True, weakref_slot=False)
class BlockDecomposition:
    """The partition `Δ_1, Δ_1', ..., Δ_M, Δ_M'` of `{1..N}`.

    Blocks are inclusive, 1-based `range` objects. `short_blocks` has either
    `M` or `M - 1` entries, the latter when `Δ_M'` was dropped.
    """

    N: int
    L: int
    s: int
    long_blocks: tuple[range, ...]
    short_blocks: tuple[range, ...]

    @property
    def M(self) -> int:  # noqa: N802
        return len(self.long_blocks)

    def i_minus(self, i: int) -> int:
        """Smallest index of `Δ_i`."""
        return self.long_blocks[i - 1].start

    def i_plus(self, i: int) -> int:
        """Largest index of `Δ_i`."""
        return self.long_blocks[i - 1][-1]

    def i_star(self, i: int) -> int | None:
        """Largest index of `Δ_i'`, `None` when that block is absent."""
        if i > len(self.short_blocks):
            return None
        return self.short_blocks[i - 1][-1]

    def blocks(self) -> collections.Iterator[range]:
        """All blocks in index order."""
        for i, long in enumerate(self.long_blocks):
            yield long
            if i < len(self.short_blocks):
                yield self.short_blocks[i]

    def as_dict(self) -> dict[str, typing.Any]:
        return {
            "N": self.N,
            "L": self.L,
            "s": self.s,
            "M": self.M,
            "long_blocks": [[b.start, b[-1]] for b in self.long_blocks],
            "short_blocks": [[b.start, b[-1]] for b in self.short_blocks],
        }


class EquationKind(str, enum.Enum):
    """Signed frequency combinations counted inside a block."""

    TWO_TERM = "two_term"
    THREE_TERM = "three_term"
    FOUR_TERM_PPMM = "four_term_ppmm"
    FOUR_TERM_PPPM = "four_term_pppm"

    @property
    def arity(self) -> int:
        return {
            EquationKind.TWO_TERM: 2,
            EquationKind.THREE_TERM: 3,
            EquationKind.FOUR_TERM_PPMM: 4,
            EquationKind.FOUR_TERM_PPPM: 4,
        }[self]

    def __str__(self) -> str:
        return self.value


@attrs.frozen(kw_only=True, weakref_slot=False)
class SolutionCount:
    kind: EquationKind
    block_index: int
    threshold: int
    count: int
    L: int

    def __attrs_post_init__(self) -> None:
        if not 0 <= self.count <= self.L**self.kind.arity:
            raise errors.DomainError(
                f"count {self.count} outside [0, L^{self.kind.arity}] for L = {self.L}"
            )

    def as_row(self) -> tuple[str, int, int, int, int]:
        return (self.kind.value, self.block_index, self.threshold, self.count, self.L)


@attrs.frozen(kw_only=True, weakref_slot=False)
class ProbeRow:
    """One line of a counting scaling probe."""

    L: int
    count: int
    block_index: int
    slope: float | None
    """Log-log slope against the previous row, `None` on the first row or a zero count."""


@attrs.frozen(kw_only=True, weakref_slot=False)
class BesselSeriesConfig:
    max_terms: int = attrs.field(default=128, validator=attrs.validators.ge(1))
    tail_tolerance: float = attrs.field(default=1e-18, validator=attrs.validators.gt(0.0))


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    DIOPHANTINE = "diophantine"
    AUTO = "auto"

    @classmethod
    def parse(cls, value: str) -> Method:
        aliases = {"quad": cls.QUADRATURE, "dio": cls.DIOPHANTINE}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise errors.DomainError(f"unknown method {value!r}") from None

    def __str__(self) -> str:
        return self.value


def _check_estimate(instance: MgfEstimate) -> None:
    if not instance.value > 0 or not math.isfinite(instance.value):
        raise errors.DomainError(f"MGF value must be positive, got {instance.value!r}")
    if abs(math.log(instance.value) - instance.log_value) > 1e-12:
        raise errors.DomainError("log_value is inconsistent with value")
    if not math.isfinite(instance.error_bound) or instance.error_bound < 0:
        raise errors.DomainError(f"bad error bound {instance.error_bound!r}")


@attrs.frozen(kw_only=True, weakref_slot=False)
class MgfEstimate:
    """`∫₀¹ exp(λ Σ √2 cos(2π n_k x)) dx` with an absolute error bound on `log_value`."""

    value: float
    log_value: float
    method: Method
    error_bound: float
    lam: float
    N: int
    metadata: collections.Mapping[str, typing.Any] = attrs.field(factory=dict)

    def __attrs_post_init__(self) -> None:
        _check_estimate(self)

    @classmethod
    def from_value(
        cls,
        value: float,
        *,
        method: Method,
        error_bound: float,
        lam: float,
        N: int,  # noqa: N803
        metadata: collections.Mapping[str, typing.Any] | None = None,
    ) -> Self:
        return cls(
            value=value,
            log_value=math.log(value),
            method=method,
            error_bound=error_bound,
            lam=lam,
            N=N,
            metadata=dict(metadata or {}),
        )

    @property
    def cumulant(self) -> float:
        """`Λ_N(λ) = log_value / N`."""
        return self.log_value / self.N

    @property
    def cumulant_error(self) -> float:
        return self.error_bound / self.N

    def as_dict(self) -> dict[str, typing.Any]:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "lambda_n": self.cumulant,
            "method": self.method.value,
            "error_bound": self.error_bound,
            "lambda": self.lam,
            "N": self.N,
            "metadata": dict(self.metadata),
        }


@attrs.frozen(kw_only=True, weakref_slot=False)
class SeriesFit:
    """Least-squares coefficients of `Λ_N(λ) ≈ c2 λ² + c3 λ³ + c4 λ⁴ (+ higher)`."""

    c2: float
    c3: float
    c4: float
    higher: tuple[float, ...]
    degree: int
    lambda_grid: tuple[float, ...]
    values: tuple[float, ...]
    """Sampled `Λ_N` at each grid point."""
    residual_max: float
    N: int
    seq_label: str
    increment: bool = False
    """The values are `N Λ_N - (N - 1) Λ_{N-1}` rather than `Λ_N`."""

    def as_dict(self) -> dict[str, typing.Any]:
        return {
            "c2": self.c2,
            "c3": self.c3,
            "c4": self.c4,
            "higher": list(self.higher),
            "degree": self.degree,
            "lambda_grid": list(self.lambda_grid),
            "values": list(self.values),
            "residual_max": self.residual_max,
            "N": self.N,
            "seq_label": self.seq_label,
            "increment": self.increment,
        }


@attrs.frozen(kw_only=True, weakref_slot=False)
class EnvelopeResult:
    ratio: float
    """`max_λ |Λ_N(λ) - λ²/2| / |λ|³` over the grid."""
    argmax: float
    N: int
    seq_label: str
    lambda_grid: tuple[float, ...]
    ratios: tuple[float, ...]

    def as_dict(self) -> dict[str, typing.Any]:
        return {
            "ratio": self.ratio,
            "argmax": self.argmax,
            "N": self.N,
            "seq_label": self.seq_label,
            "lambda_grid": list(self.lambda_grid),
            "ratios": list(self.ratios),
        }


@attrs.frozen(kw_only=True, weakref_slot=False)
class RateResult:
    t: float
    rate: float
    argmax: float
    boundary: bool
    """The supremum was attained at an end of the sampled lambda range."""

    def as_dict(self) -> dict[str, typing.Any]:
        return {
            "t": self.t,
            "rate": self.rate,
            "argmax": self.argmax,
            "boundary": self.boundary,
        }


@attrs.frozen(kw_only=True, weakref_slot=False)
class TailEstimate:
    """Equispaced measurement of `{x : (λ/√N) Σ √2 cos(2π n_k x) ≥ t}`."""

    t: float
    lam: float
    N: int
    measure: float = attrs.field(validator=[attrs.validators.ge(0.0), attrs.validators.le(1.0)])
    grid_points: int
    hits: int
    crossings: int
    flagged: bool
    """No grid point reached the level; `measure` is the upper bound `1 / grid_points`."""

    @property
    def mdp_normalized(self) -> float:
        return self.lam**2 * math.log(self.measure)

    @property
    def gaussian_target(self) -> float:
        return -(self.t**2) / 2

    @property
    def resolution(self) -> float:
        return (self.crossings + 1) / self.grid_points

    def as_dict(self) -> dict[str, typing.Any]:
        return {
            "t": self.t,
            "lambda": self.lam,
            "N": self.N,
            "measure": self.measure,
            "grid_points": self.grid_points,
            "hits": self.hits,
            "crossings": self.crossings,
            "resolution": self.resolution,
            "flagged": self.flagged,
            "mdp_normalized": self.mdp_normalized,
            "gaussian_target": self.gaussian_target,
        }


class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


def _check_run_config(instance: RunConfig) -> None:
    if instance.needs_sequence and (instance.seq_path is None) == (instance.gen is None):
        raise errors.DomainError("exactly one of --seq or --gen is required")
    if instance.needs_grid and not instance.lambdas:
        raise errors.GridError("a nonempty lambda grid is required")


@attrs.frozen(kw_only=True, weakref_slot=False)
class RunConfig:
    """The validated flags of one command line invocation."""

    command: str
    seq_path: pathlib.Path | None = None
    gen: str | None = None
    lambdas: tuple[float, ...] = ()
    N: int | None = None
    method: Method = Method.AUTO
    oversample: int = 8
    m_max: int | None = None
    threads: int = 1
    output_format: OutputFormat = OutputFormat.JSON
    output_path: pathlib.Path | None = None
    needs_sequence: bool = True
    needs_grid: bool = False

    def __attrs_post_init__(self) -> None:
        _check_run_config(self)
