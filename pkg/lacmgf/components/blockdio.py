# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Block decomposition of the index set and near-solution counters inside a block.

Every comparison here is exact: frequencies, thresholds and the block
parameters are integers or rationals, never floats.
"""

from __future__ import annotations

__all__: tuple[str, ...] = (
    "s_conditions",
    "choose_s",
    "choose_L",
    "check_working_assumptions",
    "decompose",
    "count_two_term",
    "count_three_term",
    "count_four_term",
    "count",
    "count_blocks",
    "scaling_probe",
)

import bisect
import fractions
import logging
import math
import typing

from lacmgf import models
from lacmgf.std import boxed
from lacmgf.std import errors

if typing.TYPE_CHECKING:
    import collections.abc as collections

_LOG: typing.Final[logging.Logger] = logging.getLogger("lacmgf.blockdio")

Signature = typing.Literal["ppmm", "pppm"]


def s_conditions(q: fractions.Fraction, s: int) -> tuple[bool, bool]:
    """Both short-block inequalities at `s`, cleared of square roots.

    `q^s > (1 - q^{-1/2})^{-1}` becomes `q (q^s - 1)² > q^{2s}` and
    `1 + 4 q^{-s} ≤ √q` becomes `(q^s + 4)² ≤ q^{2s+1}`.
    """
    p = q**s
    return q * (p - 1) ** 2 > p * p, (p + 4) ** 2 <= p * p * q


def _holds(q: fractions.Fraction, s: int) -> bool:
    first, second = s_conditions(q, s)
    return first and second


def choose_s(q: fractions.Fraction | int | str) -> int:
    """Smallest positive `s` satisfying both short-block inequalities."""
    q = fractions.Fraction(q)
    if q <= 1:
        raise errors.DomainError(f"q must exceed 1, got {q}")

    # Both conditions are monotone in s; start from a float estimate and
    # settle the exact boundary with rational comparisons.
    root = math.sqrt(float(q))
    log_q = math.log(float(q))
    estimate = max(
        math.log(root / (root - 1)) / log_q,
        math.log(4 / (root - 1)) / log_q,
        1.0,
    )
    hi = max(1, math.ceil(estimate))
    while not _holds(q, hi):
        hi *= 2

    lo = 0  # conditions fail at s = 0 since q (1 - 1)² = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _holds(q, mid):
            hi = mid
        else:
            lo = mid

    _LOG.debug("choose_s(%s) = %d", q, hi)
    return hi


def _exact(lam: float | fractions.Fraction) -> fractions.Fraction:
    if isinstance(lam, fractions.Fraction):
        return lam
    # repr gives the shortest decimal, so 0.05 becomes exactly 1/20.
    return fractions.Fraction(repr(float(lam)))


def choose_L(lam: float | fractions.Fraction) -> int:  # noqa: N802
    """`⌈1 / (2|λ|)⌉`."""
    exact = abs(_exact(lam))
    if exact == 0:
        raise errors.DomainError("choose_L needs a nonzero lambda")
    return math.ceil(1 / (2 * exact))


def check_working_assumptions(
    s: int, L: int, lam: float | fractions.Fraction  # noqa: N803
) -> list[str]:
    """Returns the violated block assumptions, `s < L` and `L ≤ 1 / (√2 |λ|)`.

    The second one is checked as `2 L² λ² ≤ 1`. An empty list means both hold.
    """
    violations: list[str] = []
    if not s < L:
        violations.append(f"s < L fails: s = {s}, L = {L}")
    if 2 * L * L * _exact(lam) ** 2 > 1:
        violations.append(f"L ≤ 1/(√2|λ|) fails: L = {L}, λ = {lam}")

    for violation in violations:
        _LOG.warning("working assumption violated: %s", violation)
    return violations


def decompose(N: int, L: int, s: int) -> models.BlockDecomposition:  # noqa: N803
    """Lays out `Δ_1, Δ_1', Δ_2, ...` greedily over `{1..N}`.

    Whatever block is being laid out when `N` is reached gets cut there,
    and the last short block is absent when `N` falls inside or at the end
    of a long block.
    """
    if s < 1 or L <= s:
        raise errors.InvalidBlockShape(f"need L > s ≥ 1, got L = {L}, s = {s}")
    if N < L + 1:
        raise errors.Infeasible(
            f"decomposition needs N ≥ L + 1 = {L + 1}, got N = {N}",
            required=L + 1,
            limit=N,
        )

    long_blocks: list[range] = []
    short_blocks: list[range] = []
    pos = 1
    while pos <= N:
        long = range(pos, min(pos + L, N + 1))
        long_blocks.append(long)
        pos = long.stop
        if pos > N:
            break
        short = range(pos, min(pos + s, N + 1))
        short_blocks.append(short)
        pos = short.stop

    _LOG.debug(
        "decomposed N=%d into M=%d blocks (L=%d, s=%d)", N, len(long_blocks), L, s
    )
    return models.BlockDecomposition(
        N=N,
        L=L,
        s=s,
        long_blocks=tuple(long_blocks),
        short_blocks=tuple(short_blocks),
    )


def _values(seq: models.LacunarySequence, block: range, threshold: int) -> list[int]:
    if threshold < 1:
        raise errors.DomainError(f"threshold must be at least 1, got {threshold}")
    if len(block) and (block[0] < 1 or block[-1] > seq.N or block.step != 1):
        raise errors.DomainError(f"block {block} is not a run inside 1..{seq.N}")
    return sorted(seq.terms[k - 1] for k in block)


def _pair_sums(values: list[int]) -> list[int]:
    return sorted(a + b for a in values for b in values)


def _window(sorted_values: list[int], centre: int, threshold: int) -> int:
    """How many entries lie strictly inside `(centre - threshold, centre + threshold)`."""
    return bisect.bisect_left(sorted_values, centre + threshold) - bisect.bisect_right(
        sorted_values, centre - threshold
    )


def count_two_term(
    seq: models.LacunarySequence,
    block: range,
    threshold: int,
    *,
    exclude_diagonal: bool = False,
    block_index: int = 1,
) -> models.SolutionCount:
    """Ordered pairs with `|n_{k1} - n_{k2}| < threshold`."""
    values = _values(seq, block, threshold)
    total = sum(_window(values, v, threshold) for v in values)
    if exclude_diagonal:
        total -= len(values)

    return models.SolutionCount(
        kind=models.EquationKind.TWO_TERM,
        block_index=block_index,
        threshold=threshold,
        count=total,
        L=len(values),
    )


def count_three_term(
    seq: models.LacunarySequence,
    block: range,
    threshold: int,
    *,
    block_index: int = 1,
) -> models.SolutionCount:
    """Ordered triples with `|n_{k1} - n_{k2} - n_{k3}| < threshold`.

    Sorted pair sums `n_{k2} + n_{k3}` are searched for each `n_{k1}`.
    """
    values = _values(seq, block, threshold)
    sums = _pair_sums(values)
    total = sum(_window(sums, v, threshold) for v in values)

    return models.SolutionCount(
        kind=models.EquationKind.THREE_TERM,
        block_index=block_index,
        threshold=threshold,
        count=total,
        L=len(values),
    )


def count_four_term(
    seq: models.LacunarySequence,
    block: range,
    threshold: int,
    signature: Signature | models.EquationKind,
    *,
    block_index: int = 1,
) -> models.SolutionCount:
    """Ordered 4-tuples with `|n_{k1} + n_{k2} - n_{k3} - n_{k4}| < threshold` (`ppmm`)
    or `|n_{k1} + n_{k2} + n_{k3} - n_{k4}| < threshold` (`pppm`).

    Both meet in the middle on the sorted pair sums.
    """
    match signature:
        case "ppmm" | models.EquationKind.FOUR_TERM_PPMM:
            kind = models.EquationKind.FOUR_TERM_PPMM
        case "pppm" | models.EquationKind.FOUR_TERM_PPPM:
            kind = models.EquationKind.FOUR_TERM_PPPM
        case _:
            raise errors.DomainError(f"unknown four term signature {signature!r}")

    values = _values(seq, block, threshold)
    sums = _pair_sums(values)
    if kind is models.EquationKind.FOUR_TERM_PPMM:
        total = sum(_window(sums, a, threshold) for a in sums)
    else:
        # n_{k1} + n_{k2} must sit within threshold of n_{k4} - n_{k3}.
        total = sum(_window(sums, d - c, threshold) for c in values for d in values)

    return models.SolutionCount(
        kind=kind,
        block_index=block_index,
        threshold=threshold,
        count=total,
        L=len(values),
    )


def count(
    seq: models.LacunarySequence,
    block: range,
    threshold: int,
    kind: models.EquationKind,
    *,
    block_index: int = 1,
    exclude_diagonal: bool = False,
) -> models.SolutionCount:
    """Dispatches to the counter for `kind`."""
    match kind:
        case models.EquationKind.TWO_TERM:
            return count_two_term(
                seq,
                block,
                threshold,
                exclude_diagonal=exclude_diagonal,
                block_index=block_index,
            )
        case models.EquationKind.THREE_TERM:
            return count_three_term(seq, block, threshold, block_index=block_index)
        case _:
            return count_four_term(seq, block, threshold, kind, block_index=block_index)


def count_blocks(
    seq: models.LacunarySequence,
    decomposition: models.BlockDecomposition,
    kind: models.EquationKind,
    *,
    complete_only: bool = True,
    threads: int = 1,
) -> list[models.SolutionCount]:
    """Counts inside every long block, each at its canonical threshold `n_{i⁻}`."""
    if decomposition.N > seq.N:
        raise errors.DomainError(
            f"decomposition covers {decomposition.N} indices, sequence has {seq.N}"
        )

    jobs = [
        (i, block)
        for i, block in enumerate(decomposition.long_blocks, start=1)
        if not complete_only or len(block) == decomposition.L
    ]

    def _run(job: tuple[int, range]) -> models.SolutionCount:
        i, block = job
        return count(seq, block, seq.frequency(block[0]), kind, block_index=i)

    return boxed.spawn(_run, jobs, threads=threads)


def scaling_probe(
    seq: models.LacunarySequence,
    kind: models.EquationKind,
    L_values: collections.Sequence[int],  # noqa: N803
    *,
    s: int | None = None,
    threads: int = 1,
) -> list[models.ProbeRow]:
    """For each `L`, the largest count over the complete long blocks of the decomposition.

    `s` defaults to `choose_s(q_certified)`. Slopes are log-log against the
    previous row.
    """
    if s is None:
        s = choose_s(seq.q_certified)

    rows: list[models.ProbeRow] = []
    previous: tuple[int, int] | None = None
    for L in L_values:  # noqa: N806
        if seq.N < L + 1:
            raise errors.Infeasible(
                f"probing L = {L} needs at least N = {L + 1} terms, sequence has {seq.N}",
                required=L + 1,
                limit=seq.N,
            )

        counts = count_blocks(seq, decompose(seq.N, L, s), kind, threads=threads)
        best = max(counts, key=lambda c: (c.count, -c.block_index))

        slope: float | None = None
        if previous is not None and previous[1] > 0 and best.count > 0:
            slope = math.log(best.count / previous[1]) / math.log(L / previous[0])

        _LOG.debug("probe %s L=%d max=%d (block %d)", kind, L, best.count, best.block_index)
        rows.append(
            models.ProbeRow(L=L, count=best.count, block_index=best.block_index, slope=slope)
        )
        previous = (L, best.count)

    return rows
