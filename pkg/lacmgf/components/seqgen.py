# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Construction, validation and file IO of lacunary frequency sequences.

All frequencies are Python integers, so factorial growth never overflows.
"""

from __future__ import annotations

__all__: tuple[str, ...] = (
    "verify_hadamard",
    "make_geometric",
    "make_pairblock",
    "make_tripleblock",
    "make_fibonacci",
    "make_superlacunary",
    "make_mixed",
    "make_mixed_segments",
    "from_spec",
    "load_sequence",
    "save_sequence",
)

import fractions
import functools
import logging
import math
import pathlib
import re
import typing

from lacmgf import models
from lacmgf.std import boxed
from lacmgf.std import errors
from lacmgf.std import traits

if typing.TYPE_CHECKING:
    import collections.abc as collections

_LOG: typing.Final[logging.Logger] = logging.getLogger("lacmgf.seqgen")

_INTEGER: typing.Final[re.Pattern[str]] = re.compile(r"[+-]?[0-9]+")
# Decimal conversion is done in chunks so interpreter digit limits never apply.
_CHUNK: typing.Final[int] = 1000


def verify_hadamard(
    terms: collections.Sequence[int],
    *,
    vacuous: fractions.Fraction | int = 2,
) -> fractions.Fraction:
    """Returns `min n_{k+1} / n_k` as an exact rational.

    A single term certifies any ratio, `vacuous` is returned in that case.
    """
    if not terms:
        raise errors.DomainError("a lacunary sequence needs at least one term")

    for k, n in enumerate(terms, start=1):
        if n < 1:
            raise errors.NonPositiveTerm(f"n_{k} = {boxed.fmt_brief(n)} is not a positive integer")

    q: fractions.Fraction | None = None
    for k, (lo, hi) in enumerate(zip(terms, terms[1:]), start=1):
        if hi < lo:
            raise errors.NotIncreasing(
                f"n_{k + 1} = {boxed.fmt_brief(hi)} is smaller than n_{k} = {boxed.fmt_brief(lo)}"
            )
        if hi == lo:
            raise errors.NotLacunary(f"n_{k + 1} / n_{k} = 1, the gap ratio must exceed 1")
        ratio = fractions.Fraction(hi, lo)
        if q is None or ratio < q:
            q = ratio

    if q is None:
        vacuous = fractions.Fraction(vacuous)
        if vacuous <= 1:
            raise errors.NotLacunary(f"vacuous ratio {vacuous} must exceed 1")
        return vacuous
    return q


def _build(
    terms: list[int], label: str, vacuous: fractions.Fraction | int
) -> models.LacunarySequence:
    q = verify_hadamard(terms, vacuous=vacuous)
    return models.LacunarySequence(terms=tuple(terms), q_certified=q, label=label)


def _check_length(N: int) -> None:  # noqa: N803
    if N < 1:
        raise errors.DomainError(f"sequence length must be at least 1, got {N}")


def make_geometric(a: int, N: int) -> models.LacunarySequence:  # noqa: N803
    """`a, a², ..., a^N` with `q = a`."""
    if a < 2:
        raise errors.DomainError(f"geometric base must be at least 2, got {a}")
    _check_length(N)

    terms = [a]
    for _ in range(N - 1):
        terms.append(terms[-1] * a)
    return _build(terms, f"geometric:{a}", a)


def make_pairblock(N: int) -> models.LacunarySequence:  # noqa: N803
    """Frequencies in doubling pairs separated by factorial jumps.

    `n_1 = 1`, then `n_{k+1} = 2 n_k` for odd `k` and `n_{k+1} = k! n_k` for
    even `k`, giving `1, 2, 4, 8, 192, 384, ...` and `q = 2`.
    """
    _check_length(N)

    terms = [1]
    for k in range(1, N):
        terms.append(terms[-1] * (2 if k % 2 == 1 else math.factorial(k)))
    return _build(terms, "pairblock", 2)


def make_tripleblock(N: int) -> models.LacunarySequence:  # noqa: N803
    """Frequencies in triples `m, 2m, 3m` separated by factorial jumps.

    `n_1 = 1`; for `k ≡ 1 (mod 3)` the next two terms are `2 n_k` and
    `3 n_k`, and for `k ≡ 0 (mod 3)` the next triple starts at `k! n_k`.
    That gives `1, 2, 3, 18, 36, 54, 38880, ...` with `q = 3/2`.
    """
    _check_length(N)

    terms = [1]
    for k in range(1, N):
        match k % 3:
            case 1:
                terms.append(2 * terms[-1])
            case 2:
                # n_{k+1} = 3 n_{k-1}
                terms.append(3 * terms[-2])
            case _:
                terms.append(math.factorial(k) * terms[-1])
    return _build(terms, "tripleblock", fractions.Fraction(3, 2))


def make_fibonacci(N: int) -> models.LacunarySequence:  # noqa: N803
    """`F_2, F_3, ... = 1, 2, 3, 5, 8, ...` which is lacunary with `q = 3/2`."""
    _check_length(N)

    terms = [1, 2]
    while len(terms) < N:
        terms.append(terms[-1] + terms[-2])
    return _build(terms[:N], "fibonacci", fractions.Fraction(3, 2))


def make_superlacunary(N: int, ratio: int = 100) -> models.LacunarySequence:  # noqa: N803
    """`n_1 = 1`, `n_{k+1} = ratio · k · n_k`, so consecutive ratios grow without bound."""
    if ratio < 2:
        raise errors.DomainError(f"superlacunary ratio must be at least 2, got {ratio}")
    _check_length(N)

    terms = [1]
    for k in range(1, N):
        terms.append(terms[-1] * ratio * k)
    return _build(terms, f"superlacunary:{ratio}", ratio)


def make_mixed(
    segments: collections.Sequence[models.LacunarySequence],
    *,
    label: str | None = None,
) -> models.LacunarySequence:
    """Concatenates segments, rescaling each so the joins keep the smallest segment ratio.

    Alternating segments of different constructions gives sequences whose
    normalized cumulant keeps switching between limits as `N` grows.
    """
    if not segments:
        raise errors.DomainError("make_mixed needs at least one segment")

    q = min(seg.q_certified for seg in segments)
    terms = list(segments[0].terms)
    for seg in segments[1:]:
        # Smallest integer factor f with f * first >= q * last.
        need = q * terms[-1] / seg.terms[0]
        factor = max(1, math.ceil(need))
        terms.extend(factor * n for n in seg.terms)

    if label is None:
        label = "mixed(" + ",".join(seg.label for seg in segments) + ")"
    _LOG.debug("mixed %d segments into %d terms", len(segments), len(terms))
    return _build(terms, label, q)


_BUILDERS: typing.Final[collections.Mapping[str, traits.SequenceSource]] = {
    "superlacunary": make_superlacunary,
    "pairblock": make_pairblock,
    "tripleblock": make_tripleblock,
    "fibonacci": make_fibonacci,
}
_KINDS: typing.Final[frozenset[str]] = frozenset({"geometric", "mixed", *_BUILDERS})


def _segment_source(token: str) -> traits.SequenceSource:
    kind, _, param = token.strip().partition("-")
    if param and not param.isdigit():
        raise errors.DomainError(f"segment parameter must be an integer: {token!r}")

    match kind, int(param) if param else None:
        case "geometric", int(a):
            return functools.partial(make_geometric, a)
        case "superlacunary", int(ratio):
            return functools.partial(make_superlacunary, ratio=ratio)
        case _, None if kind in _BUILDERS:
            return _BUILDERS[kind]
        case _:
            raise errors.DomainError(
                f"unknown segment {token!r}, expected geometric-<a>, superlacunary[-<ratio>], "
                "pairblock, tripleblock or fibonacci"
            )


def make_mixed_segments(
    kinds: collections.Sequence[str],
    N: int,  # noqa: N803
    *,
    first: int = 2,
    growth: int = 2,
) -> models.LacunarySequence:
    """Cycles through `kinds`, taking segments of length `first`, `first·growth`, ...

    Kind tokens are `geometric-<a>`, `superlacunary`, `superlacunary-<ratio>`,
    `pairblock`, `tripleblock` and `fibonacci`. The last segment is cut at `N`.
    """
    _check_length(N)
    if not kinds:
        raise errors.DomainError("make_mixed_segments needs at least one kind")
    if first < 1 or growth < 1:
        raise errors.DomainError(f"segment lengths need first ≥ 1 and growth ≥ 1, got {first}, {growth}")

    sources = [_segment_source(kind) for kind in kinds]
    segments: list[models.LacunarySequence] = []
    length, remaining = first, N
    while remaining > 0:
        size = min(length, remaining)
        segments.append(sources[len(segments) % len(sources)](size))
        remaining -= size
        length *= growth

    return make_mixed(segments, label="mixed:" + ",".join(kind.strip() for kind in kinds))


def from_spec(spec: str) -> models.LacunarySequence:
    """Builds a sequence from a `kind:param:N` generator spec.

    `geometric:2:8`, `pairblock:12`, `tripleblock:12`, `fibonacci:20`,
    `superlacunary:6`, `superlacunary:100:6` and `mixed:geometric-2,geometric-3:14`
    are all accepted.
    """
    kind, *args = spec.strip().split(":")
    if kind not in _KINDS:
        raise errors.DomainError(
            f"unknown generator {kind!r}, expected one of {', '.join(sorted(_KINDS))}"
        )
    if kind == "mixed":
        match args:
            case [kinds, count] if count.isdigit():
                return make_mixed_segments(kinds.split(","), int(count))
            case _:
                raise errors.DomainError(f"malformed generator spec {spec!r}, expected mixed:<kind>,<kind>:N")

    try:
        numbers = [int(arg) for arg in args]
    except ValueError:
        raise errors.DomainError(f"generator arguments must be integers: {spec!r}") from None

    match kind, numbers:
        case "geometric", [a, N]:
            return make_geometric(a, N)
        case "superlacunary", [ratio, N]:
            return make_superlacunary(N, ratio)
        case "superlacunary" | "pairblock" | "tripleblock" | "fibonacci", [N]:
            return _BUILDERS[kind](N)
        case _:
            raise errors.DomainError(f"malformed generator spec {spec!r}")


def _parse_decimal(token: str) -> int:
    sign = -1 if token.startswith("-") else 1
    digits = token.lstrip("+-")
    value = 0
    for start in range(0, len(digits), _CHUNK):
        chunk = digits[start : start + _CHUNK]
        value = value * 10 ** len(chunk) + int(chunk)
    return sign * value


def load_sequence(path: pathlib.Path | str) -> models.LacunarySequence:
    """Reads one decimal integer per line. Lines starting with `#` and blank lines are skipped."""
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise errors.DomainError(f"cannot read sequence file {str(path)!r}: {exc.strerror}") from None

    terms: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not _INTEGER.fullmatch(line):
            raise errors.SequenceParseError(f"not a decimal integer: {line[:40]!r}", lineno)
        terms.append(_parse_decimal(line))

    _LOG.debug("loaded %d terms from %s", len(terms), path)
    return _build(terms, path.stem, 2)


def save_sequence(seq: models.LacunarySequence, path: pathlib.Path | str) -> None:
    path = pathlib.Path(path)
    lines = [f"# {seq.label} q={boxed.fmt_fraction(seq.q_certified)}"]
    lines.extend(boxed.fmt_int(n) for n in seq.terms)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    _LOG.debug("saved %d terms to %s", seq.N, path)
