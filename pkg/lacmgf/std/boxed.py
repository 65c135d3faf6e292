# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Boxed helpers used globally: grid parsing, number formatting and worker fan-out."""

from __future__ import annotations

__all__ = (
    "spawn",
    "shards",
    "parse_grid",
    "parse_fraction",
    "symmetric_grid",
    "fmt_int",
    "fmt_fraction",
    "fmt_brief",
    "fmt_float",
    "fmt_value",
    "jsonable",
)

import collections.abc as collections
import concurrent.futures
import enum
import fractions
import math
import typing

from . import errors

if typing.TYPE_CHECKING:
    _T = typing.TypeVar("_T")
    _R = typing.TypeVar("_R")

_MAX_GRID_ENTRIES: typing.Final[int] = 100_000
_DIGIT_CHUNK: typing.Final[int] = 1000
_JSON_EXACT: typing.Final[int] = 2**53


def spawn(
    fn: collections.Callable[[_T], _R],
    items: collections.Iterable[_T],
    *,
    threads: int = 1,
) -> list[_R]:
    """Map `fn` over `items` on a thread pool and return the results in input order.

    The result never depends on `threads`; callers reduce it in a fixed order.
    """
    work = list(items)
    if threads <= 1 or len(work) <= 1:
        return [fn(item) for item in work]

    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, work))


def shards(total: int, size: int) -> list[tuple[int, int]]:
    """Split `range(total)` into consecutive half-open `(start, stop)` pieces of `size`."""
    if size <= 0:
        raise errors.DomainError(f"shard size must be positive, got {size}")
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def parse_fraction(text: str) -> fractions.Fraction:
    """Parses `"3/2"`, `"1.5"` or `"2"` into an exact rational."""
    try:
        return fractions.Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise errors.DomainError(f"not a rational number: {text!r}") from None


def parse_grid(text: str) -> tuple[float, ...]:
    """Parses a lambda grid.

    Accepts `a:b:step` (inclusive of `b` when it lies on the grid) or a comma
    separated list. Range endpoints go through exact rationals, so
    `0.05:0.25:0.05` yields exactly five points.
    """
    text = text.strip()
    if not text:
        raise errors.GridError("empty lambda grid")

    if ":" not in text:
        try:
            return tuple(float(part) for part in text.split(","))
        except ValueError:
            raise errors.GridError(f"bad lambda list {text!r}") from None

    parts = text.split(":")
    if len(parts) != 3:
        raise errors.GridError(f"expected a:b:step, got {text!r}")

    try:
        start, stop, step = (fractions.Fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise errors.GridError(f"bad lambda range {text!r}") from None

    if step == 0 or (stop - start) * step < 0:
        raise errors.GridError(f"step {step} never reaches {stop} from {start}")

    count = math.floor((stop - start) / step) + 1
    if count > _MAX_GRID_ENTRIES:
        raise errors.GridError(f"lambda grid has {count} points, limit is {_MAX_GRID_ENTRIES}")
    return tuple(float(start + k * step) for k in range(count))


def symmetric_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """`{±start, ..., ±stop}` sorted ascending, built from exact decimals."""
    positive = parse_grid(f"{start!r}:{stop!r}:{step!r}")
    if any(x <= 0 for x in positive):
        raise errors.GridError("symmetric grids are built from positive magnitudes")
    return tuple(sorted([-x for x in positive] + list(positive)))


def fmt_int(value: int) -> str:
    """Exact decimal of any integer, past the interpreter's string conversion limit."""
    if value < 0:
        return "-" + fmt_int(-value)
    if value < 10**_DIGIT_CHUNK:
        return str(value)

    chunks: list[str] = []
    while value >= 10**_DIGIT_CHUNK:
        value, rest = divmod(value, 10**_DIGIT_CHUNK)
        chunks.append(str(rest).zfill(_DIGIT_CHUNK))
    chunks.append(str(value))
    return "".join(reversed(chunks))


def fmt_brief(value: int | fractions.Fraction) -> str:
    """Short form for messages: exact up to 40 digits, otherwise only the digit count."""
    if isinstance(value, fractions.Fraction):
        if value.denominator == 1:
            return fmt_brief(value.numerator)
        return f"{fmt_brief(value.numerator)}/{fmt_brief(value.denominator)}"
    if abs(value) < 10**40:
        return str(value)
    return f"a {math.floor(math.log10(abs(value))) + 1}-digit integer"


def fmt_fraction(value: fractions.Fraction) -> str:
    if value.denominator == 1:
        return fmt_int(value.numerator)
    return f"{fmt_int(value.numerator)}/{fmt_int(value.denominator)}"


def fmt_float(value: float) -> str:
    """Locale independent decimal at 17 significant digits."""
    return format(value, ".17g")


def fmt_value(value: typing.Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return fmt_int(value)
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, fractions.Fraction):
        return fmt_fraction(value)
    if isinstance(value, enum.Enum):
        return str(value.value)
    if value is None:
        return ""
    return str(value)


def jsonable(value: typing.Any) -> typing.Any:
    """Converts records to plain JSON types.

    Rationals become `"p/q"` strings. Integers a double cannot hold exactly
    become decimal strings.
    """
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value if abs(value) <= _JSON_EXACT else fmt_int(value)
    if isinstance(value, fractions.Fraction):
        return fmt_fraction(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, collections.Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value
