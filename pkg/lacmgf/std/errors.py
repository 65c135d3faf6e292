# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Errors raised across lacmgf.

Two families exist, and the command line maps them to exit codes:
`ValidationError` (bad input, exit 2) and `Infeasible` (a grid, enumeration or
length limit was hit, exit 3).
"""

from __future__ import annotations

__all__: tuple[str, ...] = (
    "LacunaryError",
    "ValidationError",
    "DomainError",
    "NotLacunary",
    "NotIncreasing",
    "NonPositiveTerm",
    "SequenceParseError",
    "InvalidBlockShape",
    "GridError",
    "ConfigError",
    "Infeasible",
)

import typing


class LacunaryError(RuntimeError):
    """Base error for everything raised by this package."""

    __slots__ = ("message",)

    def __init__(self, message: str = "", *args: typing.Any) -> None:
        super().__init__(message, *args)
        self.message = message

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.message!r})"

    def __str__(self) -> str:
        return self.message


class ValidationError(LacunaryError):
    """Input violates a documented precondition."""

    __slots__ = ()


class DomainError(ValidationError):
    """An argument is outside of the operation's domain."""

    __slots__ = ()


class NotLacunary(ValidationError):
    """Some consecutive ratio `n_{k+1} / n_k` is not greater than 1."""

    __slots__ = ()


class NotIncreasing(ValidationError):
    __slots__ = ()


class NonPositiveTerm(ValidationError):
    __slots__ = ()


class SequenceParseError(ValidationError):
    """A sequence file line could not be parsed."""

    __slots__ = ("line",)

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvalidBlockShape(ValidationError):
    __slots__ = ()


class GridError(ValidationError):
    """A lambda grid is unusable for fitting or transforms."""

    __slots__ = ()


class ConfigError(ValidationError):
    __slots__ = ()


class Infeasible(LacunaryError):
    """A computation would exceed a grid, memory or enumeration bound.

    The message always names the violated bound.
    """

    __slots__ = ("required", "limit")

    def __init__(
        self,
        message: str,
        *,
        required: int | None = None,
        limit: int | None = None,
    ) -> None:
        super().__init__(message)
        self.required = required
        self.limit = limit
