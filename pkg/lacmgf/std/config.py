# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

from __future__ import annotations

__all__: tuple[str] = ("Config",)

import collections.abc as collections
import functools
import logging
import typing

import attrs

from . import errors

# field name, environment key, converter
_ENVIRON: typing.Final[
    tuple[tuple[str, str, collections.Callable[[str], typing.Any]], ...]
] = (
    ("MAX_GRID", "LACMGF_MAX_GRID", int),
    ("THREADS", "LACMGF_THREADS", int),
    ("OVERSAMPLE", "LACMGF_OVERSAMPLE", int),
    ("TAIL_TOL", "LACMGF_TAIL_TOL", float),
    ("MEMO_BUDGET", "LACMGF_MEMO_BUDGET", int),
    ("LOG_LEVEL", "LACMGF_LOG_LEVEL", str.upper),
)


def _positive(
    _: typing.Any, attribute: attrs.Attribute[typing.Any], value: float
) -> None:
    if value <= 0:
        raise errors.ConfigError(f"{attribute.name} must be positive, got {value!r}")


@attrs.frozen
class Config:
    """Shared numerical limits and defaults for every command."""

    MAX_GRID: int = attrs.field(default=2**26, validator=_positive)
    """Largest number of equispaced points a quadrature or tail grid may use."""

    THREADS: int = attrs.field(default=1, validator=_positive)
    OVERSAMPLE: int = attrs.field(default=8, validator=_positive)
    TAIL_TOL: float = attrs.field(default=1e-13, validator=_positive)

    MEMO_BUDGET: int = attrs.field(default=2_000_000, validator=_positive)
    """Largest number of (depth, partial sum) states the Diophantine expansion may memoize."""

    LOG_LEVEL: str = "WARNING"

    @classmethod
    @functools.cache
    def into_dotenv(cls) -> Config:
        """Loads the configs from `.env` file if installed and set."""
        import os as _os

        import dotenv

        dotenv.load_dotenv()
        return cls.from_mapping(_os.environ)

    @classmethod
    def from_mapping(cls, env: collections.Mapping[str, str]) -> Config:
        kwargs: dict[str, typing.Any] = {}
        for name, key, convert in _ENVIRON:
            if key not in env:
                continue
            try:
                kwargs[name] = convert(env[key])
            except ValueError:
                raise errors.ConfigError(
                    f"bad value for {key}: {env[key]!r}"
                ) from None

        return cls(**kwargs)

    def log_level(self) -> int:
        level = logging.getLevelName(self.LOG_LEVEL)
        if not isinstance(level, int):
            raise errors.ConfigError(f"unknown log level {self.LOG_LEVEL!r}")
        return level
