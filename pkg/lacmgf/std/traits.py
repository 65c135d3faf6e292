# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Interfaces the asymptotic checks depend on instead of concrete evaluators."""

from __future__ import annotations

__all__: tuple[str, ...] = ("MgfRunner", "SequenceSource")

import typing

if typing.TYPE_CHECKING:
    from lacmgf import models


@typing.runtime_checkable
class MgfRunner(typing.Protocol):
    """Anything that can evaluate the moment generating function of a sequence."""

    __slots__ = ()

    @property
    def method(self) -> models.Method:
        raise NotImplementedError

    def evaluate(self, seq: models.LacunarySequence, lam: float) -> models.MgfEstimate:
        """Evaluate `∫₀¹ exp(λ Σ √2 cos(2π n_k x)) dx` for every term of `seq`."""
        raise NotImplementedError

    def feasible(self, seq: models.LacunarySequence, lam: float) -> bool:
        """Whether `evaluate` would run within the configured limits."""
        raise NotImplementedError


@typing.runtime_checkable
class SequenceSource(typing.Protocol):
    """Builds a sequence of a requested length."""

    __slots__ = ()

    def __call__(self, N: int, /) -> models.LacunarySequence:  # noqa: N803
        raise NotImplementedError
