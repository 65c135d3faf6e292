# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Slow reference implementations the library results are checked against."""

from __future__ import annotations

import fractions
import itertools
import math

import numpy as np

from lacmgf import models
from lacmgf.components import seqgen

_SIGNS = {
    models.EquationKind.TWO_TERM: (1, -1),
    models.EquationKind.THREE_TERM: (1, -1, -1),
    models.EquationKind.FOUR_TERM_PPMM: (1, 1, -1, -1),
    models.EquationKind.FOUR_TERM_PPPM: (1, 1, 1, -1),
}


def brute_count(
    seq: models.LacunarySequence,
    block: range,
    threshold: int,
    kind: models.EquationKind,
) -> int:
    signs = _SIGNS[kind]
    values = [seq.frequency(k) for k in block]
    return sum(
        1
        for combo in itertools.product(values, repeat=len(signs))
        if abs(sum(s * n for s, n in zip(signs, combo))) < threshold
    )


def random_lacunary(
    rng: np.random.Generator,
    *,
    max_terms: int = 10,
    max_frequency: int = 2048,
    min_ratio: float = 1.25,
) -> models.LacunarySequence:
    """A random strictly lacunary sequence with consecutive ratios in about [min_ratio, 3]."""
    wanted = int(rng.integers(1, max_terms + 1))
    terms = [int(rng.integers(1, 8))]
    while len(terms) < wanted:
        lo = max(terms[-1] + 1, math.ceil(terms[-1] * min_ratio))
        hi = min(3 * terms[-1], max_frequency)
        if lo > hi:
            break
        terms.append(int(rng.integers(lo, hi + 1)))

    return models.LacunarySequence(
        terms=tuple(terms), q_certified=seqgen.verify_hadamard(terms), label="random"
    )


def random_rational(
    rng: np.random.Generator, lo: float, hi: float, max_denominator: int = 40
) -> fractions.Fraction:
    """A random rational in (lo, hi]."""
    while True:
        den = int(rng.integers(1, max_denominator + 1))
        num = int(rng.integers(math.floor(lo * den), math.floor(hi * den) + 1))
        q = fractions.Fraction(num, den)
        if lo < q <= hi:
            return q


def block_terms(width: int, N: int) -> list[int]:  # noqa: N803
    """Blocks `m, 2m, ..., width·m`; the next block starts at `(last term) · k!`,
    `k` being the index of that last term.
    """
    terms: list[int] = []
    start = 1
    while len(terms) < N:
        block = [j * start for j in range(1, width + 1)]
        terms.extend(block)
        start = block[-1] * math.factorial(len(terms))
    return terms[:N]
