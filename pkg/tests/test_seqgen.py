# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

from __future__ import annotations

import fractions
import pathlib

import pytest

from lacmgf import models
from lacmgf.components import seqgen
from lacmgf.std import errors
from tests import oracles


def test_geometric():
    seq = seqgen.make_geometric(2, 4)
    assert seq.terms == (2, 4, 8, 16)
    assert seq.q_certified == 2
    assert seq.label == "geometric:2"


def test_pairblock_prefix():
    seq = seqgen.make_pairblock(6)
    assert seq.terms == (1, 2, 4, 8, 192, 384)
    assert seq.q_certified == 2


def test_tripleblock_prefix():
    seq = seqgen.make_tripleblock(7)
    assert seq.terms == (1, 2, 3, 18, 36, 54, 38880)
    assert seq.q_certified == fractions.Fraction(3, 2)


def test_fibonacci():
    seq = seqgen.make_fibonacci(6)
    assert seq.terms == (1, 2, 3, 5, 8, 13)
    assert seq.q_certified == fractions.Fraction(3, 2)


def test_superlacunary_ratios_grow():
    seq = seqgen.make_superlacunary(4)
    assert seq.terms == (1, 100, 20_000, 6_000_000)
    assert seq.q_certified == 100


def test_factorial_growth_stays_exact():
    seq = seqgen.make_tripleblock(40)
    assert seq.N == 40
    assert seq.max_frequency > 2**200
    assert seqgen.verify_hadamard(seq.terms) == fractions.Fraction(3, 2)


@pytest.mark.parametrize(
    ("terms", "error"),
    [
        ([], errors.DomainError),
        ([1, 0], errors.NonPositiveTerm),
        ([-3], errors.NonPositiveTerm),
        ([4, 2], errors.NotIncreasing),
        ([3, 3], errors.NotLacunary),
    ],
)
def test_verify_hadamard_rejects(terms: list[int], error: type[Exception]):
    with pytest.raises(error):
        seqgen.verify_hadamard(terms)


def test_verify_hadamard_is_exact_minimum():
    assert seqgen.verify_hadamard([1, 3, 4, 9]) == fractions.Fraction(4, 3)


def test_single_term_is_vacuously_lacunary():
    assert seqgen.verify_hadamard([5]) == 2
    assert seqgen.verify_hadamard([5], vacuous=fractions.Fraction(7, 2)) == fractions.Fraction(7, 2)
    with pytest.raises(errors.NotLacunary):
        seqgen.verify_hadamard([5], vacuous=1)


def test_sequence_rejects_overclaimed_ratio():
    with pytest.raises(errors.NotLacunary):
        models.LacunarySequence(terms=(1, 2, 3), q_certified=2)


def test_take_recertifies_prefix():
    head = seqgen.make_fibonacci(10).take(2)
    assert head.terms == (1, 2)
    assert head.q_certified == 2

    with pytest.raises(errors.DomainError):
        seqgen.make_fibonacci(3).take(4)


def test_from_spec():
    assert seqgen.from_spec("geometric:2:8") == seqgen.make_geometric(2, 8)
    assert seqgen.from_spec("tripleblock:12") == seqgen.make_tripleblock(12)
    assert seqgen.from_spec("superlacunary:6").terms == seqgen.make_superlacunary(6).terms
    assert seqgen.from_spec("superlacunary:10:3").terms == (1, 10, 200)


@pytest.mark.parametrize(
    "spec",
    [
        "nope:3",
        "geometric:x:2",
        "geometric:2",
        "pairblock:1:2",
        "mixed:geometric:14",
        "mixed:pairblock-2:5",
        "mixed:geometric-2",
        "mixed:geometric-2,geometric-3:0",
        "mixed:geometric-x:4",
    ],
)
def test_from_spec_rejects(spec: str):
    with pytest.raises(errors.DomainError):
        seqgen.from_spec(spec)


def test_mixed_keeps_smallest_ratio():
    mixed = seqgen.make_mixed([seqgen.make_geometric(2, 3), seqgen.make_fibonacci(3)])
    assert mixed.terms == (2, 4, 8, 12, 24, 36)
    assert mixed.q_certified == fractions.Fraction(3, 2)
    assert mixed.label == "mixed(geometric:2,fibonacci)"


def test_mixed_segments_grow_and_alternate():
    seq = seqgen.from_spec("mixed:geometric-2,geometric-3:14")
    assert seq.terms == (
        2, 4,
        9, 27, 81, 243,
        486, 972, 1944, 3888, 7776, 15552, 31104, 62208,
    )  # fmt: skip
    assert seq.q_certified == 2
    assert seq.label == "mixed:geometric-2,geometric-3"

    assert seqgen.make_mixed_segments(["geometric-2", "geometric-3"], 3).terms == (2, 4, 9)
    short = seqgen.make_mixed_segments(["superlacunary-10", "fibonacci"], 5, first=1, growth=3)
    assert short.terms == (1, 2, 4, 6, 9)
    assert short.q_certified == fractions.Fraction(3, 2)


def test_save_and_load_huge_terms(tmp_path: pathlib.Path):
    big = 10**1500 + 7
    seq = models.LacunarySequence(terms=(3, big, 3 * big), q_certified=3)
    path = tmp_path / "huge.txt"

    seqgen.save_sequence(seq, path)
    loaded = seqgen.load_sequence(path)

    assert loaded.terms == seq.terms
    assert loaded.label == "huge"
    assert path.read_text(encoding="utf-8").startswith("# custom q=3\n")


def test_load_skips_comments_and_blanks(tmp_path: pathlib.Path):
    path = tmp_path / "seq.txt"
    path.write_text("# a comment\n\n1\n  3\n\n9\n", encoding="utf-8")
    seq = seqgen.load_sequence(path)
    assert seq.terms == (1, 3, 9)
    assert seq.q_certified == 3


def test_load_reports_line_number(tmp_path: pathlib.Path):
    path = tmp_path / "bad.txt"
    path.write_text("# header\n1\n\n2.5\n", encoding="utf-8")
    with pytest.raises(errors.SequenceParseError) as exc:
        seqgen.load_sequence(path)
    assert exc.value.line == 4
    assert str(exc.value).startswith("line 4:")


def test_load_rejects_non_lacunary_file(tmp_path: pathlib.Path):
    path = tmp_path / "flat.txt"
    path.write_text("1\n2\n2\n", encoding="utf-8")
    with pytest.raises(errors.NotLacunary):
        seqgen.load_sequence(path)


def test_load_missing_file(tmp_path: pathlib.Path):
    with pytest.raises(errors.DomainError):
        seqgen.load_sequence(tmp_path / "missing.txt")


@pytest.mark.parametrize("N", range(1, 31))
def test_block_constructions_follow_their_recursion(N: int):  # noqa: N803
    pair = seqgen.make_pairblock(N)
    triple = seqgen.make_tripleblock(N)
    assert list(pair.terms) == oracles.block_terms(2, N)
    assert list(triple.terms) == oracles.block_terms(3, N)
    assert seqgen.verify_hadamard(pair.terms, vacuous=2) == 2
    expected = fractions.Fraction(2) if N == 2 else fractions.Fraction(3, 2)
    assert seqgen.verify_hadamard(triple.terms, vacuous=fractions.Fraction(3, 2)) == expected
