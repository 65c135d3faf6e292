# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

from __future__ import annotations

import json
import math
import pathlib
import re
import typing

import pytest
from click import testing

import lacmgf
from lacmgf import client
from lacmgf import models
from lacmgf.components import blockdio
from lacmgf.components import seqgen
from lacmgf.std import boxed

SCHEMAS = pathlib.Path(lacmgf.__file__).parent / "schemas"

_TYPES: dict[str, tuple[type, ...]] = {
    "object": (dict,),
    "array": (list,),
    "string": (str,),
    "integer": (int,),
    "number": (int, float),
    "boolean": (bool,),
    "null": (type(None),),
}


def _conforms(value: typing.Any, schema: dict[str, typing.Any], where: str = "$") -> None:
    """Checks `value` against the subset of JSON Schema the shipped schemas use.

    Supported keywords: `type` (single or list), `enum`, `minimum`,
    `maximum`, `exclusiveMinimum`, `pattern`, `required`, `properties`,
    `items`, `minItems` and `maxItems`. Anything else is ignored.
    """
    if "enum" in schema:
        assert value in schema["enum"], where
    if "type" in schema:
        names = schema["type"] if isinstance(schema["type"], list) else [schema["type"]]
        ok = any(
            isinstance(value, _TYPES[name]) and not (name in ("integer", "number") and isinstance(value, bool))
            for name in names
        )
        assert ok, f"{where}: {value!r} is not {names}"
    if "minimum" in schema and isinstance(value, (int, float)):
        assert value >= schema["minimum"], where
    if "maximum" in schema and isinstance(value, (int, float)):
        assert value <= schema["maximum"], where
    if "exclusiveMinimum" in schema:
        assert value > schema["exclusiveMinimum"], where
    if "pattern" in schema and isinstance(value, str):
        assert re.search(schema["pattern"], value), f"{where}: {value[:40]!r}"
    if isinstance(value, dict):
        for key in schema.get("required", []):
            assert key in value, f"{where}: missing {key}"
        for key, sub in schema.get("properties", {}).items():
            if key in value:
                _conforms(value[key], sub, f"{where}.{key}")
    if isinstance(value, list):
        assert len(value) >= schema.get("minItems", 0), where
        assert len(value) <= schema.get("maxItems", len(value)), where
        if "items" in schema:
            for i, item in enumerate(value):
                _conforms(item, schema["items"], f"{where}[{i}]")


def _check_schema(command: str, output: str) -> dict[str, typing.Any]:
    payload = json.loads(output)
    schema = json.loads((SCHEMAS / f"{command}.schema.json").read_text(encoding="utf-8"))
    _conforms(payload, schema)
    return payload


@pytest.fixture()
def runner() -> testing.CliRunner:
    return testing.CliRunner(mix_stderr=False)


def test_bessel_coeffs_text(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["bessel-coeffs", "--order", "6"])
    assert result.exit_code == 0, result.stderr
    assert result.stdout == "1/2,-1/16,1/72\n"


def test_bessel_coeffs_json(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["--verbose", "bessel-coeffs", "--order", "8", "--format", "json"])
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("bessel-coeffs", result.stdout)
    assert payload["coefficients"] == ["1/2", "-1/16", "1/72", "-11/3072"]


def test_mgf_both_methods_agree(runner: testing.CliRunner):
    result = runner.invoke(
        client.main, ["mgf", "--gen", "geometric:2:8", "--lambda", "0.2", "--method", "both"]
    )
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("mgf", result.stdout)

    quad, dio = payload["estimates"]
    assert (quad["method"], dio["method"]) == ("quadrature", "diophantine")
    gap = abs(quad["log_value"] - dio["log_value"])
    assert gap <= quad["error_bound"] + dio["error_bound"] + 1e-15
    assert payload["sequence"] == {"label": "geometric:2", "N": 8, "q_certified": "2"}


def test_mgf_csv_grid(runner: testing.CliRunner):
    result = runner.invoke(
        client.main,
        ["mgf", "--gen", "fibonacci:10", "--lambda-grid", "-0.2:0.2:0.1", "--format", "csv"],
    )
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "lambda,method,value,log_value,lambda_n,error_bound"
    assert [line.split(",")[0] for line in lines[1:]] == [
        "-0.20000000000000001",
        "-0.10000000000000001",
        "0",
        "0.10000000000000001",
        "0.20000000000000001",
    ]
    assert lines[3].split(",")[2] == "1"


def test_output_is_byte_identical(runner: testing.CliRunner):
    args = ["mgf", "--gen", "pairblock:8", "--lambda-grid", "0.1,0.5", "--method", "dio", "--threads", "2"]
    first = runner.invoke(client.main, args)
    second = runner.invoke(client.main, args)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout_bytes == second.stdout_bytes


def test_out_writes_file(runner: testing.CliRunner, tmp_path: pathlib.Path):
    out = tmp_path / "coeffs.txt"
    result = runner.invoke(client.main, ["bessel-coeffs", "--order", "4", "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    assert result.stdout == ""
    assert out.read_text(encoding="utf-8") == "1/2,-1/16\n"


def test_sequence_file(runner: testing.CliRunner, tmp_path: pathlib.Path):
    path = tmp_path / "mine.txt"
    path.write_text("# three terms\n1\n3\n10\n", encoding="utf-8")
    result = runner.invoke(client.main, ["mgf", "--seq", str(path), "--lambda", "0.3"])
    assert result.exit_code == 0, result.stderr
    assert json.loads(result.stdout)["sequence"]["label"] == "mine"

    path.write_text("1\nthree\n", encoding="utf-8")
    result = runner.invoke(client.main, ["mgf", "--seq", str(path), "--lambda", "0.3"])
    assert result.exit_code == 2
    assert result.stderr.startswith("error: line 2:")


def test_blocks_needs_room_for_a_pair(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["blocks", "--n", "12", "--q", "2", "--lambda", "0.05"])
    assert result.exit_code == 3
    assert "N ≥ L + 1" in result.stderr
    assert result.stdout == ""

    result = runner.invoke(client.main, ["blocks", "--n", "64", "--q", "2", "--lambda", "0.05"])
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("blocks", result.stdout)
    assert (payload["s"], payload["L"], payload["M"]) == (4, 10, 5)
    assert payload["long_blocks"][0] == [1, 10]
    assert payload["assumption_violations"] == []


def test_blocks_shape_is_validated(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["blocks", "--n", "64", "--q", "2", "--L", "3"])
    assert result.exit_code == 2
    assert result.stderr.startswith("error:")


def test_count_csv(runner: testing.CliRunner):
    result = runner.invoke(
        client.main,
        ["count", "--gen", "geometric:2:40", "--kind", "three_term", "--L", "8", "--s", "4"],
    )
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "kind,block,threshold,count,L"
    assert lines[1] == "three_term,1,2,7,8"
    assert lines[-1] == f"three_term,4,{2**37},3,4"


def test_count_json(runner: testing.CliRunner):
    result = runner.invoke(
        client.main, ["count", "--gen", "fibonacci:20", "--lambda", "0.05", "--format", "json"]
    )
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("count", result.stdout)
    assert {row["kind"] for row in payload["counts"]} == {
        "two_term",
        "three_term",
        "four_term_ppmm",
        "four_term_pppm",
    }


def test_probe_csv(runner: testing.CliRunner):
    result = runner.invoke(
        client.main, ["probe", "--gen", "geometric:2:40", "--kind", "three_term", "--L", "8", "--L", "16"]
    )
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[:2] == ["L,count,block,slope", "8,7,1,"]
    L, count, block, slope = lines[2].split(",")  # noqa: N806
    assert (L, count, block) == ("16", "15", "1")
    assert float(slope) == pytest.approx(math.log(15 / 7) / math.log(2))


def test_fit_pair_limit(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["fit", "--limit", "pair"])
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("fit", result.stdout)
    assert payload["c2"] == pytest.approx(0.5, abs=2e-3)
    assert payload["seq_label"] == "pair-limit"


def test_fit_rejects_bad_grid(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["fit", "--gen", "geometric:2:6", "--lambda-grid", "0.1:0.2:0.05"])
    assert result.exit_code == 2
    assert result.stderr.startswith("error:")


def test_envelope_csv(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["envelope", "--gen", "geometric:2:8", "--format", "csv"])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "lambda,ratio"
    assert len(lines) == 11


def test_envelope_json(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["envelope", "--gen", "tripleblock:9"])
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("envelope", result.stdout)
    assert payload["ratio"] == max(payload["ratios"])


def test_rate_gaussian_model(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["rate", "--t", "0.2", "--t", "-0.3"])
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("rate", result.stdout)
    assert payload["model"] == "gaussian"
    assert [r["rate"] for r in payload["rates"]] == pytest.approx([0.02, 0.045], abs=1e-6)


def test_rate_needs_levels(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["rate"])
    assert result.exit_code == 2


def test_tail(runner: testing.CliRunner):
    result = runner.invoke(
        client.main,
        ["tail", "--gen", "geometric:2:6", "--lambda", "1", "--t", "0.5", "--t", "100", "--grid-points", "2000"],
    )
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("tail", result.stdout)
    low, high = payload["tails"]
    assert not low["flagged"]
    assert high["flagged"]
    assert high["measure"] == pytest.approx(1 / 2000)


@pytest.mark.parametrize(
    "args",
    [
        ["mgf", "--lambda", "0.2"],
        ["mgf", "--gen", "geometric:2:8", "--seq", "x.txt", "--lambda", "0.2"],
        ["mgf", "--gen", "geometric:2:8", "--lambda", "2"],
        ["mgf", "--gen", "geometric:2:8", "--lambda", "0.2", "--lambda-grid", "0.1,0.2"],
        ["mgf", "--gen", "geometric:2:8"],
        ["mgf", "--gen", "wavelet:3", "--lambda", "0.2"],
        ["mgf", "--gen", "geometric:2:8", "--n", "9", "--lambda", "0.2"],
    ],
)
def test_validation_errors_exit_2(runner: testing.CliRunner, args: list[str]):
    result = runner.invoke(client.main, args)
    assert result.exit_code == 2
    assert result.stderr.startswith("error:")
    assert result.stdout == ""


def test_infeasible_exits_3(runner: testing.CliRunner):
    result = runner.invoke(
        client.main, ["mgf", "--gen", "geometric:2:17", "--lambda", "0.2", "--method", "dio"]
    )
    assert result.exit_code == 3
    assert "N ≤ 16" in result.stderr


def test_unknown_subcommand_exits_64(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["integrate"])
    assert result.exit_code == 64
    assert "integrate" in result.stderr


def test_run_returns_exit_codes(capsys: pytest.CaptureFixture[str]):
    assert client.run(["bessel-coeffs", "--order", "2"]) == 0
    assert capsys.readouterr().out == "1/2\n"
    assert client.run(["integrate"]) == 64
    assert client.run(["mgf", "--gen", "geometric:2:8", "--lambda", "5"]) == 2


@pytest.mark.parametrize("output_format", ["csv", "json"])
def test_count_prints_thresholds_of_any_size(runner: testing.CliRunner, output_format: str):
    seq = seqgen.make_pairblock(130)
    decomposition = blockdio.decompose(seq.N, 10, blockdio.choose_s(seq.q_certified))
    expected = blockdio.count_blocks(
        seq, decomposition, models.EquationKind.THREE_TERM, complete_only=False
    )

    result = runner.invoke(
        client.main,
        ["count", "--gen", "pairblock:130", "--L", "10", "--kind", "three_term", "--format", output_format],
    )
    assert result.exit_code == 0, result.stderr

    if output_format == "csv":
        rows = [line.split(",") for line in result.stdout.splitlines()[1:]]
        thresholds = [row[2] for row in rows]
        counts = [int(row[3]) for row in rows]
    else:
        payload = _check_schema("count", result.stdout)
        thresholds = [str(row["threshold"]) for row in payload["counts"]]
        counts = [row["count"] for row in payload["counts"]]

    assert counts == [c.count for c in expected]
    assert thresholds == [
        boxed.fmt_int(seq.frequency(decomposition.long_blocks[c.block_index - 1][0]))
        for c in expected
    ]
    assert max(len(t) for t in thresholds) > 4300


def test_run_maps_numeric_overflow_to_infeasible(
    monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
):
    def _overflow(_: typing.Any) -> int:
        raise ValueError("Exceeds the limit (4300) for integer string conversion")

    monkeypatch.setattr(blockdio, "choose_s", _overflow)
    assert client.run(["count", "--gen", "geometric:2:40", "--L", "8"]) == 3
    assert capsys.readouterr().err == "error: Exceeds the limit (4300) for integer string conversion\n"


def test_fit_increment(runner: testing.CliRunner):
    result = runner.invoke(client.main, ["fit", "--gen", "geometric:2:10", "--increment"])
    assert result.exit_code == 0, result.stderr
    payload = _check_schema("fit", result.stdout)
    assert payload["increment"] is True
    assert payload["N"] == 10
    assert payload["c2"] == pytest.approx(0.5, abs=1e-3)
    assert payload["c3"] == pytest.approx(1 / (2 * math.sqrt(2)), abs=2e-3)

    result = runner.invoke(client.main, ["fit", "--limit", "pair", "--increment"])
    assert result.exit_code == 2
    assert result.stderr == "error: --increment applies to sequences, not to --limit\n"
