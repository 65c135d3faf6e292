# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""The `lacmgf` command line.

stdout carries data only. Diagnostics go to stderr as a single
`error: ...` line: validation errors exit with 2, infeasible requests with 3
and unknown subcommands with 64.
"""

from __future__ import annotations

__all__: tuple[str, ...] = ("main", "run", "UnknownCommand")

import csv
import io
import json
import logging
import pathlib
import sys
import typing

import attrs
import click

from lacmgf import models
from lacmgf.components import asymptotics
from lacmgf.components import besselkit
from lacmgf.components import blockdio
from lacmgf.components import mgfeval
from lacmgf.components import seqgen
from lacmgf.std import boxed
from lacmgf.std import config as __config
from lacmgf.std import errors

if typing.TYPE_CHECKING:
    import collections.abc as collections

    from lacmgf.std import traits

_LOGGER = logging.getLogger("lacmgf.client")

_EXIT_VALIDATION: typing.Final[int] = 2
_EXIT_INFEASIBLE: typing.Final[int] = 3
_EXIT_UNKNOWN: typing.Final[int] = 64

_KINDS: typing.Final[tuple[str, ...]] = tuple(kind.value for kind in models.EquationKind)


class UnknownCommand(click.UsageError):
    exit_code = _EXIT_UNKNOWN


class _Group(click.Group):
    def resolve_command(
        self, ctx: click.Context, args: list[str]
    ) -> tuple[str | None, click.Command | None, list[str]]:
        name = click.utils.make_str(args[0])
        if self.get_command(ctx, name) is None and not name.startswith("-"):
            raise UnknownCommand(f"no such command {name!r}", ctx)
        return super().resolve_command(ctx, args)

    def invoke(self, ctx: click.Context) -> typing.Any:
        try:
            return super().invoke(ctx)
        except errors.ValidationError as exc:
            _fail(exc, _EXIT_VALIDATION)
        except errors.Infeasible as exc:
            _fail(exc, _EXIT_INFEASIBLE)
        except (ValueError, OverflowError, MemoryError) as exc:
            # Numbers too large to convert or hold.
            _fail(exc, _EXIT_INFEASIBLE)


def _fail(exc: Exception, code: int) -> typing.NoReturn:
    _LOGGER.debug("exiting with %d: %r", code, exc)
    click.echo(f"error: {exc}", err=True)
    raise click.exceptions.Exit(code)


def _enable_logging(level: int) -> None:
    root = logging.getLogger("lacmgf")
    # One handler, bound to the stderr of the current invocation.
    for stale in [h for h in root.handlers if h.get_name() == "lacmgf.stderr"]:
        root.removeHandler(stale)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name("lacmgf.stderr")
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)

    root.setLevel(level)
    for logger in (
        logging.getLogger("lacmgf.client"),
        logging.getLogger("lacmgf.cache"),
        logging.getLogger("lacmgf.seqgen"),
        logging.getLogger("lacmgf.blockdio"),
        logging.getLogger("lacmgf.besselkit"),
        logging.getLogger("lacmgf.mgfeval"),
        logging.getLogger("lacmgf.asymptotics"),
    ):
        logger.setLevel(level)


@attrs.frozen(weakref_slot=False)
class _Session:
    config: __config.Config


def _session(ctx: click.Context) -> _Session:
    return ctx.find_object(_Session) or _Session(__config.Config.into_dotenv())


# Shared options.


def _sequence_options(fn: collections.Callable[..., typing.Any]) -> collections.Callable[..., typing.Any]:
    fn = click.option("--n", "n", type=int, default=None, help="Use the first N terms.")(fn)
    fn = click.option(
        "--seq",
        "seq_path",
        type=click.Path(dir_okay=False, path_type=pathlib.Path),
        default=None,
        help="Sequence file, one integer per line.",
    )(fn)
    fn = click.option("--gen", default=None, help="Generator spec such as geometric:2:8.")(fn)
    return fn


def _method_options(fn: collections.Callable[..., typing.Any]) -> collections.Callable[..., typing.Any]:
    fn = click.option("--threads", type=click.IntRange(min=1), default=None)(fn)
    fn = click.option("--m-max", "m_max", type=click.IntRange(min=0), default=None)(fn)
    fn = click.option("--oversample", type=click.IntRange(min=4), default=None)(fn)
    fn = click.option(
        "--method",
        type=click.Choice(["quad", "dio", "both", "auto"]),
        default="auto",
        show_default=True,
    )(fn)
    return fn


def _output_options(default: str) -> collections.Callable[..., typing.Any]:
    def decorator(fn: collections.Callable[..., typing.Any]) -> collections.Callable[..., typing.Any]:
        fn = click.option(
            "--out",
            "out_path",
            type=click.Path(dir_okay=False, writable=True, path_type=pathlib.Path),
            default=None,
        )(fn)
        fn = click.option(
            "--format",
            "output_format",
            type=click.Choice([f.value for f in models.OutputFormat]),
            default=default,
            show_default=True,
        )(fn)
        return fn

    return decorator


def _lambdas(lam: float | None, grid: str | None) -> tuple[float, ...]:
    if lam is not None and grid is not None:
        raise errors.GridError("give either --lambda or --lambda-grid, not both")
    if grid is not None:
        return boxed.parse_grid(grid)
    return () if lam is None else (lam,)


def _load(run: models.RunConfig) -> models.LacunarySequence:
    if run.gen is not None:
        seq = seqgen.from_spec(run.gen)
    else:
        assert run.seq_path is not None
        seq = seqgen.load_sequence(run.seq_path)

    if run.N is None:
        return seq
    if run.N > seq.N:
        raise errors.DomainError(f"--n {run.N} exceeds the {seq.N} available terms")
    return seq.take(run.N)


def _run_config(session: _Session, command: str, **kwargs: typing.Any) -> models.RunConfig:
    config = session.config
    method = kwargs.pop("method", "auto")
    return models.RunConfig(
        command=command,
        method=models.Method.parse("auto" if method == "both" else method),
        oversample=kwargs.pop("oversample", None) or config.OVERSAMPLE,
        threads=kwargs.pop("threads", None) or config.THREADS,
        output_format=models.OutputFormat(kwargs.pop("output_format", "json")),
        **kwargs,
    )


def _runner(
    run: models.RunConfig, session: _Session, method: models.Method | None = None
) -> traits.MgfRunner:
    return mgfeval.runner_for(
        method or run.method,
        config=session.config,
        oversample=run.oversample,
        m_max=run.m_max,
        threads=run.threads,
    )


def _emit(
    run: models.RunConfig,
    payload: collections.Mapping[str, typing.Any],
    header: collections.Sequence[str] = (),
    rows: collections.Iterable[collections.Sequence[typing.Any]] = (),
    text: str | None = None,
) -> None:
    match run.output_format:
        case models.OutputFormat.JSON:
            body = json.dumps(boxed.jsonable(payload), sort_keys=True, indent=2) + "\n"
        case models.OutputFormat.CSV:
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([boxed.fmt_value(v) for v in row])
            body = buffer.getvalue()
        case _:
            if text is None:
                raise errors.DomainError(f"{run.command} has no text output, use json or csv")
            body = text + "\n"

    if run.output_path is None:
        click.echo(body, nl=False)
    else:
        run.output_path.write_text(body, encoding="utf-8")
    _LOGGER.info("%s finished", run.command)


def _sequence_dict(seq: models.LacunarySequence) -> dict[str, typing.Any]:
    return {"label": seq.label, "N": seq.N, "q_certified": seq.q_certified}


# Commands.


@click.group(name="lacmgf", cls=_Group, options_metavar="[options]")
@click.option("--verbose", is_flag=True, help="Log at DEBUG level on stderr.")
@click.pass_context
def main(ctx: click.Context, verbose: bool) -> None:
    """Moment generating functions of lacunary trigonometric sums."""
    config = __config.Config.into_dotenv()
    _enable_logging(logging.DEBUG if verbose else config.log_level())
    ctx.obj = _Session(config)


@main.command(name="mgf", short_help="Evaluate the moment generating function.")
@_sequence_options
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--lambda-grid", "lambda_grid", default=None, help="a:b:step or a comma list.")
@_method_options
@_output_options("json")
@click.pass_context
def mgf_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    lam: float | None,
    lambda_grid: str | None,
    method: str,
    oversample: int | None,
    m_max: int | None,
    threads: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    run = _run_config(
        session,
        "mgf",
        gen=gen,
        seq_path=seq_path,
        N=n,
        lambdas=_lambdas(lam, lambda_grid),
        method=method,
        oversample=oversample,
        m_max=m_max,
        threads=threads,
        output_format=output_format,
        output_path=out_path,
        needs_grid=True,
    )
    seq = _load(run)

    runners = (
        [_runner(run, session, models.Method.QUADRATURE), _runner(run, session, models.Method.DIOPHANTINE)]
        if method == "both"
        else [_runner(run, session)]
    )
    per_method = [mgfeval.evaluate_grid(runner, seq, run.lambdas) for runner in runners]
    estimates = [e for row in zip(*per_method) for e in row]

    _emit(
        run,
        {"sequence": _sequence_dict(seq), "estimates": [e.as_dict() for e in estimates]},
        ("lambda", "method", "value", "log_value", "lambda_n", "error_bound"),
        (
            (e.lam, e.method, e.value, e.log_value, e.cumulant, e.error_bound)
            for e in estimates
        ),
    )


@main.command(name="blocks", short_help="Print the block decomposition.")
@_sequence_options
@click.option("--q", "q_text", default=None, help="Gap ratio, e.g. 2 or 3/2.")
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--L", "long_length", type=click.IntRange(min=1), default=None)
@click.option("--s", "short_length", type=click.IntRange(min=1), default=None)
@_output_options("json")
@click.pass_context
def blocks_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    q_text: str | None,
    lam: float | None,
    long_length: int | None,
    short_length: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    has_sequence = gen is not None or seq_path is not None
    run = _run_config(
        session,
        "blocks",
        gen=gen,
        seq_path=seq_path,
        N=n,
        output_format=output_format,
        output_path=out_path,
        needs_sequence=has_sequence,
    )

    if has_sequence:
        seq = _load(run)
        q = boxed.parse_fraction(q_text) if q_text is not None else seq.q_certified
        N = seq.N  # noqa: N806
    else:
        if q_text is None or n is None:
            raise errors.DomainError("blocks needs --q and --n, or a sequence")
        q, N = boxed.parse_fraction(q_text), n  # noqa: N806

    s = short_length if short_length is not None else blockdio.choose_s(q)
    if long_length is not None:
        L = long_length  # noqa: N806
    elif lam is not None:
        L = blockdio.choose_L(lam)  # noqa: N806
    else:
        raise errors.DomainError("blocks needs --L or --lambda")

    if L <= s:
        raise errors.InvalidBlockShape(f"need L > s ≥ 1, got L = {L}, s = {s}")
    if N < L + s:
        raise errors.Infeasible(
            f"blocks needs N ≥ L + s = {L + s} for one complete pair (decompose needs "
            f"N ≥ L + 1 = {L + 1}), got N = {N}",
            required=L + s,
            limit=N,
        )

    violations = blockdio.check_working_assumptions(s, L, lam) if lam is not None else []
    decomposition = blockdio.decompose(N, L, s)
    payload = decomposition.as_dict() | {"q": q, "assumption_violations": violations}
    _emit(
        run,
        payload,
        ("block", "kind", "first", "last"),
        [
            (i // 2 + 1, "long" if i % 2 == 0 else "short", block.start, block[-1])
            for i, block in enumerate(decomposition.blocks())
        ],
    )


def _block_length(lam: float | None, long_length: int | None) -> int:
    if long_length is not None:
        return long_length
    if lam is None:
        raise errors.DomainError("give --L or --lambda")
    return blockdio.choose_L(lam)


@main.command(name="count", short_help="Count near solutions inside each long block.")
@_sequence_options
@click.option("--kind", type=click.Choice([*_KINDS, "all"]), default="all", show_default=True)
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--L", "long_length", type=click.IntRange(min=1), default=None)
@click.option("--s", "short_length", type=click.IntRange(min=1), default=None)
@click.option("--exclude-diagonal", is_flag=True)
@click.option("--threads", type=click.IntRange(min=1), default=None)
@_output_options("csv")
@click.pass_context
def count_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    kind: str,
    lam: float | None,
    long_length: int | None,
    short_length: int | None,
    exclude_diagonal: bool,
    threads: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    run = _run_config(
        session,
        "count",
        gen=gen,
        seq_path=seq_path,
        N=n,
        threads=threads,
        output_format=output_format,
        output_path=out_path,
    )
    seq = _load(run)

    L = _block_length(lam, long_length)  # noqa: N806
    s = short_length if short_length is not None else blockdio.choose_s(seq.q_certified)
    if lam is not None:
        blockdio.check_working_assumptions(s, L, lam)
    decomposition = blockdio.decompose(seq.N, L, s)

    kinds = list(models.EquationKind) if kind == "all" else [models.EquationKind(kind)]
    records: list[models.SolutionCount] = []
    for equation in kinds:
        if equation is models.EquationKind.TWO_TERM and exclude_diagonal:
            records.extend(
                blockdio.count(
                    seq, block, seq.frequency(block[0]), equation, block_index=i, exclude_diagonal=True
                )
                for i, block in enumerate(decomposition.long_blocks, start=1)
            )
        else:
            records.extend(
                blockdio.count_blocks(seq, decomposition, equation, complete_only=False, threads=run.threads)
            )

    _emit(
        run,
        {
            "sequence": _sequence_dict(seq),
            "L": L,
            "s": s,
            "counts": [dict(zip(("kind", "block", "threshold", "count", "L"), r.as_row())) for r in records],
        },
        ("kind", "block", "threshold", "count", "L"),
        (r.as_row() for r in records),
    )


@main.command(name="probe", short_help="Scaling of the largest block count with L.")
@_sequence_options
@click.option("--kind", type=click.Choice(_KINDS), default="three_term", show_default=True)
@click.option("--L", "long_lengths", type=click.IntRange(min=2), multiple=True, required=True)
@click.option("--s", "short_length", type=click.IntRange(min=1), default=None)
@click.option("--threads", type=click.IntRange(min=1), default=None)
@_output_options("csv")
@click.pass_context
def probe_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    kind: str,
    long_lengths: tuple[int, ...],
    short_length: int | None,
    threads: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    run = _run_config(
        session,
        "probe",
        gen=gen,
        seq_path=seq_path,
        N=n,
        threads=threads,
        output_format=output_format,
        output_path=out_path,
    )
    seq = _load(run)
    rows = blockdio.scaling_probe(
        seq, models.EquationKind(kind), long_lengths, s=short_length, threads=run.threads
    )
    _emit(
        run,
        {"sequence": _sequence_dict(seq), "kind": kind, "rows": [attrs.asdict(r) for r in rows]},
        ("L", "count", "block", "slope"),
        ((r.L, r.count, r.block_index, r.slope) for r in rows),
    )


@main.command(name="bessel-coeffs", short_help="Exact Taylor coefficients of log I0(√2 λ).")
@click.option("--order", type=int, default=6, show_default=True)
@_output_options("text")
@click.pass_context
def bessel_coeffs_command(
    ctx: click.Context, order: int, output_format: str, out_path: pathlib.Path | None
) -> None:
    session = _session(ctx)
    run = _run_config(
        session,
        "bessel-coeffs",
        output_format=output_format,
        output_path=out_path,
        needs_sequence=False,
    )
    coeffs = besselkit.log_i0_coefficients(order)
    _emit(
        run,
        {"order": order, "coefficients": coeffs},
        ("power", "coefficient"),
        ((2 * i, c) for i, c in enumerate(coeffs, start=1)),
        text=",".join(str(c) for c in coeffs),
    )


@main.command(name="fit", short_help="Fit the small-lambda series of Λ_N.")
@_sequence_options
@click.option("--limit", type=click.Choice(["pair", "triple"]), default=None, help="Fit a block limit instead.")
@click.option("--lambda-grid", "lambda_grid", default=None)
@click.option("--degree", type=click.Choice(["4", "6", "8"]), default="6", show_default=True)
@click.option("--increment", is_flag=True, help="Fit N Λ_N - (N-1) Λ_{N-1} instead of Λ_N.")
@_method_options
@_output_options("json")
@click.pass_context
def fit_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    limit: str | None,
    lambda_grid: str | None,
    degree: str,
    increment: bool,
    method: str,
    oversample: int | None,
    m_max: int | None,
    threads: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    run = _run_config(
        session,
        "fit",
        gen=gen,
        seq_path=seq_path,
        N=n,
        lambdas=_lambdas(None, lambda_grid) or asymptotics.DEFAULT_FIT_GRID,
        method=method,
        oversample=oversample,
        m_max=m_max,
        threads=threads,
        output_format=output_format,
        output_path=out_path,
        needs_sequence=limit is None,
        needs_grid=True,
    )

    if limit is not None and increment:
        raise errors.DomainError("--increment applies to sequences, not to --limit")
    if limit is not None:
        fit = asymptotics.fit_block_limit(
            typing.cast("typing.Literal['pair', 'triple']", limit),
            run.lambdas,
            degree=int(degree),
            config=session.config,
        )
    else:
        fitter = asymptotics.fit_increment if increment else asymptotics.fit_series
        fit = fitter(_load(run), None, run.lambdas, _runner(run, session), degree=int(degree))

    _emit(run, fit.as_dict(), ("lambda", "lambda_n"), zip(fit.lambda_grid, fit.values))


@main.command(name="envelope", short_help="Largest |Λ_N - λ²/2| / |λ|³ over a grid.")
@_sequence_options
@click.option("--lambda-grid", "lambda_grid", default=None)
@_method_options
@_output_options("json")
@click.pass_context
def envelope_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    lambda_grid: str | None,
    method: str,
    oversample: int | None,
    m_max: int | None,
    threads: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    run = _run_config(
        session,
        "envelope",
        gen=gen,
        seq_path=seq_path,
        N=n,
        lambdas=_lambdas(None, lambda_grid) or asymptotics.DEFAULT_FIT_GRID,
        method=method,
        oversample=oversample,
        m_max=m_max,
        threads=threads,
        output_format=output_format,
        output_path=out_path,
        needs_grid=True,
    )
    result = asymptotics.envelope_check(_load(run), None, run.lambdas, _runner(run, session))
    _emit(run, result.as_dict(), ("lambda", "ratio"), zip(result.lambda_grid, result.ratios))


@main.command(name="rate", short_help="Legendre transform of Λ_N at one or more t.")
@_sequence_options
@click.option("--t", "ts", type=float, multiple=True)
@click.option("--t-grid", "t_grid", default=None, help="a:b:step or a comma list.")
@click.option("--lambda-grid", "lambda_grid", default="-1:1:0.001", show_default=True)
@_method_options
@_output_options("json")
@click.pass_context
def rate_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    ts: tuple[float, ...],
    t_grid: str | None,
    lambda_grid: str,
    method: str,
    oversample: int | None,
    m_max: int | None,
    threads: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    has_sequence = gen is not None or seq_path is not None
    run = _run_config(
        session,
        "rate",
        gen=gen,
        seq_path=seq_path,
        N=n,
        lambdas=boxed.parse_grid(lambda_grid),
        method=method,
        oversample=oversample,
        m_max=m_max,
        threads=threads,
        output_format=output_format,
        output_path=out_path,
        needs_sequence=has_sequence,
        needs_grid=True,
    )

    levels = list(ts) + list(boxed.parse_grid(t_grid) if t_grid is not None else ())
    if not levels:
        raise errors.GridError("rate needs --t or --t-grid")

    if has_sequence:
        seq = _load(run)
        runner = _runner(run, session)
        values = [runner.evaluate(seq, x).cumulant for x in run.lambdas]
        model = seq.label
    else:
        values = [x * x / 2 for x in run.lambdas]
        model = "gaussian"

    rates = asymptotics.rate_curve(run.lambdas, values, levels)
    _emit(
        run,
        {"model": model, "rates": [r.as_dict() for r in rates]},
        ("t", "rate"),
        ((r.t, r.rate) for r in rates),
    )


@main.command(name="tail", short_help="Equispaced level-set measure of the scaled sum.")
@_sequence_options
@click.option("--lambda", "lam", type=float, required=True, help="Scale λ of (λ/√N) S_N.")
@click.option("--t", "ts", type=float, multiple=True, required=True)
@click.option("--grid-points", "grid_points", type=click.IntRange(min=1), default=None)
@click.option("--threads", type=click.IntRange(min=1), default=None)
@_output_options("json")
@click.pass_context
def tail_command(
    ctx: click.Context,
    gen: str | None,
    seq_path: pathlib.Path | None,
    n: int | None,
    lam: float,
    ts: tuple[float, ...],
    grid_points: int | None,
    threads: int | None,
    output_format: str,
    out_path: pathlib.Path | None,
) -> None:
    session = _session(ctx)
    run = _run_config(
        session,
        "tail",
        gen=gen,
        seq_path=seq_path,
        N=n,
        lambdas=(lam,),
        threads=threads,
        output_format=output_format,
        output_path=out_path,
    )
    seq = _load(run)
    points = grid_points if grid_points is not None else 16 * seq.max_frequency
    estimates = asymptotics.mdp_probe(
        seq, None, lam, ts, points, config=session.config, threads=run.threads
    )
    _emit(
        run,
        {"sequence": _sequence_dict(seq), "tails": [e.as_dict() for e in estimates]},
        ("t", "measure", "mdp_normalized", "gaussian_target"),
        ((e.t, e.measure, e.mdp_normalized, e.gaussian_target) for e in estimates),
    )


def run(argv: collections.Sequence[str] | None = None) -> int:
    """Runs the command line and returns its exit code instead of exiting."""
    try:
        result = main.main(
            args=list(argv) if argv is not None else None,
            prog_name="lacmgf",
            standalone_mode=False,
        )
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo("error: aborted", err=True)
        return 1
    except (ValueError, OverflowError) as exc:
        click.echo(f"error: {exc}", err=True)
        return _EXIT_INFEASIBLE
    return result if isinstance(result, int) else 0
