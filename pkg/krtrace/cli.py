import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import click
from pydantic import ValidationError

from krtrace.core.charts import list_atlas, validate_atlas
from krtrace.core.config import Command, OutputFormat, RunConfig, check_odd_prime
from krtrace.core.drinfeld import verify_drinfeld
from krtrace.core.errors import (
    EnumerationLimitError,
    FieldError,
    InvalidPointError,
    KRTraceError,
)
from krtrace.core.gf import MAX_DEGREE, FieldCtx, make_field
from krtrace.core.hecke import TorusElement, phi_report
from krtrace.core.localmodel import DEFAULT_LIMIT, ModelPoint
from krtrace.core.nearby import trace_at
from krtrace.core.report import TabularReport, emit_report
from krtrace.core.verify import (
    admissible_table,
    census_report,
    check_identities,
    verify_theorem,
)
from krtrace.core.weyl import AdmLabel, admissible

F = Callable[..., Any]


class LimitExceeded(click.ClickException):
    """Enumeration refused; exits like a usage error"""

    exit_code = 2


def validate_prime(
    ctx: click.Context, param: click.Parameter, value: Optional[int]
) -> Optional[int]:
    """Validate that p is an odd prime"""
    if value is None:
        return None
    try:
        return check_odd_prime(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


def _codes(count: int) -> Callable[[click.Context, click.Parameter, Optional[str]], Any]:
    def parse(
        ctx: click.Context, param: click.Parameter, value: Optional[str]
    ) -> Optional[Tuple[int, ...]]:
        if value is None:
            return None
        try:
            codes = tuple(int(part) for part in value.split(","))
        except ValueError:
            raise click.BadParameter(f"Expected {count} comma-separated integers")
        if len(codes) != count:
            raise click.BadParameter(
                f"Expected {count} comma-separated integers, got {len(codes)}"
            )
        return codes

    return parse


def validate_label(
    ctx: click.Context, param: click.Parameter, value: Optional[str]
) -> Optional[AdmLabel]:
    """Validate an admissible-element label such as s02tau"""
    if value is None:
        return None
    try:
        return AdmLabel.parse(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


def field_options(f: F) -> F:
    f = click.option(
        "--r",
        type=click.IntRange(1, MAX_DEGREE),
        default=1,
        show_default=True,
        help="Extension degree, q = p^r",
    )(f)
    f = click.option(
        "--p", type=int, required=True, callback=validate_prime, help="Odd prime p"
    )(f)
    return f


def output_options(f: F) -> F:
    f = click.option(
        "--output",
        "-o",
        type=click.Path(dir_okay=False, path_type=Path),
        help="Write the report to this file instead of stdout",
    )(f)
    f = click.option(
        "--format",
        "output_format",
        type=click.Choice([fmt.value for fmt in OutputFormat]),
        default=OutputFormat.TEXT.value,
        envvar="KRTRACE_FORMAT",
        show_default=True,
        help="Report format",
    )(f)
    return f


def limit_options(f: F) -> F:
    f = click.option(
        "--force", is_flag=True, help="Ignore the enumeration limit"
    )(f)
    f = click.option(
        "--limit",
        type=click.IntRange(min=1),
        default=DEFAULT_LIMIT,
        envvar="KRTRACE_LIMIT",
        show_default=True,
        help="Refuse enumerations of more than this many tuples",
    )(f)
    return f


def _flag(loc: Sequence[Any]) -> str:
    return f"--{loc[0]}: " if loc else ""


def _config(ctx: click.Context, command: Command, **values: Any) -> RunConfig:
    try:
        config = RunConfig(command=command, **values)
    except ValidationError as e:
        problems = "; ".join(f"{_flag(err['loc'])}{err['msg']}" for err in e.errors())
        raise click.UsageError(problems, ctx=ctx)
    ctx.obj["config"] = config
    return config


def _field(config: RunConfig) -> FieldCtx:
    if config.p is None:
        raise click.UsageError("--p is required")
    return make_field(config.p, config.r)


def _emit(ctx: click.Context, report: TabularReport, config: RunConfig) -> None:
    text = emit_report(report, config)
    if config.output_path is None:
        click.echo(text, nl=False)
    if report.failed():
        ctx.exit(1)


def _run(ctx: click.Context, config: RunConfig, build: Callable[[], TabularReport]) -> None:
    """Build and emit a report, mapping library errors to exit statuses"""
    if ctx.obj.get("parse_only"):
        return
    try:
        report = build()
    except EnumerationLimitError as e:
        raise LimitExceeded(f"{e}; raise --limit or pass --force")
    except (InvalidPointError, FieldError) as e:
        raise click.UsageError(str(e), ctx=ctx)
    except KRTraceError as e:
        raise click.ClickException(f"Error: {str(e)}")
    _emit(ctx, report, config)


@click.group()
@click.option("--verbose", "-v", count=True, help="Log progress (-vv for debug)")
@click.pass_context
def cli(ctx: click.Context, verbose: int) -> None:
    """krtrace - nearby-cycles traces for the GSp4 pro-p Iwahori local model"""
    ctx.ensure_object(dict)
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG if verbose > 1 else logging.INFO,
            format="%(asctime)s %(name)s %(levelname)s %(message)s",
        )


@cli.command()
@output_options
@click.pass_context
def adm(ctx: click.Context, output_format: str, output: Optional[Path]) -> None:
    """List the 13 admissible elements with their alcove data"""
    config = _config(ctx, Command.ADM, output_format=output_format, output_path=output)
    _run(ctx, config, admissible_table)


@cli.command()
@field_options
@limit_options
@output_options
@click.pass_context
def strata(
    ctx: click.Context,
    p: int,
    r: int,
    limit: int,
    force: bool,
    output_format: str,
    output: Optional[Path],
) -> None:
    """Count special-fiber points per KR stratum"""
    config = _config(
        ctx,
        Command.STRATA,
        p=p,
        r=r,
        limit=limit,
        force=force,
        output_format=output_format,
        output_path=output,
    )
    _run(ctx, config, lambda: census_report(_field(config), config.effective_limit))


@cli.command()
@click.option(
    "--point", required=True, callback=_codes(5), help="Codes x,y,a,b,c of the point"
)
@field_options
@output_options
@click.pass_context
def trace(
    ctx: click.Context,
    point: Tuple[int, int, int, int, int],
    p: int,
    r: int,
    output_format: str,
    output: Optional[Path],
) -> None:
    """Trace of Frobenius on nearby cycles at one point, with fiber detail"""
    config = _config(
        ctx,
        Command.TRACE,
        point=point,
        p=p,
        r=r,
        output_format=output_format,
        output_path=output,
    )

    def build() -> TabularReport:
        assert config.point is not None
        return trace_at(ModelPoint.from_codes(_field(config), config.point))

    _run(ctx, config, build)


@cli.command()
@click.option("--s", required=True, callback=_codes(4), help="Codes g0,g1,g2,g3")
@click.option("--w", required=True, callback=validate_label, help="Admissible element")
@field_options
@output_options
@click.pass_context
def phi(
    ctx: click.Context,
    s: Tuple[int, int, int, int],
    w: AdmLabel,
    p: int,
    r: int,
    output_format: str,
    output: Optional[Path],
) -> None:
    """Scaled test function Phi(s, w) = (q-1)^3 phi'(s w)"""
    config = _config(
        ctx,
        Command.PHI,
        s=s,
        w=w,
        p=p,
        r=r,
        output_format=output_format,
        output_path=output,
    )

    def build() -> TabularReport:
        assert config.s is not None and config.w is not None
        fq = _field(config)
        return phi_report(TorusElement.from_codes(fq, config.s), admissible(config.w), fq)

    _run(ctx, config, build)


@cli.command()
@click.option("--validate", is_flag=True, help="Validate every chart over F_q")
@field_options
@output_options
@click.pass_context
def atlas(
    ctx: click.Context,
    validate: bool,
    p: int,
    r: int,
    output_format: str,
    output: Optional[Path],
) -> None:
    """Print the resolution charts, optionally validated"""
    config = _config(
        ctx,
        Command.ATLAS,
        validate_charts=validate,
        p=p,
        r=r,
        output_format=output_format,
        output_path=output,
    )

    def build() -> TabularReport:
        if config.validate_charts:
            return validate_atlas(_field(config))
        return list_atlas(_field(config))

    _run(ctx, config, build)


@cli.command()
@click.option("--n", type=click.IntRange(min=1), required=True, help="Rank n of GL_n")
@field_options
@limit_options
@output_options
@click.pass_context
def drinfeld(
    ctx: click.Context,
    n: int,
    p: int,
    r: int,
    limit: int,
    force: bool,
    output_format: str,
    output: Optional[Path],
) -> None:
    """Check the Drinfeld GL_n trace against its scaled test function"""
    config = _config(
        ctx,
        Command.DRINFELD,
        n=n,
        p=p,
        r=r,
        limit=limit,
        force=force,
        output_format=output_format,
        output_path=output,
    )
    _run(
        ctx, config, lambda: verify_drinfeld(n, _field(config), config.effective_limit)
    )


@cli.command()
@field_options
@limit_options
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=1,
    envvar="KRTRACE_WORKERS",
    show_default=True,
    help="Worker processes",
)
@click.option(
    "--timing/--no-timing", default=True, help="Include elapsed time in the report"
)
@click.option(
    "--json",
    "json_path",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the report as JSON to this file",
)
@output_options
@click.pass_context
def verify(
    ctx: click.Context,
    p: int,
    r: int,
    limit: int,
    force: bool,
    workers: int,
    timing: bool,
    json_path: Optional[Path],
    output_format: str,
    output: Optional[Path],
) -> None:
    """Verify trace = Phi(s_x, w) at every special-fiber point"""
    values: Dict[str, Any] = {"output_format": output_format, "output_path": output}
    if json_path is not None:
        values = {"output_format": OutputFormat.JSON, "output_path": json_path}
    config = _config(
        ctx,
        Command.VERIFY,
        p=p,
        r=r,
        limit=limit,
        force=force,
        workers=workers,
        timing=timing,
        **values,
    )
    _run(
        ctx,
        config,
        lambda: verify_theorem(
            _field(config),
            workers=config.workers,
            limit=config.effective_limit,
            timing=config.timing,
        ),
    )


@cli.command()
@field_options
@limit_options
@output_options
@click.pass_context
def identities(
    ctx: click.Context,
    p: int,
    r: int,
    limit: int,
    force: bool,
    output_format: str,
    output: Optional[Path],
) -> None:
    """Check the Oort-Tate identities and chain containments at every point"""
    config = _config(
        ctx,
        Command.IDENTITIES,
        p=p,
        r=r,
        limit=limit,
        force=force,
        output_format=output_format,
        output_path=output,
    )
    _run(
        ctx,
        config,
        lambda: check_identities(_field(config), limit=config.effective_limit),
    )


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Parse a command line into a RunConfig without running the command.

    Raises:
        click.UsageError: On unknown flags, a non-prime p or a malformed literal
    """
    obj: Dict[str, Any] = {"parse_only": True}
    cli.main(args=list(argv), prog_name="krtrace", standalone_mode=False, obj=obj)
    config: RunConfig = obj["config"]
    return config
