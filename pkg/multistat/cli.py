"""
Command-line interface: reduce, sample, region2d, solve, stability, roots.
"""
import asyncio
import functools
import logging
import re
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import click

from .core.poly import as_univariate
from .core.rational import decimal_string, to_rational
from .core.realroots import isolate_real_roots, positive_roots, refine
from .errors import MultistatError
from .models.fixtures import load_fixtures, resolve_model
from .models.model_file import ModelFile, parse_expression
from .output.serialization import (
    canonical_text,
    fixed_point_reports,
    reduced_system_report,
    region_report,
    roots_report,
    write_grid_csv,
    write_json,
)
from .output.svg import emit_svg, grid_points, write_svg
from .services.cache_service import ResultCache
from .services.elimination_service import ReducedSystem, ReductionService
from .services.pointsolve_service import RecordStatus, SampleRange, SamplingService
from .services.region_service import (
    RegionService,
    boundary_conjecture_check,
    boundary_polynomial,
    raster_segments,
)
from .services.stability_service import StabilityService
from .utils.config import MultistatConfig, load_config

logger = logging.getLogger(__name__)

ROOT_FIXTURES = ("break-point", "blind-spot-quadratic", "blind-spot-quartic")


def parse_assignments(items: Sequence[str]) -> Dict[str, Fraction]:
    """'k17=100,k18=50' (repeatable) into exact values."""
    values: Dict[str, Fraction] = {}
    for item in items:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise click.BadParameter(f"expected name=value, got '{part}'")
            name, value = (s.strip() for s in part.split("=", 1))
            try:
                values[name] = to_rational(value)
            except (ValueError, ZeroDivisionError):
                raise click.BadParameter(f"'{value}' is not an exact decimal or fraction")
    return values


def handle_errors(func):
    """Report domain errors on one stderr line with exit status 2."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except MultistatError as e:
            logger.debug("Command failed", exc_info=True)
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            sys.exit(2)
    return wrapper


def _config(ctx: click.Context) -> MultistatConfig:
    return ctx.obj["config"]


def _reduce(config: MultistatConfig, model: ModelFile, compute_laws: bool = False,
            tie_break: str = "first", certify: bool = False) -> ReducedSystem:
    service = ReductionService(config, ResultCache(config.cache))
    return asyncio.run(service.reduce(model, compute_laws, tie_break, certify))


def _check_point(model: ModelFile, values: Dict[str, Fraction]) -> None:
    missing = [k for k in model.free_parameters if k not in values]
    if missing:
        raise click.UsageError(f"missing values for {', '.join(missing)}")


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON or YAML configuration file.")
@click.option("--digits", type=click.IntRange(min=1), help="Decimal display precision.")
@click.option("--threads", type=click.IntRange(min=1), help="Worker processes.")
@click.option("--seed", type=int, help="Seed for randomized spot checks.")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"],
                                               case_sensitive=False))
@click.pass_context
def cli(ctx, config_path, digits, threads, seed, log_level):
    """Exact steady-state counting for polynomial ODE models."""
    try:
        config = load_config(config_path)
    except ValueError as e:
        raise click.UsageError(str(e))
    if digits is not None:
        config.output = replace(config.output, digits=digits)
    if threads is not None:
        config.sampling = replace(config.sampling, threads=threads)
    if seed is not None:
        config.seed = seed
    if log_level is not None:
        config.log_level = log_level.upper()

    logging.basicConfig(
        level=getattr(logging, config.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    ctx.ensure_object(dict)
    ctx.obj["config"] = config


@cli.command()
@click.argument("model")
@click.option("--compute-laws", is_flag=True, help="Derive conservation laws instead of verifying.")
@click.option("--certify", is_flag=True, help="Check cover minimality by brute force.")
@click.option("--tie-break", type=click.Choice(["first", "last"]), default="first")
@click.option("--pivot-order", type=click.Choice(["laws-last", "fewest-terms"]),
              help="Override reduction.pivot_order.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the reduced system as JSON.")
@click.pass_context
@handle_errors
def reduce(ctx, model, compute_laws, certify, tie_break, pivot_order, out):
    """Eliminate the independent-set variables of MODEL."""
    config = _config(ctx)
    if pivot_order is not None:
        config.reduction = replace(config.reduction, pivot_order=pivot_order)
    m = resolve_model(model)
    rs = _reduce(config, m, compute_laws, tie_break, certify)

    click.echo(f"cover: {', '.join(rs.cover)}")
    if certify:
        click.echo(f"certificate: no vertex cover of size {len(rs.cover) - 1} exists")
    for step in rs.trace:
        click.echo(f"{step.variable} = ({canonical_text(step.numerator, normalize=False)})"
                   f" / ({canonical_text(step.denominator, normalize=False)})")
    for i, e in enumerate(rs.equations, start=1):
        click.echo(f"E{i}: {canonical_text(e)} = 0")
    if out:
        write_json(reduced_system_report(rs, m.name), out)


@cli.command()
@click.argument("model")
@click.option("--range", "ranges", multiple=True, required=True,
              help="name=start:stop:step, repeatable.")
@click.option("--fix", multiple=True, help="name=value[,name=value], repeatable.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="CSV output.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Scatter figure.")
@click.pass_context
@handle_errors
def sample(ctx, model, ranges, fix, out, svg_path):
    """Count positive steady states on a parameter lattice."""
    config = _config(ctx)
    try:
        parsed = [SampleRange.parse(r) for r in ranges]
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--range")
    fixed = parse_assignments(fix)

    m = resolve_model(model)
    rs = _reduce(config, m)
    service = SamplingService(config.solver, config.sampling)
    try:
        result = asyncio.run(service.sample(rs, parsed, fixed))
    except ValueError as e:
        raise click.UsageError(str(e))

    write_grid_csv(result, out, config.output.digits)
    statuses = result.status_counts()
    click.echo(", ".join(f"{k}: {v}" for k, v in sorted(statuses.items())))
    if svg_path:
        points, axes = grid_points(result)
        write_svg(emit_svg(points=points, axes=axes, title=m.name), svg_path)


def _parse_probes(items: Sequence[str]) -> List[Tuple[Dict[str, Fraction], Dict[str, Fraction]]]:
    probes = []
    for item in items:
        if ":" not in item:
            raise click.BadParameter(f"expected point:point, got '{item}'", param_hint="--probe")
        a, b = item.split(":", 1)
        probes.append((parse_assignments([a]), parse_assignments([b])))
    return probes


@cli.command()
@click.argument("model")
@click.option("--fix", multiple=True, help="name=value[,name=value], repeatable.")
@click.option("--params", required=True, help="The two free parameters, e.g. k17,k19.")
@click.option("--base", help="Base axis of the decomposition.")
@click.option("--boundary", type=click.Choice(["none", "derived", "d1"]), default="none",
              help="Boundary polynomial to report and probe.")
@click.option("--probe", "probe_items", multiple=True,
              help="Probe pair 'k17=100,k19=400:k17=100,k19=420', repeatable.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="JSON output.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), help="Region figure.")
@click.pass_context
@handle_errors
def region2d(ctx, model, fix, params, base, boundary, probe_items, out, svg_path):
    """Classify the parameter plane by number of positive steady states."""
    config = _config(ctx)
    fixed = parse_assignments(fix)
    names = [p.strip() for p in params.split(",") if p.strip()]
    if len(names) != 2:
        raise click.BadParameter("exactly two parameters are required", param_hint="--params")
    base = base or (config.region.base_axis if config.region.base_axis in names else names[0])
    if base not in names:
        raise click.BadParameter(f"{base} is not one of {names}", param_hint="--base")

    m = resolve_model(model)
    free = [k for k in m.free_parameters if k not in fixed]
    if sorted(free) != sorted(names):
        raise click.UsageError(f"free parameters after fixing are {free}, expected {names}")

    rs = _reduce(config, m)
    cache = ResultCache(config.cache)
    service = RegionService(config.region, config.solver, config.sampling.threads,
                            config.seed, cache)
    cps, report = asyncio.run(service.analyze(rs, fixed, base))

    poly, probes = None, []
    if boundary == "derived":
        poly, found = boundary_polynomial(cps, load_fixtures().boundary_degrees())
        if not found:
            click.echo("warning: using the whole discriminant as boundary", err=True)
    elif boundary == "d1":
        poly = load_fixtures().region_polynomial("exclusion_d1")
    if poly is not None and probe_items:
        probes = boundary_conjecture_check(rs, poly, _parse_probes(probe_items), fixed,
                                           config.solver)

    write_json(region_report(report, cps, poly, probes), out)
    click.echo(", ".join(f"{k}: {v}" for k, v in report.summary().items()))
    for p in probes:
        verdict = "ok" if p.consistent else "FAILED"
        click.echo(f"probe {p.counts[0]}->{p.counts[1]} signs {p.signs[0]:+d}/{p.signs[1]:+d}: {verdict}")

    if svg_path:
        other = next(k for k in names if k != base)
        window = config.region.window
        if base not in window or other not in window:
            window = {base: [0.0, 200.0], other: [0.0, 1000.0]}
        segments = raster_segments(report, window, config.region.raster_columns)
        figure = emit_svg(segments=segments, axes=(base, other),
                          window=(tuple(window[base]), tuple(window[other])), title=m.name)
        write_svg(figure, svg_path)


def _name_key(name: str) -> Tuple[str, int]:
    match = re.fullmatch(r"([A-Za-z_]+)(\d*)", name)
    if match is None:
        return name, 0
    return match.group(1), int(match.group(2) or 0)


def _print_records(records, digits: int, with_stability: bool = False) -> None:
    positive = [r for r in records if r.positivity == RecordStatus.ALL_POSITIVE]
    click.echo(f"{len(positive)} positive steady state(s)")
    for n, r in enumerate(records, start=1):
        if r.positivity == RecordStatus.REJECTED:
            continue
        coords = ", ".join(f"{k}={decimal_string(iv.midpoint, digits)}"
                           for k, iv in sorted(r.enclosures.items(), key=lambda t: _name_key(t[0])))
        line = f"[{n}] {r.positivity.value}: {coords}"
        if with_stability and r.stability is not None:
            line += f" -> {r.stability}"
        click.echo(line)


@cli.command()
@click.argument("model")
@click.option("--fix", multiple=True, help="name=value[,name=value], repeatable.")
@click.option("--at", "at", multiple=True, help="Further parameter values, repeatable.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write records as JSON.")
@click.pass_context
@handle_errors
def solve(ctx, model, fix, at, out):
    """Positive steady states at one parameter point."""
    config = _config(ctx)
    values = {**parse_assignments(fix), **parse_assignments(at)}
    m = resolve_model(model)
    _check_point(m, values)
    rs = _reduce(config, m)
    service = SamplingService(config.solver, config.sampling)
    records = asyncio.run(service.solve(rs, values))
    _print_records(records, config.output.digits)
    if out:
        Path(out).write_text(
            "[\n" + ",\n".join(r.model_dump_json(indent=2)
                               for r in fixed_point_reports(records, config.output.digits))
            + "\n]\n", encoding="utf-8")


@cli.command()
@click.argument("model")
@click.option("--fix", multiple=True, help="name=value[,name=value], repeatable.")
@click.option("--at", "at", multiple=True, help="Further parameter values, repeatable.")
@click.option("--eliminate", help="Variables solved from the laws, e.g. x1,x7,x11.")
@click.pass_context
@handle_errors
def stability(ctx, model, fix, at, eliminate):
    """Routh-Hurwitz verdict for every positive steady state at one point."""
    config = _config(ctx)
    values = {**parse_assignments(fix), **parse_assignments(at)}
    stab = config.stability
    if eliminate:
        stab = replace(stab, eliminate=[v.strip() for v in eliminate.split(",") if v.strip()])
    m = resolve_model(model)
    _check_point(m, values)
    rs = _reduce(config, m)
    service = StabilityService(stab, config.solver)
    analysis = asyncio.run(service.analyze(m, rs, values))
    _print_records(analysis.records, config.output.digits, with_stability=True)
    if analysis.bistable:
        click.echo("bistable: two or more stable steady states")


def _read_polynomial(source: str):
    if source in ROOT_FIXTURES:
        fixtures = load_fixtures()
        if source == "break-point":
            return fixtures.break_point_polynomial()
        return fixtures.blind_spot_polynomial(source.rsplit("-", 1)[1])

    text = Path(source).read_text(encoding="utf-8")
    text = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    names = sorted(set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text)))
    if len(names) > 1:
        raise click.UsageError(f"expected a univariate polynomial, found {', '.join(names)}")
    names = names or ["x"]
    return as_univariate(parse_expression(text, names), names[0])


@cli.command()
@click.argument("source")
@click.option("--positive", is_flag=True, help="Only strictly positive roots.")
@click.option("--width", default="1e-12", help="Width of the reported isolating intervals.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the roots as JSON.")
@click.pass_context
@handle_errors
def roots(ctx, source, positive, width, out):
    """Isolate the real roots of a univariate polynomial file or bundled fixture.

    SOURCE is a path or one of: break-point, blind-spot-quadratic, blind-spot-quartic.
    """
    config = _config(ctx)
    if source not in ROOT_FIXTURES and not Path(source).is_file():
        raise click.BadParameter(f"no such file or fixture: {source}", param_hint="SOURCE")
    p = _read_polynomial(source)
    found = positive_roots(p) if positive else isolate_real_roots(p)
    found = [refine(r, to_rational(width)) for r in found]

    click.echo(f"{len(found)} real root(s) of {canonical_text(p)}")
    for r in found:
        click.echo(f"[{r.lo}, {r.hi}] ~ {r.approximate(config.output.digits)}")
    if out:
        write_json(roots_report(p, found, config.output.digits), out)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
