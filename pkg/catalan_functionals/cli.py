#!/usr/bin/env python3
"""
catalan-moments CLI - moment tables, limit laws, series constants, Monte Carlo
and polylogarithm checks for additive functionals of random binary trees.
"""

import functools
import logging
import sys

import click
from rich.console import Console
from rich.logging import RichHandler

from . import __version__
from .config import load_settings
from .errors import ArgumentError, NumericError
from .exact_moments import centered_moments, raw_moments
from .integrals import mk_sequence, mk_sequence_half
from .limit_law import (alpha_grid, limit_law, maximize_sigma_sq, shape_limit_moments, third_moment_curve,
                        variance_curve)
from .montecarlo import run_experiment
from .numeric import as_fraction, make_field
from .polylog import expansion_residual_check, li_expansion
from .reporters import (constant_frame, curve_frame, experiment_human, experiment_to_json, fmt, frame_document,
                        histogram_frame, limit_frame, mk_frame, residual_frame, residual_summary, shape_frame,
                        table_frame, table_to_json, to_csv, to_human, to_json, verdict)
from .series_constants import c0_constant, constant_by_name
from .tolls import parse_toll
from .types import ExperimentSpec, PolylogId, SingularExpansion

logger = logging.getLogger("catalan_functionals")

FORMATS = click.Choice(["csv", "json", "human"])


def _setup_logging(verbose: bool) -> None:
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    logger.handlers[:] = [handler]
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)


def exit_codes(fn):
    """Map usage errors to exit 2 and numeric/domain errors to exit 3."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ArgumentError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
        except NumericError as e:
            click.echo(f"numeric error: {e}", err=True)
            sys.exit(3)
    return wrapper


def emit(frame, fmt_name, out, *, title, summary=(), **meta):
    if fmt_name == "csv":
        text = to_csv(frame, path=out)
        if out is None:
            click.echo(text, nl=False)
        else:
            click.echo(f"Written to {out}", err=True)
    elif fmt_name == "json":
        text = to_json(frame_document(frame, **meta))
        if out is None:
            click.echo(text)
        else:
            with open(out, "w", encoding="utf-8") as f:
                f.write(text + "\n")
            click.echo(f"Written to {out}", err=True)
    else:
        to_human(frame, title=title, summary=summary)


@click.group()
@click.version_option(__version__)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="YAML file merged over the packaged defaults")
@click.option("-v", "--verbose", is_flag=True, help="debug logging on stderr")
def main(config_path, verbose):
    """Moments and limit laws of additive functionals on Catalan trees."""
    _setup_logging(verbose)
    if config_path:
        try:
            load_settings(config_path)
        except ArgumentError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)


@main.command()
@click.option("--toll", "toll_text", required=True, help="pow:A, log, path-length or custom:b1,b2,... [*c]")
@click.option("--n", "N", type=int, required=True)
@click.option("--k", "K", type=int, required=True)
@click.option("--field", "field_tag", type=click.Choice(["rational", "float"]), default="float")
@click.option("--prec", type=int, default=53, show_default=True,
              help="mantissa bits for --field float; above 53 uses mpmath")
@click.option("--center", default="none", help="none, c0, or a constant c0 for X_n - c0 (n+1)")
@click.option("--format", "fmt_name", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@exit_codes
def exact(toll_text, N, K, field_tag, prec, center, fmt_name, out):
    """Exact moments E X_n^k for n <= N, k <= K."""
    field = make_field(field_tag, prec)
    toll = parse_toll(toll_text, field=field_tag, prec=field.prec or 128)
    if center == "none":
        table = raw_moments(toll, N, K, field)
    else:
        c0 = c0_constant(toll).value if center == "c0" else as_fraction(center)
        table = centered_moments(toll, c0, N, K, field)
    if fmt_name == "json":
        text = table_to_json(table)
        if out is None:
            click.echo(text)
        else:
            with open(out, "w", encoding="utf-8") as f:
                f.write(text + "\n")
        return
    emit(table_frame(table), fmt_name, out, title=f"Moments of X_n, toll {toll.label}",
         summary=[f"field {table.field} • centering {table.centering.label}"])


@main.command()
@click.option("--alpha", default=None, help="toll exponent A in n^A")
@click.option("--shape", is_flag=True, help="the log toll (shape functional)")
@click.option("--k", "K", type=int, default=6)
@click.option("--mode", type=click.Choice(["ck", "mk"]), default="ck",
              help="ck: C_k and raw moments; mk: centered moments from the J-integral recurrence")
@click.option("--format", "fmt_name", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@exit_codes
def limit(alpha, shape, K, mode, fmt_name, out):
    """Limit-law moments for n^alpha or the shape functional."""
    if shape == (alpha is not None):
        raise ArgumentError("give exactly one of --alpha and --shape")
    if shape:
        law = shape_limit_moments(K)
        emit(shape_frame(law), fmt_name, out, title="Shape functional limit",
             summary=[f"sigma^2 = 8(1 - log 2) = {fmt(law.sigma2)}"],
             sigma2=fmt(law.sigma2), c2k0=[fmt(v) for v in law.c2k0])
        return
    a = as_fraction(alpha)
    if mode == "mk":
        seq = mk_sequence_half(K) if a == as_fraction("1/2") else mk_sequence(a, K)
        sigma2 = seq.m[2] if seq.K >= 2 else None
        emit(mk_frame(seq), fmt_name, out, title=f"Centered limit moments, alpha = {fmt(a)}",
             summary=[f"sigma^2 = m_2 = {fmt(sigma2)}"] if sigma2 is not None else [],
             alpha=fmt(a), sigma2=None if sigma2 is None else fmt(sigma2))
        return
    if a == as_fraction("1/2"):
        raise ArgumentError("alpha = 1/2 has no C_k recurrence; use --mode mk")
    law = limit_law(a, K)
    emit(limit_frame(law), fmt_name, out, title=f"Limit law, alpha = {fmt(a)}",
         summary=[f"sigma^2 = {fmt(law.sigma2)}"], alpha=fmt(a), sigma2=fmt(law.sigma2))


@main.command()
@click.option("--which", type=click.Choice(["variance", "mc3"]), required=True)
@click.option("--start", default="1/10")
@click.option("--stop", default="3")
@click.option("--step", default="1/10")
@click.option("--format", "fmt_name", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@exit_codes
def figures(which, start, stop, step, fmt_name, out):
    """(alpha, value) rows for the variance and third-central-moment curves."""
    grid = alpha_grid(start, stop, step)
    if which == "variance":
        rows = variance_curve(grid)
        frame = curve_frame(rows, "sigma2")
        summary = []
        if fmt_name == "human":
            peak, value = maximize_sigma_sq()
            summary.append(f"maximum sigma^2 = {fmt(value)} at alpha = {peak:.6f}")
    else:
        frame = curve_frame(third_moment_curve(grid), "third_central")
        summary = []
    emit(frame, fmt_name, out, title=f"Figure data: {which}", summary=summary, which=which)


@main.command()
@click.option("--name", type=click.Choice(["c0", "d0", "d1", "k"], case_sensitive=False), required=True)
@click.option("--toll", "toll_text", default=None, help="toll for c0")
@click.option("--tol", type=float, default=None)
@click.option("--format", "fmt_name", type=FORMATS, default="csv")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@exit_codes
def constants(name, toll_text, tol, fmt_name, out):
    """Series constants C_0, D_0, D_1 and K with truncation bounds."""
    toll = parse_toll(toll_text) if toll_text else None
    const = constant_by_name(name, toll, tol)
    emit(constant_frame(const), fmt_name, out, title=f"Constant {const.name}",
         summary=[f"{const.name} = {fmt(const.value)} ± {fmt(const.bound)}"])


@main.command()
@click.option("--toll", "toll_text", required=True)
@click.option("--n", type=int, required=True)
@click.option("--samples", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--workers", type=int, default=1)
@click.option("--k", "K", type=int, default=4)
@click.option("--standardize", type=click.Choice(["limit", "empirical"]), default="limit")
@click.option("--histogram", "histogram_path", type=click.Path(dir_okay=False), default=None,
              help="write the standardized-sample histogram as CSV")
@click.option("--format", "fmt_name", type=click.Choice(["json", "human"]), default="json")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@exit_codes
def sample(toll_text, n, samples, seed, workers, K, standardize, histogram_path, fmt_name, out):
    """Monte Carlo moments of X_n over uniform random trees."""
    spec = ExperimentSpec(parse_toll(toll_text), n, samples, seed, workers, standardize, K)
    report = run_experiment(spec)
    if histogram_path:
        to_csv(histogram_frame(report), path=histogram_path)
    if fmt_name == "human":
        experiment_human(report)
        return
    text = experiment_to_json(report)
    if out is None:
        click.echo(text)
    else:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text + "\n")


@main.command("polylog-check")
@click.option("--alpha", required=True)
@click.option("--r", type=int, default=0)
@click.option("--negative-control", is_flag=True,
              help="check an empty expansion instead; the check is expected to fail")
@click.option("--format", "fmt_name", type=FORMATS, default="human")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@exit_codes
def polylog_check(alpha, r, negative_control, fmt_name, out):
    """Residual check of the singular expansion of Li_{alpha,r} near z = 1."""
    pid = PolylogId(as_fraction(alpha), r)
    expansion = li_expansion(pid)
    if negative_control:
        expansion = SingularExpansion((), expansion.remainder_exponent)
    report = expansion_residual_check(pid, expansion)
    # a negative control succeeds when the residual check fails
    ok = report.passed != negative_control
    emit(residual_frame(report), fmt_name, out, title=f"Li_{{{fmt(pid.alpha)},{r}}} residuals",
         summary=residual_summary(report) + (["negative control"] if negative_control else []),
         alpha=fmt(pid.alpha), r=r, slope=report.slope, verdict=verdict(report),
         negative_control=negative_control)
    sys.exit(0 if ok else 3)


if __name__ == "__main__":
    main()
