"""Numeric demo commands."""

import logging
import math

import click

from fibra.utils.command_helpers import run_exp_shift
from fibra.utils.reports import render

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def parse_matrix(ctx, param, value):
    """Parse ``"a,b;c,d"`` into a square list of finite floats."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in value.split(";")]
    except ValueError:
        raise click.BadParameter("entries must be numbers, e.g. '0,1;0,0'")
    if any(len(row) != len(rows) for row in rows):
        raise click.BadParameter("matrix must be square, rows separated by ';'")
    if not all(math.isfinite(v) for row in rows for v in row):
        raise click.BadParameter("entries must be finite")
    return rows


def parse_vector(ctx, param, value):
    """Parse ``"x,y,..."`` into a list of floats."""
    try:
        return [float(v) for v in value.split(",")]
    except ValueError:
        raise click.BadParameter("entries must be numbers, e.g. '1,0'")


@click.group("demo")
def demo():
    """Numeric demonstrations."""


@demo.command("exp-shift")
@click.option(
    "--matrix", default="0,1;0,0", show_default=True, callback=parse_matrix, help="Generator A."
)
@click.option("--samples", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--vector", default="1,1", show_default=True, callback=parse_vector)
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
)
@click.pass_context
def exp_shift(ctx, matrix, samples, vector, output_format):
    """Sample a(t) = exp(tA) on [-1, 1] and shift a constant vector section by it."""
    logger.info(f"exp-shift with {len(matrix)}x{len(matrix)} generator, {samples} samples")
    _, report = run_exp_shift(matrix, samples, vector)
    click.echo(render(report, output_format))
    ctx.exit(report.exit_code)
