"""Spec commands: validate, holonomy, orbits, coords, twin, kernel.

Every command reads one JSON spec, runs the matching library analysis and
prints a report. Exit codes: 0 on success verdicts, 1 on violations or
negative verdicts, 2 on usage errors.
"""

import logging

import click

from fibra.utils.command_helpers import CommandOptions, execute_command, load_spec
from fibra.utils.reports import render

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def resolve_options(ctx: click.Context, base_chart, reference, cap) -> CommandOptions:
    """Combine the factory config with per-command flags; ``--cap`` wins."""
    config = ctx.obj or {}
    section_cap = config.get("SECTION_CAP", 100000)
    group_cap = config.get("GROUP_CAP", 10000)
    if cap is not None:
        section_cap = group_cap = cap
    return CommandOptions(
        base_chart=base_chart,
        reference=reference,
        section_cap=section_cap,
        group_cap=group_cap,
        automorphism_cap=config.get("AUTOMORPHISM_CAP", 8),
    )


def make_spec_command(name: str, help_text: str) -> click.Command:
    """Build a command taking a spec path and the shared options."""

    @click.command(name, help=help_text)
    @click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
    @click.option("--base-chart", default=None, help="Chart to base holonomy loops at.")
    @click.option("--reference", default=None, help="Name of the reference section.")
    @click.option(
        "--format",
        "output_format",
        type=click.Choice(["text", "json"]),
        default="text",
        show_default=True,
    )
    @click.option("--cap", type=click.IntRange(min=1), default=None, help="Enumeration cap.")
    @click.pass_context
    def command(ctx, spec_path, base_chart, reference, output_format, cap):
        logger.info(f"Running {name} on {spec_path}")
        spec, report = load_spec(name, spec_path)
        if spec is not None:
            options = resolve_options(ctx, base_chart, reference, cap)
            _, report = execute_command(name, spec, options)
        click.echo(render(report, output_format))
        ctx.exit(report.exit_code)

    return command


validate = make_spec_command(
    "validate", "Check the atlas, fibered algebra, group, sections and representation."
)
holonomy = make_spec_command(
    "holonomy", "Compute the holonomy group and classify it as holonomic or anholonomic."
)
orbits = make_spec_command("orbits", "Partition the target sections into orbits.")
coords = make_spec_command("coords", "Coordinates of the named sections against a reference.")
twin = make_spec_command("twin", "Build the twin representation from a reference section.")
kernel = make_spec_command("kernel", "Kernel of inefficiency of the representation.")

COMMANDS = [validate, holonomy, orbits, coords, twin, kernel]
