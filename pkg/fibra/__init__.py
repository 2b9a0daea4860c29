"""CLI factory for fibra.

Builds the click command group, resolves enumeration caps from defaults and
the ``FIBRA_CAP`` environment variable, and registers the commands.
"""

import logging
import os

import click

from fibra.utils.enumeration_cache import get_enumeration_cache

__version__ = "0.1.0"


def create_cli():
    """Create and configure the fibra command group."""
    config = {
        "AUTOMORPHISM_CAP": 8,  # carrier size for automorphism search
        "SECTION_CAP": 100000,
        "GROUP_CAP": 10000,
        "CACHE_SIZE": 64,
    }

    @click.group()
    @click.version_option(__version__, prog_name="fibra")
    @click.option("--verbose", "-v", is_flag=True, help="Log debug messages.")
    @click.pass_context
    def cli(ctx, verbose):
        """Validate and analyse fibered algebras on finite models."""
        ctx.obj = dict(config)
        env_cap = os.environ.get("FIBRA_CAP")
        if env_cap:
            try:
                cap = int(env_cap)
            except ValueError:
                raise click.UsageError(f"FIBRA_CAP must be a positive integer, got '{env_cap}'")
            if cap < 1:
                raise click.UsageError(f"FIBRA_CAP must be a positive integer, got '{env_cap}'")
            ctx.obj["SECTION_CAP"] = cap
            ctx.obj["GROUP_CAP"] = cap
        if verbose:
            logging.getLogger("fibra").setLevel(logging.DEBUG)
        get_enumeration_cache().resize(ctx.obj["CACHE_SIZE"])

    # Register commands
    from fibra.commands import demo, main

    for command in main.COMMANDS:
        cli.add_command(command)
    cli.add_command(demo.demo)

    return cli


def main():
    create_cli()(prog_name="fibra")
