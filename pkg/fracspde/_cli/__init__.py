# Copyright 2023 c0fec0de
#
# This file is part of fracspde.
#
# fracspde is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# fracspde is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License along
# with fracspde. If not, see <https://www.gnu.org/licenses/>.

"""Command Line Interface."""
from pathlib import Path
from typing import Optional, Tuple

import click

from fracspde import AppConfig, Command, Suite, apply_overrides, load_experiment_config, run
from fracspde._util import resolve_relative
from fracspde.const import COLOR_FAIL, COLOR_PASS, OUTPUT_DIR_DEFAULT

from .common import Context, Error, exceptionhandling, pass_context
from .config import config
from .logging import setup_logging
from .options import experiment_options, suite_option


def _version_option():  # pragma: no cover
    # Add support for click 7.x.x and click 8.x.x
    if click.version_option.__kwdefaults__ and "package_name" in click.version_option.__kwdefaults__:
        return click.version_option(package_name="fracspde")
    return click.version_option()


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("-v", "--verbose", count=True)
@_version_option()
@click.pass_context
def main(ctx=None, verbose=0):
    """
    Fractional Stochastic Heat Equation - Numerical Experiments.

    Every command writes 'manifest.json', 'summary.json', result CSVs and a check report
    into the output directory. Exit status: 0 all checks passed, 1 a check failed,
    2 invalid configuration, 3 numerical error.
    """
    app_config = AppConfig()
    color = Error.color = app_config.options.color_ui
    handler = setup_logging(color, verbose)
    ctx.obj = Context(verbose=verbose, color=color, handler=handler)


def _run(
    context: Context,
    command: Command,
    config_path: Optional[Path],
    seed: Optional[int],
    output_dir: Optional[Path],
    replicas: Optional[int],
    tolerances: Tuple[str, ...],
    suite: Optional[str] = None,
):
    with exceptionhandling(context):
        app_config = AppConfig()
        config = load_experiment_config(config_path)
        if output_dir is None and config.output_dir == OUTPUT_DIR_DEFAULT and app_config.options.output_dir:
            output_dir = Path(app_config.options.output_dir)
        config = apply_overrides(
            config,
            command=command,
            suite=Suite(suite) if suite else None,
            seed=seed,
            output_dir=output_dir,
            replicas=replicas,
            tolerances=tolerances,
        )
        result = run(config)
    for check in result.checks:
        if not check.passed:
            context.secho(f"FAILED {check.check}", fg=COLOR_FAIL)
    outdir = resolve_relative(result.output_dir)
    if not result.passed:
        failed = len(result.failed)
        context.secho(f"{failed} of {len(result.checks)} checks failed. Artifacts in '{outdir!s}'.", fg=COLOR_FAIL)
        raise click.exceptions.Exit(1)
    context.secho(f"{len(result.checks)} checks passed. Artifacts in '{outdir!s}'.", fg=COLOR_PASS)


@main.command()
@experiment_options
@pass_context
def ml(context, config_path=None, seed=None, output_dir=None, replicas=None, tolerances=()):
    """
    Tabulate the Mittag-Leffler function E_β(-x) with its two-sided bounds.

    Writes 'ml_table.csv' with columns beta, z, value, lower, upper.
    """
    _run(context, Command.ML, config_path, seed, output_dir, replicas, tolerances)


@main.command()
@experiment_options
@pass_context
def kernel(context, config_path=None, seed=None, output_dir=None, replicas=None, tolerances=()):
    """
    Tabulate the Green kernel on the lattice of the experiment grid.

    Writes 'kernel_table.csv' with columns i, j, t, x, G and checks mass and L² rows.
    """
    _run(context, Command.KERNEL, config_path, seed, output_dir, replicas, tolerances)


@main.command()
@experiment_options
@pass_context
def renewal(context, config_path=None, seed=None, output_dir=None, replicas=None, tolerances=()):
    """
    Solve the renewal inequality with equality.

    Writes 'renewal.csv' with columns t, f, tilted and checks the asymptote.
    """
    _run(context, Command.RENEWAL, config_path, seed, output_dir, replicas, tolerances)


@main.command()
@experiment_options
@pass_context
def simulate(context, config_path=None, seed=None, output_dir=None, replicas=None, tolerances=()):
    """
    Simulate replicas of the mild solution and estimate second moments.

    Writes 'moments.csv' at five interior cells. For σ(u) = λu and constant initial
    data, the moments are checked against the exact renewal solution.
    """
    _run(context, Command.SIMULATE, config_path, seed, output_dir, replicas, tolerances)


@main.command()
@experiment_options
@pass_context
def fronts(context, config_path=None, seed=None, output_dir=None, replicas=None, tolerances=()):
    """
    Estimate the intermittency fronts.

    Writes 'fronts.csv' with columns theta, t, proxy and checks the front signs and the envelope.
    Requires compactly supported initial data and σ(0) = 0.
    """
    _run(context, Command.FRONTS, config_path, seed, output_dir, replicas, tolerances)


@main.command()
@suite_option()
@experiment_options
@pass_context
def verify(context, suite=None, config_path=None, seed=None, output_dir=None, replicas=None, tolerances=()):
    """
    Run the built-in verification suites.

    Writes one '<suite>_report.csv' per suite.
    """
    _run(context, Command.VERIFY, config_path, seed, output_dir, replicas, tolerances, suite=suite)


main.add_command(config)
