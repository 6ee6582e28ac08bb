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

"""Common Command Line Options."""
from pathlib import Path

import click

from fracspde.datamodel import Suite


def config_option():
    """Experiment Configuration Option."""
    return click.option(
        "--config",
        "-c",
        "config_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Experiment configuration (JSON). A 'manifest.json' of an earlier run works too. Defaults otherwise.",
    )


def seed_option():
    """Seed Option."""
    return click.option("--seed", "-s", type=int, help="Master seed in [0, 2**64). Overrides the configuration.")


def out_option():
    """Output Directory Option."""
    return click.option(
        "--out",
        "-o",
        "output_dir",
        type=click.Path(file_okay=False, path_type=Path),
        help="Artifact directory. Overrides the configuration and the 'output_dir' option.",
    )


def replicas_option():
    """Replicas Option."""
    return click.option("--replicas", "-n", type=int, help="Number of Monte Carlo replicas.")


def tol_option():
    """Tolerance Option."""
    return click.option(
        "--tol",
        "-t",
        "tolerances",
        metavar="NAME=VALUE",
        multiple=True,
        help="Override one named tolerance. This option can be specified multiple times.",
    )


def suite_option():
    """Verification Suite Option."""
    return click.option(
        "--suite",
        type=click.Choice([suite.value for suite in Suite]),
        help="Verification suite. 'all' by default.",
    )


def experiment_options(func):
    """Options shared by all experiment commands."""
    for option in (tol_option(), replicas_option(), out_option(), seed_option(), config_option()):
        func = option(func)
    return func
