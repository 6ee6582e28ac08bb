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

"""Tests of the config command line interface."""
import json
import os
from pathlib import Path

from pytest import mark

from fracspde.const import PROJECT_PATH, SYSTEM_CONFIG_PATH_ENV_NAME, USER_CONFIG_PATH_ENV_NAME

from .util import chdir, cli


@mark.parametrize(
    "cli_args,project",
    [
        # Test editing system config
        (["--system"], False),
        # Test editing user config
        (["--user"], False),
        # Test editing user config when outside project
        ([], False),
        # Test editing project config
        (["--project"], True),
        # Test editing project config when inside project
        ([], True),
    ],
)
def test_config_cli(tmp_path, cli_args, project):
    """Edit one configuration file via the CLI."""
    if project:
        (tmp_path / PROJECT_PATH).mkdir()
    with chdir(tmp_path):
        # Output directory shall be at default
        assert cli(["config", "get", "output_dir", *cli_args]) == ["" if cli_args else "fracspde-out", ""]

        # Same but with JSON output:
        output = cli(["config", "get", "output_dir", "--format", "json", *cli_args])
        assert json.loads(output[0]) == {"output_dir": None if cli_args else "fracspde-out"}

        # Set the output directory:
        cli(["config", "set", "output_dir", "results", *cli_args])

        # Now, getting the variable shall yield the new value:
        assert cli(["config", "get", "output_dir", *cli_args]) == ["results", ""]
        assert cli(["config", "get", "output_dir"]) == ["results", ""]

        # Same for the listing:
        output = cli(["config", "list", *cli_args])
        assert "# Default artifact directory." in output
        assert "output_dir = results" in output
        output = cli(["config", "list", "--format", "json", *cli_args])
        assert json.loads(output[0])["output_dir"] == "results"

        # Let's delete the value:
        cli(["config", "delete", "output_dir", *cli_args])
        assert cli(["config", "get", "output_dir"]) == ["fracspde-out", ""]

        # Deleting a value which is currently unset should have no effect:
        cli(["config", "delete", "output_dir", *cli_args])

        # By default, trying to set a value unknown to the tool shall yield an error:
        output = cli(["config", "set", "foo_bar_baz", "hello world", *cli_args], exit_code=1)
        assert output == [
            "Error: Unknown configuration option 'foo_bar_baz'. "
            "Check 'fracspde config list' or use '--ignore-unknown'.",
            "",
        ]

        # We can politely:
        cli(["config", "set", "foo_bar_baz", "hello world", "--ignore-unknown", *cli_args])
        assert cli(["config", "get", "foo_bar_baz", *cli_args]) == ["hello world", ""]

        # Values are type checked:
        output = cli(["config", "set", "threads", "many", *cli_args], exit_code=1)
        assert output == ["Error: Invalid value 'many' for option 'threads'.", ""]
        cli(["config", "set", "threads", "3", *cli_args])
        assert cli(["config", "get", "threads"]) == ["3", ""]


def test_config_files(tmp_path):
    """Configuration file locations."""
    system = Path(os.environ[SYSTEM_CONFIG_PATH_ENV_NAME]) / "config.toml"
    user = Path(os.environ[USER_CONFIG_PATH_ENV_NAME]) / "config.toml"
    with chdir(tmp_path):
        assert cli(["config", "files"]) == [f"system: {system}", f"user: {user}", "project: ", ""]
        output = cli(["config", "files", "--format=json", "--user"])
        assert json.loads(output[0]) == {"user": str(user)}

        (tmp_path / PROJECT_PATH).mkdir()
        project = tmp_path / PROJECT_PATH / "config.toml"
        assert cli(["config", "files", "--project"]) == [f"project: {project}", ""]


def test_config_no_project(tmp_path):
    """The project configuration requires a project."""
    with chdir(tmp_path):
        output = cli(["config", "set", "threads", "2", "--project"], exit_code=1)
        assert output[0] == "Error: fracspde project has not been found. Try:"


def test_config_threads(tmp_path):
    """The threads option caps the workers of the experiments."""
    with chdir(tmp_path):
        cli(["config", "set", "threads", "1"])
        assert cli(["config", "get", "threads", "--format", "json"]) == ['{"threads": 1}', ""]
