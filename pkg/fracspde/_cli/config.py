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

"""
Application Configuration Commands.

``fracspde config`` reads and edits the layered application configuration. Without a location flag,
reading shows the merged view and editing targets the project file inside a project, the user file
outside.
"""

import json
from enum import Enum
from typing import Any, Dict, Optional

import click

from fracspde.appconfig import AppConfig, AppConfigLocation, find_project
from fracspde.datamodel import AppConfigData
from fracspde.exceptions import InvalidConfigurationOptionError, InvalidConfigurationValueError, NoProjectError

from .common import exceptionhandling, pass_context


class Format(str, Enum):
    """Output Format."""

    TEXT = "text"
    """Plain text."""

    JSON = "json"
    """One JSON object."""


_LOCATION_HELP = {
    AppConfigLocation.SYSTEM: "Use the system wide configuration file only.",
    AppConfigLocation.USER: "Use the user configuration file only.",
    AppConfigLocation.PROJECT: "Use the configuration file of the current project only.",
}


def location_options(func):
    """Add ``--system``, ``--user`` and ``--project``, all feeding ``target``."""
    for location in reversed(AppConfigLocation):
        func = click.option(
            f"--{location.value}", "target", flag_value=location.value, help=_LOCATION_HELP[location]
        )(func)
    return func


format_option = click.option(
    "-f",
    "--format",
    "format_",
    type=click.Choice([item.value for item in Format]),
    default=Format.TEXT.value,
    help="Output format.",
)


@click.group()
def config():
    """Read and modify application configuration values."""


@config.command()
@click.argument("option")
@location_options
@format_option
@pass_context
def get(context, option, target, format_):
    """
    Print the value of the configuration OPTION.

    Without a location flag the merged value is shown: system, user and project files in that
    order, then FRACSPDE_<OPTION> environment variables on top.
    """
    with exceptionhandling(context):
        value = _read(target).model_dump().get(option)
        if format_ == Format.JSON:
            click.echo(json.dumps({option: value}))
        else:
            click.echo(value)


@config.command(name="set")
@click.argument("option")
@click.argument("value")
@location_options
@click.option(
    "--ignore-unknown",
    is_flag=True,
    help="Store OPTION even if fracspde does not know it. The value is kept as text.",
)
@pass_context
def set_(context, option, value, target, ignore_unknown):
    """Store VALUE for the configuration OPTION."""
    with exceptionhandling(context):
        update = _validated(option, value, ignore_unknown)
        with AppConfig().edit(_writable(target)) as options:
            for key, val in update.items():
                setattr(options, key, val)


@config.command()
@click.argument("option")
@location_options
@pass_context
def delete(context, option, target):
    """Drop the configuration OPTION. Dropping an unset option is fine."""
    with exceptionhandling(context):
        with AppConfig().edit(_writable(target)) as options:
            setattr(options, option, None)


@config.command(name="list")
@location_options
@format_option
@pass_context
def _list(context, target, format_):
    """Print all configuration options, each preceded by its description."""
    with exceptionhandling(context):
        options = _read(target)
        data = options.model_dump()
        if format_ == Format.JSON:
            click.echo(json.dumps(data))
            return
        descriptions = {
            name: prop.get("description", "Unknown/user option")
            for name, prop in options.model_json_schema().get("properties", {}).items()
        }
        for key, value in data.items():
            click.echo(f"# {descriptions.get(key, 'Unknown/user option')}")
            click.echo(key if value is None else f"{key} = {value}")
            click.echo()


@config.command(name="files")
@location_options
@format_option
def files(target, format_):
    """Print the configuration file paths. The project path is empty outside a project."""
    locations = list(AppConfigLocation) if target is None else [AppConfigLocation(target)]
    appconfig = AppConfig()
    paths: Dict[str, str] = {}
    for location in locations:
        try:
            paths[location.value] = str(appconfig.get_config_file_path(location))
        except NoProjectError:
            paths[location.value] = ""
    if format_ == Format.JSON:
        click.echo(json.dumps(paths))
    else:
        for key, value in paths.items():
            click.echo(f"{key}: {value}")


def _read(target: Optional[str]) -> AppConfigData:
    appconfig = AppConfig()
    if target is None:
        return appconfig.options
    return appconfig.load(AppConfigLocation(target))


def _validated(option: str, value: str, ignore_unknown: bool) -> Dict[str, Any]:
    try:
        data = AppConfigData(**{option: value})
    except ValueError as exc:
        raise InvalidConfigurationValueError(option, value) from exc
    if not ignore_unknown and option not in AppConfigData.model_fields:
        raise InvalidConfigurationOptionError(option)
    return data.model_dump(exclude_none=True)


def _writable(target: Optional[str]) -> AppConfigLocation:
    """Explicit location, else the project file inside a project and the user file outside."""
    if target is not None:
        return AppConfigLocation(target)
    return AppConfigLocation.PROJECT if find_project() is not None else AppConfigLocation.USER
