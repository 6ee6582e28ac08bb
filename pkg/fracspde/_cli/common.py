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

"""Command Line Interface Utilities."""
import traceback
from contextlib import contextmanager
from typing import Any

import click
from pydantic import BaseModel, ValidationError

from fracspde.exceptions import (
    AccuracyError,
    DivergenceError,
    DomainError,
    EstimationError,
    InvalidConfigurationOptionError,
    InvalidExperimentConfigError,
    NoProjectError,
    TruncationError,
    UnsupportedConfigurationError,
)

COLOR_INFO = "blue"

NUMERICAL_ERRORS = (
    AccuracyError,
    DivergenceError,
    DomainError,
    EstimationError,
    TruncationError,
    UnsupportedConfigurationError,
)


class Context(BaseModel):
    """Command Line Context."""

    verbose: int
    color: bool
    handler: Any = None

    def secho(self, message, **kwargs):
        """Print with color support similar to :any:`click.secho()."""
        if self.color:
            return click.secho(message, **kwargs)
        return click.echo(message, err=kwargs.get("err", False))

    def style(self, text, **kwargs):
        """Format ``text``."""
        if self.color:
            return click.style(text, **kwargs)
        return text


pass_context = click.make_pass_decorator(Context)


class Error(click.ClickException):
    """Common CLI Error."""

    color = True

    def format_message(self) -> str:
        if self.color:
            return click.style(self.message, fg="red")
        return self.message


class ConfigError(Error):
    """Invalid Experiment Configuration."""

    exit_code = 2


class NumericalError(Error):
    """Numerical Failure Of A Named Operation."""

    exit_code = 3


@contextmanager
def exceptionhandling(context: Context):
    """
    Click Exception Handling.

    The fracspde implementation shall NOT depend on click (except the cli module).
    Therefore we remap any internal errors to nice click errors with the documented exit status.
    """
    try:
        yield
    except InvalidExperimentConfigError as exc:
        _print_traceback(context)
        raise ConfigError(f"{exc!s}") from None
    except ValidationError as exc:
        _print_traceback(context)
        raise ConfigError("\n".join([error["msg"] for error in exc.errors()])) from None
    except NUMERICAL_ERRORS as exc:
        _print_traceback(context)
        raise NumericalError(f"{exc!s}") from None
    except NoProjectError as exc:
        _print_traceback(context)
        raise Error(f"{exc!s} Try:\n\n    mkdir .fracspde\n\nor use '--user'.\n") from None
    except InvalidConfigurationOptionError as exc:
        _print_traceback(context)
        raise Error(f"{exc!s} Check 'fracspde config list' or use '--ignore-unknown'.") from None
    except Exception as exc:
        _print_traceback(context)
        raise Error(f"{exc!s}") from None
    if context.handler.has_errors:
        context.secho("Aborted!", bold=True, fg="red")
        raise click.exceptions.Exit(1)


def _print_traceback(context: Context):
    if context.verbose > 1:  # pragma: no cover
        lines = "".join(traceback.format_exc())
        context.secho(lines, fg="red", err=True)
