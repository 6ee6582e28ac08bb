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

"""Collection Of All Exceptions Which Might Occur."""

from pathlib import Path
from typing import Any, Optional


class DomainError(RuntimeError):
    """Argument Outside Of The Mathematical Domain."""

    def __init__(self, what: str, value: Any, details: Optional[str] = None):
        msg = f"{value!r} is outside the domain"
        if details:
            msg = f"{msg}: {details}"
        super().__init__(f"{what}: {msg}.")
        self.what = what
        self.value = value
        self.details = details


class AccuracyError(RuntimeError):
    """Accuracy Goal Cannot Be Reached."""

    def __init__(self, what: str, best: float, bound: float):
        super().__init__(f"{what}: accuracy goal not reached. Best estimate {best!r} with error bound {bound!r}.")
        self.what = what
        self.best = best
        self.bound = bound


class TruncationError(RuntimeError):
    """Truncated Mass Is Too Large."""

    def __init__(self, what: str, mass: float, limit: float, details: Optional[str] = None):
        msg = f"{what}: truncated mass {mass!r} exceeds {limit!r}."
        if details:
            msg = f"{msg} {details}"
        super().__init__(msg)
        self.what = what
        self.mass = mass
        self.limit = limit


class UnsupportedConfigurationError(RuntimeError):
    """Configuration Is Not Supported."""

    def __init__(self, what: str, details: str):
        super().__init__(f"{what}: unsupported configuration: {details}.")
        self.what = what
        self.details = details


class DivergenceError(RuntimeError):
    """Series Or Integral Diverges."""

    def __init__(self, what: str, threshold: float, details: Optional[str] = None):
        msg = f"{what}: diverges below threshold {threshold!r}"
        if details:
            msg = f"{msg} ({details})"
        super().__init__(f"{msg}.")
        self.what = what
        self.threshold = threshold


class EstimationError(RuntimeError):
    """Statistical Estimate Cannot Be Formed."""

    def __init__(self, what: str, details: str):
        super().__init__(f"{what}: {details}.")
        self.what = what
        self.details = details


class InvalidExperimentConfigError(RuntimeError):
    """Experiment Configuration Is Invalid."""

    def __init__(self, path: Optional[Path], details: str):
        where = f" {str(path)!r}" if path else ""
        super().__init__(f"Experiment configuration{where} is invalid:\n{details}")
        self.path = path
        self.details = details


class NoProjectError(RuntimeError):
    """No Project Directory Found."""

    def __init__(self):
        super().__init__("fracspde project has not been found.")


class InvalidConfigurationFileError(RuntimeError):
    """
    A configuration file is invalid.

    This exception is raised if loading a configuration file fails because its content is invalid.
    """

    def __init__(self, config_file_path: Path, message: str):
        super().__init__(f"The configuration file {config_file_path} is invalid: {message}")
        self.config_file_path = config_file_path


class InvalidConfigurationLocationError(RuntimeError):
    """
    An invalid configuration location has been specified.

    This exception is raised if an attempt is made to load or save configuration values
    from an invalid location.
    """

    def __init__(self, location: str):
        super().__init__(f"Invalid configuration location: {location}")
        self.location = location


class InvalidConfigurationValueError(RuntimeError):
    """The given value cannot be used for the configuration option."""

    def __init__(self, option: str, value: Any):
        super().__init__(f"Invalid value {value!r} for option {option!r}.")
        self.option = option
        self.value = value


class InvalidConfigurationOptionError(RuntimeError):
    """The configuration option is not known to the application."""

    def __init__(self, option: str):
        super().__init__(f"Unknown configuration option {option!r}.")
        self.option = option
