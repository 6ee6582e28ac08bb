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

"""General Constants."""

from pathlib import Path

PROJECT_PATH = Path(".fracspde")
"""
The sub-folder in which the tool stores project related data.

This path is relative to the project folder.
"""

CONFIG_FILE_NAME = "config.toml"
"""Name of the config file in the :any:`PROJECT_PATH`."""

OUTPUT_DIR_DEFAULT = Path("fracspde-out")
"""Default artifact directory, relative to the current working directory."""

APP_NAME = "fracspde"
"""Application Name."""

APP_AUTHOR = "c0fec0de"
"""Application Author."""

SYSTEM_CONFIG_PATH_ENV_NAME = "FRACSPDE_CONFIG_SYSTEM_DIR"
"""The name of the environment variable which points to an alternative system config folder path."""

USER_CONFIG_PATH_ENV_NAME = "FRACSPDE_CONFIG_USER_DIR"
"""The name of the environment variable which points to an alternative user config folder path."""

PROJECT_CONFIG_PATH_ENV_NAME = "FRACSPDE_CONFIG_PROJECT_DIR"
"""The name of the environment variable which points to an alternative project config folder path."""

BLOCK_APP_CONFIG_FROM_ENV_ENV_NAME = "FRACSPDE_ENV_NO_LOAD"
"""If this environment variable is set, do not evaluate environment variables when loading the app config."""

TARGET_REL_ERR_DEFAULT = 1e-10
"""Default accuracy goal of the Mittag-Leffler evaluation."""

KERNEL_TABLE_TAIL_LIMIT = 1e-4
"""Maximum kernel mass beyond the outermost table offset."""

GRID_TAIL_LIMIT = 1e-3
"""Maximum kernel mass outside the simulation domain at ``t_max``."""

SUBORDINATION_EPSABS = 1e-8
"""Absolute tolerance of the adaptive subordination integral."""

SPECTRAL_EPSABS = 1e-11
"""Absolute tolerance of the spectral inversion."""

RENEWAL_MAX_STEPS = 2**15
"""Largest number of product-integration steps tried by the refinement loop."""

COLOR_PASS = "green"
COLOR_FAIL = "red"
