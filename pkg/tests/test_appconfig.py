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

"""AppConfig testing."""

import os
from pathlib import Path
from unittest import mock

from pytest import raises

from fracspde.appconfig import AppConfig, AppConfigLocation, find_project
from fracspde.const import BLOCK_APP_CONFIG_FROM_ENV_ENV_NAME, OUTPUT_DIR_DEFAULT, TARGET_REL_ERR_DEFAULT
from fracspde.exceptions import InvalidConfigurationFileError, InvalidConfigurationLocationError, NoProjectError

from .util import chdir


def _write(path: Path, text: str):
    path.mkdir(parents=True, exist_ok=True)
    (path / "config.toml").write_text(text, encoding="utf-8")


def _app_config(tmp_path: Path, include_project=True, **kwargs) -> AppConfig:
    args = {
        "system_config_dir": str(tmp_path / "system"),
        "user_config_dir": str(tmp_path / "user"),
        "use_config_from_env": False,
    }
    if include_project:
        args["project_config_dir"] = str(tmp_path / "project")
    args.update(kwargs)
    return AppConfig(**args)


def test_default_construction():
    """Test if constructing a config object with default paths works."""
    AppConfig()


def test_defaults(tmp_path):
    """Test if sensible defaults are set."""
    options = _app_config(tmp_path).options
    assert options.color_ui
    assert options.threads >= 1
    assert options.output_dir == str(OUTPUT_DIR_DEFAULT)
    assert options.target_rel_err == TARGET_REL_ERR_DEFAULT


def test_single_file_config(tmp_path):
    """Test if loading a single config file works."""
    for location in ("system", "user", "project"):
        base = tmp_path / location
        _write(base / location, f'output_dir = "{location}-out"\n')
        config = _app_config(base, **{f"{location}_config_dir": str(base / location)})
        assert config.options.output_dir == f"{location}-out"


def test_precedence(tmp_path):
    """Project beats user and user beats system."""
    _write(tmp_path / "system", 'output_dir = "system-out"\nthreads = 3\ntarget_rel_err = 1e-8\n')
    _write(tmp_path / "user", 'output_dir = "user-out"\nthreads = 2\n')
    _write(tmp_path / "project", 'output_dir = "project-out"\n')
    options = _app_config(tmp_path).options
    assert options.output_dir == "project-out"
    assert options.threads == 2
    assert options.target_rel_err == 1e-8

    options = _app_config(tmp_path, include_project=False).options
    assert options.output_dir == "user-out"


def test_config_from_env(tmp_path):
    """Environment variables override all files."""
    _write(tmp_path / "user", "threads = 2\n")
    patch = {"FRACSPDE_THREADS": "5"}
    with mock.patch.dict(os.environ, patch):
        os.environ.pop(BLOCK_APP_CONFIG_FROM_ENV_ENV_NAME, None)
        config = _app_config(tmp_path, use_config_from_env=True)
        assert config.options.threads == 5
        assert config.threads(3) == 3
        assert config.threads(9) == 5
        assert config.threads() == 5


def test_env_blocked(tmp_path):
    """``FRACSPDE_ENV_NO_LOAD`` disables environment overrides."""
    with mock.patch.dict(os.environ, {"FRACSPDE_THREADS": "5", BLOCK_APP_CONFIG_FROM_ENV_ENV_NAME: "1"}):
        _write(tmp_path / "user", "threads = 2\n")
        config = _app_config(tmp_path, use_config_from_env=True)
        assert config.options.threads == 2


def test_invalid_config_file(tmp_path):
    """Broken TOML is reported."""
    _write(tmp_path / "user", "threads = = 2\n")
    with raises(InvalidConfigurationFileError):
        print(_app_config(tmp_path).options.threads)


def test_invalid_config_value(tmp_path):
    """Values are validated against the schema."""
    _write(tmp_path / "system", 'threads = "many"\n')
    with raises(InvalidConfigurationFileError):
        print(_app_config(tmp_path).options.threads)


def test_invalid_config_location():
    """If - for whatever reason - an invalid config location is used, we expect a specific exception."""
    with raises(InvalidConfigurationLocationError):
        AppConfig()._load("Hello World")


def test_no_project(tmp_path):
    """Outside of a project the project file cannot be written."""
    with chdir(tmp_path):
        assert find_project() is None
        config = AppConfig(
            system_config_dir=str(tmp_path / "system"),
            user_config_dir=str(tmp_path / "user"),
            use_config_from_env=False,
        )
        assert config.load(AppConfigLocation.PROJECT).threads is None
        with raises(NoProjectError):
            config.get_config_file_path(AppConfigLocation.PROJECT)


def test_find_project(tmp_path):
    """The project directory is searched upwards."""
    (tmp_path / "proj" / ".fracspde").mkdir(parents=True)
    (tmp_path / "proj" / "sub" / "dir").mkdir(parents=True)
    assert find_project(tmp_path / "proj" / "sub" / "dir") == (tmp_path / "proj").resolve()
    with chdir(tmp_path / "proj" / "sub"):
        config = AppConfig(use_config_from_env=False)
        assert config.get_config_file_path(AppConfigLocation.PROJECT) == (
            tmp_path / "proj" / ".fracspde" / "config.toml"
        ).resolve()


def test_write_config(tmp_path):
    """Test if writing configuration values works and keeps comments."""
    _write(tmp_path / "system", "# keep me\n")
    config = _app_config(tmp_path)
    assert config.options.color_ui

    with config.edit(AppConfigLocation.SYSTEM) as sys_conf:
        sys_conf.color_ui = False
        sys_conf.threads = 4

    options = config.options
    assert not options.color_ui
    assert options.threads == 4
    assert "# keep me" in (tmp_path / "system" / "config.toml").read_text(encoding="utf-8")

    sys_conf = config.load(AppConfigLocation.SYSTEM)
    sys_conf.color_ui = None
    sys_conf.threads = None
    config.save(sys_conf, AppConfigLocation.SYSTEM)

    assert config.options.color_ui
    assert config.load(AppConfigLocation.SYSTEM).threads is None
