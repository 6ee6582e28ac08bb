"""Pytest Configuration and Fixtures."""
import pytest

from fracspde.const import (
    BLOCK_APP_CONFIG_FROM_ENV_ENV_NAME,
    PROJECT_CONFIG_PATH_ENV_NAME,
    SYSTEM_CONFIG_PATH_ENV_NAME,
    USER_CONFIG_PATH_ENV_NAME,
)


@pytest.fixture(autouse=True)
def _docdir(request):
    # Trigger ONLY for the doctests.
    doctest_plugin = request.config.pluginmanager.getplugin("doctest")
    if isinstance(request.node, doctest_plugin.DoctestItem):
        # Get the fixture dynamically by its name.
        tmpdir = request.getfixturevalue("tmpdir")

        # Chdir only for the duration of the test.
        with tmpdir.as_cwd():
            yield

    else:
        # For normal tests, we have to yield, since this is a yield-fixture.
        yield


@pytest.fixture(autouse=True)
def _isolated_config(monkeypatch, tmp_path_factory):
    # Configuration files and FRACSPDE_* variables of the developer must not leak into the tests.
    root = tmp_path_factory.mktemp("appconfig")
    monkeypatch.setenv(SYSTEM_CONFIG_PATH_ENV_NAME, str(root / "system"))
    monkeypatch.setenv(USER_CONFIG_PATH_ENV_NAME, str(root / "user"))
    monkeypatch.delenv(PROJECT_CONFIG_PATH_ENV_NAME, raising=False)
    monkeypatch.setenv(BLOCK_APP_CONFIG_FROM_ENV_ENV_NAME, "1")
    yield
