"""Checks for the correctness of the package's metadata."""

import tomllib
from pathlib import Path

import pytest

from piggyback_mds import __version__
from piggyback_mds.const import VERSION


@pytest.fixture(scope="session")
def pyproject_toml(repo_root: Path) -> dict:
    """Return the content of pyproject.toml."""
    with Path.open(repo_root / "pyproject.toml") as pyproject_toml_file:
        toml_string = pyproject_toml_file.read()
    return tomllib.loads(toml_string)


def test_package_version_in_sync(pyproject_toml: dict) -> None:
    """The version constant and pyproject.toml must agree."""
    version_from_pyproject_toml = pyproject_toml["project"]["version"]
    assert VERSION == version_from_pyproject_toml, (
        "const.py and pyproject.toml contain different versions"
        " of the package"
    )
    assert __version__ == VERSION


def test_console_script_resolves(pyproject_toml: dict, package_root: Path) -> None:
    """The console script must point at an existing module and function."""
    target = pyproject_toml["project"]["scripts"]["piggyback-mds"]
    module, _, function = target.partition(":")
    assert module == "piggyback_mds.cli"
    source = (package_root / "cli.py").read_text()
    assert f"def {function}(" in source


def test_runtime_dependencies(pyproject_toml: dict) -> None:
    """Every third-party package imported at runtime must be declared."""
    declared = {
        dep.split(">")[0].split("=")[0].strip()
        for dep in pyproject_toml["project"]["dependencies"]
    }
    assert declared == {"galois", "numpy", "voluptuous"}
