"""Package version resolution."""

import re
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import pytest

import dgprf

PYPROJECT = Path(__file__).resolve().parents[2] / "pyproject.toml"


def test_version_is_pep440_like():
    assert re.fullmatch(r"\d+\.\d+\.\d+(\.dev\d+)?", dgprf.__version__)


def test_version_matches_metadata_when_installed():
    try:
        installed = version("dgprf")
    except PackageNotFoundError:
        pytest.skip("dgprf is not installed")
    assert dgprf.__version__ == installed


def test_pyproject_declares_version():
    text = PYPROJECT.read_text(encoding="utf-8")
    declared = re.search(r'^version = "([^"]+)"', text, re.MULTILINE)
    assert declared is not None
    if dgprf.__version__ != "0.0.0.dev0":
        assert dgprf.__version__ == declared.group(1)
