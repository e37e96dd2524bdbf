"""Ensure pyproject.toml, app.__version__ and `periods --version` agree."""
import sys
from pathlib import Path

import pytest

from app import __version__
from app.cli import run

if sys.version_info >= (3, 11):
    import tomllib
else:
    try:
        import tomli as tomllib
    except ImportError:
        tomllib = None

PYPROJECT = Path(__file__).parent.parent / "pyproject.toml"


@pytest.fixture
def project():
    if tomllib is None:
        pytest.skip("tomllib/tomli not available (Python < 3.11 without tomli installed)")
    return tomllib.loads(PYPROJECT.read_text(encoding="utf-8"))["project"]


def test_version_matches_pyproject(project):
    assert project["version"] == __version__, (
        f"pyproject.toml version={project['version']} "
        f"does not match app.__version__={__version__}"
    )


def test_console_script_points_at_run(project):
    assert project["scripts"]["periods"] == "app.cli:run"


def test_cli_reports_version(capsys):
    assert run(["--version"]) == 0
    assert capsys.readouterr().out.strip() == f"periods {__version__}"
