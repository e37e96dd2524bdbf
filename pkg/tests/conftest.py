"""
Shared fixtures for period-congruence unit tests
"""

import json
import pytest
from unittest.mock import MagicMock

from app.exactlinalg import RATIONALS


@pytest.fixture
def minimal_config():
    """Minimal valid configuration dictionary."""
    return {
        "logging": {
            "level": "INFO",
            "timezone": "Europe/Warsaw"
        },
        "hecke": {
            "solver_max_bound": 4,
            "realization": "ceil"
        },
        "scan": {
            "checkpoint": None,
            "verify": False
        },
        "output": {
            "format": "json",
            "indent": 2
        },
        "metrics": {
            "enabled": False,
            "textfile": None
        }
    }


@pytest.fixture
def config_file(tmp_path, minimal_config):
    """Write minimal_config to a temp file and return its path."""
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(minimal_config), encoding="utf-8")
    return str(config_path)


@pytest.fixture
def mock_config(minimal_config):
    """Mock ConfigManager that returns values from minimal_config."""
    config = MagicMock()
    config.config = minimal_config

    def _get(*keys, default=None):
        value = minimal_config
        for key in keys:
            if isinstance(key, str) and isinstance(value, dict):
                value = value.get(key)
                if value is None:
                    return default
            else:
                return default
        return value

    config.get = _get
    config.get_timezone.return_value = "Europe/Warsaw"
    return config


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Config overrides from the environment must not leak into tests."""
    for name in ("PERIODS_LOG_LEVEL", "PERIODS_TIMEZONE", "PERIODS_METRICS_FILE"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture(scope="session")
def W_7_4():
    """W_4(7) over ℚ (weight 6 at level 7)."""
    from app.periodspace import build_W
    return build_W(7, 4, RATIONALS)


@pytest.fixture(scope="session")
def W_1_10():
    """W_10(1) over ℚ (weight 12 at level 1)."""
    from app.periodspace import build_W
    return build_W(1, 10, RATIONALS)
