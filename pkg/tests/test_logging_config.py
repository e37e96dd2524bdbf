"""
Unit tests for logging_config and ComputationMetrics
"""

import logging
import sys
import pytest
from unittest.mock import patch, MagicMock

from app.logging_config import TzFormatter, setup_logging, apply_config
from app.prometheus_metrics import ComputationMetrics


def _record():
    return logging.LogRecord(
        name="test", level=logging.INFO, pathname="", lineno=0,
        msg="hello", args=(), exc_info=None
    )


@pytest.fixture
def restore_root():
    """Keep root handlers and level intact across a test."""
    old_handlers = logging.root.handlers[:]
    old_level = logging.root.level
    yield
    logging.root.handlers = old_handlers
    logging.root.setLevel(old_level)


class TestTzFormatter:
    """Tests for TzFormatter."""

    def test_format_with_timezone(self):
        """Formats timestamp in configured timezone."""
        import pytz
        formatter = TzFormatter("%(asctime)s - %(message)s", tz=pytz.timezone("Europe/Warsaw"))
        result = formatter.formatTime(_record())
        assert len(result) > 10

    def test_format_with_datefmt(self):
        """Uses custom date format."""
        import pytz
        formatter = TzFormatter("%(asctime)s", datefmt="%Y-%m-%d", tz=pytz.timezone("UTC"))
        result = formatter.formatTime(_record(), datefmt="%Y-%m-%d")
        assert len(result) == 10

    def test_format_without_timezone(self):
        """Works without timezone (tz=None)."""
        formatter = TzFormatter("%(asctime)s", tz=None)
        assert len(formatter.formatTime(_record())) > 10

    def test_default_stamp_has_milliseconds(self):
        import pytz
        record = _record()
        record.created, record.msecs = 86400.25, 250.0
        formatter = TzFormatter(tz=pytz.timezone("UTC"))
        assert formatter.formatTime(record) == "1970-01-02 00:00:00.250"


class TestSetupLogging:
    """Tests for setup_logging()."""

    def test_sets_info_level(self, restore_root):
        """Default setup sets INFO level (when no handlers exist)."""
        logging.root.handlers = []
        setup_logging()
        assert logging.root.level == logging.INFO

    def test_logs_to_stderr(self, restore_root):
        """Command output owns stdout, so records go to stderr."""
        logging.root.handlers = []
        setup_logging()
        streams = [getattr(h, "stream", None) for h in logging.root.handlers]
        assert sys.stderr in streams
        assert sys.stdout not in streams


class TestApplyConfig:
    """Tests for apply_config()."""

    def test_valid_level(self, restore_root, mock_config):
        """Sets valid logging level."""
        mock_config.config["logging"]["level"] = "DEBUG"
        apply_config(mock_config)
        assert logging.root.level == logging.DEBUG

    def test_lowercase_level(self, restore_root, mock_config):
        mock_config.config["logging"]["level"] = "warning"
        apply_config(mock_config)
        assert logging.root.level == logging.WARNING

    def test_invalid_level_falls_back(self, restore_root):
        """Invalid level falls back to INFO."""
        config = MagicMock()
        config.get.return_value = "INVALID"
        apply_config(config)
        assert logging.root.level == logging.INFO

    def test_none_level_falls_back(self, restore_root):
        """None level falls back to INFO."""
        config = MagicMock()
        config.get.return_value = None
        apply_config(config)
        assert logging.root.level == logging.INFO

    def test_timezone_formatter_installed(self, restore_root, mock_config):
        handler = logging.StreamHandler(sys.stderr)
        logging.root.handlers = [handler]
        apply_config(mock_config)
        assert isinstance(handler.formatter, TzFormatter)
        assert str(handler.formatter.tz) == "Europe/Warsaw"

    def test_unknown_timezone_keeps_formatter(self, restore_root, mock_config):
        handler = logging.StreamHandler(sys.stderr)
        logging.root.handlers = [handler]
        mock_config.config["logging"]["timezone"] = "Mars/Olympus"
        apply_config(mock_config)
        assert not isinstance(handler.formatter, TzFormatter)

    def test_without_pytz_keeps_formatter(self, restore_root, mock_config):
        handler = logging.StreamHandler(sys.stderr)
        logging.root.handlers = [handler]
        with patch("app.logging_config.PYTZ_AVAILABLE", False):
            apply_config(mock_config)
        assert not isinstance(handler.formatter, TzFormatter)


class TestComputationMetrics:
    """Tests for ComputationMetrics."""

    def test_time_observes_operation(self):
        metrics = ComputationMetrics()
        with metrics.time("build_W"):
            pass
        count = metrics.registry.get_sample_value(
            "periods_operation_seconds_count", {"operation": "build_W"})
        assert count == 1

    def test_time_observes_on_error(self):
        metrics = ComputationMetrics()
        with pytest.raises(ValueError):
            with metrics.time("verify_T2"):
                raise ValueError("boom")
        assert metrics.registry.get_sample_value(
            "periods_operation_seconds_count", {"operation": "verify_T2"}) == 1

    def test_record_assertion(self):
        metrics = ComputationMetrics()
        metrics.record_assertion("dim", True)
        metrics.record_assertion("dim", True)
        metrics.record_assertion("dim", False)
        sample = metrics.registry.get_sample_value
        assert sample("periods_assertions_total", {"command": "dim", "result": "pass"}) == 2
        assert sample("periods_assertions_total", {"command": "dim", "result": "fail"}) == 1

    def test_record_dimension(self):
        metrics = ComputationMetrics()
        metrics.record_dimension(7, 6, "Q", 8)
        assert metrics.registry.get_sample_value(
            "periods_space_dimension", {"level": "7", "weight": "6", "domain": "Q"}) == 8

    def test_private_registries(self):
        """Two instances do not collide on metric names."""
        first, second = ComputationMetrics(), ComputationMetrics()
        first.record_dimension(1, 12, "Q", 3)
        assert second.registry.get_sample_value(
            "periods_space_dimension", {"level": "1", "weight": "12", "domain": "Q"}) is None

    def test_write_textfile(self, tmp_path):
        metrics = ComputationMetrics()
        metrics.record_assertion("verify-t1", True)
        path = tmp_path / "periods.prom"
        metrics.write(path)
        assert 'periods_assertions_total{command="verify-t1",result="pass"} 1.0' in path.read_text()

    def test_write_failure_is_logged(self, tmp_path, caplog):
        metrics = ComputationMetrics()
        with patch("app.prometheus_metrics.write_to_textfile", side_effect=OSError("disk full")):
            metrics.write(tmp_path / "periods.prom")
        assert "Failed to write metrics" in caplog.text
