"""
Configuration Manager for period computations
Handles loading, validation and defaults of the optional JSON configuration
"""

import json
import os
import sys
import logging
from pathlib import Path
from typing import Dict, Any, Optional

# Optional timezone support
try:
    import pytz
    PYTZ_AVAILABLE = True
except ImportError:
    PYTZ_AVAILABLE = False

logger = logging.getLogger(__name__)

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
VALID_REALIZATIONS = ("ceil", "nearest")
VALID_FORMATS = ("json", "table")

# Environment variable → (section, key)
ENV_OVERRIDES = {
    "PERIODS_LOG_LEVEL": ("logging", "level"),
    "PERIODS_TIMEZONE": ("logging", "timezone"),
    "PERIODS_METRICS_FILE": ("metrics", "textfile"),
}


class ConfigManager:
    """Manages run configuration from an optional JSON file and environment overrides"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration manager

        Args:
            config_path: Path to configuration JSON file; None uses defaults only
        """
        self.config_path = Path(config_path) if config_path else None
        self.config = self.load_config()

    def load_config(self) -> Dict[str, Any]:
        """
        Load configuration, apply environment overrides and defaults

        Returns:
            Configuration dictionary

        Raises:
            SystemExit: If an explicitly given file is missing or invalid
        """
        config: Dict[str, Any] = {}
        if self.config_path is not None:
            if not self.config_path.exists():
                logger.error(f"Configuration file not found: {self.config_path}")
                sys.exit(2)
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    config = json.load(f)
                if not isinstance(config, dict):
                    raise ValueError("Top-level configuration must be a JSON object")
            except json.JSONDecodeError as e:
                logger.error(f"Invalid JSON in config file: {e}")
                sys.exit(2)
            except ValueError as e:
                logger.error(f"Invalid configuration: {e}")
                sys.exit(2)

        self._apply_env_overrides(config)
        self._apply_logging_defaults(config)
        self._apply_hecke_defaults(config)
        self._apply_scan_defaults(config)
        self._apply_output_defaults(config)
        self._apply_metrics_defaults(config)

        try:
            self._validate_config(config)
        except ValueError as e:
            logger.error(f"Invalid configuration: {e}")
            sys.exit(2)

        logger.debug("Configuration loaded successfully")
        return config

    def _apply_env_overrides(self, config: Dict[str, Any]):
        """Environment variables win over the file."""
        for env_name, (section, key) in ENV_OVERRIDES.items():
            value = os.environ.get(env_name)
            if value:
                config.setdefault(section, {})[key] = value
                logger.debug(f"Config override from {env_name}: {section}.{key}")

    def _validate_config(self, config: Dict[str, Any]):
        """
        Validate types and enumerations

        Args:
            config: Configuration dictionary to validate

        Raises:
            ValueError: If a value has the wrong type or is not allowed
        """
        level = str(config["logging"]["level"]).upper()
        if level not in VALID_LOG_LEVELS:
            logger.warning(f"Invalid log level '{level}', falling back to INFO")
            config["logging"]["level"] = "INFO"
        self._validate_timezone(config)

        hecke = config["hecke"]
        if hecke["realization"] not in VALID_REALIZATIONS:
            raise ValueError(f"hecke.realization must be one of {VALID_REALIZATIONS}, got '{hecke['realization']}'")
        bound = hecke["solver_max_bound"]
        if not isinstance(bound, int) or isinstance(bound, bool) or bound < 1:
            raise ValueError(f"hecke.solver_max_bound must be a positive integer, got {bound!r}")

        if not isinstance(config["scan"]["verify"], bool):
            raise ValueError("scan.verify must be a boolean")

        output = config["output"]
        if output["format"] not in VALID_FORMATS:
            raise ValueError(f"output.format must be one of {VALID_FORMATS}, got '{output['format']}'")
        indent = output["indent"]
        if indent is not None and (not isinstance(indent, int) or isinstance(indent, bool) or indent < 0):
            raise ValueError(f"output.indent must be a non-negative integer or null, got {indent!r}")

        if not isinstance(config["metrics"]["enabled"], bool):
            raise ValueError("metrics.enabled must be a boolean")

    def _validate_timezone(self, config: Dict[str, Any]):
        """Fall back to UTC for unknown zones (checked only when pytz is available)."""
        timezone = config["logging"]["timezone"]
        if PYTZ_AVAILABLE:
            try:
                pytz.timezone(timezone)
            except pytz.exceptions.UnknownTimeZoneError:
                logger.warning(f"Invalid timezone '{timezone}', falling back to 'UTC'")
                config["logging"]["timezone"] = "UTC"
        else:
            logger.warning("pytz not installed - timezone validation disabled")

    def _apply_logging_defaults(self, config: Dict[str, Any]):
        """Apply defaults for logging section."""
        section = config.setdefault("logging", {})
        section.setdefault("level", "INFO")
        section.setdefault("timezone", "UTC")

    def _apply_hecke_defaults(self, config: Dict[str, Any]):
        """Apply defaults for Hecke element construction."""
        section = config.setdefault("hecke", {})
        section.setdefault("solver_max_bound", 4)
        section.setdefault("realization", "ceil")

    def _apply_scan_defaults(self, config: Dict[str, Any]):
        section = config.setdefault("scan", {})
        section.setdefault("checkpoint", None)
        section.setdefault("verify", False)

    def _apply_output_defaults(self, config: Dict[str, Any]):
        section = config.setdefault("output", {})
        section.setdefault("format", "json")
        section.setdefault("indent", 2)

    def _apply_metrics_defaults(self, config: Dict[str, Any]):
        """Apply defaults for metrics export; a textfile path implies enabled."""
        section = config.setdefault("metrics", {})
        section.setdefault("textfile", None)
        section.setdefault("enabled", bool(section["textfile"]))

    _SENTINEL = object()

    def get(self, *keys, default=_SENTINEL) -> Optional[Any]:
        """
        Get configuration value by nested keys

        Args:
            *keys: Keys to traverse in configuration dictionary
            default: Value to return if key is not found (default: None)

        Returns:
            Configuration value, or default if not found

        Example:
            config.get("hecke", "realization")  # Returns "ceil"
            config.get("scan", "checkpoint", default="scan.json")
        """
        fallback = None if default is self._SENTINEL else default
        value = self.config
        for key in keys:
            if not isinstance(value, dict):
                return fallback
            value = value.get(key)
            if value is None:
                return fallback
        return value

    def get_timezone(self) -> str:
        return self.get("logging", "timezone") or "UTC"
