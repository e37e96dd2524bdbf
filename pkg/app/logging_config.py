"""
Logging for period computations

Reports own stdout, so every log record goes to stderr. Timestamps follow
the `logging.timezone` setting when pytz is installed.
"""

import sys
import logging
from datetime import datetime

try:
    import pytz
    PYTZ_AVAILABLE = True
except ImportError:
    PYTZ_AVAILABLE = False

from .config_manager import VALID_LOG_LEVELS

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'


class TzFormatter(logging.Formatter):
    """Formatter stamping records in a fixed timezone (system local time when tz is None)"""

    def __init__(self, fmt=None, datefmt=None, tz=None):
        super().__init__(fmt, datefmt)
        self.tz = tz

    def formatTime(self, record, datefmt=None):
        stamp = datetime.fromtimestamp(record.created, tz=self.tz)
        if datefmt:
            return stamp.strftime(datefmt)
        return f"{stamp:%Y-%m-%d %H:%M:%S}.{int(record.msecs):03d}"


def setup_logging(level: int = logging.INFO):
    """Route records to stderr before the configuration is read."""
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=[logging.StreamHandler(sys.stderr)])


def _level_from(config) -> int:
    name = str(config.get("logging", "level", default="INFO") or "INFO").upper()
    if name not in VALID_LOG_LEVELS:
        logger.warning(f"Unknown log level '{name}', keeping INFO")
        name = "INFO"
    return getattr(logging, name)


def apply_config(config):
    """
    Apply the `logging` section: level first, then the timestamp timezone

    Args:
        config: ConfigManager instance (or anything with the same get())
    """
    level = _level_from(config)
    logging.root.setLevel(level)
    logger.debug(f"Log level {logging.getLevelName(level)}")

    if not PYTZ_AVAILABLE:
        logger.warning("pytz is not installed; log timestamps stay in system time")
        return

    tz_name = config.get("logging", "timezone", default="UTC")
    try:
        tz = pytz.timezone(tz_name)
    except Exception as e:
        logger.warning(f"Cannot use timezone {tz_name!r} for log timestamps: {e}")
        return
    formatter = TzFormatter(LOG_FORMAT, tz=tz)
    for handler in logging.root.handlers:
        handler.setFormatter(formatter)
    logger.debug(f"Log timestamps in {tz_name}")
