"""
Prometheus Metrics for period computations

Collects per-run metrics in a private registry and exports them as a
node-exporter textfile.
"""

import logging
import time as _time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Union

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

logger = logging.getLogger(__name__)


class ComputationMetrics:
    """
    Prometheus metrics manager for one CLI run

    Metrics exposed:
    - periods_operation_seconds: Wall time of named operations
    - periods_assertions_total: Checked assertions by command and result
    - periods_space_dimension: Dimensions of constructed spaces
    """

    def __init__(self):
        self.registry = CollectorRegistry()

        # Metric: Operation duration (histogram)
        self.operation_seconds = Histogram(
            'periods_operation_seconds',
            'Wall time of period-space operations',
            labelnames=['operation'],
            buckets=(0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0, 120.0),
            registry=self.registry,
        )

        # Metric: Assertions (counter - only goes up)
        self.assertions_total = Counter(
            'periods_assertions_total',
            'Total number of checked assertions',
            labelnames=['command', 'result'],
            registry=self.registry,
        )

        # Metric: Space dimensions (gauge)
        self.space_dimension = Gauge(
            'periods_space_dimension',
            'Dimension of a constructed period space',
            labelnames=['level', 'weight', 'domain'],
            registry=self.registry,
        )

    @contextmanager
    def time(self, operation: str) -> Iterator[None]:
        """
        Time a block of work

        Args:
            operation: Operation label (e.g. "build_W", "verify_T1")
        """
        start = _time.perf_counter()
        try:
            yield
        finally:
            elapsed = _time.perf_counter() - start
            self.operation_seconds.labels(operation=operation).observe(elapsed)
            logger.debug(f"Prometheus: {operation} took {elapsed:.3f}s")

    def record_assertion(self, command: str, passed: bool):
        self.assertions_total.labels(command=command, result="pass" if passed else "fail").inc()

    def record_dimension(self, level: int, weight: int, domain: str, dim: int):
        self.space_dimension.labels(level=str(level), weight=str(weight), domain=domain).set(dim)

    def write(self, path: Union[str, Path]):
        """
        Export all metrics to a textfile

        Args:
            path: Target .prom file
        """
        try:
            write_to_textfile(str(path), self.registry)
            logger.info(f"Metrics written to {path}")
        except OSError as e:
            logger.error(f"Failed to write metrics to {path}: {e}")
