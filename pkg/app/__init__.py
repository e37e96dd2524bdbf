"""
Period Congruences Application Package
Exact arithmetic on period polynomials for Γ₀(N) over ℚ and 𝔽_ℓ
"""

__version__ = "0.1.0"
__author__ = "Period Congruences"

# pylint: disable=wrong-import-position
from .config_manager import ConfigManager
from .periodspace import build_W, split_pm
from .congruence import verify_T1, verify_T2, verify_T3

__all__ = [
    'ConfigManager',
    'build_W',
    'split_pm',
    'verify_T1',
    'verify_T2',
    'verify_T3',
]
