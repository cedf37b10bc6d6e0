"""
Utilitaires partagés : logs, chronométrage, fichiers, aléa reproductible
"""

from .logger import Logger
from .timers import Timer, timer, best_of
from .files import ensure_directory, ensure_parent_directory, safe_json_dumps, cache_key
from .rng import SplitMix64, DEFAULT_SEED

__all__ = [
    "Logger",
    "Timer",
    "timer",
    "best_of",
    "ensure_directory",
    "ensure_parent_directory",
    "safe_json_dumps",
    "cache_key",
    "SplitMix64",
    "DEFAULT_SEED",
]
