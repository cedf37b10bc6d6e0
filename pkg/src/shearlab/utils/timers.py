"""
Chronométrage : décorateur de log et chronomètre à tours pour la mesure de vitesse
"""

import time
import functools
from contextlib import contextmanager
from typing import Any, Callable, Iterator, List


def timer(func: Callable) -> Callable:
    """Décorateur : durée de la fonction journalisée au niveau debug"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> Any:
        start_time = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            elapsed_time = time.perf_counter() - start_time
            # Import ici pour éviter la circularité
            from .logger import Logger
            Logger.debug(f"⏱️  {func.__name__}: {elapsed_time:.2f}s")
    return wrapper


class Timer:
    """Chronomètre perf_counter ; chaque mesure ajoute un tour à `laps`"""

    def __init__(self):
        self.laps: List[float] = []

    @property
    def elapsed_time(self) -> float:
        """Durée du dernier tour (0 si aucun)"""
        return self.laps[-1] if self.laps else 0.0

    @property
    def best(self) -> float:
        return min(self.laps) if self.laps else float("inf")

    @contextmanager
    def measure(self) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.laps.append(time.perf_counter() - start)


def best_of(func: Callable[[], Any], repeats: int = 3) -> float:
    """Meilleur temps (en secondes) sur `repeats` exécutions de func"""
    timer_ = Timer()
    for _ in range(max(1, repeats)):
        with timer_.measure():
            func()
    return timer_.best
