"""
Fixtures partagées des tests shearlab
"""

import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(_ROOT, "src"))

import numpy as np
import pytest

from shearlab.ppgrid import build_grid
from shearlab.utils import SplitMix64


@pytest.fixture
def rng():
    """Flux SplitMix64 de graine fixe"""
    return SplitMix64(42)


@pytest.fixture
def small_grid():
    return build_grid(8, 4)


@pytest.fixture
def cache_dir(tmp_path):
    """Répertoire de cache isolé par test"""
    path = tmp_path / "cache"
    path.mkdir()
    return str(path)


def relative(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b))
