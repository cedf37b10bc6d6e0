"""
Générateur pseudo-aléatoire reproductible (SplitMix64) et lois usuelles

Algorithme, pour la i-ème sortie (i = 0, 1, ...) :

    state = seed + (i + 1) * 0x9E3779B97F4A7C15          (mod 2**64)
    z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

Uniformes : (z >> 11) * 2**-53 dans [0, 1). Normales : Box-Muller sur des
paires d'uniformes consécutives.
"""

from typing import Tuple, Union

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
DEFAULT_SEED = 42

Shape = Union[int, Tuple[int, ...]]


def _size(shape: Shape) -> int:
    return int(np.prod(shape)) if not isinstance(shape, int) else shape


class SplitMix64:
    """Flux SplitMix64 vectorisé ; deux instances de même graine sont identiques bit à bit"""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = int(seed) % (1 << 64)
        self.counter = 0

    def next_uint64(self, count: int) -> np.ndarray:
        """Tire `count` entiers 64 bits"""
        index = np.arange(self.counter, self.counter + count, dtype=np.uint64)
        self.counter += count
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + (index + np.uint64(1)) * GAMMA
            z = (z ^ (z >> np.uint64(30))) * MIX1
            z = (z ^ (z >> np.uint64(27))) * MIX2
            z = z ^ (z >> np.uint64(31))
        return z

    def uniform(self, shape: Shape) -> np.ndarray:
        """Uniformes dans [0, 1)"""
        z = self.next_uint64(_size(shape))
        return ((z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53).reshape(shape)

    def normal(self, shape: Shape) -> np.ndarray:
        """Normales centrées réduites (Box-Muller)"""
        count = _size(shape)
        pairs = (count + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * np.pi * u[:, 1]
        out = np.empty((pairs, 2))
        out[:, 0] = radius * np.cos(theta)
        out[:, 1] = radius * np.sin(theta)
        return out.reshape(-1)[:count].reshape(shape)

    def complex_normal(self, shape: Shape) -> np.ndarray:
        """Normales complexes (parties réelle et imaginaire indépendantes)"""
        real = self.normal(shape)
        return real + 1j * self.normal(shape)
