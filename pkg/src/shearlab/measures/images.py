"""
Images de test reproductibles pour les mesures quantitatives
"""

from typing import List, Optional, Sequence

import numpy as np

from ..utils import DEFAULT_SEED, SplitMix64

# Pentes des contours de la mesure géométrique ; les trois centrales sont aussi transposées
GEOMETRIC_SLOPES = (-1.0, -0.5, 0.0, 0.5, 1.0)
GEOMETRIC_TRANSPOSED = (-0.5, 0.0, 0.5)


def _centered_axis(size: int) -> np.ndarray:
    """Coordonnées −N/2, …, N/2 − 1 (le centre (N/2, N/2) correspond au pixel (N/2+1, N/2+1) en base 1)"""
    return np.arange(size) - size // 2


class TestImageGenerator:
    """
    Générateur d'images de test

    Les images aléatoires viennent d'un flux SplitMix64 unique : deux générateurs de
    même graine produisent les mêmes images, bit à bit, dans le même ordre d'appel.
    """

    __test__ = False  # pas une classe de tests pytest

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = seed
        self.rng = SplitMix64(seed)

    def normal(self, size: int) -> np.ndarray:
        return self.rng.normal((size, size))

    def uniform(self, size: int) -> np.ndarray:
        return self.rng.uniform((size, size))

    def normal_images(self, count: int, size: int) -> List[np.ndarray]:
        return [self.normal(size) for _ in range(count)]

    def uniform_images(self, count: int, size: int) -> List[np.ndarray]:
        return [self.uniform(size) for _ in range(count)]

    @staticmethod
    def edge_image(size: int, slope: float = 0.0, center: Optional[int] = None, transpose: bool = False) -> np.ndarray:
        """
        Contour indicateur {(x₁ − c) + s·(x₂ − c) ≥ 0}, axe 0 = x₁

        La normale du contour est (1, s) : pour s = 0 le saut est le long de x₁. Le
        contour de pente s est exactement l'image de pente 0 composée avec le
        cisaillement x ↦ (x₁ + s·x₂, x₂) autour du centre.
        """
        c = size // 2 if center is None else center
        x1 = np.arange(size)[:, None] - c
        x2 = np.arange(size)[None, :] - c
        image = ((x1 + slope * x2) >= 0).astype(float)
        return image.T.copy() if transpose else image

    @staticmethod
    def gaussian_image(size: int = 256, variance: float = 256.0) -> np.ndarray:
        """Échantillonnage de exp(−(x² + y²)/(2σ²)) sur {−N/2, …, N/2 − 1}²"""
        axis = _centered_axis(size)
        return np.exp(-(axis[:, None] ** 2 + axis[None, :] ** 2) / (2.0 * variance))

    @staticmethod
    def constant_image(size: int, value: float = 1.0) -> np.ndarray:
        return np.full((size, size), float(value))

    @staticmethod
    def structured_image(size: int) -> np.ndarray:
        """Image « cartoon » : disque, contour oblique et fond lisse"""
        axis = _centered_axis(size) / float(size)
        x1, x2 = axis[:, None], axis[None, :]
        disk = ((x1 - 0.15) ** 2 + (x2 + 0.1) ** 2 <= 0.2 ** 2).astype(float)
        edge = (x1 + 0.6 * x2 >= 0.25).astype(float)
        background = 0.5 * np.exp(-((x1 + 0.2) ** 2 + (x2 - 0.25) ** 2) / 0.05)
        return disk + 0.7 * edge + background

    def geometric_images(self, size: int, slopes: Sequence[float] = GEOMETRIC_SLOPES,
                         transposed: Sequence[float] = GEOMETRIC_TRANSPOSED):
        """Les huit contours (pente, transposé, image) de la mesure géométrique"""
        images = [(slope, False, self.edge_image(size, slope)) for slope in slopes]
        images += [(slope, True, self.edge_image(size, slope, transpose=True)) for slope in transposed]
        return images
