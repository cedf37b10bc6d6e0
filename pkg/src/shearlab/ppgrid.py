"""
Grille pseudo-polaire suréchantillonnée Ω_R, classification des points et produit scalaire ensembliste
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from .utils import SplitMix64

Number = Union[int, float, str, Fraction]


class PointKind(str, Enum):
    """Nature d'un point de la grille"""
    CENTER = "center"
    SEAM = "seam"
    INTERIOR = "interior"


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


@dataclass(frozen=True)
class PseudoPolarGrid:
    """Grille Ω_R stockée comme deux secteurs denses (RN+1)×(N+1), doublons compris.

    Secteur 1 : (n, ℓ) ↦ (−(2n/R)(2ℓ/N), 2n/R) ; secteur 2 : (n, ℓ) ↦ (2n/R, −(2n/R)(2ℓ/N)).
    Lignes indexées par n ∈ [−RN/2, RN/2], colonnes par ℓ ∈ [−N/2, N/2].
    """
    N: int
    R: int
    m0: Fraction

    @property
    def radial_count(self) -> int:
        return self.R * self.N + 1

    @property
    def angular_count(self) -> int:
        return self.N + 1

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.radial_count, self.angular_count)

    @property
    def n_max(self) -> int:
        return self.R * self.N // 2

    @property
    def l_max(self) -> int:
        return self.N // 2

    @property
    def default_m0(self) -> Fraction:
        return Fraction(2 * (self.R * self.N + 1), self.R)

    @property
    def is_default_m0(self) -> bool:
        return self.m0 == self.default_m0

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    @property
    def l_values(self) -> np.ndarray:
        return np.arange(-self.l_max, self.l_max + 1)

    def n_index(self, n):
        return n + self.n_max

    def l_index(self, l):
        return l + self.l_max

    def check_index(self, sector: int, n: int, l: int) -> None:
        """Lève ValueError si (secteur, n, ℓ) sort de la grille"""
        if sector not in (1, 2):
            raise ValueError(f"Secteur invalide: {sector}")
        if abs(n) > self.n_max or abs(l) > self.l_max:
            raise ValueError(f"Indice hors grille: n={n}, ℓ={l} (|n| ≤ {self.n_max}, |ℓ| ≤ {self.l_max})")

    def coordinate(self, sector: int, n: int, l: int) -> Tuple[Fraction, Fraction]:
        """Coordonnées fréquentielles exactes (ω₁, ω₂) d'un indice"""
        self.check_index(sector, n, l)
        radial = Fraction(2 * n, self.R)
        angular = -radial * Fraction(2 * l, self.N)
        return (angular, radial) if sector == 1 else (radial, angular)

    def coordinates(self, sector: int) -> Tuple[np.ndarray, np.ndarray]:
        """Tableaux (ω₁, ω₂) de forme (RN+1, N+1) pour un secteur"""
        radial = (2.0 * self.n_values / self.R)[:, None] * np.ones(self.angular_count)[None, :]
        angular = -radial * (2.0 * self.l_values / self.N)[None, :]
        return (angular, radial) if sector == 1 else (radial, angular)

    def kinds(self) -> np.ndarray:
        """Codes de classification par indice : 0 centre, 1 couture, 2 intérieur (identiques pour les deux secteurs)"""
        codes = np.full(self.shape, 2, dtype=np.int8)
        codes[:, [0, -1]] = 1
        codes[self.n_max, :] = 0
        return codes

    def multiplicity(self) -> np.ndarray:
        """Facteurs de déduplication par indice stocké (identiques pour les deux secteurs)"""
        factors = np.ones(self.shape)
        factors[:, [0, -1]] = 0.5
        factors[self.n_max, :] = 1.0 / (2 * (self.N + 1))
        return factors

    def set_cardinality(self) -> int:
        """|Ω_R| : nombre de points distincts"""
        seams = 2 * self.R * self.N
        interior = 2 * self.R * self.N * (self.N - 1)
        return 1 + seams + interior

    def zeros(self) -> "PPArray":
        return PPArray(self, np.zeros(self.shape, complex), np.zeros(self.shape, complex))

    def to_dict(self):
        return {"N": self.N, "R": self.R, "m0": str(self.m0)}


def build_grid(N: int, R: int, m0: Optional[Number] = None) -> PseudoPolarGrid:
    """
    Construit la grille pseudo-polaire Ω_R

    Args:
        N: côté de l'image (puissance de 2 paire)
        R: suréchantillonnage radial (pair)
        m0: dénominateur de Fourier (défaut 2(RN+1)/R)

    Returns:
        PseudoPolarGrid
    """
    if not isinstance(N, (int, np.integer)) or N < 2 or not _is_power_of_two(int(N)):
        raise ValueError(f"N doit être une puissance de 2 paire: {N}")
    if not isinstance(R, (int, np.integer)) or R < 2 or R % 2:
        raise ValueError(f"R doit être un entier pair positif: {R}")
    N, R = int(N), int(R)
    if m0 is None:
        m0_value = Fraction(2 * (R * N + 1), R)
    else:
        m0_value = m0 if isinstance(m0, Fraction) else Fraction(str(m0))
        if m0_value < N:
            raise ValueError(f"m0 doit être ≥ N: m0={m0_value}, N={N}")
    return PseudoPolarGrid(N=N, R=R, m0=m0_value)


def classify_point(grid: PseudoPolarGrid, sector: int, n: int, l: int) -> PointKind:
    """Centre si n = 0 ; couture si |n| ≥ 1 et ℓ = ±N/2 ; intérieur sinon"""
    grid.check_index(sector, n, l)
    if n == 0:
        return PointKind.CENTER
    if abs(l) == grid.l_max:
        return PointKind.SEAM
    return PointKind.INTERIOR


def multiplicity_factor(grid: PseudoPolarGrid, sector: int, n: int, l: int) -> Fraction:
    """1 intérieur, 1/2 couture, 1/(2(N+1)) centre"""
    kind = classify_point(grid, sector, n, l)
    if kind is PointKind.CENTER:
        return Fraction(1, 2 * (grid.N + 1))
    if kind is PointKind.SEAM:
        return Fraction(1, 2)
    return Fraction(1)


@dataclass
class PPArray:
    """Fonction complexe sur Ω_R stockée secteur par secteur"""
    grid: PseudoPolarGrid
    sector1: np.ndarray
    sector2: np.ndarray

    def __post_init__(self):
        if self.sector1.shape != self.grid.shape or self.sector2.shape != self.grid.shape:
            raise ValueError(
                f"Secteurs de forme {self.sector1.shape}/{self.sector2.shape}, attendu {self.grid.shape}"
            )

    @classmethod
    def random(cls, grid: PseudoPolarGrid, rng: SplitMix64, consistent: bool = True) -> "PPArray":
        """Tableau gaussien complexe, rendu cohérent par défaut"""
        array = cls(grid, rng.complex_normal(grid.shape), rng.complex_normal(grid.shape))
        return array.make_consistent() if consistent else array

    def sector(self, index: int) -> np.ndarray:
        return self.sector1 if index == 1 else self.sector2

    def copy(self) -> "PPArray":
        return PPArray(self.grid, self.sector1.copy(), self.sector2.copy())

    def map(self, func) -> "PPArray":
        return PPArray(self.grid, func(self.sector1), func(self.sector2))

    def __add__(self, other: "PPArray") -> "PPArray":
        _check_same_grid(self, other)
        return PPArray(self.grid, self.sector1 + other.sector1, self.sector2 + other.sector2)

    def __sub__(self, other: "PPArray") -> "PPArray":
        _check_same_grid(self, other)
        return PPArray(self.grid, self.sector1 - other.sector1, self.sector2 - other.sector2)

    def __mul__(self, scalar) -> "PPArray":
        return PPArray(self.grid, self.sector1 * scalar, self.sector2 * scalar)

    __rmul__ = __mul__

    def _duplicate_groups(self):
        """Paires (valeurs, positions) des doublons : coutures puis centre"""
        g = self.grid
        n = np.arange(1, g.n_max + 1)
        top, bottom = g.angular_count - 1, 0
        # secteur1(n, N/2) ≡ secteur2(−n, N/2) ; secteur1(n, −N/2) ≡ secteur2(n, −N/2)
        for sign in (1, -1):
            rows = g.n_index(sign * n)
            yield (self.sector1, rows, top), (self.sector2, g.n_index(-sign * n), top)
            yield (self.sector1, rows, bottom), (self.sector2, rows, bottom)

    def is_consistent(self, atol: float = 0.0) -> bool:
        """Les points physiques dupliqués portent-ils la même valeur ?"""
        center_row = self.grid.n_index(0)
        centers = np.concatenate([self.sector1[center_row], self.sector2[center_row]])
        if np.max(np.abs(centers - centers[0])) > atol:
            return False
        for (a, ra, ca), (b, rb, cb) in self._duplicate_groups():
            if np.max(np.abs(a[ra, ca] - b[rb, cb])) > atol:
                return False
        return True

    def make_consistent(self) -> "PPArray":
        """Copie où chaque point dupliqué reçoit la moyenne de ses occurrences"""
        out = self.copy()
        center_row = self.grid.n_index(0)
        center = 0.5 * (out.sector1[center_row].mean() + out.sector2[center_row].mean())
        out.sector1[center_row] = center
        out.sector2[center_row] = center
        for (a, ra, ca), (b, rb, cb) in PPArray._duplicate_groups(out):
            mean = 0.5 * (a[ra, ca] + b[rb, cb])
            a[ra, ca] = mean
            b[rb, cb] = mean
        return out

    def stored_norm_squared(self) -> float:
        return float(np.vdot(self.sector1, self.sector1).real + np.vdot(self.sector2, self.sector2).real)


def _check_same_grid(X: PPArray, Y: PPArray) -> None:
    if X.grid != Y.grid:
        raise ValueError(f"Grilles différentes: {X.grid} / {Y.grid}")


def stored_inner_product(X: PPArray, Y: PPArray) -> complex:
    """Σ X·conj(Y) sur les deux secteurs stockés, doublons comptés"""
    _check_same_grid(X, Y)
    return complex(np.vdot(Y.sector1, X.sector1) + np.vdot(Y.sector2, X.sector2))


def set_inner_product(X: PPArray, Y: PPArray) -> complex:
    """Σ multiplicité·X·conj(Y) : égal à la somme sur Ω_R (ensemble) pour des entrées cohérentes"""
    _check_same_grid(X, Y)
    weights = X.grid.multiplicity()
    return complex(np.sum(weights * (X.sector1 * np.conj(Y.sector1) + X.sector2 * np.conj(Y.sector2))))
