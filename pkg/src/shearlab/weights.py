"""
Poids de compensation de densité sur Ω_R : bases (choix 0, 1, 2), système de Plancherel, moindres carrés

Toutes les fonctions de base sont symétriques : leur valeur ne dépend que de (|n|, |ℓ|)
et est la même dans les deux secteurs. On les décrit donc par une valeur au centre et un
tableau « octant » indexé par n = 1..RN/2, ℓ = 0..N/2.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
from scipy import linalg, optimize
from tqdm import tqdm

from .ppft import ppft_adjoint, ppft_forward
from .ppgrid import PPArray, PseudoPolarGrid
from .utils import Logger, ensure_directory, timer

CHOICE_EXACT = 0
CHOICE_FIVE = 1
CHOICE_LINES = 2
KNOWN_CHOICES = (CHOICE_EXACT, CHOICE_FIVE, CHOICE_LINES)

# Nombre de valeurs de n traitées par lot pendant l'assemblage
_ASSEMBLY_CHUNK = 64
# Au-delà, la base exacte (un coefficient par orbite) n'est pas assemblée
_EXACT_MAX_UNKNOWNS = 4096


def octant_orbit_sizes(grid: PseudoPolarGrid) -> np.ndarray:
    """Taille de l'orbite de symétrie de chaque colonne ℓ = 0..N/2 de l'octant"""
    sizes = np.full(grid.l_max + 1, 8.0)
    sizes[0] = 4.0
    sizes[-1] = 4.0
    return sizes


@dataclass
class WeightBasis:
    """Famille de fonctions de base symétriques"""
    grid: PseudoPolarGrid
    choice: int
    names: List[str]
    center: np.ndarray
    octant: np.ndarray

    def __len__(self) -> int:
        return len(self.names)

    @property
    def n0(self) -> int:
        return len(self.names)

    def combine(self, coefficients: np.ndarray):
        """Valeurs (centre, octant) de Σ cᵢ wᵢ"""
        coefficients = np.asarray(coefficients, dtype=float)
        return float(coefficients @ self.center), np.tensordot(coefficients, self.octant, axes=1)

    def materialize(self, center: float, octant: np.ndarray) -> np.ndarray:
        """Tableau (RN+1)×(N+1) d'une fonction symétrique (identique dans les deux secteurs)"""
        g = self.grid
        radial = np.abs(g.n_values)
        angular = np.abs(g.l_values)
        values = np.empty(g.shape)
        nonzero = radial > 0
        values[nonzero] = octant[radial[nonzero] - 1][:, angular]
        values[~nonzero] = center
        return values

    def arrays(self) -> List[np.ndarray]:
        """Chaque fonction de base matérialisée sur un secteur"""
        return [self.materialize(self.center[i], self.octant[i]) for i in range(self.n0)]

    def set_mass(self) -> np.ndarray:
        """Σ_{Ω_R} wᵢ pour chaque fonction de base"""
        sizes = octant_orbit_sizes(self.grid)
        return self.center + np.einsum("bnl,l->b", self.octant, sizes)


def build_basis(grid: PseudoPolarGrid, choice: int) -> WeightBasis:
    """
    Construit les fonctions de base des poids

    Args:
        grid: grille pseudo-polaire
        choice: 1 (centre, bord couture, bord hors couture, |n| sur coutures, |n| à l'intérieur),
                2 (centre + une ligne radiale |n| par ℓ = 0..N/2) ou 0 (une indicatrice par orbite)

    Returns:
        WeightBasis
    """
    half_n, half_l = grid.n_max, grid.l_max
    radial = np.arange(1, half_n + 1, dtype=float)[:, None] * np.ones(half_l + 1)[None, :]
    seam = np.zeros((half_n, half_l + 1), bool)
    seam[:, half_l] = True
    boundary = np.zeros_like(seam)
    boundary[half_n - 1, :] = True

    if choice == CHOICE_FIVE:
        names = ["center", "boundary_seam", "boundary_interior", "seam_radial", "interior_radial"]
        octant = np.stack([
            np.zeros_like(radial),
            (boundary & seam).astype(float),
            (boundary & ~seam).astype(float),
            np.where(~boundary & seam, radial, 0.0),
            np.where(~boundary & ~seam, radial, 0.0),
        ])
    elif choice == CHOICE_LINES:
        names = ["center"] + [f"line_{l}" for l in range(half_l + 1)]
        octant = np.zeros((half_l + 2, half_n, half_l + 1))
        for l in range(half_l + 1):
            octant[l + 1, :, l] = radial[:, l]
    elif choice == CHOICE_EXACT:
        unknowns = half_n * (half_l + 1)
        if unknowns + 1 > _EXACT_MAX_UNKNOWNS:
            raise ValueError(f"Base exacte trop grande ({unknowns + 1} inconnues) pour N={grid.N}, R={grid.R}")
        names = ["center"] + [f"orbit_{n}_{l}" for n in range(1, half_n + 1) for l in range(half_l + 1)]
        octant = np.zeros((unknowns + 1, half_n, half_l + 1))
        octant[1:].reshape(unknowns, -1)[np.arange(unknowns), np.arange(unknowns)] = 1.0
    else:
        raise ValueError(f"Choix de base inconnu: {choice} (attendu 0, 1 ou 2)")

    center = np.zeros(len(names))
    center[0] = 1.0
    return WeightBasis(grid=grid, choice=choice, names=names, center=center, octant=octant)


@dataclass
class PlancherelSystem:
    """Système linéaire de la condition de Plancherel.

    Les lignes sont indexées par (|u|, |v|) ∈ [0, N−1]² (ligne u·N + v) ; row_weights compte
    les lignes (u, v) ∈ [−N+1, N−1]² qu'elles représentent (1 si nul, 2 sinon, par axe).
    """
    grid: PseudoPolarGrid
    basis: WeightBasis
    matrix: np.ndarray
    row_weights: np.ndarray
    target: np.ndarray

    def row(self, u: int, v: int) -> np.ndarray:
        return self.matrix[abs(u) * self.grid.N + abs(v)]

    def full_matrix(self) -> np.ndarray:
        """Matrice complète (2N−1)² × n₀, lignes (u, v) ∈ [−N+1, N−1]² en ordre lexicographique"""
        N = self.grid.N
        offsets = np.abs(np.arange(-N + 1, N))
        rows = (offsets[:, None] * N + offsets[None, :]).ravel()
        return self.matrix[rows]

    def residual(self, coefficients: np.ndarray) -> float:
        """Norme pondérée ‖A c − δ‖ (équivalente à la norme sur les (2N−1)² lignes)"""
        r = self.matrix @ coefficients - self.target
        return float(np.sqrt(np.sum(self.row_weights * r ** 2)))


@timer
def assemble_plancherel_system(grid: PseudoPolarGrid, basis: WeightBasis, progress: bool = False) -> PlancherelSystem:
    """
    Assemble A[(u,v), b] = Σ_{ω∈Ω_R} w_b(ω)·cos(2πuω₁/m0)·cos(2πvω₂/m0), cible δ(u,v)

    La somme est faite par orbites de l'octant : pour (x, y) = (2n/R, (2n/R)(2ℓ/N)),
    l'orbite contribue (taille/2)·w_b·[C(u,x)C(v,y) + C(v,x)C(u,y)], C(u,x) = cos(2πux/m0).
    """
    N = grid.N
    m0 = float(grid.m0)
    u = np.arange(N, dtype=float)
    x = 2.0 * np.arange(1, grid.n_max + 1) / grid.R
    y = x[:, None] * (2.0 * np.arange(grid.l_max + 1) / N)[None, :]
    weighted = basis.octant * (octant_orbit_sizes(grid) / 2.0)[None, None, :]

    cos_u = np.cos(2 * np.pi * np.outer(u, x) / m0)
    partial = np.zeros((basis.n0, N, N))
    chunks = range(0, grid.n_max, _ASSEMBLY_CHUNK)
    for start in tqdm(chunks, desc="Système de Plancherel", disable=not progress, leave=False):
        stop = min(start + _ASSEMBLY_CHUNK, grid.n_max)
        cos_y = np.cos(2 * np.pi * y[start:stop, :, None] * u[None, None, :] / m0)
        angular = np.einsum("bnl,nlv->bnv", weighted[:, start:stop], cos_y)
        partial += np.einsum("un,bnv->buv", cos_u[:, start:stop], angular)

    full = partial + partial.transpose(0, 2, 1) + basis.center[:, None, None]
    matrix = full.reshape(basis.n0, N * N).T.copy()
    axis_weights = np.where(u == 0, 1.0, 2.0)
    row_weights = np.outer(axis_weights, axis_weights).ravel()
    target = np.zeros(N * N)
    target[0] = 1.0
    return PlancherelSystem(grid=grid, basis=basis, matrix=matrix, row_weights=row_weights, target=target)


def _weighted_least_squares(system: PlancherelSystem, columns: np.ndarray) -> np.ndarray:
    """Équations normales pondérées sur les colonnes actives, colonnes équilibrées, repli ridge"""
    A = system.matrix[:, columns] * np.sqrt(system.row_weights)[:, None]
    b = system.target * np.sqrt(system.row_weights)
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    A = A / scale
    normal = A.T @ A
    rhs = A.T @ b
    try:
        factor = linalg.cho_factor(normal)
        solution = linalg.cho_solve(factor, rhs)
        if not np.all(np.isfinite(solution)):
            raise linalg.LinAlgError("solution non finie")
    except linalg.LinAlgError as e:
        ridge = 1e-10 * np.trace(normal)
        Logger.warning(f"Équations normales singulières ({e}) : terme ridge {ridge:.3e}")
        factor = linalg.cho_factor(normal + ridge * np.eye(len(normal)))
        solution = linalg.cho_solve(factor, rhs)
    return solution / scale


def _nonnegative_least_squares(system: PlancherelSystem) -> np.ndarray:
    A = system.matrix * np.sqrt(system.row_weights)[:, None]
    b = system.target * np.sqrt(system.row_weights)
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    solution, _ = optimize.nnls(A / scale, b, maxiter=50 * A.shape[1])
    return solution / scale


@dataclass
class WeightFunction:
    """Poids positifs sur Ω_R : coefficients de base et valeurs ensemblistes matérialisées.

    w_stored = multiplicité · w_set, de sorte que P* w_stored P (adjoint des tableaux stockés)
    coïncide avec P* w P au niveau ensembliste.
    """
    grid: PseudoPolarGrid
    choice: Optional[int]
    coefficients: np.ndarray
    set_values: np.ndarray
    residual: float = 0.0
    names: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.set_values.shape != self.grid.shape:
            raise ValueError(f"Poids de forme {self.set_values.shape}, attendu {self.grid.shape}")
        if np.any(self.set_values < 0):
            raise ValueError("Les poids doivent être positifs")

    @classmethod
    def from_basis(cls, basis: WeightBasis, coefficients: np.ndarray, residual: float = 0.0) -> "WeightFunction":
        center, octant = basis.combine(coefficients)
        return cls(
            grid=basis.grid,
            choice=basis.choice,
            coefficients=np.asarray(coefficients, dtype=float),
            set_values=basis.materialize(center, octant),
            residual=residual,
            names=list(basis.names),
        )

    @classmethod
    def from_stored(cls, grid: PseudoPolarGrid, stored: np.ndarray) -> "WeightFunction":
        """Poids donnés directement au niveau stocké (multiplicité incluse)"""
        stored = np.broadcast_to(np.asarray(stored, dtype=float), grid.shape)
        return cls(grid=grid, choice=None, coefficients=np.zeros(0), set_values=stored / grid.multiplicity())

    @classmethod
    def uniform(cls, grid: PseudoPolarGrid) -> "WeightFunction":
        """w_stored ≡ 1 : √w est l'identité"""
        return cls.from_stored(grid, np.ones(grid.shape))

    @property
    def stored(self) -> np.ndarray:
        return self.grid.multiplicity() * self.set_values

    @property
    def sqrt_stored(self) -> np.ndarray:
        return np.sqrt(self.stored)

    @property
    def n0(self) -> int:
        return len(self.coefficients)

    def as_pparray(self) -> PPArray:
        stored = self.stored.astype(complex)
        return PPArray(self.grid, stored, stored.copy())


@timer
def solve_weights(
    grid: PseudoPolarGrid,
    choice: int,
    cache_dir: Optional[str] = None,
    use_cache: bool = True,
    progress: bool = False,
) -> WeightFunction:
    """
    Poids par moindres carrés sur la condition de Plancherel

    Choix 1 et 2 : équations normales, coefficients négatifs mis à zéro puis une seule
    résolution sur l'ensemble actif. Choix 0 : moindres carrés positifs (NNLS).

    Args:
        grid: grille pseudo-polaire
        choice: identifiant de base (0, 1, 2)
        cache_dir: répertoire du cache SHWT (aucun cache si None)
        use_cache: relire un résultat déjà calculé

    Returns:
        WeightFunction
    """
    from .formats import read_weights, write_weights

    if choice not in KNOWN_CHOICES:
        raise ValueError(f"Choix de base inconnu: {choice} (attendu 0, 1 ou 2)")

    cache_path = weights_cache_path(cache_dir, grid, choice) if cache_dir else None
    if cache_path is not None and use_cache and cache_path.exists():
        Logger.loading(f"Poids relus depuis le cache: {cache_path.name}")
        return read_weights(cache_path)

    Logger.loading(f"Calcul des poids (N={grid.N}, R={grid.R}, choix {choice})")
    basis = build_basis(grid, choice)
    system = assemble_plancherel_system(grid, basis, progress=progress)

    if choice == CHOICE_EXACT:
        coefficients = _nonnegative_least_squares(system)
    else:
        all_columns = np.arange(basis.n0)
        coefficients = _weighted_least_squares(system, all_columns)
        if np.any(coefficients < 0):
            active = all_columns[coefficients > 0]
            Logger.debug(f"{basis.n0 - len(active)} coefficient(s) négatif(s) annulé(s)")
            coefficients = np.zeros(basis.n0)
            if len(active):
                coefficients[active] = _weighted_least_squares(system, active)
            coefficients = np.clip(coefficients, 0.0, None)

    residual = system.residual(coefficients)
    Logger.stats(f"Résidu de Plancherel: {residual:.3e}")
    weights = WeightFunction.from_basis(basis, coefficients, residual=residual)

    if cache_path is not None:
        ensure_directory(cache_path.parent)
        write_weights(cache_path, weights)
        Logger.save(f"Poids enregistrés: {cache_path}")
    return weights


def weights_cache_path(cache_dir, grid: PseudoPolarGrid, choice: int) -> Path:
    """Chemin de cache, clé (N, R, choix) et m0 s'il n'est pas standard"""
    name = f"weights_N{grid.N}_R{grid.R}_choice{choice}"
    if not grid.is_default_m0:
        name += f"_m0_{grid.m0.numerator}-{grid.m0.denominator}"
    return Path(cache_dir) / "weights" / f"{name}.shwt"


def apply_sqrt_weights(data: PPArray, weights: WeightFunction) -> PPArray:
    """Multiplication ponctuelle par √w_stored"""
    if data.grid != weights.grid:
        raise ValueError("apply_sqrt_weights: grille incompatible")
    root = weights.sqrt_stored
    return PPArray(data.grid, data.sector1 * root, data.sector2 * root)


def weighted_gram(image: np.ndarray, weights: WeightFunction) -> np.ndarray:
    """P* w P appliqué à une image"""
    data = ppft_forward(image, weights.grid)
    stored = weights.stored
    return ppft_adjoint(PPArray(weights.grid, data.sector1 * stored, data.sector2 * stored))
