"""
Transformée de Fourier pseudo-polaire rapide (PPFT) et son adjoint exact

Axe 0 de l'image = u, axe 1 = v, u, v ∈ [−N/2, N/2−1].
Secteur 1 : frFT des colonnes v (longueur RN+1, α = 2/(R·m0)) puis frFT des lignes u
(longueur N+1, αₙ = −4n/(R·N·m0)). Secteur 2 : même calcul sur l'image transposée.
"""

import numpy as np

from .frft import frft, frft_adjoint, pad, pad_adjoint
from .ppgrid import PPArray, PseudoPolarGrid
from .utils import Logger


def _column_alpha(grid: PseudoPolarGrid) -> float:
    return float(2 / (grid.R * grid.m0))


def _row_alphas(grid: PseudoPolarGrid) -> np.ndarray:
    return -4.0 * grid.n_values / float(grid.R * grid.N * grid.m0)


def _check_image(image: np.ndarray, grid: PseudoPolarGrid) -> np.ndarray:
    image = np.asarray(image)
    if image.ndim != 2 or image.shape != (grid.N, grid.N):
        raise ValueError(f"Image de forme {image.shape}, attendu ({grid.N}, {grid.N})")
    return image


def _sector_forward(image: np.ndarray, grid: PseudoPolarGrid) -> np.ndarray:
    """Secteur 1 pour `image` (N×N) : tableau (RN+1)×(N+1) indexé (n, ℓ)"""
    columns = frft(pad(image, grid.radial_count, axis=1), _column_alpha(grid), axis=1)
    rows = pad(columns, grid.angular_count, axis=0).T
    return frft(rows, _row_alphas(grid), axis=1)


def _sector_adjoint(sector: np.ndarray, grid: PseudoPolarGrid) -> np.ndarray:
    rows = frft_adjoint(sector, _row_alphas(grid), axis=1)
    columns = pad_adjoint(rows.T, grid.N, axis=0)
    return pad_adjoint(frft_adjoint(columns, _column_alpha(grid), axis=1), grid.N, axis=1)


def ppft_forward(image: np.ndarray, grid: PseudoPolarGrid) -> PPArray:
    """
    Î(ω₁, ω₂) = Σ_{u,v} I(u,v)·exp(−(2πi/m0)(uω₁ + vω₂)) en chaque point de Ω_R

    Args:
        image: image N×N réelle ou complexe
        grid: grille pseudo-polaire

    Returns:
        PPArray cohérent
    """
    image = _check_image(image, grid)
    if not grid.is_default_m0:
        Logger.debug(f"PPFT avec m0={grid.m0} non standard : frFT dans les deux directions")
    return PPArray(grid, _sector_forward(image, grid), _sector_forward(image.T, grid))


def ppft_adjoint(data: PPArray, grid: PseudoPolarGrid = None) -> np.ndarray:
    """Adjoint exact de ppft_forward pour le produit scalaire des tableaux stockés (doublons comptés)"""
    grid = grid or data.grid
    if data.grid != grid:
        raise ValueError("ppft_adjoint: grille incompatible")
    return _sector_adjoint(data.sector1, grid) + _sector_adjoint(data.sector2, grid).T


def ppft_direct(image: np.ndarray, grid: PseudoPolarGrid) -> PPArray:
    """Somme directe O(N⁴) (référence pour les petites tailles)"""
    image = _check_image(image, grid)
    u = np.arange(-grid.N // 2, grid.N // 2)
    m0 = float(grid.m0)
    sectors = []
    for sector in (1, 2):
        omega1, omega2 = grid.coordinates(sector)
        phase_u = np.exp(-2j * np.pi * np.multiply.outer(omega1, u) / m0)
        phase_v = np.exp(-2j * np.pi * np.multiply.outer(omega2, u) / m0)
        sectors.append(np.einsum("nlu,nlv,uv->nl", phase_u, phase_v, image))
    return PPArray(grid, sectors[0], sectors[1])
