"""
Fenêtres de Meyer, supports des shearlets numériques et opérateur de fenêtrage sur Ω_R
"""

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Callable, Dict, List, Tuple

import numpy as np

from .ppgrid import PPArray, PseudoPolarGrid
from .schemas import BlockKey, ShearletCoefficients

SHEARLET = "shearlet"
SCALING = "scaling"
CONES = (11, 12, 21, 22)


def nu_polynomial(x: np.ndarray) -> np.ndarray:
    """Rampe ν(x) = x⁴(35 − 84x + 70x² − 20x³), prolongée par 0 et 1"""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x ** 4 * (35 - 84 * x + 70 * x ** 2 - 20 * x ** 3)


@dataclass(frozen=True)
class WindowProfile:
    """Profils radiaux W₀, W et angulaires V₀, V construits sur la rampe ν"""
    nu: Callable[[np.ndarray], np.ndarray] = nu_polynomial

    def W0(self, xi) -> np.ndarray:
        a = np.abs(np.asarray(xi, dtype=float))
        ramp = np.cos(np.pi / 2 * self.nu(4 * a / 3 - 1 / 3))
        return np.where(a <= 0.25, 1.0, np.where(a <= 1.0, ramp, 0.0))

    def W(self, xi) -> np.ndarray:
        a = np.abs(np.asarray(xi, dtype=float))
        rising = np.sin(np.pi / 2 * self.nu(4 * a / 3 - 1 / 3))
        falling = np.cos(np.pi / 2 * self.nu(a / 3 - 1 / 3))
        return np.where((a >= 0.25) & (a <= 1.0), rising, np.where((a > 1.0) & (a <= 4.0), falling, 0.0))

    def V(self, xi) -> np.ndarray:
        a = np.abs(np.asarray(xi, dtype=float))
        return np.where(a <= 1.0, np.sqrt(self.nu(1 - a)), 0.0)

    def V0(self, xi) -> np.ndarray:
        return np.ones_like(np.asarray(xi, dtype=float))


DEFAULT_PROFILE = WindowProfile()


def eval_profiles(profile: WindowProfile, xi) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(W₀(ξ), W(ξ), V(ξ))"""
    return profile.W0(xi), profile.W(xi), profile.V(xi)


def _ceil_log4(value: Fraction) -> int:
    """Plus petit entier t ≥ 0 tel que 4^t ≥ value"""
    t = 0
    while Fraction(4) ** t < value:
        t += 1
    return t


@dataclass(frozen=True)
class ParameterRanges:
    j_low: int
    j_high: int

    @property
    def scales(self) -> range:
        return range(self.j_low, self.j_high + 1)

    def shears(self, j: int) -> range:
        return range(-2 ** j, 2 ** j + 1) if j >= 0 else range(0, 1)


def parameter_ranges(N: int, R: int) -> ParameterRanges:
    """j_L = −⌈log₄(R/2)⌉, j_H = ⌈log₄ N⌉ ; k ∈ [−2ʲ, 2ʲ] pour j ≥ 0, k = 0 sinon"""
    return ParameterRanges(j_low=-_ceil_log4(Fraction(R, 2)), j_high=_ceil_log4(Fraction(N)))


@dataclass(frozen=True)
class SupportSpec:
    """Rectangle d'indices (|n|, ℓ) d'un bloc : n ∈ [n_lo, n_hi] (en |n|), ℓ ∈ [l_lo, l_hi]"""
    j: int
    k: int
    n_lo: int
    n_hi: int
    l_lo: int
    l_hi: int

    @property
    def L1(self) -> int:
        return self.n_hi - self.n_lo + 1

    @property
    def L2(self) -> int:
        return self.l_hi - self.l_lo + 1

    @property
    def size(self) -> int:
        return self.L1 * self.L2


def support_spec(j: int, k: int, N: int, R: int) -> SupportSpec:
    """Supports radial et angulaire du bloc (j, k), bornés à la grille"""
    ranges = parameter_ranges(N, R)
    if j not in ranges.scales or k not in ranges.shears(j):
        raise ValueError(f"(j={j}, k={k}) hors des plages j ∈ [{ranges.j_low}, {ranges.j_high}]")
    half = Fraction(R, 2)
    n_lo = max(1, ceil(Fraction(4) ** (j - 1) * half))
    n_hi = min(R * N // 2, floor(Fraction(4) ** (j + 1) * half))
    if j >= 0:
        step = Fraction(N, 2 ** (j + 1))
        l_lo = max(-N // 2, ceil((k - 1) * step))
        l_hi = min(N // 2, floor((k + 1) * step))
    else:
        l_lo, l_hi = -N // 2, N // 2
    return SupportSpec(j=j, k=k, n_lo=n_lo, n_hi=n_hi, l_lo=l_lo, l_hi=l_hi)


def scaling_support(N: int) -> SupportSpec:
    """Ensemble basse fréquence : n ∈ {−1, 0, 1} × ℓ ∈ [−N/2, N/2] (n signé ici)"""
    return SupportSpec(j=0, k=0, n_lo=-1, n_hi=1, l_lo=-N // 2, l_hi=N // 2)


def block_count(N: int, R: int) -> int:
    """Nombre total de coefficients : Σ_ι Σ_j Σ_k |R_{j,k}| + 2·3(N+1)"""
    ranges = parameter_ranges(N, R)
    per_cone = sum(support_spec(j, k, N, R).size for j in ranges.scales for k in ranges.shears(j))
    return len(CONES) * per_cone + 2 * scaling_support(N).size


@dataclass
class WindowBlock:
    """Bloc de fenêtrage : indices stockés et valeurs de fenêtre sur le rectangle (t₁, t₂)"""
    key: BlockKey
    sector: int
    rows: np.ndarray
    cols: np.ndarray
    window: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.window.shape


class WindowSystem:
    """Système de shearlets numériques d'une grille (fenêtres précalculées)"""

    def __init__(self, grid: PseudoPolarGrid, profile: WindowProfile = DEFAULT_PROFILE):
        self.grid = grid
        self.profile = profile
        self.ranges = parameter_ranges(grid.N, grid.R)
        self.blocks: List[WindowBlock] = []
        self._build()

    def _build(self) -> None:
        g, p = self.grid, self.profile
        for sector in (1, 2):
            support = scaling_support(g.N)
            n = np.arange(support.n_lo, support.n_hi + 1)
            radial = p.W0(4.0 ** (-self.ranges.j_low) * 2 * np.abs(n) / g.R)
            window = radial[:, None] * np.ones(support.L2)[None, :]
            self.blocks.append(WindowBlock(
                key=BlockKey(SCALING, sector, 0, 0),
                sector=sector,
                rows=g.n_index(n),
                cols=g.l_index(np.arange(support.l_lo, support.l_hi + 1)),
                window=window,
            ))
        for cone in CONES:
            sector, sign = cone // 10, (1 if cone % 10 == 1 else -1)
            for j in self.ranges.scales:
                for k in self.ranges.shears(j):
                    spec = support_spec(j, k, g.N, g.R)
                    n_abs = np.arange(spec.n_lo, spec.n_hi + 1)
                    l = np.arange(spec.l_lo, spec.l_hi + 1)
                    radial = p.W(4.0 ** (-j) * 2 * n_abs / g.R)
                    angular = p.V(k - 2.0 ** (j + 1) * l / g.N) if j >= 0 else p.V0(l)
                    self.blocks.append(WindowBlock(
                        key=BlockKey(SHEARLET, cone, j, k),
                        sector=sector,
                        rows=g.n_index(sign * n_abs),
                        cols=g.l_index(l),
                        window=radial[:, None] * angular[None, :],
                    ))

    def keys(self) -> List[BlockKey]:
        return [block.key for block in self.blocks]

    def plan(self) -> Dict[BlockKey, Tuple[int, int]]:
        """Formes des blocs, sans calcul"""
        return {block.key: block.shape for block in self.blocks}

    @property
    def coefficient_count(self) -> int:
        return int(sum(block.window.size for block in self.blocks))

    def window_energy(self) -> PPArray:
        """Σ des fenêtres au carré en chaque point stocké (vaut 1 partout)"""
        total = self.grid.zeros()
        for block in self.blocks:
            total.sector(block.sector)[np.ix_(block.rows, block.cols)] += block.window ** 2
        return total

    def frame_analysis(self, data: PPArray) -> ShearletCoefficients:
        """Fenêtrage puis TFD 2D unitaire de chaque rectangle (niveau stocké)"""
        if data.grid != self.grid:
            raise ValueError("frame_analysis: grille incompatible")
        blocks = {}
        for block in self.blocks:
            values = data.sector(block.sector)[np.ix_(block.rows, block.cols)] * block.window
            blocks[block.key] = np.fft.fft2(values, norm="ortho")
        return ShearletCoefficients("fdst", blocks, self.grid.to_dict())

    def frame_synthesis(self, coefficients: ShearletCoefficients) -> PPArray:
        """Adjoint exact de frame_analysis"""
        out = self.grid.zeros()
        for block in self.blocks:
            values = coefficients.blocks.get(block.key)
            if values is None or values.shape != block.shape:
                raise ValueError(f"Bloc {block.key} absent ou de forme incorrecte")
            out.sector(block.sector)[np.ix_(block.rows, block.cols)] += (
                np.fft.ifft2(values, norm="ortho") * block.window
            )
        return out

    def analyze(self, data: PPArray) -> ShearletCoefficients:
        """Coefficients ⟨J, σ⟩ au sens ensembliste : facteur C = √multiplicité appliqué une fois"""
        scale = np.sqrt(self.grid.multiplicity())
        return self.frame_analysis(data.map(lambda s: s * scale))

    def synthesize(self, coefficients: ShearletCoefficients) -> PPArray:
        """Adjoint de analyze pour le produit scalaire ensembliste"""
        scale = np.sqrt(self.grid.multiplicity())
        return self.frame_synthesis(coefficients).map(lambda s: s / scale)


@functools.lru_cache(maxsize=8)
def build_window_system(grid: PseudoPolarGrid) -> WindowSystem:
    """Système de fenêtres partagé par grille"""
    return WindowSystem(grid)


def analyze(data: PPArray, system: WindowSystem = None) -> ShearletCoefficients:
    return (system or build_window_system(data.grid)).analyze(data)


def synthesize(coefficients: ShearletCoefficients, system: WindowSystem) -> PPArray:
    return system.synthesize(coefficients)
