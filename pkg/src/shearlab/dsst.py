"""
Transformée en shearlets séparable (DSST) : cascades de filtres 1D, cisaillement numérique S^d,
ondelettes séparables anisotropes, redondance et complexité

Conventions : l'axe 0 des tableaux est x₁ (direction du cisaillement), les filtres sont
indexés à partir de 0, toutes les convolutions sont périodiques.
"""

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pywt

from .base_transform import BaseTransform
from .schemas import BlockKey, ShearletCoefficients
from .utils import Logger, ensure_directory

PHI_SKIP = "skip"
PHI_TABLE = "table"

# Résolution dyadique de l'échantillonnage de φ pour les tables Φ_k
_PHI_LEVEL = 8


# ---------------------------------------------------------------- convolutions périodiques


def periodize(taps: np.ndarray, length: int, origin: int = 0) -> np.ndarray:
    """Replie un filtre fini (taps[i] à la position origin + i) sur un tore de longueur `length`"""
    taps = np.asarray(taps)
    out = np.zeros(length, dtype=taps.dtype)
    np.add.at(out, (np.arange(len(taps)) + origin) % length, taps)
    return out


def _filter_along(x: np.ndarray, taps: np.ndarray, axis: int, origin: int, correlate: bool) -> np.ndarray:
    x = np.asarray(x)
    length = x.shape[axis]
    response = np.fft.fft(periodize(taps, length, origin))
    if correlate:
        response = np.conj(response)
    shape = [1] * x.ndim
    shape[axis] = length
    y = np.fft.ifft(np.fft.fft(x, axis=axis) * response.reshape(shape), axis=axis)
    if np.isrealobj(x) and np.isrealobj(taps):
        return y.real
    return y


def circular_convolve(x: np.ndarray, taps: np.ndarray, axis: int = 0, origin: int = 0) -> np.ndarray:
    """y[n] = Σ_t taps[t]·x[n − origin − t] le long de `axis`"""
    return _filter_along(x, taps, axis, origin, correlate=False)


def circular_correlate(x: np.ndarray, taps: np.ndarray, axis: int = 0, origin: int = 0) -> np.ndarray:
    """y[n] = Σ_t taps[t]·x[n + origin + t] le long de `axis` (adjoint de circular_convolve)"""
    return _filter_along(x, taps, axis, origin, correlate=True)


def circular_filter2d(x: np.ndarray, taps: np.ndarray, origin: Tuple[int, int] = (0, 0),
                      correlate: bool = False) -> np.ndarray:
    """Convolution (ou corrélation) 2D périodique par un filtre fini"""
    x = np.asarray(x)
    kernel = np.zeros(x.shape, dtype=np.result_type(taps, float))
    rows = (np.arange(taps.shape[0]) + origin[0]) % x.shape[0]
    cols = (np.arange(taps.shape[1]) + origin[1]) % x.shape[1]
    np.add.at(kernel, (rows[:, None], cols[None, :]), taps)
    response = np.fft.fft2(kernel)
    if correlate:
        response = np.conj(response)
    y = np.fft.ifft2(np.fft.fft2(x) * response)
    return y.real if np.isrealobj(x) and np.isrealobj(taps) else y


def upsample(taps: np.ndarray, factor: int) -> np.ndarray:
    """Insère factor − 1 zéros entre les échantillons"""
    taps = np.asarray(taps)
    out = np.zeros((len(taps) - 1) * factor + 1, dtype=taps.dtype)
    out[::factor] = taps
    return out


# ---------------------------------------------------------------- filtres


@dataclass(eq=False)
class FilterPair:
    """Filtres passe-bas h et passe-haut g d'une ondelette"""
    h: np.ndarray
    g: np.ndarray
    name: str = "custom"
    orthonormal: bool = False

    @classmethod
    def from_wavelet(cls, name: str = "sym4") -> "FilterPair":
        """Filtres de reconstruction publiés par PyWavelets (Σh = √2)"""
        try:
            wavelet = pywt.Wavelet(name)
        except ValueError as e:
            raise ValueError(f"Ondelette inconnue: {name}") from e
        return cls(
            h=np.asarray(wavelet.rec_lo, dtype=float),
            g=np.asarray(wavelet.rec_hi, dtype=float),
            name=name,
            orthonormal=bool(wavelet.orthogonal),
        )

    def autocorrelation(self) -> np.ndarray:
        """a = h ⋆ h, centrée en len(h) − 1"""
        return np.correlate(self.h, self.h, mode="full")

    def check_orthonormal(self, atol: float = 1e-12) -> bool:
        """a(2k) = δ(k)"""
        a = self.autocorrelation()
        even = a[(len(self.h) - 1) % 2::2]
        expected = np.zeros_like(even)
        expected[len(even) // 2] = 1.0
        return bool(np.allclose(even, expected, atol=atol))


class CascadeFilters:
    """Filtres h_j, g_j de l'algorithme en cascade (h₀ = δ)"""

    def __init__(self, pair: FilterPair, levels: int):
        self.pair = pair
        self.levels = levels
        self._h: List[np.ndarray] = [np.ones(1)]
        self._g: List[Optional[np.ndarray]] = [None]
        for j in range(1, levels + 1):
            factor = 2 ** (j - 1)
            self._h.append(np.convolve(self._h[j - 1], upsample(pair.h, factor)))
            self._g.append(np.convolve(self._h[j - 1], upsample(pair.g, factor)))

    def h(self, j: int) -> np.ndarray:
        if not 0 <= j <= self.levels:
            raise ValueError(f"Niveau de cascade hors bornes: {j} (0..{self.levels})")
        return self._h[j]

    def g(self, j: int) -> np.ndarray:
        if not 1 <= j <= self.levels:
            raise ValueError(f"Niveau de cascade hors bornes: {j} (1..{self.levels})")
        return self._g[j]


def cascade(pair: FilterPair, levels: int) -> CascadeFilters:
    """h_j ↔ Π_{k<j} H(2ᵏξ), g_j ↔ G(2^{j−1}ξ)·Π_{k<j−1} H(2ᵏξ)"""
    if levels < 1:
        raise ValueError(f"levels doit être ≥ 1: {levels}")
    return CascadeFilters(pair, levels)


@functools.lru_cache(maxsize=4)
def default_cascade(wavelet: str, levels: int) -> CascadeFilters:
    return cascade(FilterPair.from_wavelet(wavelet), levels)


# ---------------------------------------------------------------- tables Φ_k


@dataclass(eq=False)
class PhiTable:
    """Filtre Φ_k(n) = ⟨φ(S_k ·), φ(· − n)⟩ ; table[i, l] correspond à n = origin + (i, l)"""
    k: int
    table: np.ndarray
    origin: Tuple[int, int]


def compute_phi_table(wavelet: str, k: int, level: int = _PHI_LEVEL, trim: float = 1e-12) -> PhiTable:
    """
    Quadrature de Φ_k à partir de φ échantillonnée par l'algorithme en cascade

    Φ_k(n₁, n₂) = ∫ a(k·x₂ + n₁)·φ(x₂)·φ(x₂ − n₂) dx₂ où a est l'autocorrélation de φ.
    """
    phi = np.asarray(pywt.Wavelet(wavelet).wavefun(level=level)[0], dtype=float)
    scale = 2 ** level
    step = 1.0 / scale
    support = int(np.ceil((len(phi) - 1) / scale))
    auto = np.correlate(phi, phi, mode="full") * step
    center = len(phi) - 1

    samples = np.arange(len(phi))
    n1 = np.arange(-support - abs(k) * support, support + abs(k) * support + 1)
    n2 = np.arange(-support, support + 1)
    table = np.zeros((len(n1), len(n2)))
    positions = k * samples[None, :] + n1[:, None] * scale + center
    valid = (positions >= 0) & (positions < len(auto))
    gathered = np.where(valid, auto[np.clip(positions, 0, len(auto) - 1)], 0.0)
    for column, shift in enumerate(n2):
        shifted = samples - shift * scale
        inside = (shifted >= 0) & (shifted < len(phi))
        product = np.zeros(len(phi))
        product[inside] = phi[inside] * phi[shifted[inside]]
        table[:, column] = gathered @ product * step

    keep_rows = np.flatnonzero(np.abs(table).max(axis=1) > trim * np.abs(table).max())
    keep_cols = np.flatnonzero(np.abs(table).max(axis=0) > trim * np.abs(table).max())
    table = table[keep_rows[0]:keep_rows[-1] + 1, keep_cols[0]:keep_cols[-1] + 1]
    return PhiTable(k=k, table=table, origin=(int(n1[keep_rows[0]]), int(n2[keep_cols[0]])))


def load_phi_table(wavelet: str, k: int, cache_dir: Optional[str] = None) -> PhiTable:
    """Table Φ_k, relue depuis le cache .npz si possible"""
    if cache_dir is None:
        return _memory_phi_table(wavelet, k)
    path = Path(cache_dir) / "filters" / f"phi_{wavelet}_k{k}_L{_PHI_LEVEL}.npz"
    if path.exists():
        with np.load(path) as data:
            return PhiTable(k=k, table=data["table"], origin=tuple(int(v) for v in data["origin"]))
    table = compute_phi_table(wavelet, k)
    ensure_directory(path.parent)
    np.savez(path, table=table.table, origin=np.asarray(table.origin))
    Logger.save(f"Table Φ_{k} enregistrée: {path.name}")
    return table


@functools.lru_cache(maxsize=64)
def _memory_phi_table(wavelet: str, k: int) -> PhiTable:
    return compute_phi_table(wavelet, k)


# ---------------------------------------------------------------- opérateurs


def half_scale(j: int) -> int:
    """⌈j/2⌉"""
    return (j + 1) // 2


def shear_range(j: int) -> range:
    bound = 2 ** half_scale(j)
    return range(-bound, bound + 1)


def digital_shear(
    f: np.ndarray,
    j: int,
    k: int,
    filters: CascadeFilters,
    phi: Optional[PhiTable] = None,
    adjoint: bool = False,
) -> np.ndarray:
    """
    Cisaillement numérique S^d_{2^{−⌈j/2⌉}k} le long de l'axe 0

    Suréchantillonnage par U = 2^⌈j/2⌉, convolution par h_⌈j/2⌉, rééchantillonnage
    entier (n₁, n₂) ↦ (n₁ + k·n₂ mod U·M, n₂), convolution optionnelle par Φ_k,
    corrélation par h_⌈j/2⌉, sous-échantillonnage par U.

    Args:
        f: tableau M×N₂
        j: échelle (≥ 0)
        k: cisaillement, |k| ≤ 2^⌈j/2⌉
        filters: cascade contenant au moins le niveau ⌈j/2⌉
        phi: table Φ_k (None : étape omise)
        adjoint: applique l'adjoint exact

    Returns:
        Tableau de même forme
    """
    if j < 0:
        raise ValueError(f"Échelle négative: {j}")
    u = half_scale(j)
    factor = 2 ** u
    if abs(k) > factor:
        raise ValueError(f"Cisaillement hors bornes: |k|={abs(k)} > {factor} à l'échelle j={j}")
    if phi is not None and phi.k != k:
        raise ValueError(f"Table Φ_{phi.k} fournie pour k={k}")

    f = np.asarray(f)
    rows, cols = f.shape
    h = filters.h(u)
    up = np.zeros((rows * factor, cols), dtype=f.dtype)
    up[::factor] = f
    index = (np.arange(rows * factor)[:, None] + k * np.arange(cols)[None, :]) % (rows * factor)

    if not adjoint:
        fine = circular_convolve(up, h, axis=0)
        sheared = np.take_along_axis(fine, index, axis=0)
        if phi is not None:
            sheared = circular_filter2d(sheared, phi.table, phi.origin)
        return circular_correlate(sheared, h, axis=0)[::factor]

    fine = circular_convolve(up, h, axis=0)
    if phi is not None:
        fine = circular_filter2d(fine, phi.table, phi.origin, correlate=True)
    unsheared = np.zeros_like(fine)
    np.put_along_axis(unsheared, index, fine, axis=0)
    return circular_correlate(unsheared, h, axis=0)[::factor]


def lattice_step(c: float, level: int) -> int:
    """Pas c·2^level ramené au pas entier le plus proche (demi-entiers vers le haut, au moins 1)"""
    return max(1, int(Fraction(str(c)) * 2 ** level + Fraction(1, 2)))


def separable_filter(c: np.ndarray, f1: np.ndarray, f2: np.ndarray, steps: Tuple[int, int]) -> np.ndarray:
    """Corrélation par f1 ⊗ f2 puis sous-échantillonnage (steps[0], steps[1])"""
    out = circular_correlate(circular_correlate(c, f1, axis=0), f2, axis=1)
    return out[::steps[0], ::steps[1]]


def separable_filter_adjoint(sub: np.ndarray, shape: Tuple[int, int], f1: np.ndarray, f2: np.ndarray,
                             steps: Tuple[int, int]) -> np.ndarray:
    full = np.zeros(shape, dtype=np.result_type(sub, float))
    full[::steps[0], ::steps[1]] = sub
    return circular_convolve(circular_convolve(full, f1, axis=0), f2, axis=1)


def separable_wavelet(c: np.ndarray, j1: int, j2: int, filters: CascadeFilters,
                      steps: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """W_{j₁,j₂} : corrélation par g_{j₁} ⊗ h_{j₂}, sous-échantillonnage par (2^{j₁}, 2^{j₂}) par défaut"""
    if j1 < 1 or j2 < 1:
        raise ValueError(f"j₁, j₂ doivent être ≥ 1: ({j1}, {j2})")
    steps = steps or (2 ** j1, 2 ** j2)
    return separable_filter(c, filters.g(j1), filters.h(j2), steps)


def separable_wavelet_adjoint(sub: np.ndarray, shape: Tuple[int, int], j1: int, j2: int,
                              filters: CascadeFilters, steps: Optional[Tuple[int, int]] = None) -> np.ndarray:
    steps = steps or (2 ** j1, 2 ** j2)
    return separable_filter_adjoint(sub, shape, filters.g(j1), filters.h(j2), steps)


# ---------------------------------------------------------------- redondance et complexité


def element_count(J: int, c1: float, c2: float) -> Fraction:
    """
    Modèle du nombre d'éléments : (4/(c₁c₂))·(Σ_{j<J} 4ʲ + 1)

    Le modèle compte 2·2^{j/2} cisaillements par cône et des blocs de 2^{3j/2}/(c₁c₂) éléments
    à l'échelle j. La transformée en produit davantage (voir lattice_count) : 2·2^⌈j/2⌉ + 1
    cisaillements par cône, des blocs de 2^{j+⌈j/2⌉}/(c₁c₂) éléments et des pas arrondis.
    """
    c1, c2 = Fraction(str(c1)), Fraction(str(c2))
    if c1 <= 0 or c2 <= 0:
        raise ValueError("c1 et c2 doivent être strictement positifs")
    return 4 / (c1 * c2) * (sum(Fraction(4) ** j for j in range(J)) + 1)


def redundancy(c1: float, c2: float, J: Optional[int] = None) -> Fraction:
    """Redondance du modèle à J fixé (element_count / 4^J) ou sa limite 4/(3c₁c₂)"""
    if J is None:
        return Fraction(4, 3) / (Fraction(str(c1)) * Fraction(str(c2)))
    return element_count(J, c1, c2) / Fraction(4) ** J


def lattice_steps(J: int, c1: float, c2: float) -> Dict[int, Tuple[int, int]]:
    """Pas (c₁·2^{J−j}, c₂·2^{J−⌈j/2⌉}) arrondis de chaque échelle"""
    return {j: (lattice_step(c1, J - j), lattice_step(c2, J - half_scale(j))) for j in range(J)}


def lattice_count(size: int, J: int, c1: float, c2: float) -> int:
    """Nombre exact de coefficients produits par la DSST de taille `size` (deux cônes et passe-bas)"""
    if c1 <= 0 or c2 <= 0:
        raise ValueError("c1 et c2 doivent être strictement positifs")
    total = (-(-size // lattice_step(c1, J))) ** 2
    for j, (s1, s2) in lattice_steps(J, c1, c2).items():
        total += 2 * len(shear_range(j)) * (-(-size // s1)) * (-(-size // s2))
    return total


def complexity_report(L: int, N: int) -> Dict[str, object]:
    """Modèle de coût O(2^{log₂((L/2−1)/2)}·L·N) ; L = 6 directions donne un facteur 1"""
    if L < 4 or N < 1:
        raise ValueError(f"Paramètres de complexité invalides: L={L}, N={N}")
    factor = Fraction(L, 2) - 1
    factor /= 2
    return {
        "L": L,
        "N": N,
        "factor": factor,
        "operations": float(factor * L * N),
        "model": "O(2^{log2((L/2-1)/2)} * L * N)",
    }


# ---------------------------------------------------------------- transformée


@dataclass
class DsstParams:
    J: int = 4
    c1: float = 1.0
    c2: float = 1.0
    phi_mode: str = PHI_SKIP
    wavelet: str = "sym4"
    cache_dir: Optional[str] = field(default=None, repr=False)

    def __post_init__(self):
        if self.J < 1:
            raise ValueError(f"J doit être ≥ 1: {self.J}")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("c1 et c2 doivent être strictement positifs")
        if self.phi_mode not in (PHI_SKIP, PHI_TABLE):
            raise ValueError(f"Mode Φ inconnu: {self.phi_mode}")


class DSST(BaseTransform):
    """Transformée séparable : cônes horizontal ("h") et vertical ("v", image transposée)"""

    name = "dsst"

    def __init__(self, size: int, params: Optional[DsstParams] = None, cg_tol: float = 1e-6, cg_maxiter: int = 500):
        super().__init__(size, cg_tol=cg_tol, cg_maxiter=cg_maxiter)
        self.params = params or DsstParams()
        J = self.params.J
        if size % 2 ** J:
            raise ValueError(f"La taille {size} doit être un multiple de 2^J = {2 ** J}")
        self.filters = default_cascade(self.params.wavelet, J)
        self.steps = lattice_steps(J, self.params.c1, self.params.c2)
        self.lowpass_step = lattice_step(self.params.c1, J)
        self._phi: Dict[int, PhiTable] = {}
        rounded = [j for j, (s1, s2) in self.steps.items()
                   if Fraction(str(self.params.c1)) * 2 ** (J - j) != s1
                   or Fraction(str(self.params.c2)) * 2 ** (J - half_scale(j)) != s2]
        if rounded:
            Logger.info(f"DSST: pas non entiers arrondis aux échelles {rounded}: "
                        f"{[self.steps[j] for j in rounded]}")

    def parameters(self) -> Dict:
        p = self.params
        return {"N": self.size, "J": p.J, "c1": p.c1, "c2": p.c2, "phi_mode": p.phi_mode, "wavelet": p.wavelet,
                "steps": [list(self.steps[j]) for j in range(p.J)], "lowpass_step": self.lowpass_step}

    def branches(self):
        """(j, k, j₁, j₂) pour chaque sous-bande directionnelle"""
        J = self.params.J
        for j in range(J):
            for k in shear_range(j):
                yield j, k, J - j, J - half_scale(j)

    def phi(self, k: int) -> Optional[PhiTable]:
        if self.params.phi_mode == PHI_SKIP:
            return None
        if k not in self._phi:
            self._phi[k] = load_phi_table(self.params.wavelet, k, self.params.cache_dir)
        return self._phi[k]

    def _cone_forward(self, image: np.ndarray) -> Dict[Tuple[int, int], np.ndarray]:
        out = {}
        for j, k, j1, j2 in self.branches():
            sheared = digital_shear(image, j, k, self.filters, self.phi(k))
            out[(j, k)] = separable_wavelet(sheared, j1, j2, self.filters, self.steps[j])
        return out

    def _cone_adjoint(self, blocks: Dict[Tuple[int, int], np.ndarray]) -> np.ndarray:
        shape = (self.size, self.size)
        total = np.zeros(shape)
        for j, k, j1, j2 in self.branches():
            spread = separable_wavelet_adjoint(blocks[(j, k)], shape, j1, j2, self.filters, self.steps[j])
            total = total + digital_shear(spread, j, k, self.filters, self.phi(k), adjoint=True)
        return total

    def forward(self, image: np.ndarray) -> ShearletCoefficients:
        image = np.real(self.check_image(image)).astype(float)
        blocks = {}
        for cone, data in (("h", image), ("v", image.T)):
            for (j, k), block in self._cone_forward(data).items():
                blocks[BlockKey("shearlet", cone, j, k)] = block if cone == "h" else block.T
        h_J = self.filters.h(self.params.J)
        step = (self.lowpass_step, self.lowpass_step)
        blocks[BlockKey("scaling", "lowpass", 0, 0)] = separable_filter(image, h_J, h_J, step)
        return ShearletCoefficients(self.name, blocks, self.parameters())

    def adjoint(self, coefficients: ShearletCoefficients) -> np.ndarray:
        horizontal, vertical = {}, {}
        for key, block in coefficients.items():
            if key.cone == "h":
                horizontal[(key.j, key.k)] = np.real(block)
            elif key.cone == "v":
                vertical[(key.j, key.k)] = np.real(block).T
        h_J = self.filters.h(self.params.J)
        step = (self.lowpass_step, self.lowpass_step)
        lowpass = np.real(coefficients[BlockKey("scaling", "lowpass", 0, 0)])
        image = separable_filter_adjoint(lowpass, (self.size, self.size), h_J, h_J, step)
        return image + self._cone_adjoint(horizontal) + self._cone_adjoint(vertical).T

    def plan(self) -> Dict[BlockKey, Tuple[int, ...]]:
        shapes = {}
        for cone in ("h", "v"):
            for j, k, _, _ in self.branches():
                s1, s2 = self.steps[j]
                shape = (ceil(self.size / s1), ceil(self.size / s2))
                shapes[BlockKey("shearlet", cone, j, k)] = shape if cone == "h" else shape[::-1]
        side = ceil(self.size / self.lowpass_step)
        shapes[BlockKey("scaling", "lowpass", 0, 0)] = (side, side)
        return shapes


def dsst_forward(image: np.ndarray, params: Optional[DsstParams] = None) -> ShearletCoefficients:
    return DSST(np.asarray(image).shape[0], params).forward(image)


def dsst_adjoint(coefficients: ShearletCoefficients, size: int, params: Optional[DsstParams] = None) -> np.ndarray:
    return DSST(size, params).adjoint(coefficients)


def dsst_inverse(coefficients: ShearletCoefficients, size: int, params: Optional[DsstParams] = None,
                 tol: float = 1e-6, maxiter: int = 500):
    """CG sur l'opérateur de frame adjoint ∘ forward ; renvoie un CGResult"""
    return DSST(size, params, cg_tol=tol, cg_maxiter=maxiter).reconstruct(coefficients)
