"""
Transformée en shearlets non séparable (DNST) : filtre en éventail, filtres de shearlets
numériques, convolutions 2D et reconstruction directe par filtres duaux
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.signal import windows
from tqdm import tqdm

from .base_transform import BaseTransform
from .dsst import circular_filter2d, default_cascade, digital_shear, half_scale, periodize, shear_range
from .errors import DualFilterError
from .schemas import BlockKey, CGResult, ShearletCoefficients
from .utils import Logger, cache_key, ensure_directory, ensure_parent_directory, timer

# Seuil sous lequel Σ|ψ̂|² interdit le calcul des duaux
DUAL_FLOOR = 1e-8
LOWPASS_KEY = BlockKey("scaling", "lowpass", 0, 0)


def _fan_profile(xi1: np.ndarray, xi2: np.ndarray, transition: float) -> np.ndarray:
    """Éventail idéal |ξ₂| ≤ |ξ₁| avec transition en cosinus surélevé de largeur `transition`"""
    d = np.abs(xi1) - np.abs(xi2)
    ramp = 0.5 * (1.0 + np.sin(np.pi * np.clip(d / transition, -0.5, 0.5)))
    return np.where(d >= transition / 2, 1.0, np.where(d <= -transition / 2, 0.0, ramp))


@dataclass(eq=False)
class FanFilter:
    """Filtre en éventail centré : taps[a, b] est le coefficient en n = (a − (S−1)/2, b − (S−1)/2)"""
    taps: np.ndarray
    transition: float

    @property
    def size(self) -> int:
        return self.taps.shape[0]

    def origin(self, taps: Optional[np.ndarray] = None) -> Tuple[int, int]:
        taps = self.taps if taps is None else taps
        return (-(taps.shape[0] - 1) // 2, -(taps.shape[1] - 1) // 2)

    def response(self, xi1, xi2) -> np.ndarray:
        """P(ξ₁, ξ₂) = Σ p(n)·exp(−2πi(ξ₁n₁ + ξ₂n₂)), fréquences normalisées (cycles)"""
        xi1, xi2 = np.broadcast_arrays(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))
        half = (self.size - 1) // 2
        n = np.arange(-half, half + 1)
        e1 = np.exp(-2j * np.pi * xi1[..., None] * n)
        e2 = np.exp(-2j * np.pi * xi2[..., None] * n)
        return np.einsum("...a,ab,...b->...", e1, self.taps, e2)

    def dilated(self, factor: int) -> np.ndarray:
        """Taps de P(ξ₁, factor·ξ₂) : suréchantillonnage le long de l'axe 1 (largeur (S − 1)·factor + 1)"""
        out = np.zeros((self.size, (self.size - 1) * factor + 1))
        out[:, ::factor] = self.taps
        return out

    def plot_response(self, path, resolution: int = 256) -> Path:
        """Écrit une carte de |P| sur [−1/2, 1/2]² (backend Agg)"""
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        xi = np.linspace(-0.5, 0.5, resolution)
        magnitude = np.abs(self.response(xi[:, None], xi[None, :]))
        fig, ax = plt.subplots(figsize=(5, 4))
        image = ax.imshow(magnitude, extent=(-0.5, 0.5, 0.5, -0.5), cmap="viridis")
        ax.set_xlabel("ξ₂")
        ax.set_ylabel("ξ₁")
        ax.set_title(f"Filtre en éventail ({self.size}×{self.size}, transition {self.transition})")
        fig.colorbar(image, ax=ax)
        path = ensure_parent_directory(path)
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        Logger.save(f"Réponse du filtre en éventail: {path}")
        return path


def build_fan_filter(size: int = 31, transition: float = 0.1) -> FanFilter:
    """
    Filtre en éventail par échantillonnage fréquentiel

    L'éventail idéal lissé est échantillonné sur une grille fine, ramené en espace par
    FFT inverse, tronqué à size×size puis pondéré par une fenêtre de Hann séparable.

    Args:
        size: taille impaire ≥ 15
        transition: largeur de la transition (cycles)

    Returns:
        FanFilter symétrique par quadrant
    """
    if size < 15 or size % 2 == 0:
        raise ValueError(f"Taille du filtre en éventail impaire et ≥ 15 attendue: {size}")
    if not 0 < transition < 0.5:
        raise ValueError(f"Transition hors de ]0, 0.5[: {transition}")
    if size * transition < 1.5:
        raise ValueError(f"Transition {transition} trop étroite pour {size} taps (size·transition < 1.5)")

    grid = max(256, 1 << (8 * size - 1).bit_length())
    xi = np.fft.fftfreq(grid)
    ideal = _fan_profile(xi[:, None], xi[None, :], transition)
    spatial = np.fft.fftshift(np.fft.ifft2(ideal).real)
    half = (size - 1) // 2
    center = grid // 2
    taps = spatial[center - half:center + half + 1, center - half:center + half + 1]
    taper = windows.hann(size + 2)[1:-1]
    taps = taps * np.outer(taper, taper)
    taps = 0.25 * (taps + taps[::-1] + taps[:, ::-1] + taps[::-1, ::-1])
    return FanFilter(taps=taps, transition=transition)


@dataclass
class DnstParams:
    J: int = 4
    wavelet: str = "sym4"
    fan_size: int = 31
    fan_transition: float = 0.1
    decimated: bool = False
    cache_dir: Optional[str] = field(default=None, repr=False)

    def __post_init__(self):
        if self.J < 1:
            raise ValueError(f"J doit être ≥ 1: {self.J}")


@dataclass(eq=False)
class DnstFilterSet:
    """Filtres ψᵈ_{j,k} sur le tore N×N, réponses fréquentielles et duaux"""
    size: int
    keys: List[BlockKey]
    taps: np.ndarray
    normalization: float = 1.0
    frequency: np.ndarray = field(init=False, repr=False)
    denominator: np.ndarray = field(init=False, repr=False)
    duals: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.frequency = np.fft.fft2(self.taps, axes=(-2, -1))
        self.denominator = np.sum(np.abs(self.frequency) ** 2, axis=0)

    def index(self, key: BlockKey) -> int:
        return self.keys.index(key)

    def __len__(self) -> int:
        return len(self.keys)


def block_keys(J: int) -> List[BlockKey]:
    """Ordre canonique des sous-bandes : cône h, cône v (j croissant, k croissant), puis passe-bas"""
    keys = [BlockKey("shearlet", cone, j, k) for cone in ("h", "v") for j in range(J) for k in shear_range(j)]
    return keys + [LOWPASS_KEY]


def fan_dilation(j: int) -> int:
    """
    Facteur de dilatation de l'éventail le long de ξ₂ à l'échelle j : 2^⌈j/2⌉

    La sous-bande w_j occupe |ξ₁| ~ 2^{j−J} et |ξ₂| ≲ 2^{⌈j/2⌉−J} ; le bord |ξ₂|·2^⌈j/2⌉ = |ξ₁|
    de P(ξ₁, 2^⌈j/2⌉ξ₂) coupe donc la sous-bande à la pente 2^{−⌈j/2⌉} du pas de cisaillement.
    """
    return 2 ** half_scale(j)


def _seed_filter(size: int, g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """w(n₁, n₂) = g(n₁)·h(n₂) replié sur le tore"""
    return np.outer(periodize(g, size), periodize(h, size))


@timer
def build_dnst_filters(size: int, params: Optional[DnstParams] = None, progress: bool = False) -> DnstFilterSet:
    """
    ψᵈ_{j,k} = S^d_{2^{−⌈j/2⌉}k}(p ∗ w_j) avec p les taps de P(ξ₁, 2^⌈j/2⌉ξ₂) (voir fan_dilation)
    et w_j = g_{J−j} ⊗ h_{J−⌈j/2⌉} ; cône vertical par transposition. Un éventail dilaté plus large
    que N est replié sur le tore.

    Un passe-bas h_J ⊗ h_J complète le système. Les filtres sont mis à l'échelle par le
    scalaire a minimisant ‖a·Σ|ψ̂|² − 1‖₂. Relu depuis le cache .npz si disponible.
    """
    params = params or DnstParams()
    path = filters_cache_path(params, size)
    if path is not None and path.exists():
        with np.load(path) as data:
            keys = [BlockKey(str(kind), str(cone), int(j), int(k))
                    for kind, cone, j, k in zip(data["kinds"], data["cones"], data["js"], data["ks"])]
            filters = DnstFilterSet(size=size, keys=keys, taps=data["taps"], normalization=float(data["normalization"]))
        Logger.loading(f"Filtres DNST relus depuis le cache: {path.name}")
        return filters

    J = params.J
    cascade_filters = default_cascade(params.wavelet, J)
    fan = build_fan_filter(params.fan_size, params.fan_transition)
    horizontal: Dict[Tuple[int, int], np.ndarray] = {}
    branches = [(j, k) for j in range(J) for k in shear_range(j)]
    for j, k in tqdm(branches, desc="Filtres DNST", disable=not progress, leave=False):
        u = half_scale(j)
        dilated = fan.dilated(fan_dilation(j))
        if max(dilated.shape) > size:
            # Repliement sur le tore N×N : la réponse aux fréquences de la TFD est inchangée
            Logger.debug(f"Éventail dilaté {dilated.shape} replié sur {size}x{size} (j={j})")
        seed = _seed_filter(size, cascade_filters.g(J - j), cascade_filters.h(J - u))
        fanned = circular_filter2d(seed, dilated, fan.origin(dilated))
        horizontal[(j, k)] = digital_shear(fanned, j, k, cascade_filters)

    keys = block_keys(J)
    h_J = cascade_filters.h(J)
    taps = np.stack([
        _seed_filter(size, h_J, h_J) if key == LOWPASS_KEY
        else (horizontal[(key.j, key.k)] if key.cone == "h" else horizontal[(key.j, key.k)].T)
        for key in keys
    ])

    raw = np.sum(np.abs(np.fft.fft2(taps, axes=(-2, -1))) ** 2, axis=0)
    normalization = float(np.sum(raw) / np.sum(raw ** 2))
    filters = DnstFilterSet(size=size, keys=keys, taps=taps * np.sqrt(normalization), normalization=normalization)

    if path is not None:
        ensure_directory(path.parent)
        np.savez(
            path,
            taps=filters.taps,
            normalization=normalization,
            kinds=np.array([key.kind for key in keys]),
            cones=np.array([str(key.cone) for key in keys]),
            js=np.array([key.j for key in keys]),
            ks=np.array([key.k for key in keys]),
        )
        Logger.save(f"Filtres DNST enregistrés: {path.name}")
    return filters


def filters_cache_path(params: DnstParams, size: int) -> Optional[Path]:
    """Fichier de cache par (J, N, ondelette, taille et transition de l'éventail)"""
    if params.cache_dir is None:
        return None
    key = cache_key(params.J, size, params.wavelet, params.fan_size, params.fan_transition)
    return Path(params.cache_dir) / "filters" / f"dnst_N{size}_J{params.J}_{key}.npz"


def compute_dual_filters(filters: DnstFilterSet, floor: float = DUAL_FLOOR) -> np.ndarray:
    """ψ̃̂ = ψ̂ / Σ|ψ̂|² sur la grille de la TFD ; lève DualFilterError si le dénominateur s'annule"""
    denominator = filters.denominator
    position = np.unravel_index(int(np.argmin(denominator)), denominator.shape)
    minimum = float(denominator[position])
    if minimum < floor:
        raise DualFilterError(
            f"Σ|ψ̂|² = {minimum:.3e} < {floor:.0e} à la fréquence {tuple(int(p) for p in position)}",
            frequency=tuple(int(p) for p in position),
            value=minimum,
        )
    Logger.debug(f"Minimum de Σ|ψ̂|²: {minimum:.3e}")
    filters.duals = filters.frequency / denominator
    return filters.duals


class DNST(BaseTransform):
    """Transformée non séparable par convolutions 2D (non décimée par défaut)"""

    name = "dnst"
    # Les filtres eux-mêmes sont cisaillés : orientation opposée à la DSST
    shear_sign = 1

    def __init__(self, size: int, params: Optional[DnstParams] = None, filters: Optional[DnstFilterSet] = None,
                 progress: bool = False, **kwargs):
        super().__init__(size, **kwargs)
        self.params = params or DnstParams()
        self.filters = filters or build_dnst_filters(size, self.params, progress=progress)
        if self.filters.size != size:
            raise ValueError(f"Filtres construits pour N={self.filters.size}, image N={size}")

    def parameters(self) -> Dict:
        p = self.params
        return {"N": self.size, "J": p.J, "wavelet": p.wavelet, "fan_size": p.fan_size,
                "fan_transition": p.fan_transition, "decimated": p.decimated}

    def steps(self, key: BlockKey) -> Tuple[int, int]:
        """Pas d'échantillonnage (2^{J−j}c₁ʲ, 2^{J−⌈j/2⌉}c₂ʲ) ; (1, 1) dans le cas non décimé"""
        if not self.params.decimated or key == LOWPASS_KEY:
            return (1, 1)
        J = self.params.J
        steps = (2 ** (J - key.j), 2 ** (J - half_scale(key.j)))
        return steps if key.cone == "h" else steps[::-1]

    def forward(self, image: np.ndarray) -> ShearletCoefficients:
        image = np.real(self.check_image(image)).astype(float)
        spectrum = np.fft.fft2(image)
        blocks = {}
        for index, key in enumerate(self.filters.keys):
            band = np.fft.ifft2(spectrum * np.conj(self.filters.frequency[index])).real
            s1, s2 = self.steps(key)
            blocks[key] = band[::s1, ::s2]
        return ShearletCoefficients(self.name, blocks, self.parameters())

    def adjoint(self, coefficients: ShearletCoefficients) -> np.ndarray:
        total = np.zeros((self.size, self.size), dtype=complex)
        for index, key in enumerate(self.filters.keys):
            s1, s2 = self.steps(key)
            band = np.zeros((self.size, self.size))
            band[::s1, ::s2] = np.real(coefficients[key])
            total += np.fft.fft2(band) * self.filters.frequency[index]
        return np.fft.ifft2(total).real

    def reconstruct(self, coefficients: ShearletCoefficients, tol: Optional[float] = None) -> CGResult:
        """Reconstruction directe par les duaux (aucune itération) ; gradient conjugué si décimée"""
        if self.params.decimated:
            return super().reconstruct(coefficients, tol)
        x = self.dual_inverse(coefficients)
        return CGResult(x=x, converged=True, iterations=0, residuals=[0.0])

    def dual_inverse(self, coefficients: ShearletCoefficients) -> np.ndarray:
        """f = Σ c_{j,k} ∗ ψ̃_{j,k}"""
        if self.params.decimated or coefficients.params.get("decimated"):
            raise ValueError("Inverse par filtres duaux définie uniquement pour des coefficients non décimés")
        duals = self.filters.duals if self.filters.duals is not None else compute_dual_filters(self.filters)
        total = np.zeros((self.size, self.size), dtype=complex)
        for index, key in enumerate(self.filters.keys):
            block = np.real(coefficients[key])
            if block.shape != (self.size, self.size):
                raise ValueError(f"Bloc {key} de forme {block.shape} : coefficients décimés refusés")
            total += np.fft.fft2(block) * duals[index]
        return np.fft.ifft2(total).real

    def plan(self) -> Dict[BlockKey, Tuple[int, ...]]:
        shapes = {}
        for key in self.filters.keys:
            s1, s2 = self.steps(key)
            shapes[key] = (-(-self.size // s1), -(-self.size // s2))
        return shapes


def dnst_forward(image: np.ndarray, params: Optional[DnstParams] = None) -> ShearletCoefficients:
    return DNST(np.asarray(image).shape[0], params).forward(image)


def dnst_inverse(coefficients: ShearletCoefficients, filters: DnstFilterSet,
                 params: Optional[DnstParams] = None) -> np.ndarray:
    return DNST(filters.size, params, filters=filters).dual_inverse(coefficients)
