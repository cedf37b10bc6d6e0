"""
Outils d'analyse des mesures : majorants monotones, pentes de décroissance, régularité höldérienne
"""

from typing import Optional, Sequence

import numpy as np

# Valeurs sous ZERO_TOLERANCE·max|I| considérées comme des zéros exacts (bruit d'arrondi des FFT)
ZERO_TOLERANCE = 1e-12
HOLDER_RADIUS = 4
SUPPORT_RADIUS = 3


def relative_error(estimate: np.ndarray, reference: np.ndarray) -> float:
    """‖estimate − reference‖₂ / ‖reference‖₂"""
    norm = float(np.linalg.norm(reference))
    if norm == 0.0:
        raise ValueError("Erreur relative: référence nulle")
    return float(np.linalg.norm(np.asarray(estimate) - np.asarray(reference)) / norm)


def monotone_majorant(profile: np.ndarray, axis: int = 0) -> np.ndarray:
    """Plus petit majorant décroissant : maximum courant depuis la fin"""
    flipped = np.flip(np.abs(profile), axis=axis)
    return np.flip(np.maximum.accumulate(flipped, axis=axis), axis=axis)


def least_squares_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pentes des droites des moindres carrés de chaque colonne de y contre x"""
    x = np.asarray(x, dtype=float)
    centered = x - x.mean()
    return centered @ (y - y.mean(axis=0)) / float(centered @ centered)


def decay_rates(profiles: np.ndarray, floor: float) -> np.ndarray:
    """
    Taux de décroissance de chaque colonne de `profiles` (distance au centre le long de l'axe 0)

    Pente de log M contre log t (t = 1, 2, …), M majorant monotone du profil. Une
    colonne dont le majorant atteint 0 (queue identiquement nulle) vaut −∞.
    """
    majorant = monotone_majorant(profiles, axis=0)
    distance = np.arange(1, majorant.shape[0] + 1)
    rates = np.full(majorant.shape[1], -np.inf)
    alive = np.all(majorant > floor, axis=0)
    if np.any(alive):
        rates[alive] = least_squares_slopes(np.log(distance), np.log(majorant[:, alive]))
    return rates


def line_decay_rates(image: np.ndarray, tolerance: float = ZERO_TOLERANCE) -> np.ndarray:
    """
    Taux le long des N lignes parallèles à l'axe 1 puis des N lignes parallèles à l'axe 0

    Chaque ligne part de l'indice central N/2 jusqu'au bord (2N taux au total).
    """
    magnitude = np.abs(np.asarray(image))
    center = magnitude.shape[0] // 2
    floor = tolerance * float(magnitude.max()) if magnitude.size else 0.0
    along_rows = decay_rates(magnitude[center:, :], floor)
    along_cols = decay_rates(magnitude[:, center:].T, floor)
    return np.concatenate([along_rows, along_cols])


def average_decay(image: np.ndarray, tolerance: float = ZERO_TOLERANCE) -> float:
    """Moyenne des 2N taux ; −∞ dès qu'une ligne est à support compact"""
    rates = line_decay_rates(image, tolerance)
    if np.any(np.isneginf(rates)):
        return float("-inf")
    return float(np.mean(rates))


def centered_spectrum(image: np.ndarray) -> np.ndarray:
    """TFD 2D avec la fréquence nulle ramenée en (N/2, N/2)"""
    return np.fft.fftshift(np.fft.fft2(image))


def support_ratio(spectrum: np.ndarray, radius: int = SUPPORT_RADIUS) -> float:
    """max_{|u|,|v| ≤ radius} |Î(u, v)| / max |Î|"""
    magnitude = np.abs(spectrum)
    peak = float(magnitude.max())
    if peak == 0.0:
        return 0.0
    center = magnitude.shape[0] // 2
    window = magnitude[center - radius:center + radius + 1, center - radius:center + radius + 1]
    return float(window.max() / peak)


def holder_exponents(image: np.ndarray, radius: int = HOLDER_RADIUS, tolerance: float = ZERO_TOLERANCE) -> np.ndarray:
    """
    Exposant de Hölder local en chaque pixel

    Pente des moindres carrés de log|I(u, v) − I(u₀, v₀)| contre log‖(u, v) − (u₀, v₀)‖
    sur le voisinage 0 < max(|u − u₀|, |v − v₀|) ≤ radius (bords périodiques). Les
    différences nulles sont ignorées ; un pixel avec moins de deux différences non
    nulles, ou une seule distance, reçoit 0.
    """
    image = np.asarray(image)
    floor = tolerance * float(np.abs(image).max()) if image.size else 0.0
    shape = image.shape
    count = np.zeros(shape)
    sum_x = np.zeros(shape)
    sum_y = np.zeros(shape)
    sum_xx = np.zeros(shape)
    sum_xy = np.zeros(shape)
    for du in range(-radius, radius + 1):
        for dv in range(-radius, radius + 1):
            if du == 0 and dv == 0:
                continue
            difference = np.abs(np.roll(image, (-du, -dv), axis=(0, 1)) - image)
            valid = difference > floor
            x = 0.5 * np.log(du * du + dv * dv)
            y = np.log(np.where(valid, difference, 1.0))
            count += valid
            sum_x += valid * x
            sum_xx += valid * x * x
            sum_y += np.where(valid, y, 0.0)
            sum_xy += np.where(valid, x * y, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        denominator = count * sum_xx - sum_x ** 2
        slopes = (count * sum_xy - sum_x * sum_y) / denominator
    usable = (count >= 2) & (denominator > 1e-12 * np.maximum(count, 1) ** 2)
    return np.where(usable, slopes, 0.0)


def average_holder(image: np.ndarray, radius: int = HOLDER_RADIUS) -> float:
    return float(np.mean(holder_exponents(image, radius)))


def log_slope(values: Sequence[float], abscissa: Optional[Sequence[float]] = None, base: float = 2.0) -> float:
    """Pente de la droite des moindres carrés de log_base(values) contre l'abscisse (0, 1, … par défaut)"""
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise ValueError("log_slope: valeurs non strictement positives")
    x = np.arange(len(values)) if abscissa is None else np.asarray(abscissa, dtype=float)
    if len(values) < 2:
        raise ValueError("log_slope: au moins deux points requis")
    return float(np.polyfit(x, np.log(values) / np.log(base), 1)[0])


def keep_largest(vector: np.ndarray, fraction: float) -> np.ndarray:
    """Conserve les ⌈fraction·n⌉ coefficients de plus grand module (au moins un), annule les autres"""
    vector = np.asarray(vector)
    keep = min(vector.size, max(1, int(np.ceil(fraction * vector.size))))
    out = np.zeros_like(vector)
    if keep == vector.size:
        return vector.copy()
    order = np.argpartition(np.abs(vector), vector.size - keep)[vector.size - keep:]
    out[order] = vector[order]
    return out


def hard_threshold(vector: np.ndarray, threshold: float) -> np.ndarray:
    """Annule les coefficients de module strictement inférieur au seuil"""
    vector = np.asarray(vector)
    return np.where(np.abs(vector) < threshold, 0, vector)
