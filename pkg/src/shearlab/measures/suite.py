"""
Mesures quantitatives des transformées : exactitude, isométrie, frame de Parseval,
localisation, invariance au cisaillement, vitesse, exactitude géométrique, robustesse
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..base_transform import BaseTransform
from ..fdst import cg_solve
from ..ppgrid import PseudoPolarGrid
from ..schemas import MeasureReport, ShearletCoefficients
from ..utils import DEFAULT_SEED, Logger, SplitMix64, Timer, best_of, ensure_parent_directory, safe_json_dumps
from ..weights import WeightFunction, weighted_gram
from .analysis import (
    ZERO_TOLERANCE,
    average_decay,
    average_holder,
    centered_spectrum,
    hard_threshold,
    keep_largest,
    log_slope,
    relative_error,
    support_ratio,
)
from .images import TestImageGenerator

SAMPLE_COUNT = 5
LOCALIZATION_SCALE = 4
SHEAR_SLOPE = 0.5
THRESHOLD_P1 = (2, 4, 6, 8, 10)
THRESHOLD_P2 = (0.001, 0.011, 0.021, 0.031, 0.041)
SPEED_SIZES = {"default": (32, 64, 128, 256, 512), "dnst": (128, 256, 512)}

# Valeurs de référence, recopiées dans le champ `reference` des rapports
REFERENCE_VALUES: Dict[str, Dict[str, Dict[str, Any]]] = {
    "weights": {
        "fdst": {
            "M1": {32: 4.2e-3, 64: 4.0e-3, 128: 1.8e-3, 256: 1.5e-3},
            "cond": {32: 1.379, 64: 1.503, 128: 1.621, 256: 1.731},
        },
    },
    "algebraic": {"fdst": {"M_alg": 6.6e-16}},
    "isometry": {"fdst": {"M_isom1": 9.3e-4, "M_isom2": 1.834, "M_isom3": 3.3e-7}},
    "tightness": {
        "fdst": {"M_tight1": 9.9e-4, "M_tight2": 3.8e-7},
        "dsst": {"M_tight1": 1.9920, "M_tight2": 1.2e-7},
        "dnst": {"M_tight1": 0.1829, "M_tight2": 5.8e-16},
    },
    "localization": {
        "fdst": {"M_decay1": -1.920, "M_supp": 5.5e-5, "M_decay2": -3.257, "M_smooth1": 1.319, "M_smooth2": 0.734},
        "dsst": {"M_decay1": float("-inf"), "M_supp": 8.6e-3, "M_decay2": -1.195, "M_smooth1": 0.012,
                 "M_smooth2": 0.954},
        "dnst": {"M_decay1": float("-inf"), "M_supp": 2.0e-3, "M_decay2": -0.716, "M_smooth1": 0.188,
                 "M_smooth2": 0.949},
    },
    "shear": {"fdst": {"M_shear": [1.6e-5, 1.8e-4, 0.002, 0.003], "scales": [1, 2, 3, 4]}},
    "speed": {
        "fdst": {"M_speed1": 1.156, "M_speed2": 9.3e-6, "M_speed3": 280.560},
        "dsst": {"M_speed1": 0.821, "M_speed2": 4.5e-3, "M_speed3": 88.700},
        "dnst": {"M_speed1": 1.081, "M_speed2": 9.9e-8, "M_speed3": 40.519},
    },
    "geometric": {
        "fdst": {"M_geo1": -1.358, "M_geo2": -2.032},
        "dsst": {"M_geo1": -0.002, "M_geo2": -0.030},
        "dnst": {"M_geo1": -0.019, "M_geo2": -0.342},
    },
    "robustness": {
        "fdst": {"M_thres1": [1.5e-8, 7.2e-8, 2.5e-5, 0.001, 0.007], "M_thres2": [0.005, 0.039, 0.078, 0.113, 0.154]},
        "dsst": {"M_thres1": [0.02961, 0.02961, 0.02961, 0.0296, 0.0331],
                 "M_thres2": [0.030, 0.036, 0.046, 0.056, 0.072]},
        "dnst": {"M_thres1": [5.2e-10, 1.2e-4, 0.00391, 0.0124, 0.0396],
                 "M_thres2": [0.002, 0.018, 0.035, 0.055, 0.076]},
    },
}

TransformFactory = Callable[[int], BaseTransform]


def reference_for(measure: str, transform: str, size: Optional[int] = None) -> Dict[str, Any]:
    """Valeurs de référence d'une mesure ; les tables indexées par taille sont réduites à la taille donnée"""
    table = REFERENCE_VALUES.get(measure, {}).get(transform, {})
    reference = {}
    for name, value in table.items():
        if isinstance(value, dict):
            if size in value:
                reference[name] = value[size]
        else:
            reference[name] = value
    return reference


def _new_report(measure: str, transform: BaseTransform, seed: int, **parameters) -> MeasureReport:
    params = dict(transform.parameters())
    params.update(seed=seed, **parameters)
    return MeasureReport(
        measure=measure,
        transform=transform.name,
        parameters=params,
        reference=reference_for(measure, transform.name, transform.size),
    )


def _not_applicable(measure: str, transform: BaseTransform, seed: int, reason: str) -> MeasureReport:
    params = dict(transform.parameters())
    params["seed"] = seed
    Logger.info(f"Mesure {measure} sans objet pour {transform.name}: {reason}")
    return MeasureReport.not_applicable(measure, transform.name, params, reason)


# ---------------------------------------------------------------- poids de densité


def measure_weight_quality(
    grid: PseudoPolarGrid,
    weights: WeightFunction,
    images: Optional[Sequence[np.ndarray]] = None,
    structured: Optional[np.ndarray] = None,
    seed: int = DEFAULT_SEED,
) -> Tuple[float, float]:
    """
    Qualité des poids : (M₁, M₂)

    M₁ moyenne ‖P*wP I − I‖/‖I‖ sur cinq images normales, M₂ la même erreur pour
    une image structurée.
    """
    generator = TestImageGenerator(seed)
    images = images if images is not None else generator.normal_images(SAMPLE_COUNT, grid.N)
    structured = structured if structured is not None else generator.structured_image(grid.N)
    m1 = float(np.mean([relative_error(weighted_gram(image, weights), image) for image in images]))
    m2 = relative_error(weighted_gram(structured, weights), structured)
    return m1, m2


def weights_measure(transform: BaseTransform, seed: int = DEFAULT_SEED, with_condition: bool = False,
                    **_) -> MeasureReport:
    if not hasattr(transform, "weights"):
        return _not_applicable("weights", transform, seed, "pas de poids de densité")
    report = _new_report("weights", transform, seed)
    m1, m2 = measure_weight_quality(transform.grid, transform.weights, seed=seed)
    report.values.update(M1=m1, M2=m2, residual=transform.weights.residual)
    if with_condition:
        report.values["cond"] = transform.estimate_condition(seed=seed).cond
    return report


# ---------------------------------------------------------------- exactitude algébrique et isométrie


def measure_algebraic_exactness(transform: BaseTransform, seed: int = DEFAULT_SEED,
                                count: int = SAMPLE_COUNT, **_) -> MeasureReport:
    """M_alg = max ‖W*W J − J‖/‖J‖ sur des données pseudo-polaires aléatoires"""
    if not transform.pseudo_polar:
        return _not_applicable("algebraic", transform, seed, "transformée hors grille pseudo-polaire")
    report = _new_report("algebraic", transform, seed, samples=count)
    rng = SplitMix64(seed)
    errors = []
    for _ in range(count):
        data = transform.random_frequency_data(rng)
        errors.append(transform.frequency_norm(transform.frame_roundtrip(data) - data) / transform.frequency_norm(data))
    report.values["M_alg"] = float(max(errors))
    return report


def measure_isometry(transform: BaseTransform, seed: int = DEFAULT_SEED, count: int = SAMPLE_COUNT,
                     cg_tol: float = 1e-6, condition_options: Optional[Dict[str, Any]] = None, **_) -> MeasureReport:
    """(M_isom₁, M_isom₂, M_isom₃) sur P*wP avec des images uniformes"""
    if not transform.pseudo_polar:
        return _not_applicable("isometry", transform, seed, "transformée hors grille pseudo-polaire")
    report = _new_report("isometry", transform, seed, samples=count, cg_tol=cg_tol)
    images = TestImageGenerator(seed).uniform_images(count, transform.size)

    closeness, inversion = [], []
    for image in images:
        gram = transform.normal_operator(image)
        closeness.append(relative_error(gram, image))
        solution = cg_solve(transform.normal_operator, gram, tol=cg_tol, maxiter=transform.cg_maxiter)
        if not solution.converged:
            report.notes.append(f"CG non convergé ({solution.error_message})")
        inversion.append(relative_error(solution.x, image))

    estimate = transform.estimate_condition(seed=seed, **(condition_options or {}))
    report.values.update(M_isom1=max(closeness), M_isom2=estimate.cond, M_isom3=max(inversion))
    report.curves["eigenvalues"] = [estimate.lambda_min, estimate.lambda_max]
    return report


# ---------------------------------------------------------------- frame de Parseval


def measure_tightness(transform: BaseTransform, seed: int = DEFAULT_SEED, count: int = SAMPLE_COUNT,
                      **_) -> MeasureReport:
    """(M_tight₁, M_tight₂) : adjoint comme inverse, puis inverse de la transformée"""
    report = _new_report("tightness", transform, seed, samples=count, cg_tol=transform.cg_tol)
    images = TestImageGenerator(seed).uniform_images(count, transform.size)
    adjoint_errors, inverse_errors = [], []
    for image in images:
        coefficients = transform.forward(image)
        adjoint_errors.append(relative_error(transform.adjoint(coefficients), image))
        result = transform.reconstruct(coefficients)
        if not result.converged:
            report.notes.append(f"Reconstruction non convergée ({result.error_message})")
        inverse_errors.append(relative_error(result.x, image))
    report.values.update(M_tight1=max(adjoint_errors), M_tight2=max(inverse_errors))
    return report


# ---------------------------------------------------------------- localisation


def measure_localization(transform: BaseTransform, seed: int = DEFAULT_SEED, scale: Optional[int] = None,
                         **_) -> MeasureReport:
    """
    (M_decay₁, M_supp, M_decay₂, M_smooth₁, M_smooth₂) de l'élément de pente 0

    L'élément est pris à l'échelle min(4, échelle la plus fine), centré à l'indice (N/2, N/2),
    soit le pixel (N/2 + 1, N/2 + 1) en base 1 : (257, 257) pour N = 512.
    """
    scales = transform.directional_scales()
    if not scales:
        return _not_applicable("localization", transform, seed, "aucune sous-bande directionnelle")
    scale = min(LOCALIZATION_SCALE, scales[-1]) if scale is None else scale
    center = transform.size // 2 + 1
    report = _new_report("localization", transform, seed, scale=scale, shear=0, center=[center, center])
    atom = transform.atom(scale, 0)
    spectrum = centered_spectrum(atom)
    report.values.update(
        M_decay1=average_decay(atom),
        M_supp=support_ratio(spectrum),
        M_decay2=average_decay(spectrum),
        M_smooth1=average_holder(atom),
        M_smooth2=average_holder(spectrum),
    )
    return report


# ---------------------------------------------------------------- invariance au cisaillement


def shear_scales(transform: BaseTransform, slope: float) -> List[int]:
    """Échelles j où 2ʲ·s est entier"""
    return [j for j in transform.directional_scales() if float(2 ** j * slope).is_integer()]


def _cone_vector(coefficients: ShearletCoefficients, keys) -> np.ndarray:
    return np.concatenate([coefficients[key].ravel() for key in keys])


def measure_shear_invariance(transform: BaseTransform, seed: int = DEFAULT_SEED, slope: float = SHEAR_SLOPE,
                             **_) -> MeasureReport:
    """
    Courbe M_shear,j = max_k ‖C_{j,k}(S I_s) − C_{j,k+2ʲs}(S I)‖/‖I‖

    I est un contour de pente 0 passant par le centre, I_s = I(S_s ·). Le maximum
    porte sur les k tels que k et k + 2ʲs soient strictement dans ]−2ʲ, 2ʲ[.
    """
    if not transform.pseudo_polar:
        return _not_applicable("shear", transform, seed, "invariance au cisaillement d'un autre type")
    if abs(slope) > 1:
        raise ValueError(f"Pente de cisaillement hors de [−1, 1]: {slope}")
    scales = shear_scales(transform, slope)
    if not scales:
        return _not_applicable("shear", transform, seed, f"aucune échelle avec 2^j·{slope} entier")

    report = _new_report("shear", transform, seed, slope=slope)
    image = TestImageGenerator.edge_image(transform.size, 0.0)
    sheared = TestImageGenerator.edge_image(transform.size, slope)
    reference, moved = transform.forward(image), transform.forward(sheared)
    norm = float(np.linalg.norm(image))

    curve = []
    for j in scales:
        bound = transform.shear_count(j)
        offset = int(round(2 ** j * slope))
        worst = 0.0
        for k in range(-bound + 1, bound):
            target = k + offset
            if not -bound < target < bound:
                continue
            difference = (_cone_vector(moved, transform.cone_keys(j, k))
                          - _cone_vector(reference, transform.cone_keys(j, target)))
            worst = max(worst, float(np.linalg.norm(difference)) / norm)
        curve.append(worst)
    report.curves.update(scales=scales, M_shear=curve)
    return report


# ---------------------------------------------------------------- vitesse


def measure_speed(transform: BaseTransform, factory: Optional[TransformFactory] = None,
                  sizes: Optional[Sequence[int]] = None, repeats: int = 3, seed: int = DEFAULT_SEED,
                  threads: int = 1, **_) -> MeasureReport:
    """
    (M_speed₁, M_speed₂, M_speed₃) : exposant de complexité, constante, rapport à la FFT 2D

    Les temps s_i sont les meilleurs de `repeats` exécutions de forward sur une image
    normale de côté N_i ; la construction des transformées (poids, filtres) n'est
    pas chronométrée.
    """
    if factory is None:
        return _not_applicable("speed", transform, seed, "aucune fabrique de transformées par taille")
    sizes = tuple(SPEED_SIZES.get(transform.name, SPEED_SIZES["default"]) if sizes is None else sizes)
    if len(sizes) < 2:
        return _not_applicable("speed", transform, seed, f"au moins deux tailles requises: {list(sizes)}")
    report = _new_report("speed", transform, seed, sizes=list(sizes), repeats=repeats, threads=threads)
    report.timing_dependent = True

    generator = TestImageGenerator(seed)
    seconds, fft_seconds = [], []
    for size in tqdm(sizes, desc=f"Vitesse {transform.name}", disable=not Logger.is_verbose(), leave=False):
        instance = transform if size == transform.size else factory(size)
        image = generator.normal(size)
        seconds.append(best_of(lambda: instance.forward(image), repeats))
        fft_seconds.append(best_of(lambda: np.fft.fft2(image), repeats))
        Logger.debug(f"N={size}: {seconds[-1]:.4f}s (FFT {fft_seconds[-1]:.2e}s)")

    inputs = np.asarray(sizes, dtype=float) ** 2
    exponent = log_slope(seconds, np.log2(sizes), base=np.e) / (2.0 * np.log(2.0))
    constant = float(np.mean(np.asarray(seconds) / inputs ** exponent))
    ratio = float(np.mean(np.asarray(seconds) / np.asarray(fft_seconds)))
    report.values.update(M_speed1=exponent, M_speed2=constant, M_speed3=ratio)
    report.curves.update(sizes=list(sizes), seconds=seconds, fft_seconds=fft_seconds)
    return report


# ---------------------------------------------------------------- exactitude géométrique


def measure_geometric(transform: BaseTransform, seed: int = DEFAULT_SEED,
                      images: Optional[Sequence[Tuple[float, bool, np.ndarray]]] = None, **_) -> MeasureReport:
    """
    (M_geo₁, M_geo₂) : pentes (log₂, par échelle) des maxima des coefficients alignés
    avec le contour et des autres coefficients directionnels, moyennés sur huit contours
    """
    scales = transform.directional_scales()
    if len(scales) < 2:
        return _not_applicable("geometric", transform, seed, "moins de deux échelles directionnelles")
    images = images if images is not None else TestImageGenerator(seed).geometric_images(transform.size)
    report = _new_report("geometric", transform, seed, images=len(images), scales=scales)

    aligned = np.zeros(len(scales))
    others = np.zeros(len(scales))
    degenerate = False
    for slope, transposed, image in images:
        if np.ptp(image) == 0:
            degenerate = True
        coefficients = transform.forward(image)
        for index, j in enumerate(scales):
            keys = set(transform.cone_keys(j, transform.aligned_shear(j, slope), vertical=transposed))
            best_aligned, best_other = 0.0, 0.0
            for key, block in coefficients.items():
                if key.kind != "shearlet" or key.j != j:
                    continue
                peak = float(np.abs(block).max()) if block.size else 0.0
                if key in keys:
                    best_aligned = max(best_aligned, peak)
                else:
                    best_other = max(best_other, peak)
            aligned[index] += best_aligned / len(images)
            others[index] += best_other / len(images)

    floor = ZERO_TOLERANCE * max(float(aligned.max()), float(others.max()), 1.0)
    if degenerate or np.any(aligned <= floor) or np.any(others <= floor):
        report.degenerate = True
        report.notes.append("Aucun contour exploitable : pentes fixées à 0")
        report.values.update(M_geo1=0.0, M_geo2=0.0)
    else:
        report.values.update(M_geo1=log_slope(aligned, scales), M_geo2=log_slope(others, scales))
    report.curves.update(scales=scales, aligned=aligned.tolist(), others=others.tolist())
    return report


# ---------------------------------------------------------------- robustesse


def measure_robustness(transform: BaseTransform, seed: int = DEFAULT_SEED,
                       p1: Sequence[float] = THRESHOLD_P1, p2: Sequence[float] = THRESHOLD_P2,
                       image: Optional[np.ndarray] = None, **_) -> MeasureReport:
    """
    Courbes M_thres₁ (on garde une fraction 2^{−p₁} des coefficients) et M_thres₂
    (seuil dur m(1 − 2^{−p₂}), m = max|c|), reconstruction par l'inverse de la transformée
    """
    image = TestImageGenerator.gaussian_image(transform.size) if image is None else image
    report = _new_report("robustness", transform, seed, p1=list(p1), p2=list(p2))
    coefficients = transform.forward(image)
    vector = coefficients.to_vector()
    peak = float(np.abs(vector).max())

    def reconstruction_error(thresholded: np.ndarray) -> float:
        result = transform.reconstruct(coefficients.from_vector(thresholded))
        if not result.converged:
            report.notes.append(f"Reconstruction non convergée ({result.error_message})")
        return relative_error(result.x, image)

    report.curves["p1"] = list(p1)
    report.curves["M_thres1"] = [reconstruction_error(keep_largest(vector, 2.0 ** -p)) for p in p1]
    report.curves["p2"] = list(p2)
    report.curves["M_thres2"] = [reconstruction_error(hard_threshold(vector, peak * (1 - 2.0 ** -p))) for p in p2]
    return report


# ---------------------------------------------------------------- exécution et export

MEASURES: Dict[str, Callable[..., MeasureReport]] = {
    "weights": weights_measure,
    "algebraic": measure_algebraic_exactness,
    "isometry": measure_isometry,
    "tightness": measure_tightness,
    "localization": measure_localization,
    "shear": measure_shear_invariance,
    "speed": measure_speed,
    "geometric": measure_geometric,
    "robustness": measure_robustness,
}


def run_measure(name: str, transform: BaseTransform, seed: int = DEFAULT_SEED, **options) -> MeasureReport:
    """Exécute une mesure et renseigne la durée"""
    if name not in MEASURES:
        raise ValueError(f"Mesure inconnue: {name} (disponibles: {', '.join(MEASURES)})")
    Logger.loading(f"Mesure {name} ({transform.name}, N={transform.size})...")
    timer_ = Timer()
    with timer_.measure():
        report = MEASURES[name](transform, seed=seed, **options)
    report.wall_clock = timer_.elapsed_time
    if report.applicable:
        summary = ", ".join(f"{key}={value:.4g}" for key, value in report.values.items()
                            if isinstance(value, float))
        Logger.stats(f"{name}: {summary or 'courbes'} ({report.wall_clock:.2f}s)")
    return report


def run_all(transform: BaseTransform, names: Optional[Iterable[str]] = None, seed: int = DEFAULT_SEED,
            options: Optional[Dict[str, Dict[str, Any]]] = None, progress: bool = False) -> List[MeasureReport]:
    """Exécute séquentiellement les mesures demandées (toutes par défaut)"""
    names = list(names or MEASURES)
    options = options or {}
    reports = []
    for name in tqdm(names, desc="Mesures", disable=not progress):
        reports.append(run_measure(name, transform, seed=seed, **options.get(name, {})))
    Logger.success(f"{len(reports)} mesures exécutées pour {transform.name}")
    return reports


def reports_to_frame(reports: Iterable[MeasureReport]) -> pd.DataFrame:
    """Une ligne par valeur scalaire ou point de courbe : measure, transform, quantity, index, value, reference"""
    rows = []
    for report in reports:
        for quantity, value in report.values.items():
            rows.append({
                "measure": report.measure,
                "transform": report.transform,
                "quantity": quantity,
                "index": None,
                "value": value,
                "reference": report.reference.get(quantity),
            })
        for quantity, curve in report.curves.items():
            reference = report.reference.get(quantity)
            for index, value in enumerate(curve):
                rows.append({
                    "measure": report.measure,
                    "transform": report.transform,
                    "quantity": quantity,
                    "index": index,
                    "value": value,
                    "reference": reference[index] if isinstance(reference, list) and index < len(reference) else None,
                })
    return pd.DataFrame(rows, columns=["measure", "transform", "quantity", "index", "value", "reference"])


def reports_to_json(reports: Iterable[MeasureReport], include_timing: bool = True) -> str:
    return safe_json_dumps({"reports": [report.to_dict(include_timing) for report in reports]})


def write_reports(path, reports: Sequence[MeasureReport], include_timing: bool = True) -> Path:
    path = ensure_parent_directory(path)
    path.write_text(reports_to_json(reports, include_timing) + "\n", encoding="utf-8")
    Logger.save(f"Rapport écrit: {path}")
    return path


def read_reports(path) -> List[MeasureReport]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [MeasureReport.from_dict(item) for item in data["reports"]]
