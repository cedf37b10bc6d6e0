"""
Mesures quantitatives de performance des transformées en shearlets
"""

from .images import TestImageGenerator, GEOMETRIC_SLOPES, GEOMETRIC_TRANSPOSED
from .analysis import (
    average_decay,
    average_holder,
    centered_spectrum,
    hard_threshold,
    holder_exponents,
    keep_largest,
    line_decay_rates,
    log_slope,
    monotone_majorant,
    relative_error,
    support_ratio,
)
from .suite import (
    MEASURES,
    REFERENCE_VALUES,
    measure_algebraic_exactness,
    measure_geometric,
    measure_isometry,
    measure_localization,
    measure_robustness,
    measure_shear_invariance,
    measure_speed,
    measure_tightness,
    measure_weight_quality,
    read_reports,
    reference_for,
    reports_to_frame,
    reports_to_json,
    run_all,
    run_measure,
    write_reports,
)

__all__ = [
    "TestImageGenerator",
    "GEOMETRIC_SLOPES",
    "GEOMETRIC_TRANSPOSED",
    "average_decay",
    "average_holder",
    "centered_spectrum",
    "hard_threshold",
    "holder_exponents",
    "keep_largest",
    "line_decay_rates",
    "log_slope",
    "monotone_majorant",
    "relative_error",
    "support_ratio",
    "MEASURES",
    "REFERENCE_VALUES",
    "measure_algebraic_exactness",
    "measure_geometric",
    "measure_isometry",
    "measure_localization",
    "measure_robustness",
    "measure_shear_invariance",
    "measure_speed",
    "measure_tightness",
    "measure_weight_quality",
    "read_reports",
    "reference_for",
    "reports_to_frame",
    "reports_to_json",
    "run_all",
    "run_measure",
    "write_reports",
]
