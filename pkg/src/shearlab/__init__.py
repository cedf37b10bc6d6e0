"""
shearlab - Transformées en shearlets numériques et mesures de performance

Trois implémentations d'une transformée en shearlets discrète:
- FDST : fenêtres de shearlets sur la grille pseudo-polaire, PPFT pondérée
- DSST : cisaillement numérique et ondelettes séparables
- DNST : filtres non séparables (éventail) et reconstruction par filtres duaux

Modules principaux:
- ppgrid, frft, ppft, weights, windows : grille pseudo-polaire et PPFT pondérée
- fdst, dsst, dnst : les trois transformées
- measures : mesures quantitatives et rapports
- cli : interface en ligne de commande
- config : configuration centralisée
"""

import logging
import os

from .config import ShearlabConfig
from .errors import ConfigError, DualFilterError, FormatError, NumericalError, ShearlabError
from .schemas import BlockKey, CGResult, ConditionEstimate, MeasureReport, ShearletCoefficients
from .ppgrid import PPArray, PseudoPolarGrid, build_grid
from .frft import frft, frft_adjoint
from .ppft import ppft_adjoint, ppft_direct, ppft_forward
from .weights import WeightFunction, solve_weights
from .windows import WindowSystem, analyze, synthesize
from .fdst import FDST, fdst_adjoint, fdst_forward, fdst_inverse
from .dsst import DSST, DsstParams, digital_shear, dsst_adjoint, dsst_forward, dsst_inverse
from .dnst import DNST, DnstParams, build_dnst_filters, compute_dual_filters, dnst_forward, dnst_inverse
from .utils import Logger

__version__ = "1.0.0"

# Exports principaux
__all__ = [
    "ShearlabConfig",
    "ShearlabError",
    "ConfigError",
    "FormatError",
    "NumericalError",
    "DualFilterError",
    "BlockKey",
    "CGResult",
    "ConditionEstimate",
    "MeasureReport",
    "ShearletCoefficients",
    "PPArray",
    "PseudoPolarGrid",
    "build_grid",
    "frft",
    "frft_adjoint",
    "ppft_forward",
    "ppft_adjoint",
    "ppft_direct",
    "WeightFunction",
    "solve_weights",
    "WindowSystem",
    "analyze",
    "synthesize",
    "FDST",
    "fdst_forward",
    "fdst_adjoint",
    "fdst_inverse",
    "DSST",
    "DsstParams",
    "digital_shear",
    "dsst_forward",
    "dsst_adjoint",
    "dsst_inverse",
    "DNST",
    "DnstParams",
    "build_dnst_filters",
    "compute_dual_filters",
    "dnst_forward",
    "dnst_inverse",
    "Logger",
]


# Configuration par défaut au niveau du package
def setup_default_logging(level: str = None):
    """Configure le logging par défaut (niveau : argument, puis SHEARLAB_LOG_LEVEL, puis INFO)"""
    level = (level or os.getenv("SHEARLAB_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    logging.getLogger("shearlab").setLevel(getattr(logging, level, logging.INFO))


# Auto-configuration au chargement du module
setup_default_logging()
