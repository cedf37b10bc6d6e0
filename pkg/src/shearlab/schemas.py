"""
Schémas de données échangés entre les modules
"""

import math
from fractions import Fraction
import platform
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Tuple, Union

import numpy as np

NEG_INF_SENTINEL = "-inf"


class BlockKey(NamedTuple):
    """Clé d'un bloc de coefficients.

    kind vaut "shearlet" ou "scaling". cone vaut 11, 12, 21, 22 (FDST, scaling : 1 ou 2)
    ou "h", "v", "lowpass" (DSST, DNST).
    """
    kind: str
    cone: Union[int, str]
    j: int
    k: int

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "cone": self.cone, "j": self.j, "k": self.k}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BlockKey":
        return cls(kind=data["kind"], cone=data["cone"], j=int(data["j"]), k=int(data["k"]))

    def label(self) -> str:
        return f"{self.kind}_{self.cone}_j{self.j}_k{self.k}".replace("-", "m")


@dataclass
class ShearletCoefficients:
    """Conteneur indexé de sous-bandes (ordre d'insertion = ordre canonique)"""
    transform: str
    blocks: Dict[BlockKey, np.ndarray]
    params: Dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: BlockKey) -> np.ndarray:
        return self.blocks[key]

    def __iter__(self) -> Iterator[BlockKey]:
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def keys(self) -> List[BlockKey]:
        return list(self.blocks)

    def items(self):
        return self.blocks.items()

    @property
    def count(self) -> int:
        """Nombre total de coefficients"""
        return int(sum(block.size for block in self.blocks.values()))

    def shapes(self) -> Dict[BlockKey, Tuple[int, ...]]:
        return {key: block.shape for key, block in self.blocks.items()}

    def energy(self) -> float:
        """Σ |c|² sur tous les blocs"""
        return float(sum(np.vdot(block, block).real for block in self.blocks.values()))

    def norm(self) -> float:
        return math.sqrt(self.energy())

    def vdot(self, other: "ShearletCoefficients") -> complex:
        """⟨self, other⟩ = Σ self · conj(other)"""
        self._check_compatible(other)
        return complex(sum(np.vdot(other.blocks[key], block) for key, block in self.blocks.items()))

    def map(self, func) -> "ShearletCoefficients":
        """Applique func à chaque bloc"""
        return ShearletCoefficients(self.transform, {k: func(b) for k, b in self.blocks.items()}, dict(self.params))

    def zeros_like(self) -> "ShearletCoefficients":
        return self.map(np.zeros_like)

    def __sub__(self, other: "ShearletCoefficients") -> "ShearletCoefficients":
        self._check_compatible(other)
        return ShearletCoefficients(
            self.transform, {k: b - other.blocks[k] for k, b in self.blocks.items()}, dict(self.params)
        )

    def to_vector(self) -> np.ndarray:
        """Concatène tous les blocs en un vecteur (ordre canonique)"""
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([block.ravel() for block in self.blocks.values()])

    def from_vector(self, vector: np.ndarray) -> "ShearletCoefficients":
        """Reconstruit un conteneur de même structure à partir d'un vecteur"""
        blocks, offset = {}, 0
        for key, block in self.blocks.items():
            blocks[key] = np.asarray(vector[offset:offset + block.size]).reshape(block.shape)
            offset += block.size
        if offset != len(vector):
            raise ValueError(f"Vecteur de taille {len(vector)} incompatible ({offset} coefficients attendus)")
        return ShearletCoefficients(self.transform, blocks, dict(self.params))

    def _check_compatible(self, other: "ShearletCoefficients") -> None:
        if self.shapes() != other.shapes():
            raise ValueError("Conteneurs de coefficients de structures différentes")


@dataclass
class CGResult:
    """Résultat du gradient conjugué"""
    x: np.ndarray
    converged: bool
    iterations: int
    residuals: List[float]
    error_message: Optional[str] = None

    @property
    def relative_residual(self) -> float:
        return self.residuals[-1] if self.residuals else 0.0

    @classmethod
    def trivial(cls, b: np.ndarray) -> "CGResult":
        """Second membre nul : solution nulle, convergence immédiate"""
        return cls(x=np.zeros_like(b), converged=True, iterations=0, residuals=[0.0])


@dataclass
class ConditionEstimate:
    """Estimation des valeurs propres extrêmes d'un opérateur SPD"""
    lambda_max: float
    lambda_min: float
    iterations_max: int
    iterations_min: int
    converged: bool

    @property
    def cond(self) -> float:
        if self.lambda_min <= 0:
            return float("inf")
        return max(1.0, self.lambda_max / self.lambda_min)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda_max": self.lambda_max,
            "lambda_min": self.lambda_min,
            "cond": self.cond,
            "converged": self.converged,
        }


def encode_value(value: Any) -> Any:
    """Valeur JSON : -inf devient la sentinelle "-inf", les types numpy deviennent natifs"""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): encode_value(v) for k, v in value.items()}
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == float("-inf"):
            return NEG_INF_SENTINEL
        if not math.isfinite(value):
            raise ValueError(f"Valeur non finie dans un rapport: {value}")
        return value
    return value


def decode_value(value: Any) -> Any:
    if value == NEG_INF_SENTINEL:
        return float("-inf")
    if isinstance(value, list):
        return [decode_value(v) for v in value]
    if isinstance(value, dict):
        return {k: decode_value(v) for k, v in value.items()}
    return value


@dataclass
class MeasureReport:
    """Rapport d'une mesure quantitative"""
    measure: str
    transform: str
    parameters: Dict[str, Any]
    values: Dict[str, Any] = field(default_factory=dict)
    curves: Dict[str, List[Any]] = field(default_factory=dict)
    reference: Dict[str, Any] = field(default_factory=dict)
    applicable: bool = True
    degenerate: bool = False
    timing_dependent: bool = False
    wall_clock: float = 0.0
    created_at: str = field(default_factory=lambda: datetime.now().isoformat())
    notes: List[str] = field(default_factory=list)

    @classmethod
    def not_applicable(cls, measure: str, transform: str, parameters: Dict[str, Any], reason: str) -> "MeasureReport":
        """Factory method pour une mesure sans objet pour cette transformée"""
        return cls(measure=measure, transform=transform, parameters=parameters, applicable=False, notes=[reason])

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        """Convertit en dictionnaire JSON (sans les champs d'horloge si include_timing=False)"""
        # Les valeurs chronométrées ne participent pas aux comparaisons de reproductibilité
        volatile = self.timing_dependent and not include_timing
        data = {
            "measure": self.measure,
            "transform": self.transform,
            "parameters": encode_value(self.parameters),
            "values": {} if volatile else encode_value(self.values),
            "curves": {} if volatile else encode_value(self.curves),
            "reference": encode_value(self.reference),
            "applicable": self.applicable,
            "degenerate": self.degenerate,
            "timing_dependent": self.timing_dependent,
            "notes": list(self.notes),
        }
        if include_timing:
            data["timing"] = {
                "wall_clock_seconds": self.wall_clock,
                "created_at": self.created_at,
                "platform": platform.platform(),
            }
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MeasureReport":
        timing = data.get("timing", {})
        return cls(
            measure=data["measure"],
            transform=data["transform"],
            parameters=decode_value(data.get("parameters", {})),
            values=decode_value(data.get("values", {})),
            curves=decode_value(data.get("curves", {})),
            reference=decode_value(data.get("reference", {})),
            applicable=data.get("applicable", True),
            degenerate=data.get("degenerate", False),
            timing_dependent=data.get("timing_dependent", False),
            wall_clock=timing.get("wall_clock_seconds", 0.0),
            created_at=timing.get("created_at", ""),
            notes=list(data.get("notes", [])),
        )
