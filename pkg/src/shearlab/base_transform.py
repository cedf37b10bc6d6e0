"""
Classe de base abstraite pour les transformées en shearlets
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .schemas import BlockKey, CGResult, ShearletCoefficients
from .utils import Logger


class BaseTransform(ABC):
    """Interface commune des transformées FDST, DSST et DNST"""

    name = "base"
    # Transformée définie sur la grille pseudo-polaire (mesures M_alg, M_isom, M_shear)
    pseudo_polar = False
    # Identifiants des cônes à fréquence ξ₁ dominante ("h") et ξ₂ dominante ("v")
    horizontal_cones: Tuple = ("h",)
    vertical_cones: Tuple = ("v",)
    # Un contour de normale (1, s) est vu par le cisaillement k ≈ shear_sign · shear_count(j) · s
    shear_sign = -1

    def __init__(self, size: int, cg_tol: float = 1e-6, cg_maxiter: int = 500):
        """
        Initialise la transformée

        Args:
            size: côté N des images traitées
            cg_tol: tolérance relative du gradient conjugué
            cg_maxiter: nombre maximal d'itérations
        """
        self.size = int(size)
        self.cg_tol = cg_tol
        self.cg_maxiter = cg_maxiter

    @abstractmethod
    def forward(self, image: np.ndarray) -> ShearletCoefficients:
        """Analyse - À implémenter par les sous-classes"""

    @abstractmethod
    def adjoint(self, coefficients: ShearletCoefficients) -> np.ndarray:
        """Adjoint exact de forward - À implémenter par les sous-classes"""

    @abstractmethod
    def plan(self) -> Dict[BlockKey, Tuple[int, ...]]:
        """Formes des blocs sans calcul (dry run)"""

    def parameters(self) -> Dict[str, Any]:
        """Paramètres recopiés dans les rapports et manifestes"""
        return {"N": self.size}

    def check_image(self, image: np.ndarray) -> np.ndarray:
        image = np.asarray(image)
        if image.shape != (self.size, self.size):
            raise ValueError(f"{self.name}: image de forme {image.shape}, attendu ({self.size}, {self.size})")
        return image

    def frame_operator(self, image: np.ndarray) -> np.ndarray:
        """adjoint ∘ forward"""
        return self.adjoint(self.forward(image))

    def reconstruct(self, coefficients: ShearletCoefficients, tol: Optional[float] = None) -> CGResult:
        """Moindres carrés par gradient conjugué sur l'opérateur de frame"""
        from .fdst import cg_solve

        rhs = self.adjoint(coefficients)
        result = cg_solve(self.frame_operator, rhs, tol=tol or self.cg_tol, maxiter=self.cg_maxiter)
        if not result.converged:
            Logger.warning(
                f"{self.name}: gradient conjugué non convergé après {result.iterations} itérations "
                f"(résidu {result.relative_residual:.3e})"
            )
        return result

    def inverse(self, coefficients: ShearletCoefficients, tol: Optional[float] = None) -> np.ndarray:
        return self.reconstruct(coefficients, tol).x

    def coefficient_count(self) -> int:
        return int(sum(int(np.prod(shape)) for shape in self.plan().values()))

    def redundancy(self) -> float:
        return self.coefficient_count() / float(self.size * self.size)

    # ------------------------------------------------------------ géométrie des sous-bandes

    def directional_scales(self) -> List[int]:
        """Échelles j ≥ 0 portant des blocs directionnels"""
        return sorted({key.j for key in self.plan() if key.kind == "shearlet" and key.j >= 0})

    def shear_count(self, j: int) -> int:
        """Borne des cisaillements à l'échelle j (|k| ≤ shear_count)"""
        shears = [key.k for key in self.plan() if key.kind == "shearlet" and key.j == j]
        if not shears:
            raise ValueError(f"{self.name}: aucune sous-bande directionnelle à l'échelle {j}")
        return max(shears)

    def aligned_shear(self, j: int, slope: float) -> int:
        """Cisaillement dont les éléments suivent un contour de pente `slope`"""
        bound = self.shear_count(j)
        k = int(np.round(self.shear_sign * bound * slope))
        return int(np.clip(k, -bound, bound))

    def cone_keys(self, j: int, k: int, vertical: bool = False) -> List[BlockKey]:
        cones = self.vertical_cones if vertical else self.horizontal_cones
        return [BlockKey("shearlet", cone, j, k) for cone in cones]

    def atom(self, j: int, k: int = 0, vertical: bool = True) -> np.ndarray:
        """
        Élément d'analyse (j, k) de translation nulle, pic ramené à l'indice (N/2, N/2) (base 0)

        Obtenu par l'adjoint d'un Dirac placé à l'indice (0, 0) des blocs du cône choisi.
        """
        plan = self.plan()
        keys = self.cone_keys(j, k, vertical)
        missing = [key for key in keys if key not in plan]
        if missing:
            raise ValueError(f"{self.name}: blocs absents {missing}")
        blocks = {key: np.zeros(shape, dtype=complex) for key, shape in plan.items()}
        for key in keys:
            blocks[key][0, 0] = 1.0
        image = np.real(self.adjoint(ShearletCoefficients(self.name, blocks, self.parameters())))
        peak = np.unravel_index(int(np.argmax(np.abs(image))), image.shape)
        center = self.size // 2
        return np.roll(image, (center - peak[0], center - peak[1]), axis=(0, 1))


class IdentityTransform(BaseTransform):
    """Transformée identité (un seul bloc égal à l'image) : référence des mesures"""

    name = "identity"
    pseudo_polar = True

    _KEY = BlockKey("scaling", 1, 0, 0)

    def forward(self, image: np.ndarray) -> ShearletCoefficients:
        image = self.check_image(image)
        return ShearletCoefficients(self.name, {self._KEY: np.array(image, dtype=complex)}, self.parameters())

    def adjoint(self, coefficients: ShearletCoefficients) -> np.ndarray:
        return np.array(coefficients[self._KEY])

    def plan(self) -> Dict[BlockKey, Tuple[int, ...]]:
        return {self._KEY: (self.size, self.size)}

    def normal_operator(self, image: np.ndarray) -> np.ndarray:
        return np.array(image, dtype=complex)

    def frame_roundtrip(self, data: np.ndarray) -> np.ndarray:
        """W*W sur le domaine fréquentiel : identité"""
        return np.array(data, copy=True)

    def random_frequency_data(self, rng) -> np.ndarray:
        return rng.complex_normal((self.size, self.size))

    def frequency_norm(self, data: np.ndarray) -> float:
        return float(np.linalg.norm(data))

    def estimate_condition(self, **kwargs):
        from .fdst import estimate_condition

        return estimate_condition(self.normal_operator, (self.size, self.size), **kwargs)
