"""
Transformée en shearlets numérique rapide (FDST) : W √w P, adjoint P* √w W*, inverse par gradient conjugué
"""

from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .base_transform import BaseTransform
from .ppft import ppft_adjoint, ppft_forward
from .ppgrid import PPArray, PseudoPolarGrid, build_grid, set_inner_product
from .schemas import BlockKey, CGResult, ConditionEstimate, ShearletCoefficients
from .utils import DEFAULT_SEED, Logger, SplitMix64, timer
from .weights import WeightFunction, apply_sqrt_weights, solve_weights, weighted_gram
from .windows import WindowSystem, build_window_system

Operator = Callable[[np.ndarray], np.ndarray]


def cg_solve(
    apply_A: Operator,
    b: np.ndarray,
    tol: float = 1e-6,
    maxiter: int = 500,
    x0: Optional[np.ndarray] = None,
) -> CGResult:
    """
    Gradient conjugué pour un opérateur hermitien défini positif

    Arrêt dès que ‖b − A x‖/‖b‖ ≤ tol. En cas de dépassement de maxiter, renvoie le
    meilleur itéré rencontré avec converged=False.

    Args:
        apply_A: opérateur x ↦ A x (tableaux de forme quelconque)
        b: second membre
        tol: tolérance relative sur le résidu
        maxiter: nombre maximal d'itérations
        x0: itéré initial (zéro par défaut)

    Returns:
        CGResult
    """
    b = np.asarray(b)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return CGResult.trivial(b)

    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.result_type(b, x0))
    r = b - apply_A(x) if x0 is not None else b.copy()
    p = r.copy()
    rs = float(np.vdot(r, r).real)
    residuals = [np.sqrt(rs) / b_norm]
    best_x, best_residual = x.copy(), residuals[0]
    if residuals[0] <= tol:
        return CGResult(x=x, converged=True, iterations=0, residuals=residuals)

    for iteration in range(1, maxiter + 1):
        Ap = apply_A(p)
        curvature = float(np.vdot(p, Ap).real)
        if curvature <= 0.0:
            return CGResult(x=best_x, converged=False, iterations=iteration, residuals=residuals,
                            error_message="Opérateur non défini positif (pᴴAp ≤ 0)")
        step = rs / curvature
        x = x + step * p
        r = r - step * Ap
        rs_new = float(np.vdot(r, r).real)
        residuals.append(np.sqrt(rs_new) / b_norm)
        if residuals[-1] < best_residual:
            best_x, best_residual = x.copy(), residuals[-1]
        if residuals[-1] <= tol:
            return CGResult(x=x, converged=True, iterations=iteration, residuals=residuals)
        p = r + (rs_new / rs) * p
        rs = rs_new

    return CGResult(x=best_x, converged=False, iterations=maxiter, residuals=residuals,
                    error_message=f"maxiter={maxiter} atteint")


@timer
def estimate_condition(
    apply_A: Operator,
    shape: Tuple[int, ...],
    tol: float = 1e-4,
    maxiter: int = 200,
    cg_tol: float = 1e-8,
    seed: int = DEFAULT_SEED,
) -> ConditionEstimate:
    """
    λ_max par puissance itérée, λ_min par puissance inverse (systèmes résolus par CG)

    Les deux itérations s'arrêtent quand le quotient de Rayleigh varie de moins de
    tol en relatif.
    """
    start = SplitMix64(seed).normal(shape)
    start /= np.linalg.norm(start)

    def rayleigh_iteration(apply):
        x, value, converged = start.copy(), 0.0, False
        for iteration in range(1, maxiter + 1):
            y = apply(x)
            new_value = float(np.vdot(x, y).real)
            norm = np.linalg.norm(y)
            if norm == 0.0:
                return 0.0, iteration, True
            x = y / norm
            if iteration > 1 and abs(new_value - value) <= tol * abs(new_value):
                return new_value, iteration, True
            value = new_value
        return value, maxiter, converged

    lambda_max, iterations_max, converged_max = rayleigh_iteration(apply_A)

    def apply_inverse(x):
        return cg_solve(apply_A, x, tol=cg_tol, maxiter=max(maxiter, 500)).x

    mu, iterations_min, converged_min = rayleigh_iteration(apply_inverse)
    lambda_min = 1.0 / mu if mu > 0 else 0.0
    estimate = ConditionEstimate(
        lambda_max=lambda_max,
        lambda_min=lambda_min,
        iterations_max=iterations_max,
        iterations_min=iterations_min,
        converged=converged_max and converged_min,
    )
    Logger.stats(f"λ_max={lambda_max:.4f}, λ_min={lambda_min:.4f}, cond={estimate.cond:.4f}")
    return estimate


class FDST(BaseTransform):
    """Pipeline complet de la transformée sur la grille pseudo-polaire"""

    name = "fdst"
    pseudo_polar = True
    horizontal_cones = (21, 22)
    vertical_cones = (11, 12)

    def __init__(self, grid: PseudoPolarGrid, weights: WeightFunction, cg_tol: float = 1e-6, cg_maxiter: int = 500):
        if weights.grid != grid:
            raise ValueError("FDST: poids calculés pour une autre grille")
        super().__init__(grid.N, cg_tol=cg_tol, cg_maxiter=cg_maxiter)
        self.grid = grid
        self.weights = weights
        self.system: WindowSystem = build_window_system(grid)

    @classmethod
    def build(cls, size: int, oversampling: int = 8, choice: int = 1, m0=None,
              cache_dir: Optional[str] = None, progress: bool = False, **kwargs) -> "FDST":
        """Construit grille, poids (cache éventuel) et système de fenêtres"""
        grid = build_grid(size, oversampling, m0)
        weights = solve_weights(grid, choice, cache_dir=cache_dir, progress=progress)
        return cls(grid, weights, **kwargs)

    def parameters(self) -> Dict:
        params = self.grid.to_dict()
        params["choice"] = self.weights.choice
        return params

    def forward(self, image: np.ndarray) -> ShearletCoefficients:
        image = self.check_image(image)
        data = apply_sqrt_weights(ppft_forward(image, self.grid), self.weights)
        coefficients = self.system.frame_analysis(data)
        coefficients.params = self.parameters()
        return coefficients

    def adjoint(self, coefficients: ShearletCoefficients) -> np.ndarray:
        data = apply_sqrt_weights(self.system.frame_synthesis(coefficients), self.weights)
        return ppft_adjoint(data, self.grid)

    def frame_operator(self, image: np.ndarray) -> np.ndarray:
        # frame_synthesis ∘ frame_analysis = Id au niveau stocké
        return self.normal_operator(image)

    def normal_operator(self, image: np.ndarray) -> np.ndarray:
        """P* w P"""
        return weighted_gram(image, self.weights)

    def estimate_condition(self, **kwargs) -> ConditionEstimate:
        return estimate_condition(self.normal_operator, (self.size, self.size), **kwargs)

    def plan(self) -> Dict[BlockKey, Tuple[int, ...]]:
        return self.system.plan()

    def random_frequency_data(self, rng: SplitMix64) -> PPArray:
        return PPArray.random(self.grid, rng, consistent=True)

    def frame_roundtrip(self, data: PPArray) -> PPArray:
        """W*W sur des données pseudo-polaires (niveau ensembliste)"""
        return self.system.synthesize(self.system.analyze(data))

    @staticmethod
    def frequency_norm(data: PPArray) -> float:
        return float(np.sqrt(max(set_inner_product(data, data).real, 0.0)))


def fdst_forward(image: np.ndarray, grid: PseudoPolarGrid, weights: WeightFunction) -> ShearletCoefficients:
    """analyze(√w · P I) ; le facteur de multiplicité est porté une seule fois par w_stored"""
    return FDST(grid, weights).forward(image)


def fdst_adjoint(coefficients: ShearletCoefficients, grid: PseudoPolarGrid, weights: WeightFunction) -> np.ndarray:
    return FDST(grid, weights).adjoint(coefficients)


def fdst_inverse(coefficients: ShearletCoefficients, grid: PseudoPolarGrid, weights: WeightFunction,
                 tol: float = 1e-6, maxiter: int = 500) -> CGResult:
    """Résout P* w P I = P* √w W* c par gradient conjugué"""
    return FDST(grid, weights, cg_tol=tol, cg_maxiter=maxiter).reconstruct(coefficients)
