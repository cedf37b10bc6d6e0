"""
FDST : analyse, adjoint, opérateur de frame, inverse par gradient conjugué
"""

import numpy as np
import pytest

from shearlab.fdst import FDST, cg_solve, estimate_condition, fdst_forward, fdst_inverse
from shearlab.ppgrid import build_grid
from shearlab.weights import weighted_gram

from conftest import relative


@pytest.fixture(scope="module")
def fdst():
    return FDST.build(16, oversampling=4, choice=1, cg_tol=1e-8)


def test_plan_matches_forward(fdst, rng):
    coefficients = fdst.forward(rng.normal((16, 16)))
    assert coefficients.shapes() == fdst.plan()
    assert coefficients.count == fdst.coefficient_count()
    assert coefficients.params["N"] == 16


def test_adjoint_dot_test(fdst, rng):
    x = rng.normal((16, 16))
    cx = fdst.forward(x)
    cy = cx.from_vector(rng.complex_normal(cx.count))
    lhs = np.vdot(cy.to_vector(), cx.to_vector())
    rhs = np.vdot(fdst.adjoint(cy), x)
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


def test_frame_operator_is_weighted_gram(fdst, rng):
    x = rng.normal((16, 16))
    np.testing.assert_allclose(fdst.adjoint(fdst.forward(x)), weighted_gram(x, fdst.weights), atol=1e-10)


def test_frame_operator_is_positive(fdst, rng):
    for _ in range(5):
        x = rng.normal((16, 16))
        value = np.vdot(x, fdst.frame_operator(x))
        assert abs(value.imag) <= 1e-10 * abs(value.real)
        assert value.real > 0


def test_algebraic_exactness(fdst, rng):
    for _ in range(3):
        data = fdst.random_frequency_data(rng)
        error = fdst.frequency_norm(fdst.frame_roundtrip(data) - data) / fdst.frequency_norm(data)
        assert error <= 1e-12


def test_inverse_recovers_image(fdst, rng):
    image = rng.uniform((16, 16))
    result = fdst.reconstruct(fdst.forward(image))
    assert result.converged
    assert relative(result.x, image) <= 1e-5


def test_functional_entry_points(fdst, rng):
    image = rng.uniform((16, 16))
    coefficients = fdst_forward(image, fdst.grid, fdst.weights)
    result = fdst_inverse(coefficients, fdst.grid, fdst.weights, tol=1e-8)
    assert relative(result.x, image) <= 1e-5


def test_weights_for_other_grid_rejected(fdst):
    with pytest.raises(ValueError):
        FDST(build_grid(8, 4), fdst.weights)


def test_orientation_helpers(fdst):
    assert fdst.directional_scales() == [0, 1, 2]
    assert fdst.shear_count(2) == 4
    assert fdst.aligned_shear(2, 0.5) == -2
    assert fdst.aligned_shear(1, 1.0) == -2
    with pytest.raises(ValueError):
        fdst.shear_count(5)


def test_atom_is_centered(fdst):
    atom = fdst.atom(1)
    assert atom.shape == (16, 16)
    assert np.abs(atom[8, 8]) == np.abs(atom).max()


class TestConjugateGradient:
    def test_small_spd_system(self):
        A = np.array([[4.0, 1, 0, 0], [1, 3, 1, 0], [0, 1, 5, 2], [0, 0, 2, 6]])
        b = np.array([1.0, 2, 3, 4])
        result = cg_solve(lambda x: A @ x, b, tol=1e-12, maxiter=50)
        assert result.converged
        np.testing.assert_allclose(result.x, np.linalg.solve(A, b), atol=1e-10)

    def test_zero_right_hand_side(self):
        result = cg_solve(lambda x: x, np.zeros(3))
        assert result.converged and result.iterations == 0

    def test_reports_non_convergence(self):
        A = np.diag(np.logspace(0, 6, 40))
        result = cg_solve(lambda x: A @ x, np.ones(40), tol=1e-14, maxiter=3)
        assert not result.converged
        assert result.iterations == 3
        assert result.error_message

    def test_condition_of_diagonal_operator(self):
        scale = np.linspace(1.0, 2.0, 16).reshape(4, 4)
        estimate = estimate_condition(lambda x: scale * x, (4, 4), tol=1e-10, maxiter=2000)
        assert estimate.cond == pytest.approx(2.0, rel=1e-3)


@pytest.mark.slow
def test_reference_isometry_and_tightness(cache_dir):
    from shearlab.measures import measure_isometry, measure_tightness

    transform = FDST.build(512, oversampling=8, choice=1, cache_dir=cache_dir, cg_tol=1e-8)
    isometry = measure_isometry(transform, cg_tol=1e-8)
    tightness = measure_tightness(transform)
    assert isometry.values["M_isom1"] <= 5e-3
    assert isometry.values["M_isom3"] <= 1e-5
    assert tightness.values["M_tight1"] <= 5e-3
    assert tightness.values["M_tight2"] <= 1e-5
