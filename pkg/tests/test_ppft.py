"""
PPFT rapide contre la somme directe, adjoint exact
"""

import time

import numpy as np
import pytest

from shearlab.ppft import ppft_adjoint, ppft_direct, ppft_forward
from shearlab.ppgrid import PPArray, build_grid, stored_inner_product


def _max_relative(fast: PPArray, slow: PPArray) -> float:
    scale = max(np.abs(slow.sector1).max(), np.abs(slow.sector2).max())
    return max(np.abs(fast.sector1 - slow.sector1).max(), np.abs(fast.sector2 - slow.sector2).max()) / scale


@pytest.mark.parametrize("N", [4, 8])
@pytest.mark.parametrize("R", [2, 4])
def test_fast_matches_direct_sum(N, R, rng):
    grid = build_grid(N, R)
    image = rng.normal((N, N))
    start = time.perf_counter()
    fast = ppft_forward(image, grid)
    assert time.perf_counter() - start < 1.0
    assert _max_relative(fast, ppft_direct(image, grid)) <= 1e-10


def test_direct_sum_at_one_point(rng):
    grid = build_grid(4, 2)
    image = rng.normal((4, 4))
    omega1, omega2 = grid.coordinate(2, 3, -1)
    expected = sum(
        image[u + 2, v + 2] * np.exp(-2j * np.pi * (u * float(omega1) + v * float(omega2)) / float(grid.m0))
        for u in range(-2, 2) for v in range(-2, 2)
    )
    value = ppft_direct(image, grid).sector2[grid.n_index(3), grid.l_index(-1)]
    assert value == pytest.approx(expected, rel=1e-12)


def test_non_default_m0(rng):
    grid = build_grid(8, 2, m0=11)
    assert not grid.is_default_m0
    image = rng.normal((8, 8))
    assert _max_relative(ppft_forward(image, grid), ppft_direct(image, grid)) <= 1e-10


def test_output_is_consistent(rng):
    grid = build_grid(8, 4)
    data = ppft_forward(rng.normal((8, 8)), grid)
    assert data.is_consistent(atol=1e-10 * np.abs(data.sector1).max())


def test_adjoint_dot_test(rng):
    grid = build_grid(8, 4)
    x = rng.complex_normal((8, 8))
    Y = PPArray.random(grid, rng, consistent=False)
    lhs = stored_inner_product(ppft_forward(x, grid), Y)
    rhs = np.vdot(ppft_adjoint(Y), x)
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


def test_adjoint_matches_dense_matrix():
    grid = build_grid(4, 2)
    columns = []
    for index in range(16):
        basis = np.zeros(16)
        basis[index] = 1.0
        data = ppft_direct(basis.reshape(4, 4), grid)
        columns.append(np.concatenate([data.sector1.ravel(), data.sector2.ravel()]))
    matrix = np.stack(columns, axis=1)
    ones = PPArray(grid, np.ones(grid.shape, complex), np.ones(grid.shape, complex))
    expected = (matrix.conj().T @ np.ones(matrix.shape[0])).reshape(4, 4)
    np.testing.assert_allclose(ppft_adjoint(ones), expected, atol=1e-10)


def test_rejects_wrong_image_shape():
    with pytest.raises(ValueError):
        ppft_forward(np.zeros((4, 8)), build_grid(8, 2))
