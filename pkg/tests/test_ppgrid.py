"""
Grille pseudo-polaire : coordonnées, classification, multiplicités, produit scalaire ensembliste
"""

from fractions import Fraction

import numpy as np
import pytest

from shearlab.ppgrid import (
    PPArray,
    PointKind,
    build_grid,
    classify_point,
    multiplicity_factor,
    set_inner_product,
)


def _all_indices(grid):
    for sector in (1, 2):
        for n in grid.n_values:
            for l in grid.l_values:
                yield sector, int(n), int(l)


class TestBuildGrid:
    def test_sector_shape(self):
        grid = build_grid(4, 4)
        assert grid.shape == (17, 5)

    def test_default_m0(self):
        grid = build_grid(8, 2)
        assert grid.m0 == Fraction(2 * (2 * 8 + 1), 2)
        assert grid.is_default_m0

    def test_coordinate_substitution(self):
        grid = build_grid(4, 2)
        assert grid.coordinate(1, 1, 2) == (Fraction(-1), Fraction(1))

    def test_center_repeated_per_sector(self):
        grid = build_grid(4, 2)
        for sector in (1, 2):
            omega1, omega2 = grid.coordinates(sector)
            assert int(np.sum((omega1 == 0) & (omega2 == 0))) == grid.N + 1

    @pytest.mark.parametrize("N, R, m0", [(6, 2, None), (8, 3, None), (8, 2, 4), (1, 2, None)])
    def test_rejects_invalid_parameters(self, N, R, m0):
        with pytest.raises(ValueError):
            build_grid(N, R, m0)

    def test_points_on_slope_lines(self):
        grid = build_grid(8, 4)
        for sector, n, l in _all_indices(grid):
            omega1, omega2 = grid.coordinate(sector, n, l)
            if sector == 1:
                assert omega1 == -Fraction(2 * l, grid.N) * omega2
            else:
                assert omega2 == -Fraction(2 * l, grid.N) * omega1


class TestClassification:
    def test_kinds(self):
        grid = build_grid(8, 2)
        assert classify_point(grid, 1, 0, 3) is PointKind.CENTER
        assert classify_point(grid, 1, 3, grid.N // 2) is PointKind.SEAM
        assert classify_point(grid, 1, 3, 0) is PointKind.INTERIOR

    def test_out_of_range(self):
        grid = build_grid(8, 2)
        with pytest.raises(ValueError):
            classify_point(grid, 1, grid.n_max + 1, 0)
        with pytest.raises(ValueError):
            classify_point(grid, 3, 0, 0)

    def test_symmetries(self):
        grid = build_grid(8, 2)
        for n in range(1, grid.n_max + 1):
            for l in (-grid.l_max, grid.l_max):
                assert classify_point(grid, 1, n, l) == classify_point(grid, 1, -n, l)
        for l in grid.l_values:
            assert classify_point(grid, 1, 0, int(l)) == classify_point(grid, 2, 0, int(l))

    def test_kind_codes_match(self):
        grid = build_grid(4, 2)
        codes = {PointKind.CENTER: 0, PointKind.SEAM: 1, PointKind.INTERIOR: 2}
        kinds = grid.kinds()
        for sector, n, l in _all_indices(grid):
            assert kinds[grid.n_index(n), grid.l_index(l)] == codes[classify_point(grid, sector, n, l)]


class TestMultiplicity:
    def test_factors(self):
        grid = build_grid(4, 2)
        assert multiplicity_factor(grid, 1, 1, 0) == 1
        assert multiplicity_factor(grid, 2, 1, 2) == Fraction(1, 2)
        assert multiplicity_factor(grid, 1, 0, 1) == Fraction(1, 10)

    def test_all_ones_set_sum(self):
        grid = build_grid(4, 2)
        ones = PPArray(grid, np.ones(grid.shape, complex), np.ones(grid.shape, complex))
        assert set_inner_product(ones, ones) == pytest.approx(65)

    @pytest.mark.parametrize("N", [4, 8])
    @pytest.mark.parametrize("R", [2, 4])
    def test_factors_count_distinct_points(self, N, R):
        grid = build_grid(N, R)
        points = {grid.coordinate(sector, n, l) for sector, n, l in _all_indices(grid)}
        total = sum(multiplicity_factor(grid, sector, n, l) for sector, n, l in _all_indices(grid))
        assert len(points) == grid.set_cardinality() == total
        assert 2 * grid.multiplicity().sum() == pytest.approx(len(points))


class TestPPArray:
    def test_random_is_consistent(self, small_grid, rng):
        assert PPArray.random(small_grid, rng).is_consistent()
        assert not PPArray.random(small_grid, rng, consistent=False).is_consistent()

    def test_zero_inner_product(self, small_grid, rng):
        X = PPArray.random(small_grid, rng)
        assert set_inner_product(X, small_grid.zeros()) == 0

    def test_conjugate_symmetry(self, small_grid, rng):
        X, Y = PPArray.random(small_grid, rng), PPArray.random(small_grid, rng)
        assert set_inner_product(X, Y) == pytest.approx(np.conj(set_inner_product(Y, X)), rel=1e-12)

    def test_grid_mismatch(self, small_grid, rng):
        other = build_grid(8, 2)
        with pytest.raises(ValueError):
            set_inner_product(PPArray.random(small_grid, rng), PPArray.random(other, rng))

    def test_shape_checked(self, small_grid):
        with pytest.raises(ValueError):
            PPArray(small_grid, np.zeros((3, 3)), np.zeros(small_grid.shape))
