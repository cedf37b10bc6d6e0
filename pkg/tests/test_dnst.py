"""
DNST : filtre en éventail, filtres de shearlets, convolutions, filtres duaux
"""

import numpy as np
import pytest

from shearlab.dnst import (
    DNST,
    LOWPASS_KEY,
    DnstFilterSet,
    DnstParams,
    block_keys,
    build_dnst_filters,
    build_fan_filter,
    compute_dual_filters,
    dnst_inverse,
    fan_dilation,
    filters_cache_path,
)
from shearlab.dsst import circular_filter2d
from shearlab.errors import DualFilterError
from shearlab.schemas import BlockKey
from shearlab.utils import SplitMix64

from conftest import relative

PARAMS = DnstParams(J=2, fan_size=15, fan_transition=0.2)


@pytest.fixture(scope="module")
def dnst():
    return DNST(32, PARAMS)


class TestFanFilter:
    def test_passes_horizontal_cone(self):
        fan = build_fan_filter(31, 0.1)
        assert abs(fan.response(0.3, 0.0)) == pytest.approx(1.0, abs=0.1)
        assert abs(fan.response(0.0, 0.3)) == pytest.approx(0.0, abs=0.1)

    def test_quadrant_symmetry(self):
        taps = build_fan_filter(15, 0.2).taps
        np.testing.assert_allclose(taps, taps[::-1])
        np.testing.assert_allclose(taps, taps[:, ::-1])

    @pytest.mark.parametrize("size, transition", [(13, 0.2), (16, 0.2), (15, 0.6), (15, 0.05)])
    def test_rejects_invalid_parameters(self, size, transition):
        with pytest.raises(ValueError):
            build_fan_filter(size, transition)

    def test_dilation(self):
        fan = build_fan_filter(15, 0.2)
        dilated = fan.dilated(2)
        assert dilated.shape == (15, 29)
        np.testing.assert_array_equal(dilated[:, ::2], fan.taps)

    @pytest.mark.parametrize("factor, size", [(2, 64), (4, 16)])
    def test_dilated_response_on_the_torus(self, factor, size):
        # P(ξ₁, factor·ξ₂) aux fréquences de la TFD, y compris quand l'éventail dilaté est replié
        fan = build_fan_filter(15, 0.2)
        dilated = fan.dilated(factor)
        impulse = np.zeros((size, size))
        impulse[0, 0] = 1.0
        kernel = circular_filter2d(impulse, dilated, fan.origin(dilated))
        xi = np.fft.fftfreq(size)
        expected = fan.response(xi[:, None], factor * xi[None, :])
        np.testing.assert_allclose(np.fft.fft2(kernel), expected, atol=1e-10)

    def test_dilation_factor_per_scale(self):
        assert [fan_dilation(j) for j in range(6)] == [1, 2, 2, 4, 4, 8]

    def test_plot_response(self, tmp_path):
        path = build_fan_filter(15, 0.2).plot_response(tmp_path / "fan.png", resolution=32)
        assert path.exists()


class TestFilters:
    def test_block_order(self):
        keys = block_keys(2)
        assert keys[0] == BlockKey("shearlet", "h", 0, -1)
        assert keys[-1] == LOWPASS_KEY
        assert len(keys) == 2 * (3 + 5) + 1

    def test_normalization_fits_unity(self, dnst):
        denominator = dnst.filters.denominator
        assert np.mean(denominator) == pytest.approx(1.0, rel=0.5)
        assert denominator.min() > 0

    def test_cache(self, cache_dir):
        params = DnstParams(J=2, fan_size=15, fan_transition=0.2, cache_dir=cache_dir)
        first = build_dnst_filters(32, params)
        assert filters_cache_path(params, 32).exists()
        second = build_dnst_filters(32, params)
        np.testing.assert_array_equal(first.taps, second.taps)
        assert second.keys == first.keys

    def test_fan_wider_than_image_is_wrapped(self):
        filters = build_dnst_filters(16, DnstParams(J=2, fan_size=15, fan_transition=0.2))
        assert filters.taps.shape == (17, 16, 16)
        assert np.all(np.isfinite(filters.taps))

    def test_default_parameters_at_64(self, rng):
        transform = DNST(64)
        coefficients = transform.forward(rng.normal((64, 64)))
        assert coefficients.shapes() == transform.plan()
        assert len(coefficients) == len(block_keys(4))

    def test_vanishing_denominator(self):
        taps = np.ones((1, 8, 8)) / 64.0
        with pytest.raises(DualFilterError) as error:
            compute_dual_filters(DnstFilterSet(size=8, keys=[LOWPASS_KEY], taps=taps))
        assert error.value.frequency is not None


class TestTransform:
    def test_undecimated_shapes(self, dnst, rng):
        coefficients = dnst.forward(rng.normal((32, 32)))
        assert all(block.shape == (32, 32) for block in coefficients.blocks.values())
        assert coefficients.shapes() == dnst.plan()

    def test_band_matches_dense_correlation(self, dnst, rng):
        image = rng.normal((32, 32))
        key = BlockKey("shearlet", "h", 1, 1)
        taps = dnst.filters.taps[dnst.filters.index(key)]
        expected = np.array([[np.sum(np.roll(image, (-n1, -n2), axis=(0, 1)) * taps) for n2 in range(32)]
                             for n1 in range(32)])
        np.testing.assert_allclose(dnst.forward(image)[key], expected, atol=1e-10)

    def test_adjoint_dot_test(self, dnst, rng):
        x = rng.normal((32, 32))
        cx = dnst.forward(x)
        cy = cx.from_vector(rng.normal(cx.count))
        lhs = np.vdot(cy.to_vector(), cx.to_vector())
        assert lhs == pytest.approx(np.vdot(dnst.adjoint(cy), x), rel=1e-10)

    def test_dual_reconstruction(self, dnst, rng):
        image = rng.uniform((32, 32))
        coefficients = dnst.forward(image)
        assert relative(dnst.dual_inverse(coefficients), image) <= 1e-12
        result = dnst.reconstruct(coefficients)
        assert result.converged and result.iterations == 0
        assert relative(dnst_inverse(coefficients, dnst.filters, PARAMS), image) <= 1e-12

    def test_shift_covariance(self, dnst, rng):
        image = rng.normal((32, 32))
        reference = dnst.forward(image)
        shifts = SplitMix64(7).next_uint64(20) % 32
        for s1, s2 in shifts.reshape(10, 2).astype(int):
            moved = dnst.forward(np.roll(image, (s1, s2), axis=(0, 1)))
            for key in reference:
                np.testing.assert_allclose(moved[key], np.roll(reference[key], (s1, s2), axis=(0, 1)), atol=1e-12)

    def test_decimated_variant(self, dnst, rng):
        decimated = DNST(32, DnstParams(J=2, fan_size=15, fan_transition=0.2, decimated=True), filters=dnst.filters)
        x = rng.normal((32, 32))
        cx = decimated.forward(x)
        assert cx.shapes() == decimated.plan()
        assert cx.count < dnst.coefficient_count()
        cy = cx.from_vector(rng.normal(cx.count))
        assert np.vdot(cy.to_vector(), cx.to_vector()) == pytest.approx(np.vdot(decimated.adjoint(cy), x), rel=1e-10)
        with pytest.raises(ValueError):
            decimated.dual_inverse(cx)
        result = decimated.reconstruct(cx)
        assert result.iterations > 0

    def test_filters_size_mismatch(self, dnst):
        with pytest.raises(ValueError):
            DNST(64, PARAMS, filters=dnst.filters)

    def test_shear_orientation(self, dnst):
        assert dnst.aligned_shear(1, 0.5) == 1
        assert dnst.cone_keys(1, 0, vertical=True) == [BlockKey("shearlet", "v", 1, 0)]


@pytest.mark.slow
def test_dual_reconstruction_at_full_size(rng):
    transform = DNST(256)
    image = rng.uniform((256, 256))
    assert relative(transform.dual_inverse(transform.forward(image)), image) <= 1e-12


@pytest.mark.slow
def test_adjoint_defect_at_full_size():
    from shearlab.measures import measure_tightness

    report = measure_tightness(DNST(512), count=2)
    assert 0.05 <= report.values["M_tight1"] <= 0.6
    assert report.values["M_tight2"] <= 1e-12
