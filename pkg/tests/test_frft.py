"""
Noyaux 1D : frFT non repliée, TFD non repliée, zéro-padding et adjoints
"""

import numpy as np
import pytest

from shearlab.frft import dft_unaliased, frft, frft_adjoint, pad, pad_adjoint
from shearlab.utils import best_of


def direct_frft(c, alpha):
    half = (len(c) - 1) // 2
    j = np.arange(-half, half + 1)
    return np.exp(-2j * np.pi * alpha * np.outer(j, j)) @ c


@pytest.mark.parametrize("length", [9, 17, 33])
def test_matches_direct_summation(length, rng):
    for _ in range(10):
        c = rng.complex_normal(length)
        alpha = float(rng.uniform(1)[0]) - 0.5
        expected = direct_frft(c, alpha)
        assert np.linalg.norm(frft(c, alpha) - expected) <= 1e-12 * np.linalg.norm(expected)


def test_unaliased_dft():
    c = np.arange(9, dtype=complex)
    np.testing.assert_allclose(frft(c, 1 / 9), dft_unaliased(c), atol=1e-12)
    np.testing.assert_allclose(dft_unaliased(c), direct_frft(c, 1 / 9), atol=1e-10)


def test_zero_alpha_broadcasts_sum(rng):
    c = rng.complex_normal(9)
    np.testing.assert_allclose(frft(c, 0.0), np.full(9, c.sum()), atol=1e-12)
    np.testing.assert_allclose(frft_adjoint(c, 0.0), np.full(9, c.sum()), atol=1e-12)


def test_adjoint_dot_test(rng):
    x, y = rng.complex_normal(9), rng.complex_normal(9)
    lhs = np.vdot(y, frft(x, 0.2))
    rhs = np.vdot(frft_adjoint(y, 0.2), x)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_adjoint_is_negated_alpha(rng):
    c = rng.complex_normal(17)
    np.testing.assert_allclose(frft_adjoint(c, 0.13), frft(c, -0.13), atol=1e-12)


def test_one_alpha_per_row(rng):
    rows = rng.complex_normal((3, 9))
    alphas = np.array([0.1, -0.07, 0.3])
    out = frft(rows, alphas, axis=1)
    for index in range(3):
        np.testing.assert_allclose(out[index], direct_frft(rows[index], alphas[index]), atol=1e-10)


def test_transform_along_axis_zero(rng):
    block = rng.complex_normal((9, 4))
    out = frft(block, 0.05, axis=0)
    np.testing.assert_allclose(out[:, 2], direct_frft(block[:, 2], 0.05), atol=1e-10)


def test_even_length_rejected():
    with pytest.raises(ValueError):
        frft(np.ones(8), 0.1)
    with pytest.raises(ValueError):
        frft(np.ones((2, 9)), np.ones(3))


class TestPad:
    def test_centered_copy(self):
        out = pad(np.array([1.0, 2.0, 3.0, 4.0]), 9)
        np.testing.assert_array_equal(out, [0, 0, 1, 2, 3, 4, 0, 0, 0])

    def test_restriction_of_extension(self, rng):
        c = rng.complex_normal(8)
        np.testing.assert_array_equal(pad_adjoint(pad(c, 17), 8), c)

    def test_adjoint_dot_test(self, rng):
        x, y = rng.complex_normal(8), rng.complex_normal(13)
        assert np.vdot(y, pad(x, 13)) == pytest.approx(np.vdot(pad_adjoint(y, 8), x), rel=1e-12)

    @pytest.mark.parametrize("m", [4, 3, 10])
    def test_rejects_small_or_even_target(self, m):
        with pytest.raises(ValueError):
            pad(np.ones(4), m)


@pytest.mark.slow
def test_runtime_grows_like_n_log_n(rng):
    lengths = [2 ** k + 1 for k in range(10, 17)]
    seconds = []
    for length in lengths:
        rows = rng.complex_normal((16, length))
        seconds.append(best_of(lambda: frft(rows, 0.3, axis=1), repeats=5))
    slope = np.polyfit(np.log(lengths), np.log(seconds), 1)[0]
    assert slope <= 1.25
