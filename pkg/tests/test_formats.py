"""
Formats de fichiers : SHLM, PGM, SHPP et répertoires de coefficients
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from shearlab.errors import FormatError
from shearlab.formats import (
    MANIFEST_NAME,
    load_image,
    read_coefficients,
    read_manifest,
    read_matrix,
    read_pgm,
    read_pparray,
    save_image,
    write_coefficients,
    write_matrix,
    write_pgm,
    write_pparray,
)
from shearlab.ppgrid import PPArray, build_grid
from shearlab.schemas import BlockKey, ShearletCoefficients


class TestMatrix:
    def test_real_and_complex(self, tmp_path, rng):
        real = rng.normal((3, 5))
        complex_ = rng.complex_normal((4, 2))
        np.testing.assert_array_equal(read_matrix(write_matrix(tmp_path / "r.shlm", real)), real)
        back = read_matrix(write_matrix(tmp_path / "c.shlm", complex_))
        assert back.dtype == np.complex128
        np.testing.assert_array_equal(back, complex_)

    def test_header_layout(self, tmp_path):
        raw = write_matrix(tmp_path / "m.shlm", np.ones((2, 3))).read_bytes()
        assert raw[:4] == b"SHLM"
        assert int.from_bytes(raw[4:8], "little") == 1
        assert int.from_bytes(raw[8:12], "little") == 2
        assert int.from_bytes(raw[12:16], "little") == 3
        assert len(raw) == 17 + 6 * 8

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.shlm"
        path.write_bytes(b"XXXX" + bytes(13))
        with pytest.raises(FormatError):
            read_matrix(path)

    def test_newer_version(self, tmp_path):
        path = write_matrix(tmp_path / "m.shlm", np.ones((1, 1)))
        raw = bytearray(path.read_bytes())
        raw[4] = 2
        path.write_bytes(bytes(raw))
        with pytest.raises(FormatError, match="version"):
            read_matrix(path)

    def test_truncated(self, tmp_path):
        path = write_matrix(tmp_path / "m.shlm", np.ones((4, 4)))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(FormatError):
            read_matrix(path)

    def test_not_two_dimensional(self, tmp_path):
        with pytest.raises(ValueError):
            write_matrix(tmp_path / "v.shlm", np.ones(3))


class TestPgm:
    def test_eight_bit(self, tmp_path):
        image = np.arange(12).reshape(3, 4) / 11.0
        back = read_pgm(write_pgm(tmp_path / "a.pgm", image))
        assert back.shape == (3, 4)
        np.testing.assert_allclose(back, image, atol=0.5 / 255)

    def test_sixteen_bit(self, tmp_path):
        image = np.linspace(0, 1, 16).reshape(4, 4)
        back = read_pgm(write_pgm(tmp_path / "b.pgm", image, maxval=65535))
        np.testing.assert_allclose(back, image, atol=0.5 / 65535)

    def test_comments_in_header(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# commentaire\n2 1\n255\n" + bytes([0, 255]))
        np.testing.assert_array_equal(read_pgm(path), [[0.0, 1.0]])

    def test_ascii_pgm_rejected(self, tmp_path):
        path = tmp_path / "d.pgm"
        path.write_bytes(b"P2\n1 1\n255\n0\n")
        with pytest.raises(FormatError):
            read_pgm(path)

    def test_load_image_by_magic(self, tmp_path, rng):
        image = rng.normal((8, 8))
        np.testing.assert_array_equal(load_image(save_image(tmp_path / "img.shlm", image)), image)
        stretched = load_image(save_image(tmp_path / "img.pgm", image))
        assert stretched.min() == 0.0 and stretched.max() == 1.0
        with pytest.raises(FormatError):
            load_image(write_matrix(tmp_path / "rect.shlm", np.ones((2, 3))), square=True)
        with pytest.raises(FileNotFoundError):
            load_image(tmp_path / "absent.pgm")


def test_pseudo_polar_file(tmp_path, rng):
    grid = build_grid(4, 2, Fraction(11))
    data = PPArray.random(grid, rng)
    back = read_pparray(write_pparray(tmp_path / "data.shpp", data))
    assert back.grid.m0 == Fraction(11)
    np.testing.assert_array_equal(back.sector1, data.sector1)
    np.testing.assert_array_equal(back.sector2, data.sector2)


class TestCoefficientDirectory:
    @pytest.fixture
    def coefficients(self, rng):
        blocks = {
            BlockKey("scaling", 1, -1, 0): rng.complex_normal((3, 3)),
            BlockKey("shearlet", 21, 0, -1): rng.complex_normal((5, 2)),
            BlockKey("shearlet", "h", 1, 2): rng.normal((2, 4)),
        }
        return ShearletCoefficients("fdst", blocks, {"N": 4, "R": 2, "m0": Fraction(9)})

    def test_round_trip(self, tmp_path, coefficients):
        directory = write_coefficients(tmp_path / "coeffs", coefficients, extra={"seed": 3})
        back = read_coefficients(directory)
        assert back.transform == "fdst"
        assert back.keys() == coefficients.keys()
        assert isinstance(back.keys()[0].cone, int)
        for key in coefficients:
            np.testing.assert_array_equal(back[key], coefficients[key])
        assert back.params == {"N": 4, "R": 2, "m0": "9", "seed": 3}

    def test_manifest_content(self, tmp_path, coefficients):
        directory = write_coefficients(tmp_path / "coeffs", coefficients)
        manifest = read_manifest(directory)
        assert manifest["format_version"] == 1
        entry = manifest["blocks"][1]
        assert (entry["kind"], entry["cone"], entry["j"], entry["k"]) == ("shearlet", 21, 0, -1)
        assert (entry["rows"], entry["cols"]) == (5, 2)
        assert (directory / entry["file"]).is_file()

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FormatError):
            read_manifest(tmp_path)

    def test_newer_manifest_version(self, tmp_path, coefficients):
        directory = write_coefficients(tmp_path / "coeffs", coefficients)
        path = directory / MANIFEST_NAME
        manifest = json.loads(path.read_text(encoding="utf-8"))
        manifest["format_version"] = 2
        path.write_text(json.dumps(manifest), encoding="utf-8")
        with pytest.raises(FormatError, match="version"):
            read_coefficients(directory)
