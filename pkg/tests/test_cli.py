"""
Interface en ligne de commande : inventaire, erreurs d'usage, transformées et mesures
"""

import json

import numpy as np
import pytest

from shearlab.cli import EXIT_OK, EXIT_USAGE, main
from shearlab.formats import read_manifest, read_matrix, read_pparray, read_weights, write_matrix
from shearlab.windows import block_count


@pytest.fixture
def cache(tmp_path):
    return str(tmp_path / "cache")


def test_info_block_count(capsys, cache):
    code = main(["info", "--transform", "fdst", "--size", "16", "--oversampling", "8", "--cache-dir", cache])
    assert code == EXIT_OK
    output = capsys.readouterr().out
    assert "coefficients: 19678" in output
    assert "j_L=-1, j_H=2" in output


def test_info_at_64(capsys, cache):
    assert main(["info", "--size", "64", "--oversampling", "8", "--cache-dir", cache]) == EXIT_OK
    output = capsys.readouterr().out
    assert "j_L=-1, j_H=3" in output
    line = next(line for line in output.splitlines() if "coefficients:" in line)
    count = int(line.split("coefficients:")[1].split(",")[0])
    assert count == block_count(64, 8)
    assert f"redondance {count / 64 ** 2:.3f}" in line


def test_info_all_transforms(capsys, cache):
    assert main(["info", "--size", "32", "--scales", "2", "--cache-dir", cache]) == EXIT_OK
    output = capsys.readouterr().out
    assert "DSST" in output and "DNST" in output
    assert "17 filtres de 32x32" in output


def test_unknown_flag_exits_with_usage_code():
    with pytest.raises(SystemExit) as error:
        main(["info", "--frobnicate"])
    assert error.value.code == EXIT_USAGE


def test_no_command():
    assert main([]) == EXIT_USAGE


def test_invalid_configuration(cache):
    assert main(["info", "--size", "48", "--cache-dir", cache]) == EXIT_USAGE


def test_missing_input(tmp_path, cache):
    code = main(["dsst", "forward", str(tmp_path / "absent.shlm"), str(tmp_path / "out"), "--cache-dir", cache])
    assert code == EXIT_USAGE


def test_forward_inverse_round_trip(tmp_path, rng, cache):
    image = rng.uniform((32, 32))
    source = write_matrix(tmp_path / "image.shlm", image)
    coefficients = tmp_path / "coeffs"
    common = ["--scales", "3", "--cg-tol", "1e-8", "--cache-dir", cache]
    assert main(["dsst", "forward", str(source), str(coefficients), *common]) == EXIT_OK
    manifest = read_manifest(coefficients)
    assert manifest["transform"] == "dsst"
    assert manifest["N"] == 32 and manifest["J"] == 3

    output = tmp_path / "reconstruction.shlm"
    assert main(["dsst", "inverse", str(coefficients), str(output), *common]) == EXIT_OK
    reconstruction = read_matrix(output)
    assert np.linalg.norm(reconstruction - image) / np.linalg.norm(image) <= 1e-4


def test_inverse_of_another_transform(tmp_path, rng, cache):
    source = write_matrix(tmp_path / "image.shlm", rng.uniform((32, 32)))
    coefficients = tmp_path / "coeffs"
    assert main(["dsst", "forward", str(source), str(coefficients), "--scales", "2", "--cache-dir", cache]) == EXIT_OK
    assert main(["dnst", "inverse", str(coefficients), str(tmp_path / "x.shlm"), "--cache-dir", cache]) == EXIT_USAGE


def test_ppft_round_trip_files(tmp_path, rng, cache):
    source = write_matrix(tmp_path / "image.shlm", rng.normal((8, 8)))
    data = tmp_path / "data.shpp"
    assert main(["ppft", "forward", str(source), str(data), "--oversampling", "2", "--cache-dir", cache]) == EXIT_OK
    assert data.read_bytes()[:4] == b"SHPP"
    back = tmp_path / "adjoint.shlm"
    assert main(["ppft", "adjoint", str(data), str(back), "--cache-dir", cache]) == EXIT_OK
    assert read_matrix(back).shape == (8, 8)


def test_measure_report_is_reproducible(tmp_path, cache):
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    for path in paths:
        code = main(["measure", "algebraic", "tightness", "--transform", "fdst", "--size", "16",
                     "--oversampling", "4", "--cache-dir", cache, "--seed", "7", "--out", str(path), "--no-timing"])
        assert code == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    reports = json.loads(paths[0].read_text(encoding="utf-8"))["reports"]
    assert [report["measure"] for report in reports] == ["algebraic", "tightness"]
    assert all("timing" not in report for report in reports)
    assert reports[0]["parameters"]["seed"] == 7


def test_measure_csv(tmp_path, cache):
    csv = tmp_path / "table.csv"
    code = main(["measure", "speed", "localization", "--transform", "dsst", "--size", "32", "--scales", "3",
                 "--speed-sizes", "16", "32", "--cache-dir", cache, "--csv", str(csv)])
    assert code == EXIT_OK
    header = csv.read_text(encoding="utf-8").splitlines()[0]
    assert header == "measure,transform,quantity,index,value,reference"
    assert "M_speed1" in csv.read_text(encoding="utf-8")


def test_dsst_sampling_flags(tmp_path, rng, cache):
    source = write_matrix(tmp_path / "image.shlm", rng.uniform((16, 16)))
    coefficients = tmp_path / "coeffs"
    flags = ["--scales", "2", "--c1", "2", "--c2", "0.4", "--phi", "table", "--wavelet", "db4", "--cache-dir", cache]
    assert main(["dsst", "forward", str(source), str(coefficients), *flags]) == EXIT_OK
    manifest = read_manifest(coefficients)
    assert (manifest["c1"], manifest["c2"]) == (2.0, 0.4)
    assert manifest["phi_mode"] == "table" and manifest["wavelet"] == "db4"
    assert manifest["steps"] == [[8, 2], [4, 1]]
    assert main(["dsst", "adjoint", str(coefficients), str(tmp_path / "adjoint.shlm"), "--cache-dir", cache]) == EXIT_OK


def test_dnst_fan_flags(tmp_path, rng, cache):
    source = write_matrix(tmp_path / "image.shlm", rng.uniform((32, 32)))
    coefficients = tmp_path / "coeffs"
    flags = ["--scales", "2", "--fan-size", "15", "--transition", "0.2", "--cache-dir", cache]
    assert main(["dnst", "forward", str(source), str(coefficients), *flags]) == EXIT_OK
    manifest = read_manifest(coefficients)
    assert (manifest["fan_size"], manifest["fan_transition"]) == (15, 0.2)
    output = tmp_path / "reconstruction.shlm"
    assert main(["dnst", "inverse", str(coefficients), str(output), "--cache-dir", cache]) == EXIT_OK
    assert read_matrix(output).shape == (32, 32)


def test_dnst_default_parameters(tmp_path, rng, cache):
    source = write_matrix(tmp_path / "image.shlm", rng.uniform((64, 64)))
    assert main(["dnst", "forward", str(source), str(tmp_path / "coeffs"), "--cache-dir", cache]) == EXIT_OK


def test_ppft_m0_flag(tmp_path, rng, cache):
    source = write_matrix(tmp_path / "image.shlm", rng.normal((8, 8)))
    data = tmp_path / "data.shpp"
    flags = ["--oversampling", "2", "--m0", "11", "--cache-dir", cache]
    assert main(["ppft", "forward", str(source), str(data), *flags]) == EXIT_OK
    assert read_pparray(data).grid.m0 == 11


def test_precomputed_weights(tmp_path, rng, cache):
    weights = tmp_path / "weights.shwt"
    common = ["--size", "16", "--oversampling", "4", "--cache-dir", cache]
    assert main(["weights", "compute", "-o", str(weights), *common]) == EXIT_OK
    assert read_weights(weights).grid.N == 16

    source = write_matrix(tmp_path / "image.shlm", rng.uniform((16, 16)))
    coefficients = tmp_path / "coeffs"
    assert main(["fdst", "forward", str(source), str(coefficients), "--weights", str(weights),
                 "--cache-dir", cache]) == EXIT_OK
    assert read_manifest(coefficients)["R"] == 4
    output = tmp_path / "adjoint.shlm"
    assert main(["fdst", "adjoint", str(coefficients), str(output), "--weights", str(weights),
                 "--cache-dir", cache]) == EXIT_OK
    assert main(["fdst", "forward", str(source), str(tmp_path / "auto"), "--weights", "auto",
                 *common]) == EXIT_OK

    larger = write_matrix(tmp_path / "larger.shlm", rng.uniform((32, 32)))
    assert main(["fdst", "forward", str(larger), str(tmp_path / "other"), "--weights", str(weights),
                 "--cache-dir", cache]) == EXIT_USAGE
