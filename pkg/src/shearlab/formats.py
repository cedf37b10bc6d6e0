"""
Formats de fichiers : SHLM (matrices), SHPP (données pseudo-polaires), SHWT (poids),
PGM binaire (P5) et répertoires de coefficients (manifest.json + un fichier SHLM par bloc)

Tous les en-têtes binaires commencent par un magic de 4 octets suivi d'une version u32 ;
les entiers et charges utiles sont little-endian, en ordre ligne par ligne.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .errors import FormatError
from .ppgrid import PPArray, build_grid
from .schemas import BlockKey, ShearletCoefficients, decode_value, encode_value
from .utils import Logger, ensure_parent_directory, ensure_directory, safe_json_dumps

PathLike = Union[str, Path]

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"

SHLM_MAGIC = b"SHLM"
SHPP_MAGIC = b"SHPP"
SHWT_MAGIC = b"SHWT"

SHLM_HEADER = np.dtype([
    ("magic", "S4"), ("version", "<u4"), ("rows", "<u4"), ("cols", "<u4"), ("dtype", "u1"),
])
SHPP_HEADER = np.dtype([
    ("magic", "S4"), ("version", "<u4"), ("N", "<u4"), ("R", "<u4"), ("m0_num", "<u4"), ("m0_den", "<u4"),
])
SHWT_HEADER = np.dtype([
    ("magic", "S4"), ("version", "<u4"), ("N", "<u4"), ("R", "<u4"), ("choice", "<i4"), ("n0", "<u4"),
    ("m0_num", "<u4"), ("m0_den", "<u4"), ("residual", "<f8"),
])

# Code de type SHLM -> dtype numpy
SHLM_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<c16")}


def _read_header(raw: bytes, header: np.dtype, magic: bytes, path: PathLike) -> np.void:
    if len(raw) < header.itemsize:
        raise FormatError(f"{path}: en-tête tronqué ({len(raw)} octets)")
    record = np.frombuffer(raw[:header.itemsize], dtype=header)[0]
    if bytes(record["magic"]) != magic:
        raise FormatError(f"{path}: magic {bytes(record['magic'])!r}, attendu {magic!r}")
    version = int(record["version"])
    if version > FORMAT_VERSION:
        raise FormatError(f"{path}: version {version} plus récente que la version supportée {FORMAT_VERSION}")
    if version < 1:
        raise FormatError(f"{path}: version invalide {version}")
    return record


def _payload(raw: bytes, header: np.dtype, dtype: np.dtype, count: int, path: PathLike) -> np.ndarray:
    expected = header.itemsize + count * dtype.itemsize
    if len(raw) != expected:
        raise FormatError(f"{path}: {len(raw)} octets, attendu {expected}")
    return np.frombuffer(raw, dtype=dtype, count=count, offset=header.itemsize).copy()


def _m0_fields(m0: Fraction):
    return int(m0.numerator), int(m0.denominator)


# ---------------------------------------------------------------- SHLM


def write_matrix(path: PathLike, matrix: np.ndarray) -> Path:
    """Écrit une matrice 2D réelle (f64) ou complexe (c128)"""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError(f"SHLM: matrice 2D attendue, reçu {matrix.ndim} dimension(s)")
    code = 1 if np.iscomplexobj(matrix) else 0
    header = np.zeros((), dtype=SHLM_HEADER)
    header["magic"] = SHLM_MAGIC
    header["version"] = FORMAT_VERSION
    header["rows"], header["cols"] = matrix.shape
    header["dtype"] = code
    path = ensure_parent_directory(path)
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(matrix, dtype=SHLM_DTYPES[code]).tobytes())
    return path


def read_matrix(path: PathLike) -> np.ndarray:
    raw = Path(path).read_bytes()
    header = _read_header(raw, SHLM_HEADER, SHLM_MAGIC, path)
    code = int(header["dtype"])
    if code not in SHLM_DTYPES:
        raise FormatError(f"{path}: code de type inconnu {code}")
    rows, cols = int(header["rows"]), int(header["cols"])
    return _payload(raw, SHLM_HEADER, SHLM_DTYPES[code], rows * cols, path).reshape(rows, cols)


# ---------------------------------------------------------------- PGM


def _pgm_tokens(raw: bytes, count: int):
    """Lit `count` champs d'en-tête PGM (commentaires # ignorés) ; renvoie (champs, position des données)"""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("PGM: en-tête incomplet")
        tokens.append(raw[start:pos])
    # un seul blanc sépare l'en-tête des données
    return tokens, pos + 1


def read_pgm(path: PathLike) -> np.ndarray:
    """PGM binaire P5 8 ou 16 bits (big-endian), valeurs ramenées à [0, 1]"""
    raw = Path(path).read_bytes()
    tokens, offset = _pgm_tokens(raw, 4)
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: seul le PGM binaire P5 est supporté (reçu {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as e:
        raise FormatError(f"{path}: en-tête PGM invalide ({e})") from e
    if not 0 < maxval < 65536:
        raise FormatError(f"{path}: maxval hors bornes: {maxval}")
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    expected = width * height * dtype.itemsize
    if len(raw) - offset < expected:
        raise FormatError(f"{path}: données PGM tronquées")
    pixels = np.frombuffer(raw, dtype=dtype, count=width * height, offset=offset)
    return pixels.reshape(height, width).astype(np.float64) / maxval


def write_pgm(path: PathLike, image: np.ndarray, maxval: int = 255, normalize: bool = False) -> Path:
    """Écrit la partie réelle d'une image (valeurs supposées dans [0, 1], ou étirées si normalize)"""
    image = np.real(np.asarray(image)).astype(np.float64)
    if image.ndim != 2:
        raise ValueError("PGM: image 2D attendue")
    if normalize:
        low, high = float(image.min()), float(image.max())
        image = (image - low) / (high - low) if high > low else np.zeros_like(image)
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    pixels = np.rint(np.clip(image, 0.0, 1.0) * maxval).astype(dtype)
    height, width = image.shape
    path = ensure_parent_directory(path)
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n{maxval}\n".encode("ascii"))
        f.write(pixels.tobytes())
    return path


def load_image(path: PathLike, square: bool = False) -> np.ndarray:
    """Charge une image PGM (P5) ou SHLM selon le magic du fichier"""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Image introuvable: {path}")
    with open(path, "rb") as f:
        magic = f.read(4)
    if magic == SHLM_MAGIC:
        image = read_matrix(path)
    elif magic[:2] == b"P5":
        image = read_pgm(path)
    else:
        raise FormatError(f"{path}: format d'image non reconnu (magic {magic!r})")
    if square and image.shape[0] != image.shape[1]:
        raise FormatError(f"{path}: image carrée attendue, reçu {image.shape}")
    return image


def save_image(path: PathLike, image: np.ndarray) -> Path:
    """Écrit en PGM si l'extension est .pgm (partie réelle, étirée à [0, 1]), en SHLM sinon"""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return write_pgm(path, image, normalize=True)
    return write_matrix(path, image)


# ---------------------------------------------------------------- SHPP


def write_pparray(path: PathLike, data: PPArray) -> Path:
    """Écrit les deux secteurs (complex128) d'un tableau pseudo-polaire"""
    grid = data.grid
    header = np.zeros((), dtype=SHPP_HEADER)
    header["magic"] = SHPP_MAGIC
    header["version"] = FORMAT_VERSION
    header["N"], header["R"] = grid.N, grid.R
    header["m0_num"], header["m0_den"] = _m0_fields(grid.m0)
    path = ensure_parent_directory(path)
    with open(path, "wb") as f:
        f.write(header.tobytes())
        for sector in (data.sector1, data.sector2):
            f.write(np.ascontiguousarray(sector, dtype="<c16").tobytes())
    return path


def read_pparray(path: PathLike) -> PPArray:
    raw = Path(path).read_bytes()
    header = _read_header(raw, SHPP_HEADER, SHPP_MAGIC, path)
    grid = build_grid(int(header["N"]), int(header["R"]), Fraction(int(header["m0_num"]), int(header["m0_den"])))
    size = grid.radial_count * grid.angular_count
    values = _payload(raw, SHPP_HEADER, np.dtype("<c16"), 2 * size, path)
    return PPArray(grid, values[:size].reshape(grid.shape), values[size:].reshape(grid.shape))


# ---------------------------------------------------------------- SHWT


def write_weights(path: PathLike, weights) -> Path:
    """Écrit coefficients de base et valeurs ensemblistes des poids"""
    grid = weights.grid
    header = np.zeros((), dtype=SHWT_HEADER)
    header["magic"] = SHWT_MAGIC
    header["version"] = FORMAT_VERSION
    header["N"], header["R"] = grid.N, grid.R
    header["choice"] = -1 if weights.choice is None else weights.choice
    header["n0"] = weights.n0
    header["m0_num"], header["m0_den"] = _m0_fields(grid.m0)
    header["residual"] = weights.residual
    path = ensure_parent_directory(path)
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(weights.coefficients, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(weights.set_values, dtype="<f8").tobytes())
    return path


def read_weights(path: PathLike):
    """Relit un fichier SHWT en WeightFunction"""
    from .weights import WeightFunction

    raw = Path(path).read_bytes()
    header = _read_header(raw, SHWT_HEADER, SHWT_MAGIC, path)
    grid = build_grid(int(header["N"]), int(header["R"]), Fraction(int(header["m0_num"]), int(header["m0_den"])))
    n0 = int(header["n0"])
    size = grid.radial_count * grid.angular_count
    values = _payload(raw, SHWT_HEADER, np.dtype("<f8"), n0 + size, path)
    choice = int(header["choice"])
    return WeightFunction(
        grid=grid,
        choice=None if choice < 0 else choice,
        coefficients=values[:n0],
        set_values=values[n0:].reshape(grid.shape),
        residual=float(header["residual"]),
    )


# ---------------------------------------------------------------- coefficients

_MANIFEST_RESERVED = ("format_version", "transform", "blocks")


def write_coefficients(directory: PathLike, coefficients: ShearletCoefficients,
                       extra: Optional[Dict[str, Any]] = None) -> Path:
    """
    Écrit un conteneur de coefficients dans un répertoire

    manifest.json porte les paramètres de la transformée et la liste des blocs
    {kind, cone, j, k, rows, cols, file} ; chaque bloc est un fichier SHLM.
    """
    directory = ensure_directory(directory)
    entries = []
    for index, (key, block) in enumerate(coefficients.items()):
        block = np.asarray(block)
        if block.ndim != 2:
            raise ValueError(f"Bloc {key} non bidimensionnel")
        name = f"{index:04d}_{key.label()}.shlm"
        write_matrix(directory / name, block)
        entries.append({**key.to_dict(), "rows": block.shape[0], "cols": block.shape[1], "file": name})

    params = dict(coefficients.params)
    params.update(extra or {})
    manifest = {
        "format_version": FORMAT_VERSION,
        "transform": coefficients.transform,
        **encode_value(params),
        "blocks": entries,
    }
    (directory / MANIFEST_NAME).write_text(safe_json_dumps(manifest), encoding="utf-8")
    Logger.save(f"{len(entries)} blocs écrits dans {directory}")
    return directory


def read_manifest(directory: PathLike) -> Dict[str, Any]:
    path = Path(directory) / MANIFEST_NAME
    if not path.is_file():
        raise FormatError(f"Manifeste introuvable: {path}")
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: JSON invalide ({e})") from e
    version = manifest.get("format_version")
    if not isinstance(version, int) or version < 1:
        raise FormatError(f"{path}: format_version absent ou invalide")
    if version > FORMAT_VERSION:
        raise FormatError(f"{path}: version {version} plus récente que la version supportée {FORMAT_VERSION}")
    return manifest


def read_coefficients(directory: PathLike) -> ShearletCoefficients:
    """Relit un répertoire écrit par write_coefficients"""
    directory = Path(directory)
    manifest = read_manifest(directory)
    blocks = {}
    for entry in manifest.get("blocks", []):
        key = BlockKey.from_dict(entry)
        block = read_matrix(directory / entry["file"])
        if block.shape != (entry["rows"], entry["cols"]):
            raise FormatError(f"{entry['file']}: forme {block.shape}, attendu ({entry['rows']}, {entry['cols']})")
        blocks[key] = block
    params = {k: decode_value(v) for k, v in manifest.items() if k not in _MANIFEST_RESERVED}
    return ShearletCoefficients(manifest.get("transform", ""), blocks, params)
