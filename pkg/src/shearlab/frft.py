"""
Noyaux 1D : transformée de Fourier fractionnaire non repliée (chirp / Bluestein), zéro-padding symétrique et adjoints

Indices centrés partout : un vecteur de longueur impaire L = N+1 est indexé par
j ∈ [−N/2, N/2] et la position mémoire de j est j + N/2.
"""

from typing import Union

import numpy as np

Alpha = Union[complex, float, np.ndarray]

# Lignes traitées par lot pour borner la mémoire des convolutions
_ROW_CHUNK = 256


def _next_power_of_two(value: int) -> int:
    return 1 << (int(value) - 1).bit_length()


def _centered(length: int) -> np.ndarray:
    half = (length - 1) // 2
    return np.arange(-half, half + 1, dtype=np.float64)


def _prepare_alpha(alpha: Alpha, rows: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=np.complex128)
    if alpha.ndim == 0:
        return np.full((rows, 1), alpha)
    alpha = alpha.reshape(-1, 1)
    if alpha.shape[0] != rows:
        raise ValueError(f"{alpha.shape[0]} valeurs de α pour {rows} lignes")
    return alpha


def frft(c: np.ndarray, alpha: Alpha, axis: int = -1) -> np.ndarray:
    """
    Transformée de Fourier fractionnaire non repliée

    out(k) = Σ_j c(j)·exp(−2πi·j·k·α), j, k ∈ [−N/2, N/2], en O(N log N).

    Args:
        c: tableau dont l'axe `axis` est de longueur impaire N+1
        alpha: scalaire (éventuellement complexe) ou un α par ligne (toutes les autres dimensions aplaties)
        axis: axe transformé

    Returns:
        Tableau complexe de même forme
    """
    c = np.asarray(c)
    length = c.shape[axis]
    if length % 2 == 0:
        raise ValueError(f"frft: longueur impaire attendue, reçu {length}")

    moved = np.moveaxis(c, axis, -1)
    batch_shape = moved.shape[:-1]
    rows = moved.reshape(-1, length).astype(np.complex128, copy=False)
    alphas = _prepare_alpha(alpha, rows.shape[0])

    j = _centered(length)[None, :]
    # d = k − j ∈ [−(L−1), L−1], rangé circulairement dans une FFT de taille P ≥ 2L−1
    size = _next_power_of_two(2 * length - 1)
    d = np.zeros(size)
    d[:length] = np.arange(length)
    d[size - length + 1:] = np.arange(-length + 1, 0)
    d = d[None, :]

    out = np.empty_like(rows)
    for start in range(0, rows.shape[0], _ROW_CHUNK):
        stop = min(start + _ROW_CHUNK, rows.shape[0])
        a = alphas[start:stop]
        chirp = np.exp(-1j * np.pi * a * j ** 2)
        y = np.fft.fft(rows[start:stop] * chirp, n=size, axis=-1)
        kernel = np.fft.fft(np.exp(1j * np.pi * a * d ** 2), axis=-1)
        conv = np.fft.ifft(y * kernel, axis=-1)[:, :length]
        out[start:stop] = conv * chirp
    return np.moveaxis(out.reshape(batch_shape + (length,)), -1, axis)


def frft_adjoint(c: np.ndarray, alpha: Alpha, axis: int = -1) -> np.ndarray:
    """Adjoint de frft : noyau symétrique, donc frft avec −conj(α) (−α pour α réel)"""
    return frft(c, -np.conj(np.asarray(alpha, dtype=np.complex128)), axis=axis)


def dft_unaliased(c: np.ndarray, axis: int = -1) -> np.ndarray:
    """TFD 1D non repliée F₁ : frft avec α = 1/(N+1)"""
    return frft(c, 1.0 / np.asarray(c).shape[axis], axis=axis)


def pad(c: np.ndarray, m: int, axis: int = -1) -> np.ndarray:
    """
    Zéro-padding symétrique

    Un vecteur de longueur N (pair) indexé par k ∈ [−N/2, N/2−1] est placé dans
    un vecteur de longueur m (impair, m > N) indexé par [−(m−1)/2, (m−1)/2].
    """
    c = np.asarray(c)
    length = c.shape[axis]
    if length % 2:
        raise ValueError(f"pad: longueur paire attendue, reçu {length}")
    if m <= length or m % 2 == 0:
        raise ValueError(f"pad: m doit être impair et > N (m={m}, N={length})")
    offset = (m - 1) // 2 - length // 2
    shape = list(c.shape)
    shape[axis] = m
    out = np.zeros(shape, dtype=np.result_type(c.dtype, np.complex128))
    index = [slice(None)] * c.ndim
    index[axis] = slice(offset, offset + length)
    out[tuple(index)] = c
    return out


def pad_adjoint(c: np.ndarray, length: int, axis: int = -1) -> np.ndarray:
    """Adjoint de pad : restriction à la fenêtre k ∈ [−N/2, N/2−1]"""
    c = np.asarray(c)
    m = c.shape[axis]
    if m <= length or m % 2 == 0 or length % 2:
        raise ValueError(f"pad_adjoint: tailles incompatibles (m={m}, N={length})")
    offset = (m - 1) // 2 - length // 2
    index = [slice(None)] * c.ndim
    index[axis] = slice(offset, offset + length)
    return c[tuple(index)].copy()
