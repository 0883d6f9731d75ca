"""Real encodings of complex Hermitian matrices.

A complex Hermitian PSD constraint rides on a real PSD cone through the
block embedding ``H -> [[Re H, -Im H], [Im H, Re H]]``, which doubles every
eigenvalue's multiplicity and preserves positive semidefiniteness both ways.
Real symmetric matrices travel through the solver in scaled upper-triangle
coordinates (``svec``) so that Frobenius inner products become dot products.
"""

from __future__ import annotations

import numpy as np

from ..linalg import ShapeError, as_matrix, is_hermitian

SQRT2 = np.sqrt(2.0)


def svec_len(k: int) -> int:
    return k * (k + 1) // 2


def svec_index(i: int, j: int, k: int) -> int:
    """Position of entry (i, j), i <= j, in the row-major upper triangle."""
    if i > j:
        i, j = j, i
    return i * k - (i * (i - 1)) // 2 + (j - i)


def triu_cache(k: int):
    iu, ju = np.triu_indices(k)
    return iu, ju, iu == ju


def svec(s: np.ndarray) -> np.ndarray:
    """Scaled upper-triangle coordinates of a real symmetric matrix."""
    k = s.shape[0]
    iu, ju, diag = triu_cache(k)
    out = s[iu, ju] * SQRT2
    out[diag] /= SQRT2
    return out


def smat(v: np.ndarray, k: int) -> np.ndarray:
    """Inverse of :func:`svec`."""
    iu, ju, diag = triu_cache(k)
    vals = np.asarray(v, dtype=float) / SQRT2
    vals = np.where(diag, np.asarray(v, dtype=float), vals)
    out = np.zeros((k, k))
    out[iu, ju] = vals
    out[ju, iu] = vals
    return out


def embed_complex(h, rtol=1e-10) -> np.ndarray:
    """Real symmetric embedding of a complex Hermitian matrix.

    The embedding is PSD exactly when the input is, and its spectrum is the
    input's with every eigenvalue doubled in multiplicity.
    """
    h = as_matrix(h)
    if not is_hermitian(h, rtol=rtol):
        raise ShapeError("embed_complex requires a Hermitian matrix")
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def unembed_scaled(s: np.ndarray) -> np.ndarray:
    """Adjoint of the embedding: pairs as <embed(H), S> = Tr(H @ unembed_scaled(S)).

    On embedded matrices this returns twice the original Hermitian matrix.
    """
    k2 = s.shape[0]
    if k2 % 2:
        raise ShapeError("embedded matrix must have even dimension")
    k = k2 // 2
    s11 = s[:k, :k]
    s22 = s[k:, k:]
    s12 = s[:k, k:]
    s21 = s[k:, :k]
    return (s11 + s22) + 1j * (s21 - s12)


def unembed(s: np.ndarray) -> np.ndarray:
    """Proper inverse of :func:`embed_complex` on its image."""
    return unembed_scaled(s) / 2.0
