"""Dense complex linear algebra primitives shared by every other module.

All functions operate on 2d complex ``numpy`` arrays and are pure: inputs are
never mutated, so they are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ABS_TOL_FLOOR = 1e-12
HERMITIAN_RTOL = 1e-10


class ShapeError(ValueError):
    """Matrix dimensions are inconsistent with the requested operation."""


class NotPsdError(ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, eigenvalue, tol):
        self.eigenvalue = float(eigenvalue)
        self.tol = float(tol)
        super().__init__(
            f"matrix is not PSD: smallest eigenvalue {self.eigenvalue:.3e} "
            f"is below -{self.tol:.3e}"
        )


class SvdConvergenceError(RuntimeError):
    """The iterative SVD kernel failed to converge."""

    def __init__(self, shape, detail):
        self.shape = shape
        super().__init__(f"SVD of {shape[0]}x{shape[1]} matrix did not converge: {detail}")


def as_matrix(x) -> np.ndarray:
    """Coerce to a 2d complex128 array and reject non-finite entries."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2d array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


@dataclass(frozen=True)
class BipartiteOperator:
    """Operator on a tensor product space, first factor of dimension ``dim_w``.

    The matrix acts on the composite space with row/column index
    ``w * dim_v + v``, i.e. the ordering used by ``numpy.kron(W_part, V_part)``.
    """

    mat: np.ndarray
    dim_w: int
    dim_v: int

    def __post_init__(self):
        mat = as_matrix(self.mat)
        object.__setattr__(self, "mat", mat)
        n = self.dim_w * self.dim_v
        if self.dim_w < 1 or self.dim_v < 1:
            raise ShapeError("factor dimensions must be positive")
        if mat.shape != (n, n):
            raise ShapeError(
                f"matrix shape {mat.shape} does not match dim_w*dim_v = {n}"
            )

    @property
    def dim(self) -> int:
        return self.dim_w * self.dim_v


def frobenius(x) -> float:
    return float(np.linalg.norm(np.asarray(x)))


def is_hermitian(x, rtol=HERMITIAN_RTOL) -> bool:
    """Hermiticity up to ``rtol * max(1, ||x||_F)`` in Frobenius norm."""
    x = np.asarray(x)
    if x.shape[0] != x.shape[1]:
        return False
    return frobenius(x - x.conj().T) <= rtol * max(1.0, frobenius(x))


def hermitian_part(x) -> np.ndarray:
    x = np.asarray(x)
    return (x + x.conj().T) / 2


def svd(x):
    """Singular value decomposition ``x = u @ diag(s) @ v.conj().T``.

    Returns square unitary ``u`` and ``v`` (full matrices, so the factorization
    is valid for rank-deficient input as well) and ``s`` sorted descending.
    """
    x = as_matrix(x)
    try:
        u, s, vh = np.linalg.svd(x, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(x.shape, str(exc)) from exc
    return u, s, vh.conj().T


def eigh_hermitian(x, rtol=HERMITIAN_RTOL):
    """Eigendecomposition of a nominally Hermitian matrix.

    The input is symmetrized before factorization; a matrix violating the
    Hermiticity tolerance is rejected.
    """
    x = as_matrix(x)
    if not is_hermitian(x, rtol=rtol):
        raise ShapeError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(hermitian_part(x))
    return w, v


def sqrt_psd(x, tol=1e-9):
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-tol_eff, 0)`` are clipped to zero, where
    ``tol_eff = max(tol * ||x||_inf, ABS_TOL_FLOOR)``.  An eigenvalue below
    ``-tol_eff`` raises :class:`NotPsdError` carrying the offender.
    Eigenvalues indistinguishable from zero at machine precision are zeroed
    exactly, so the square root of a rank-deficient input does not pick up
    sqrt(eps)-sized noise in its null space.
    """
    x = as_matrix(x)
    w, v = eigh_hermitian(x)
    scale = max(float(np.max(np.abs(w))) if w.size else 0.0, 1.0)
    tol_eff = max(tol * scale, ABS_TOL_FLOOR)
    if w.size and w[0] < -tol_eff:
        raise NotPsdError(w[0], tol_eff)
    w = np.clip(w, 0.0, None)
    if w.size:
        w[w < 1e-13 * float(w[-1])] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def sign_matrix(x):
    """Polar-type unitary ``S`` with ``x @ S = sqrt(x x^dag)``.

    Built from a full SVD as ``V U^dag``; for rank-deficient input the
    orthonormal completion chosen by the SVD kernel is used, which is enough
    to satisfy both defining identities.
    """
    x = as_matrix(x)
    if x.shape[0] != x.shape[1]:
        raise ShapeError("sign matrix is defined for square matrices only")
    u, _, v = svd(x)
    return v @ u.conj().T


def partial_trace_first(x, dim_w=None, dim_v=None):
    """Trace out the first tensor factor of an operator on W (x) V.

    Accepts a :class:`BipartiteOperator` or a plain square matrix together
    with the factor dimensions.  Returns a ``dim_v x dim_v`` matrix.
    """
    if isinstance(x, BipartiteOperator):
        mat, dim_w, dim_v = x.mat, x.dim_w, x.dim_v
    else:
        mat = as_matrix(x)
    if dim_w is None or dim_v is None:
        raise ShapeError("factor dimensions are required for a plain matrix")
    n = dim_w * dim_v
    if mat.shape != (n, n):
        raise ShapeError(f"matrix shape {mat.shape} does not factor as {dim_w}x{dim_v}")
    return np.einsum("avab->vb", mat.reshape(dim_w, dim_v, dim_w, dim_v))


def partial_trace_second(x, dim_w=None, dim_v=None):
    """Trace out the second tensor factor (the V part)."""
    if isinstance(x, BipartiteOperator):
        mat, dim_w, dim_v = x.mat, x.dim_w, x.dim_v
    else:
        mat = as_matrix(x)
    if dim_w is None or dim_v is None:
        raise ShapeError("factor dimensions are required for a plain matrix")
    n = dim_w * dim_v
    if mat.shape != (n, n):
        raise ShapeError(f"matrix shape {mat.shape} does not factor as {dim_w}x{dim_v}")
    return np.einsum("waua->wu", mat.reshape(dim_w, dim_v, dim_w, dim_v))


def schatten_norm(x, p) -> float:
    """Schatten norm for p in {1, 2, inf}."""
    x = as_matrix(x)
    if p == 2:
        return frobenius(x)
    try:
        s = np.linalg.svd(x, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(x.shape, str(exc)) from exc
    if p == 1:
        return float(np.sum(s))
    if p == np.inf or p == "inf":
        return float(s[0]) if s.size else 0.0
    raise ValueError(f"unsupported Schatten order {p!r}; use 1, 2 or inf")


def nuclear_norm(x) -> float:
    return schatten_norm(x, 1)


def spectral_norm(x) -> float:
    return schatten_norm(x, np.inf)


def vec(x) -> np.ndarray:
    """Row-major vectorization: the basis matrix E_ij maps to e_i (x) e_j."""
    return as_matrix(x).reshape(-1)


def devec(v, rows, cols) -> np.ndarray:
    """Inverse of :func:`vec` for a vector of length ``rows * cols``."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != rows * cols:
        raise ShapeError(f"vector of length {v.size} does not factor as {rows}x{cols}")
    return v.reshape(rows, cols)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the first argument on the coarse index."""
    return np.kron(as_matrix(a), as_matrix(b))
