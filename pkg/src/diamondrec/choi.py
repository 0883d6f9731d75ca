"""Maps between operator spaces: Choi matrices, Kraus sets, CPT structure.

A map L(V) -> L(W) is stored through its Choi matrix, the bipartite operator
``sum_ij M(E_ij) (x) E_ij`` on W (x) V.  The standard basis and the row-major
``vec`` convention are fixed throughout; the isomorphism itself does not
depend on that choice but a concrete array layout does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    BipartiteOperator,
    ShapeError,
    as_matrix,
    frobenius,
    hermitian_part,
    partial_trace_second,
    vec,
)


@dataclass(frozen=True)
class OperatorMap:
    """A linear map L(V) -> L(W) represented by its Choi matrix."""

    choi: BipartiteOperator

    @property
    def dim_v(self) -> int:
        return self.choi.dim_v

    @property
    def dim_w(self) -> int:
        return self.choi.dim_w


@dataclass(frozen=True)
class KrausSet:
    """A list of dim_w x dim_v Kraus operators."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.operators)
        if not ops:
            raise ShapeError("a Kraus set needs at least one operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ShapeError("all Kraus operators must share one shape")
        object.__setattr__(self, "operators", ops)

    @property
    def rank(self) -> int:
        return len(self.operators)

    @property
    def dim_w(self) -> int:
        return self.operators[0].shape[0]

    @property
    def dim_v(self) -> int:
        return self.operators[0].shape[1]

    def is_trace_preserving(self, tol=1e-9) -> bool:
        acc = sum(k.conj().T @ k for k in self.operators)
        return frobenius(acc - np.eye(self.dim_v)) <= tol


def basis_matrix(i, j, dim) -> np.ndarray:
    e = np.zeros((dim, dim), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def choi_of_apply(apply, dim_v, dim_w) -> OperatorMap:
    """Choi matrix of a map given as a callable on dim_v x dim_v matrices.

    The callable is assumed linear; each image is shape-checked.
    """
    n = dim_w * dim_v
    choi = np.zeros((n, n), dtype=np.complex128)
    for i in range(dim_v):
        for j in range(dim_v):
            image = as_matrix(apply(basis_matrix(i, j, dim_v)))
            if image.shape != (dim_w, dim_w):
                raise ShapeError(
                    f"map returned shape {image.shape}, expected {(dim_w, dim_w)}"
                )
            choi += np.kron(image, basis_matrix(i, j, dim_v))
    return OperatorMap(BipartiteOperator(choi, dim_w, dim_v))


def apply_map(m: OperatorMap, rho) -> np.ndarray:
    """Apply a map to an input matrix by contracting against its Choi matrix."""
    rho = as_matrix(rho)
    if rho.shape != (m.dim_v, m.dim_v):
        raise ShapeError(f"input shape {rho.shape}, expected {(m.dim_v, m.dim_v)}")
    lifted = np.kron(np.eye(m.dim_w), rho.T) @ m.choi.mat
    return partial_trace_second(lifted, m.dim_w, m.dim_v)


def map_of_unitary_pair(u, v) -> OperatorMap:
    """Choi representation of X -> u @ X @ v (square factors of equal size)."""
    u = as_matrix(u)
    v = as_matrix(v)
    n = u.shape[0]
    if u.shape != (n, n) or v.shape != (n, n):
        raise ShapeError("unitary-pair maps need two square matrices of one size")
    choi = np.outer(vec(u), vec(v.T))
    return OperatorMap(BipartiteOperator(choi, n, n))


def kraus_to_choi(k: KrausSet) -> OperatorMap:
    vecs = [vec(op) for op in k.operators]
    choi = sum(np.outer(w, w.conj()) for w in vecs)
    return OperatorMap(BipartiteOperator(choi, k.dim_w, k.dim_v))


def is_cpt(m: OperatorMap, tol=1e-9) -> dict:
    """Complete positivity and trace preservation of a map, as booleans."""
    j = m.choi.mat
    herm_defect = frobenius(j - j.conj().T)
    min_eig = float(np.linalg.eigvalsh(hermitian_part(j))[0])
    cp = herm_defect <= tol and min_eig >= -tol
    from .linalg import partial_trace_first

    tp_defect = frobenius(partial_trace_first(m.choi) - np.eye(m.dim_v))
    return {"cp": bool(cp), "tp": bool(tp_defect <= tol)}


def random_unitary(n, rng) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian with phase correction."""
    if n < 1:
        raise ShapeError("dimension must be at least 1")
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_orthogonal(n, rng) -> np.ndarray:
    """Haar-random real orthogonal matrix."""
    if n < 1:
        raise ShapeError("dimension must be at least 1")
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return (q * np.sign(d)).astype(np.complex128)


def random_state_vector(n, rng) -> np.ndarray:
    """Uniform draw from the complex unit sphere."""
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return psi / np.linalg.norm(psi)


def random_channel(dim_v, dim_w, kraus_rank, rng) -> OperatorMap:
    """Random CPT map of the given Kraus rank.

    A Haar isometry from V into W (x) C^r is drawn (QR of a complex Gaussian)
    and sliced into r Kraus blocks, which makes the map exactly trace
    preserving and generically of Choi rank r.
    """
    r = int(kraus_rank)
    if r * dim_w < dim_v:
        raise ShapeError(
            f"no isometry exists: kraus_rank*dim_w = {r * dim_w} < dim_v = {dim_v}"
        )
    g = rng.standard_normal((dim_w * r, dim_v)) + 1j * rng.standard_normal((dim_w * r, dim_v))
    q, _ = np.linalg.qr(g)
    ops = tuple(q[j * dim_w : (j + 1) * dim_w, :] for j in range(r))
    return kraus_to_choi(KrausSet(ops))
