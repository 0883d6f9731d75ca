"""Assembly of conic programs over complex matrix variables.

Variables are flattened into one real vector: a complex p x q matrix
contributes its real parts then its imaginary parts (row-major), a Hermitian
k x k matrix contributes the real diagonal, then real and imaginary parts of
the strict upper triangle.  Constraint rows are described through the slack
expression ``s(x)`` they feed into a cone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..linalg import ShapeError
from .cones import ConeSeg
from .embed import SQRT2, embed_complex, svec, svec_index, svec_len
from .program import ConicProgram


@dataclass(frozen=True)
class VarHandle:
    name: str
    kind: str  # "reals" | "complex" | "hermitian"
    start: int
    size: int
    shape: tuple


class VarLayout:
    """Registry mapping named matrix/scalar variables to vector slices."""

    def __init__(self):
        self.dim = 0
        self._vars = {}

    def _add(self, name, kind, size, shape) -> VarHandle:
        if name in self._vars:
            raise ShapeError(f"variable {name!r} already declared")
        h = VarHandle(name, kind, self.dim, size, shape)
        self._vars[name] = h
        self.dim += size
        return h

    def add_reals(self, name, k=1) -> VarHandle:
        return self._add(name, "reals", k, (k,))

    def add_complex(self, name, p, q) -> VarHandle:
        return self._add(name, "complex", 2 * p * q, (p, q))

    def add_hermitian(self, name, k) -> VarHandle:
        return self._add(name, "hermitian", k * k, (k, k))

    def __getitem__(self, name) -> VarHandle:
        return self._vars[name]

    def decode(self, h: VarHandle, x: np.ndarray):
        """Read a variable's value out of a solution vector."""
        seg = np.asarray(x)[h.start : h.start + h.size]
        if h.kind == "reals":
            return seg.copy()
        if h.kind == "complex":
            p, q = h.shape
            return (seg[: p * q] + 1j * seg[p * q :]).reshape(p, q)
        k = h.shape[0]
        out = np.zeros((k, k), dtype=np.complex128)
        out[np.diag_indices(k)] = seg[:k]
        iu, ju = np.triu_indices(k, 1)
        noff = iu.size
        out[iu, ju] = seg[k : k + noff] + 1j * seg[k + noff :]
        out[ju, iu] = seg[k : k + noff] - 1j * seg[k + noff :]
        return out

    def encode(self, h: VarHandle, value, x: np.ndarray) -> None:
        """Write a candidate value into a vector (inverse of :meth:`decode`)."""
        if h.kind == "reals":
            x[h.start : h.start + h.size] = np.asarray(value, dtype=float).ravel()
            return
        value = np.asarray(value, dtype=np.complex128)
        if value.shape != h.shape:
            raise ShapeError(f"value shape {value.shape} != {h.shape}")
        if h.kind == "complex":
            pq = value.size
            x[h.start : h.start + pq] = value.real.ravel()
            x[h.start + pq : h.start + 2 * pq] = value.imag.ravel()
            return
        k = h.shape[0]
        iu, ju = np.triu_indices(k, 1)
        noff = iu.size
        x[h.start : h.start + k] = value.real[np.diag_indices(k)]
        x[h.start + k : h.start + k + noff] = value.real[iu, ju]
        x[h.start + k + noff : h.start + k + 2 * noff] = value.imag[iu, ju]

    def hermitian_pair_entries(self, h: VarHandle):
        """Per-parameter derivative descriptors (col, i, j, g).

        The parameter's contribution to a Hermitian expression is
        ``g E_ij + conj(g) E_ji`` (just ``g E_ii`` on the diagonal), which is
        the form the PSD emitter consumes.
        """
        if h.kind != "hermitian":
            raise ShapeError("hermitian_pair_entries needs a hermitian variable")
        k = h.shape[0]
        out = []
        for q in range(k):
            out.append((h.start + q, q, q, 1.0))
        iu, ju = np.triu_indices(k, 1)
        noff = iu.size
        for t in range(noff):
            out.append((h.start + k + t, int(iu[t]), int(ju[t]), 1.0))
        for t in range(noff):
            out.append((h.start + k + noff + t, int(iu[t]), int(ju[t]), 1j))
        return out

    def trace_coefficients(self, h: VarHandle, g: np.ndarray) -> np.ndarray:
        """Complex gradient of Tr(g @ V(x)) with respect to the variable's params."""
        g = np.asarray(g, dtype=np.complex128)
        if h.kind == "complex":
            p, q = h.shape
            if g.shape != (q, p):
                raise ShapeError(f"coefficient shape {g.shape}, expected {(q, p)}")
            base = g.T.reshape(-1)  # d Tr(g V)/d V_ij = g[j, i]
            return np.concatenate([base, 1j * base])
        if h.kind == "hermitian":
            k = h.shape[0]
            if g.shape != (k, k):
                raise ShapeError(f"coefficient shape {g.shape}, expected {(k, k)}")
            diag = np.diagonal(g).copy()
            iu, ju = np.triu_indices(k, 1)
            re = g[ju, iu] + g[iu, ju]
            im = 1j * (g[ju, iu] - g[iu, ju])
            return np.concatenate([diag, re, im])
        raise ShapeError("trace coefficients are defined for matrix variables")


def _entry_rows(kc, r, c, g):
    """svec rows of the embedding of g E_rc + conj(g) E_cr (side kc)."""
    k2 = 2 * kc
    if r == c:
        a = float(np.real(g))
        return [(svec_index(r, r, k2), a), (svec_index(r + kc, r + kc, k2), a)]
    if r > c:
        r, c = c, r
        g = np.conj(g)
    a = float(np.real(g))
    b = float(np.imag(g))
    rows = []
    if a != 0.0:
        rows.append((svec_index(r, c, k2), SQRT2 * a))
        rows.append((svec_index(r + kc, c + kc, k2), SQRT2 * a))
    if b != 0.0:
        rows.append((svec_index(r, c + kc, k2), -SQRT2 * b))
        rows.append((svec_index(c, r + kc, k2), SQRT2 * b))
    return rows


class ProgramBuilder:
    """Accumulates cone segments; every method describes the slack expression."""

    def __init__(self, layout: VarLayout):
        self.layout = layout
        self._segs = []
        self._rows = 0
        self._b = []
        self._ai = []
        self._aj = []
        self._av = []
        self._c_entries = {}

    def add_objective_term(self, col: int, coeff: float) -> None:
        self._c_entries[col] = self._c_entries.get(col, 0.0) + coeff

    def _push(self, kind, s0, entries, side=0):
        s0 = np.asarray(s0, dtype=float).ravel()
        off = self._rows
        self._segs.append(ConeSeg(kind, s0.size, side))
        self._b.append(s0)
        for local, col, dcoef in entries:
            if dcoef != 0.0:
                self._ai.append(off + local)
                self._aj.append(col)
                self._av.append(-float(dcoef))  # s = b - A x
        self._rows += s0.size

    def add_zero(self, s0, entries) -> None:
        """Rows constrained to equal zero: s(x) = s0 + sum d * x = 0."""
        self._push("zero", s0, entries)

    def add_nonneg(self, s0, entries) -> None:
        self._push("nonneg", s0, entries)

    def add_soc(self, s0, entries) -> None:
        """Second-order cone rows: s(x)[0] >= ||s(x)[1:]||."""
        self._push("soc", s0, entries)

    def add_psd_complex(self, kc, g0, pair_entries) -> None:
        """Constrain an affine complex Hermitian expression to be PSD.

        ``g0`` is the constant part; ``pair_entries`` holds per-parameter
        descriptors (col, r, c, g) meaning the parameter adds
        ``g E_rc + conj(g) E_cr`` to the expression.  Everything is lowered
        to the real embedding's scaled-symmetric coordinates.
        """
        if g0 is None:
            g0 = np.zeros((kc, kc), dtype=np.complex128)
        s0 = svec(embed_complex(g0))
        entries = []
        for col, r, c, g in pair_entries:
            for local, coeff in _entry_rows(kc, r, c, g):
                entries.append((local, col, coeff))
        self._push("psd", s0, entries, side=2 * kc)

    def build(self, meta=None) -> ConicProgram:
        n = self.layout.dim
        c = np.zeros(n)
        for col, coeff in self._c_entries.items():
            c[col] = coeff
        a = sp.coo_matrix(
            (self._av, (self._ai, self._aj)), shape=(self._rows, n)
        ).tocsr()
        a.sum_duplicates()
        if a.nnz:
            # float noise of analytically-zero coefficients creates junk
            # rows that wreck equilibration; scrub it
            cut = 1e-14 * np.abs(a.data).max()
            a.data[np.abs(a.data) < cut] = 0.0
            a.eliminate_zeros()
        b = np.concatenate(self._b) if self._b else np.zeros(0)
        return ConicProgram(c=c, a=a, b=b, cones=list(self._segs), meta=meta or {})


def block_pair_entries(layout, handle, row_off, col_off, scale=1.0):
    """Hermitian-pair entries of a Hermitian variable placed at a diagonal
    block offset of a larger Hermitian expression."""
    return [
        (col, r + row_off, c + col_off, g * scale)
        for col, r, c, g in layout.hermitian_pair_entries(handle)
    ]


def offdiag_complex_entries(layout, handle, row_off, col_off, scale=1.0):
    """Entries for a general complex variable X occupying an off-diagonal
    block, with conj(scale) X^dag implied in the mirror block."""
    if handle.kind != "complex":
        raise ShapeError("offdiag_complex_entries needs a complex variable")
    p, q = handle.shape
    out = []
    pq = p * q
    for i in range(p):
        for j in range(q):
            col = handle.start + i * q + j
            out.append((col, i + row_off, j + col_off, scale))
            out.append((col + pq, i + row_off, j + col_off, 1j * scale))
    return out


def offdiag_hermitian_entries(layout, handle, row_off, col_off, scale=1.0):
    """Entries for a Hermitian variable occupying an off-diagonal block."""
    if handle.kind != "hermitian":
        raise ShapeError("offdiag_hermitian_entries needs a hermitian variable")
    k = handle.shape[0]
    out = []
    for q in range(k):
        out.append((handle.start + q, q + row_off, q + col_off, scale))
    iu, ju = np.triu_indices(k, 1)
    noff = iu.size
    for t in range(noff):
        i, j = int(iu[t]), int(ju[t])
        col = handle.start + k + t
        out.append((col, i + row_off, j + col_off, scale))
        out.append((col, j + row_off, i + col_off, scale))
        col_im = handle.start + k + noff + t
        out.append((col_im, i + row_off, j + col_off, 1j * scale))
        out.append((col_im, j + row_off, i + col_off, -1j * scale))
    return out
