"""Conic program container, solution record and KKT verification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..linalg import ShapeError
from .cones import cone_distance, dual_cone_distance, total_rows


@dataclass
class ConicProgram:
    """minimize c.x subject to b - A x in K, with K a product of cone segments.

    The segments are ordered zero, nonneg, soc..., psd... by convention of the
    builders, although the solver does not rely on that ordering.
    """

    c: np.ndarray
    a: sp.csr_matrix
    b: np.ndarray
    cones: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.a = sp.csr_matrix(self.a)
        m, n = self.a.shape
        if self.c.size != n:
            raise ShapeError(f"objective length {self.c.size} != variable dim {n}")
        if self.b.size != m:
            raise ShapeError(f"rhs length {self.b.size} != row count {m}")
        if total_rows(self.cones) != m:
            raise ShapeError(
                f"cone segments cover {total_rows(self.cones)} rows, matrix has {m}"
            )

    @property
    def var_dim(self) -> int:
        return self.a.shape[1]

    @property
    def row_dim(self) -> int:
        return self.a.shape[0]

    def dump_triplets(self, path) -> None:
        """Plain-text sparse-triplet dump for external cross-checking."""
        coo = self.a.tocoo()
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# conic program m={self.row_dim} n={self.var_dim}\n")
            fh.write("# cones: " + " ".join(
                f"{s.kind}:{s.size}" + (f"(side={s.side})" if s.kind == "psd" else "")
                for s in self.cones) + "\n")
            for j, cj in enumerate(self.c):
                if cj != 0.0:
                    fh.write(f"c {j} {cj!r}\n")
            for i, bi in enumerate(self.b):
                if bi != 0.0:
                    fh.write(f"b {i} {bi!r}\n")
            for i, j, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"A {i} {j} {v!r}\n")


@dataclass
class SolverResult:
    status: str
    primal_value: float
    dual_value: float
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    residuals: dict
    iterations: int


@dataclass
class KktReport:
    primal_residual: float
    primal_cone_distance: float
    dual_residual: float
    dual_cone_distance: float
    gap: float
    slackness: float
    primal_value: float
    dual_value: float

    def max_residual(self) -> float:
        return max(
            self.primal_residual,
            self.primal_cone_distance,
            self.dual_residual,
            self.dual_cone_distance,
            self.gap,
            self.slackness,
        )

    def within(self, tol: float) -> bool:
        return self.max_residual() <= tol


def verify_kkt(program: ConicProgram, x, y, tol=1e-8) -> KktReport:
    """Report KKT residuals of a candidate primal/dual pair; does not solve.

    Residuals are normalized the same way the solver normalizes its stopping
    test, so an optimal pair from :func:`solve` passes at the solve tolerance.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != program.var_dim or y.size != program.row_dim:
        raise ShapeError("candidate point dimensions do not match the program")
    s = program.b - program.a @ x
    pv = float(program.c @ x)
    dv = float(-program.b @ y)
    bscale = 1.0 + float(np.linalg.norm(program.b))
    cscale = 1.0 + float(np.linalg.norm(program.c))
    return KktReport(
        primal_residual=0.0,
        primal_cone_distance=cone_distance(program.cones, s) / bscale,
        dual_residual=float(np.linalg.norm(program.a.T @ y + program.c)) / cscale,
        dual_cone_distance=dual_cone_distance(program.cones, y) / bscale,
        gap=abs(pv - dv) / (1.0 + abs(pv) + abs(dv)),
        slackness=abs(float(s @ y)) / (1.0 + abs(pv) + abs(dv)),
        primal_value=pv,
        dual_value=dv,
    )
