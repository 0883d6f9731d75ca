"""First-order conic solver.

Operator splitting (Douglas-Rachford / ADMM) on the homogeneous self-dual
embedding of the primal-dual pair, in the style of SCS: each iteration solves
one fixed linear system and projects onto the product cone.  Everything is
dense-vector numpy plus one cached factorization, so identical inputs produce
bitwise-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .cones import project_dual_cone, segment_slices
from .program import ConicProgram, SolverResult

DENSE_FACTOR_LIMIT = 600


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-8
    max_iters: int = 50000
    scaling: bool = True
    alpha: float = 1.5
    check_every: int = 25
    ruiz_iters: int = 10


class NumericBreakdownError(RuntimeError):
    """NaN or Inf appeared in the solver iterates."""


def _row_inf_norms(a: sp.csr_matrix) -> np.ndarray:
    out = np.zeros(a.shape[0])
    absa = np.abs(a.data)
    indptr = a.indptr
    for i in range(a.shape[0]):
        if indptr[i] < indptr[i + 1]:
            out[i] = absa[indptr[i]:indptr[i + 1]].max()
    return out


def _pool_segments(norms: np.ndarray, segs) -> np.ndarray:
    # soc/psd segments must share one scale factor or the cone geometry breaks
    out = norms.copy()
    for seg, sl in segment_slices(segs):
        if seg.kind in ("soc", "psd"):
            vals = norms[sl]
            vals = vals[vals > 0]
            out[sl] = np.exp(np.mean(np.log(vals))) if vals.size else 1.0
    return out


def _equilibrate(a: sp.csr_matrix, segs, iters: int):
    # sequential Ruiz scaling: rescale rows, then columns of the already
    # row-scaled matrix; interleaving both from the same matrix diverges
    m, n = a.shape
    d = np.ones(m)
    e = np.ones(n)
    ak = a.copy().astype(float)
    for _ in range(iters):
        rn0 = _row_inf_norms(ak)
        floor = 1e-10 * rn0.max() if rn0.size else 0.0
        rn = _pool_segments(rn0, segs)
        rn = np.where(rn > floor, np.sqrt(rn), 1.0)
        dr = 1.0 / rn
        ak = sp.diags(dr) @ ak
        d *= dr
        cn = _row_inf_norms(ak.T.tocsr())
        floor = 1e-10 * cn.max() if cn.size else 0.0
        cn = np.where(cn > floor, np.sqrt(cn), 1.0)
        dc = 1.0 / cn
        ak = (ak @ sp.diags(dc)).tocsr()
        e *= dc
        if np.max(np.abs(rn * rn - 1.0)) < 1e-3 and np.max(np.abs(cn * cn - 1.0)) < 1e-3:
            break
    return ak, d, e


class _LinSolver:
    """Cached solver for the reduced HSDE system [[I, A^T], [-A, I]]."""

    def __init__(self, a: sp.csr_matrix):
        self.a = a
        self.at = a.T.tocsr()
        n = a.shape[1]
        gram = (sp.eye(n) + self.at @ a).tocsc()
        if n <= DENSE_FACTOR_LIMIT:
            self._chol = sla.cho_factor(gram.toarray(), lower=True, check_finite=False)
            self._solve = lambda r: sla.cho_solve(self._chol, r, check_finite=False)
        else:
            lu = spla.splu(gram)
            self._solve = lu.solve

    def __call__(self, rx: np.ndarray, ry: np.ndarray):
        zx = self._solve(rx - self.at @ ry)
        zy = ry + self.a @ zx
        return zx, zy


def solve(program: ConicProgram, opts: SolveOptions | None = None) -> SolverResult:
    """Solve a conic program to the requested combined residual tolerance.

    Returns ``status="optimal"`` only when primal, dual and gap residuals are
    all below ``opts.tol``; hitting the iteration cap yields ``"max_iters"``
    with the residuals reported, and a vanishing homogenizing variable is
    flagged as ``"infeasible_suspected"`` (no rigorous certificate).
    """
    opts = opts or SolveOptions()
    a0 = program.a
    b0 = program.b
    c0 = program.c
    segs = program.cones
    m, n = a0.shape

    if opts.scaling:
        a, d, e = _equilibrate(a0, segs, opts.ruiz_iters)
        b = d * b0
        c = e * c0
        # balance the homogeneous embedding: data and objective of
        # comparable size keep tau well conditioned
        sb = 1.0 / max(np.linalg.norm(b), 1e-6)
        sc = 1.0 / max(np.linalg.norm(c), 1e-6)
        b = b * sb
        c = c * sc
    else:
        a = a0.astype(float)
        d = np.ones(m)
        e = np.ones(n)
        b = b0.astype(float)
        c = c0.astype(float)
        sb = sc = 1.0

    lin = _LinSolver(a)
    qx, qy = lin(c, b)
    denom = 1.0 + c @ qx + b @ qy

    ux = np.zeros(n)
    uy = np.zeros(m)
    ut = 1.0
    vy = np.zeros(m)
    vt = 1.0

    alpha = opts.alpha
    bscale = 1.0 + np.linalg.norm(b0)
    cscale = 1.0 + np.linalg.norm(c0)

    best = None
    status = "max_iters"
    iters_done = opts.max_iters

    def _unscaled(ux, uy, ut, vy):
        tau = max(ut, 1e-16)
        x = e * ux / (tau * sb)
        y = d * uy / (tau * sc)
        s = (vy / d) / (tau * sb)
        return x, y, s

    def _residuals(x, y, s):
        pres = np.linalg.norm(a0 @ x + s - b0) / bscale
        dres = np.linalg.norm(a0.T @ y + c0) / cscale
        pv = float(c0 @ x)
        dv = float(-b0 @ y)
        gap = abs(pv - dv) / (1.0 + abs(pv) + abs(dv))
        return pres, dres, gap, pv, dv

    for it in range(1, opts.max_iters + 1):
        wx = ux  # v_x stays exactly zero: x-part of C* is {0}
        wy = uy + vy
        wt = ut + vt

        px, py = lin(wx, wy)
        tt = (wt + c @ px + b @ py) / denom
        tx = px - tt * qx
        ty = py - tt * qy

        rx = alpha * tx + (1.0 - alpha) * ux
        ry = alpha * ty + (1.0 - alpha) * uy
        rt = alpha * tt + (1.0 - alpha) * ut

        ux = rx  # projection onto R^n
        uy_new = project_dual_cone(segs, ry - vy)
        ut_new = max(rt - vt, 0.0)

        vy = vy + uy_new - ry
        vt = vt + ut_new - rt
        uy = uy_new
        ut = ut_new

        if it % opts.check_every == 0 or it == opts.max_iters:
            if not (np.all(np.isfinite(ux)) and np.all(np.isfinite(uy)) and np.isfinite(ut)):
                raise NumericBreakdownError(f"non-finite iterate at iteration {it}")
            if ut <= 1e-11 * max(vt, 1.0) and it >= 1000:
                # certificate check: only trust a vanishing homogenizing
                # variable when the scaled iterates carry a genuine ray
                by = float(b @ uy)
                cx = float(c @ ux)
                ny = np.linalg.norm(uy)
                nx = np.linalg.norm(ux)
                infeas = (
                    ny > 1e-6
                    and by <= -1e-8 * ny * (1.0 + np.linalg.norm(b))
                    and np.linalg.norm(a.T @ uy) <= 1e-6 * abs(by)
                )
                unbound = (
                    nx > 1e-6
                    and cx <= -1e-8 * nx * (1.0 + np.linalg.norm(c))
                    and np.linalg.norm(a @ ux + vy) <= 1e-6 * abs(cx)
                )
                if infeas or unbound:
                    x, y, s = _unscaled(ux, uy, max(ut, 1e-12), vy)
                    pres, dres, gap, pv, dv = _residuals(x, y, s)
                    best = (x, y, s, pres, dres, gap, pv, dv)
                    status = "infeasible_suspected"
                    iters_done = it
                    break
            x, y, s = _unscaled(ux, uy, ut, vy)
            pres, dres, gap, pv, dv = _residuals(x, y, s)
            if best is None or max(pres, dres, gap) < max(best[3], best[4], best[5]):
                best = (x, y, s, pres, dres, gap, pv, dv)
            if max(pres, dres, gap) <= opts.tol:
                status = "optimal"
                iters_done = it
                break

    x, y, s, pres, dres, gap, pv, dv = best
    return SolverResult(
        status=status,
        primal_value=pv,
        dual_value=dv,
        x=x,
        y=y,
        s=s,
        residuals={"primal": pres, "dual": dres, "gap": gap},
        iterations=iters_done,
    )
