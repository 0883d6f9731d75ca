"""The square norm of bipartite operators and the diamond norm of maps.

The production value comes from the reduced min-form SDP

    min (dim_v / 2) (||Tr_W Y||_inf + ||Tr_W Z||_inf)
    s.t. [[Y, -X], [-X^dag, Z]] PSD,

whose conic dual simultaneously yields the max-form witnesses (Z, rho, sigma).
The full standard-form SDP is kept for verification of the explicit optimal
points available at extremal operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import conic
from .conic import SolveOptions, StandardSdp, build_standard_sdp, decode_psd_dual
from .conic.build import ProgramBuilder, VarLayout, block_pair_entries, offdiag_complex_entries
from .linalg import (
    BipartiteOperator,
    ShapeError,
    as_matrix,
    frobenius,
    hermitian_part,
    nuclear_norm,
    partial_trace_first,
    sign_matrix,
    spectral_norm,
    sqrt_psd,
)


@dataclass
class SquareNormReport:
    value: float
    primal_value: float
    dual_value: float
    gap: float
    dual_y: np.ndarray
    dual_z: np.ndarray
    primal_z: np.ndarray
    primal_rho: np.ndarray
    primal_sigma: np.ndarray
    solver: conic.SolverResult


@dataclass
class BoundsReport:
    nuclear: float
    square: float
    spectral: float
    slack_nuclear_below: float   # square - nuclear          >= 0
    slack_dim_times_nuclear: float  # dim_v * nuclear - square  >= 0
    slack_dim_times_spectral: float  # dim * spectral - square   >= 0

    def holds(self, tol=1e-7) -> bool:
        return min(
            self.slack_nuclear_below,
            self.slack_dim_times_nuclear,
            self.slack_dim_times_spectral,
        ) >= -tol


@dataclass
class ExtremalityReport:
    extremal: bool
    residual: float
    nuclear: float


@dataclass
class OptimalPointsReport:
    standard: conic.SdpPointReport
    primal_objective: float
    dual_objective: float
    reduced_primal_min_eig: float
    reduced_primal_objective: float
    reduced_dual_min_eig: float
    reduced_dual_objective: float
    nuclear: float

    def max_residual(self) -> float:
        nn = max(self.nuclear, 1.0)
        return max(
            self.standard.max_residual(),
            abs(self.primal_objective - self.nuclear) / nn,
            abs(self.dual_objective - self.nuclear) / nn,
            max(0.0, -self.reduced_primal_min_eig) / nn,
            abs(self.reduced_primal_objective - self.nuclear) / nn,
            max(0.0, -self.reduced_dual_min_eig) / nn,
            abs(self.reduced_dual_objective - self.nuclear) / nn,
        )


def _epigraph_entries(layout, herm_handle, t_handle, dim_w, dim_v, t_col=0):
    """Pair entries of t * 1_V - Tr_W(M) for a Hermitian variable M on W (x) V."""
    entries = [(t_handle.start + t_col, a, a, 1.0) for a in range(dim_v)]
    n = dim_w * dim_v
    k = n
    entries_m = layout.hermitian_pair_entries(herm_handle)
    for col, i, j, g in entries_m:
        w1, a = divmod(i, dim_v)
        w2, b = divmod(j, dim_v)
        if w1 != w2:
            continue
        entries.append((col, a, b, -g))
    return entries


def square_norm_program(x: BipartiteOperator):
    """Conic lowering of the reduced min-form SDP for the square norm."""
    n = x.dim
    dv, dw = x.dim_v, x.dim_w
    layout = VarLayout()
    yh = layout.add_hermitian("Y", n)
    zh = layout.add_hermitian("Z", n)
    th = layout.add_reals("t", 2)
    builder = ProgramBuilder(layout)
    builder.add_objective_term(th.start, dv / 2.0)
    builder.add_objective_term(th.start + 1, dv / 2.0)
    g0 = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    g0[:n, n:] = -x.mat
    g0[n:, :n] = -x.mat.conj().T
    builder.add_psd_complex(
        2 * n,
        g0,
        block_pair_entries(layout, yh, 0, 0) + block_pair_entries(layout, zh, n, n),
    )
    builder.add_psd_complex(dv, None, _epigraph_entries(layout, yh, th, dw, dv, 0))
    builder.add_psd_complex(dv, None, _epigraph_entries(layout, zh, th, dw, dv, 1))
    prog = builder.build(meta={"layout": layout})
    return prog, layout


def _segment_offsets(cones):
    offs = []
    pos = 0
    for seg in cones:
        offs.append(pos)
        pos += seg.size
    return offs


def square_norm(x: BipartiteOperator, tol=1e-8, opts: SolveOptions | None = None) -> SquareNormReport:
    """Square norm of a bipartite operator, with primal and dual witnesses.

    The dual witnesses (Y, Z) come from the solver's primal variables; the
    max-form witnesses (Z, rho, sigma) are decoded from the conic dual
    multipliers of the three PSD blocks.
    """
    opts = opts or SolveOptions(tol=tol)
    prog, layout = square_norm_program(x)
    res = conic.solve(prog, opts)
    if res.status == "infeasible_suspected":
        raise RuntimeError("square-norm SDP flagged infeasible; input is likely invalid")
    n = x.dim
    dv = x.dim_v
    y_mat = layout.decode(layout["Y"], res.x)
    z_mat = layout.decode(layout["Z"], res.x)
    offs = _segment_offsets(prog.cones)
    lam_big = decode_psd_dual(res.y[offs[0] : offs[0] + prog.cones[0].size], 2 * n)
    lam_y = decode_psd_dual(res.y[offs[1] : offs[1] + prog.cones[1].size], dv)
    lam_z = decode_psd_dual(res.y[offs[2] : offs[2] + prog.cones[2].size], dv)
    primal_z = 2.0 * lam_big[:n, n:].conj().T
    rho = 2.0 * hermitian_part(lam_z)
    sigma = 2.0 * hermitian_part(lam_y)
    dual_value = (dv / 2.0) * (
        spectral_norm(partial_trace_first(y_mat, x.dim_w, dv))
        + spectral_norm(partial_trace_first(z_mat, x.dim_w, dv))
    )
    primal_value = float(np.real(np.trace(x.mat @ primal_z)))
    return SquareNormReport(
        value=dual_value,
        primal_value=primal_value,
        dual_value=dual_value,
        gap=abs(primal_value - dual_value),
        dual_y=y_mat,
        dual_z=z_mat,
        primal_z=primal_z,
        primal_rho=rho,
        primal_sigma=sigma,
        solver=res,
    )


def square_norm_primal(x: BipartiteOperator, tol=1e-8, opts: SolveOptions | None = None):
    """Max-form SDP solved directly; used only for duality cross-checks."""
    opts = opts or SolveOptions(tol=tol)
    n = x.dim
    dv, dw = x.dim_v, x.dim_w
    layout = VarLayout()
    zc = layout.add_complex("Z", n, n)
    rh = layout.add_hermitian("rho", dv)
    sh = layout.add_hermitian("sigma", dv)
    builder = ProgramBuilder(layout)
    coeffs = layout.trace_coefficients(zc, x.mat)
    for k, g in enumerate(coeffs):
        if g.real != 0.0:
            builder.add_objective_term(zc.start + k, -g.real)
    builder.add_zero(
        np.array([float(dv), float(dv)]),
        [(0, rh.start + q, -1.0) for q in range(dv)]
        + [(1, sh.start + q, -1.0) for q in range(dv)],
    )
    entries = offdiag_complex_entries(layout, zc, 0, n)
    for col, a, b, g in layout.hermitian_pair_entries(rh):
        for w in range(dw):
            entries.append((col, w * dv + a, w * dv + b, g))
    for col, a, b, g in layout.hermitian_pair_entries(sh):
        for w in range(dw):
            entries.append((col, n + w * dv + a, n + w * dv + b, g))
    builder.add_psd_complex(2 * n, None, entries)
    prog = builder.build()
    res = conic.solve(prog, opts)
    return -res.primal_value, layout.decode(zc, res.x), res


def diamond_norm(m, tol=1e-8, opts: SolveOptions | None = None) -> float:
    """Diamond norm of a map: square norm of its Choi matrix over dim_v."""
    choi = m.choi if hasattr(m, "choi") else m
    return square_norm(choi, tol=tol, opts=opts).value / choi.dim_v


def check_bounds(x: BipartiteOperator, tol=1e-8, opts: SolveOptions | None = None) -> BoundsReport:
    """Evaluate the square norm's sandwich between nuclear and spectral norms."""
    nn = nuclear_norm(x.mat)
    sq = square_norm(x, tol=tol, opts=opts).value
    sn = spectral_norm(x.mat)
    return BoundsReport(
        nuclear=nn,
        square=sq,
        spectral=sn,
        slack_nuclear_below=sq - nn,
        slack_dim_times_nuclear=x.dim_v * nn - sq,
        slack_dim_times_spectral=x.dim * sn - sq,
    )


def extremality_check(x: BipartiteOperator, tol=1e-6) -> ExtremalityReport:
    """Flatness test on both partial-traced absolute values of X.

    The residual is scale-free; operators passing it have square norm equal
    to nuclear norm (and conversely), so they keep every descent-cone based
    recovery guarantee of the nuclear norm.
    """
    nn = nuclear_norm(x.mat)
    if nn <= 1e-14:
        return ExtremalityReport(extremal=True, residual=0.0, nuclear=0.0)
    level = nn / x.dim_v
    eye = np.eye(x.dim_v)
    left = partial_trace_first(sqrt_psd(x.mat @ x.mat.conj().T), x.dim_w, x.dim_v)
    right = partial_trace_first(sqrt_psd(x.mat.conj().T @ x.mat), x.dim_w, x.dim_v)
    residual = max(frobenius(left - level * eye), frobenius(right - level * eye)) / level
    return ExtremalityReport(extremal=residual <= tol, residual=residual, nuclear=nn)


def watrous_standard_sdp(x: BipartiteOperator) -> StandardSdp:
    """Standard-form SDP (Xi, C, D) whose value is the square norm of X."""
    n = x.dim
    dv, dw = x.dim_v, x.dim_w
    dz = 2 * dv + 2 * n
    dy = 2 + 2 * n
    c_mat = np.zeros((dz, dz), dtype=np.complex128)
    c_mat[2 * dv : 2 * dv + n, 2 * dv + n :] = x.mat
    c_mat[2 * dv + n :, 2 * dv : 2 * dv + n] = x.mat.conj().T
    c_mat *= dv / 2.0
    d_mat = np.zeros((dy, dy), dtype=np.complex128)
    d_mat[0, 0] = 1.0
    d_mat[1, 1] = 1.0
    eye_w = np.eye(dw)

    def xi(z_full):
        z_full = as_matrix(z_full)
        w0 = z_full[:dv, :dv]
        w1 = z_full[dv : 2 * dv, dv : 2 * dv]
        z0 = z_full[2 * dv : 2 * dv + n, 2 * dv : 2 * dv + n]
        z1 = z_full[2 * dv + n :, 2 * dv + n :]
        out = np.zeros((dy, dy), dtype=np.complex128)
        out[0, 0] = np.trace(w0)
        out[1, 1] = np.trace(w1)
        out[2 : 2 + n, 2 : 2 + n] = z0 - np.kron(eye_w, w0)
        out[2 + n :, 2 + n :] = z1 - np.kron(eye_w, w1)
        return out

    return build_standard_sdp(c_mat, d_mat, xi)


def optimal_points(x: BipartiteOperator):
    """Closed-form primal/dual optimal points of the standard-form SDP,
    valid when X is extremal."""
    n_local = x.dim_v
    n = x.dim
    s = sign_matrix(x.mat)
    nn = nuclear_norm(x.mat)
    dv = x.dim_v
    dz = 2 * dv + 2 * n
    z_sharp = np.zeros((dz, dz), dtype=np.complex128)
    z_sharp[: 2 * dv, : 2 * dv] = np.eye(2 * dv)
    z_sharp[2 * dv : 2 * dv + n, 2 * dv : 2 * dv + n] = np.eye(n)
    z_sharp[2 * dv + n :, 2 * dv + n :] = np.eye(n)
    z_sharp[2 * dv : 2 * dv + n, 2 * dv + n :] = s.conj().T
    z_sharp[2 * dv + n :, 2 * dv : 2 * dv + n] = s
    z_sharp /= n_local
    sq_left = sqrt_psd(x.mat @ x.mat.conj().T)
    sq_right = sqrt_psd(x.mat.conj().T @ x.mat)
    dy = 2 + 2 * n
    y_sharp = np.zeros((dy, dy), dtype=np.complex128)
    y_sharp[0, 0] = nn
    y_sharp[1, 1] = nn
    y_sharp[2 : 2 + n, 2 : 2 + n] = n_local * sq_left
    y_sharp[2 + n :, 2 + n :] = n_local * sq_right
    y_sharp /= 2.0
    return z_sharp, y_sharp


def verify_optimal_points(x: BipartiteOperator, tol=1e-8, extremality_tol=1e-6) -> OptimalPointsReport:
    """Check the constructed optimal points of an extremal operator.

    Verifies feasibility, matching objectives and complementary slackness in
    the standard form, plus the reduced-form points (sign matrix with flat
    rho, sigma on the max side; the two absolute values on the min side).
    """
    ext = extremality_check(x, tol=extremality_tol)
    if not ext.extremal:
        raise ShapeError(
            f"operator is not extremal (residual {ext.residual:.3e}); "
            "the constructed points are only optimal on the extremal set"
        )
    n = x.dim
    nn = ext.nuclear
    sdp = watrous_standard_sdp(x)
    z_sharp, y_sharp = optimal_points(x)
    standard = sdp.verify_points(z_sharp, y_sharp, tol=tol)
    s = sign_matrix(x.mat)
    block_primal = np.block(
        [[np.eye(n), s], [s.conj().T, np.eye(n)]]
    )
    reduced_primal_obj = float(np.real(np.trace(x.mat @ s)))
    sq_left = sqrt_psd(x.mat @ x.mat.conj().T)
    sq_right = sqrt_psd(x.mat.conj().T @ x.mat)
    block_dual = np.block([[sq_left, -x.mat], [-x.mat.conj().T, sq_right]])
    reduced_dual_obj = (x.dim_v / 2.0) * (
        spectral_norm(partial_trace_first(sq_left, x.dim_w, x.dim_v))
        + spectral_norm(partial_trace_first(sq_right, x.dim_w, x.dim_v))
    )
    return OptimalPointsReport(
        standard=standard,
        primal_objective=standard.primal_value,
        dual_objective=standard.dual_value,
        reduced_primal_min_eig=float(np.linalg.eigvalsh(hermitian_part(block_primal))[0]),
        reduced_primal_objective=reduced_primal_obj,
        reduced_dual_min_eig=float(np.linalg.eigvalsh(hermitian_part(block_dual))[0]),
        reduced_dual_objective=reduced_dual_obj,
        nuclear=nn,
    )


def variational_lower_bound(x: BipartiteOperator, samples, rng) -> float:
    """Sampled maximization of the sandwiched nuclear norm.

    Always evaluates the identity pair, so the result is at least the nuclear
    norm; it never exceeds the square norm (up to solver noise of the latter).
    """
    if samples < 1:
        raise ValueError("at least one sample is required")
    dv = x.dim_v
    eye_w = np.eye(x.dim_w)
    best = nuclear_norm(x.mat)
    scale = np.sqrt(dv)
    for _ in range(samples - 1):
        a = rng.standard_normal((dv, dv)) + 1j * rng.standard_normal((dv, dv))
        b = rng.standard_normal((dv, dv)) + 1j * rng.standard_normal((dv, dv))
        a *= scale / frobenius(a)
        b *= scale / frobenius(b)
        val = nuclear_norm(np.kron(eye_w, a) @ x.mat @ np.kron(eye_w, b))
        best = max(best, val)
    return best


def sandwiched_nuclear_norm(x: BipartiteOperator, a, b) -> float:
    """Nuclear norm of (1 (x) a) X (1 (x) b)."""
    eye_w = np.eye(x.dim_w)
    return nuclear_norm(np.kron(eye_w, a) @ x.mat @ np.kron(eye_w, b))
