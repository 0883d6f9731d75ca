"""Constrained regularizer minimization from linear measurements.

Both programs share the block-PSD certificate

    [[Y, -X], [-X^dag, Z]] PSD,    ||A(X) - y|| <= eta,

and differ only in the objective: (Tr Y + Tr Z) / 2 for the nuclear norm,
(dim_v / 2)(||Tr_W Y||_inf + ||Tr_W Z||_inf) for the square norm.  Optional
CPT constraints re-parameterize X as Hermitian and append the channel
structure (X PSD and Tr_W X = identity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import conic
from .conic import SolveOptions
from .conic.build import (
    ProgramBuilder,
    VarLayout,
    block_pair_entries,
    offdiag_complex_entries,
    offdiag_hermitian_entries,
)
from .linalg import BipartiteOperator, ShapeError, frobenius, nuclear_norm
from .measure import MeasurementEnsemble, apply_measurement
from .norms import _epigraph_entries

ETA_REL_FLOOR = 1e-9

REGULARIZERS = ("nuclear", "square")


@dataclass(frozen=True)
class RecoveryProblem:
    ensemble: MeasurementEnsemble
    y: np.ndarray
    eta: float
    regularizer: str
    cpt: bool = False
    dims: tuple | None = None

    def __post_init__(self):
        if self.regularizer not in REGULARIZERS:
            raise ValueError(f"unknown regularizer {self.regularizer!r}")
        y = np.asarray(self.y, dtype=np.complex128).ravel()
        if y.size != self.ensemble.m:
            raise ShapeError(
                f"outcome vector has {y.size} entries, ensemble has m={self.ensemble.m}"
            )
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        object.__setattr__(self, "y", y)
        object.__setattr__(
            self, "dims", tuple(self.dims) if self.dims else tuple(self.ensemble.dims)
        )

    @property
    def eta_effective(self) -> float:
        # keep the second-order cone well posed when eta is zero or tiny
        return max(self.eta, ETA_REL_FLOOR * float(np.linalg.norm(self.y)), 1e-12)


@dataclass
class RecoveryResult:
    estimate: BipartiteOperator
    objective: float
    residuals: dict
    frob_error: float | None
    solver: conic.SolverResult


def add_cpt_constraints(builder: ProgramBuilder, layout: VarLayout, x_handle, dims) -> None:
    """Append channel structure for a Hermitian Choi variable.

    Adds the PSD cone on X itself and the dim_v^2 real equality rows pinning
    Tr_W(X) to the identity.
    """
    if x_handle.kind != "hermitian":
        raise ShapeError("CPT constraints need the Choi variable in Hermitian form")
    dw, dv = dims
    n = dw * dv
    k = n
    iu, ju = np.triu_indices(k, 1)
    off_index = {(int(iu[t]), int(ju[t])): t for t in range(iu.size)}
    noff = iu.size
    s0 = []
    entries = []
    row = 0
    for a in range(dv):
        s0.append(1.0)
        for w in range(dw):
            entries.append((row, x_handle.start + w * dv + a, -1.0))
        row += 1
    for a in range(dv):
        for b in range(a + 1, dv):
            s0.extend([0.0, 0.0])
            for w in range(dw):
                t = off_index[(w * dv + a, w * dv + b)]
                entries.append((row, x_handle.start + k + t, -1.0))
                entries.append((row + 1, x_handle.start + k + noff + t, -1.0))
            row += 2
    builder.add_zero(np.array(s0), entries)
    builder.add_psd_complex(n, None, layout.hermitian_pair_entries(x_handle))


def build_recovery_program(problem: RecoveryProblem):
    """Lower a recovery problem to a conic program; returns (program, layout)."""
    dw, dv = problem.dims
    n = dw * dv
    layout = VarLayout()
    if problem.cpt:
        xh = layout.add_hermitian("X", n)
    else:
        xh = layout.add_complex("X", n, n)
    yh = layout.add_hermitian("Y", n)
    zh = layout.add_hermitian("Z", n)
    builder = ProgramBuilder(layout)
    if problem.regularizer == "nuclear":
        for q in range(n):
            builder.add_objective_term(yh.start + q, 0.5)
            builder.add_objective_term(zh.start + q, 0.5)
    else:
        th = layout.add_reals("t", 2)
        builder.add_objective_term(th.start, dv / 2.0)
        builder.add_objective_term(th.start + 1, dv / 2.0)

    if problem.cpt:
        add_cpt_constraints(builder, layout, xh, problem.dims)

    # data rows: eta >= ||y - A(X)||, split into real and imaginary parts
    m = problem.ensemble.m
    s0 = np.empty(2 * m + 1)
    s0[0] = problem.eta_effective
    s0[1 : m + 1] = problem.y.real
    s0[m + 1 :] = problem.y.imag
    entries = []
    for k_meas in range(m):
        coeffs = layout.trace_coefficients(xh, problem.ensemble.matrices[k_meas])
        for t in np.nonzero(coeffs)[0]:
            g = coeffs[t]
            if g.real != 0.0:
                entries.append((1 + k_meas, xh.start + int(t), -g.real))
            if g.imag != 0.0:
                entries.append((1 + m + k_meas, xh.start + int(t), -g.imag))
    builder.add_soc(s0, entries)

    if problem.cpt:
        x_entries = offdiag_hermitian_entries(layout, xh, 0, n, -1.0)
    else:
        x_entries = offdiag_complex_entries(layout, xh, 0, n, -1.0)
    builder.add_psd_complex(
        2 * n,
        None,
        block_pair_entries(layout, yh, 0, 0)
        + block_pair_entries(layout, zh, n, n)
        + x_entries,
    )
    if problem.regularizer == "square":
        th = layout["t"]
        builder.add_psd_complex(dv, None, _epigraph_entries(layout, yh, th, dw, dv, 0))
        builder.add_psd_complex(dv, None, _epigraph_entries(layout, zh, th, dw, dv, 1))
    prog = builder.build(meta={"layout": layout, "problem": problem})
    return prog, layout


def recover(problem: RecoveryProblem, opts: SolveOptions | None = None, truth=None) -> RecoveryResult:
    """Solve a recovery problem; the optional truth is used only for error
    reporting, never by the solver."""
    opts = opts or SolveOptions()
    prog, layout = build_recovery_program(problem)
    res = conic.solve(prog, opts)
    dw, dv = problem.dims
    x_mat = layout.decode(layout["X"], res.x)
    estimate = BipartiteOperator(x_mat, dw, dv)
    misfit = float(np.linalg.norm(apply_measurement(problem.ensemble, estimate) - problem.y))
    residuals = dict(res.residuals)
    residuals["data_misfit"] = misfit
    residuals["eta_effective"] = problem.eta_effective
    frob_error = None
    if truth is not None:
        t_mat = truth.choi.mat if hasattr(truth, "choi") else (
            truth.mat if isinstance(truth, BipartiteOperator) else np.asarray(truth)
        )
        frob_error = frobenius(x_mat - t_mat)
    return RecoveryResult(
        estimate=estimate,
        objective=res.primal_value,
        residuals=residuals,
        frob_error=frob_error,
        solver=res,
    )


def recover_nuclear(problem: RecoveryProblem, opts=None, truth=None) -> RecoveryResult:
    if problem.regularizer != "nuclear":
        raise ValueError("problem is not a nuclear-norm recovery")
    return recover(problem, opts=opts, truth=truth)


def recover_square(problem: RecoveryProblem, opts=None, truth=None) -> RecoveryResult:
    if problem.regularizer != "square":
        raise ValueError("problem is not a square-norm recovery")
    return recover(problem, opts=opts, truth=truth)
