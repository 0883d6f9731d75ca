"""Standard-form SDPs: maximize Tr(C Z) s.t. Xi(Z) = D, Z PSD.

The constraint map is probed on an orthonormal Hermitian basis, which yields
its matrix and (by transposition in those coordinates) its adjoint, both of
which are verified rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import ShapeError, as_matrix, frobenius, hermitian_part, is_hermitian
from .build import ProgramBuilder, VarLayout
from .embed import embed_complex, smat, svec, unembed_scaled
from .program import ConicProgram, verify_kkt
from .solver import SolveOptions, solve

SQRT2 = np.sqrt(2.0)


def hvec(h: np.ndarray) -> np.ndarray:
    """Orthonormal real coordinates of a complex Hermitian matrix.

    Order: diagonal, then sqrt(2) * real and sqrt(2) * imaginary parts of the
    strict upper triangle, so that <H1, H2> = hvec(H1) . hvec(H2).
    """
    h = np.asarray(h)
    k = h.shape[0]
    iu, ju = np.triu_indices(k, 1)
    return np.concatenate(
        [h.real[np.diag_indices(k)], SQRT2 * h.real[iu, ju], SQRT2 * h.imag[iu, ju]]
    )


def hmat(v: np.ndarray, k: int) -> np.ndarray:
    """Inverse of :func:`hvec`."""
    v = np.asarray(v, dtype=float)
    if v.size != k * k:
        raise ShapeError(f"coordinate vector of length {v.size} is not {k}x{k}")
    iu, ju = np.triu_indices(k, 1)
    noff = iu.size
    out = np.zeros((k, k), dtype=np.complex128)
    out[np.diag_indices(k)] = v[:k]
    upper = (v[k : k + noff] + 1j * v[k + noff :]) / SQRT2
    out[iu, ju] = upper
    out[ju, iu] = upper.conj()
    return out


def encode_psd_dual(lam: np.ndarray) -> np.ndarray:
    """Conic dual coordinates of a complex Hermitian PSD multiplier."""
    return svec(embed_complex(lam)) / 2.0


def decode_psd_dual(y: np.ndarray, side_complex: int) -> np.ndarray:
    """Hermitian multiplier paired as Tr(H . Lam) against embedded psd rows."""
    return unembed_scaled(smat(np.asarray(y, dtype=float), 2 * side_complex))


@dataclass
class SdpPointReport:
    """Residuals of a candidate primal/dual pair for a standard-form SDP."""

    primal_equality: float
    primal_min_eig: float
    dual_min_eig: float
    primal_value: float
    dual_value: float
    gap: float
    slackness_primal: float
    slackness_dual: float
    kkt_max_residual: float

    def max_residual(self) -> float:
        return max(
            self.primal_equality,
            max(0.0, -self.primal_min_eig),
            max(0.0, -self.dual_min_eig),
            self.gap,
            self.slackness_primal,
            self.slackness_dual,
            self.kkt_max_residual,
        )


class StandardSdp:
    """A (Xi, C, D) triple together with its conic lowering."""

    def __init__(self, c_mat, d_mat, xi, xi_matrix):
        self.c_mat = as_matrix(c_mat)
        self.d_mat = as_matrix(d_mat)
        self.xi = xi
        self.xi_matrix = xi_matrix  # real (dw^2, dv^2) in hvec coordinates
        self.dim_z = self.c_mat.shape[0]
        self.dim_y = self.d_mat.shape[0]

    def xi_adjoint(self, y) -> np.ndarray:
        y = as_matrix(y)
        return hmat(self.xi_matrix.T @ hvec(y), self.dim_z)

    def to_conic(self) -> ConicProgram:
        """Lower to min -Tr(CZ) over hvec coordinates of Z."""
        dz = self.dim_z
        layout = VarLayout()
        z = layout.add_reals("z", dz * dz)
        builder = ProgramBuilder(layout)
        cvec = hvec(self.c_mat)
        for k in range(dz * dz):
            if cvec[k] != 0.0:
                builder.add_objective_term(z.start + k, -cvec[k])
        # equality rows: s = hvec(D) - Xi_matrix @ z
        entries = []
        xm = self.xi_matrix
        for i in range(xm.shape[0]):
            for k in np.nonzero(xm[i])[0]:
                entries.append((i, z.start + int(k), -xm[i, k]))
        builder.add_zero(hvec(self.d_mat), entries)
        # psd rows: s = svec(embed(Z))
        pair_entries = []
        iu, ju = np.triu_indices(dz, 1)
        noff = iu.size
        for q in range(dz):
            pair_entries.append((z.start + q, q, q, 1.0))
        for t in range(noff):
            pair_entries.append((z.start + dz + t, int(iu[t]), int(ju[t]), 1.0 / SQRT2))
        for t in range(noff):
            pair_entries.append(
                (z.start + dz + noff + t, int(iu[t]), int(ju[t]), 1j / SQRT2)
            )
        builder.add_psd_complex(dz, None, pair_entries)
        prog = builder.build(meta={"standard_sdp": self})
        prog.meta["layout"] = layout
        return prog

    def solve(self, opts: SolveOptions | None = None):
        """Solve the SDP; returns (value, Z, Y, SolverResult)."""
        prog = self.to_conic()
        res = solve(prog, opts)
        z_mat = hmat(res.x, self.dim_z)
        y_mat = hmat(res.y[: self.dim_y * self.dim_y], self.dim_y)
        return -res.primal_value, z_mat, y_mat, res

    def encode_points(self, z_mat, y_mat):
        """Conic primal/dual vectors representing a candidate SDP pair."""
        x = hvec(z_mat)
        lam = self.xi_adjoint(y_mat) - self.c_mat
        y = np.concatenate([hvec(y_mat), encode_psd_dual(hermitian_part(lam))])
        return x, y

    def verify_points(self, z_mat, y_mat, tol=1e-8) -> SdpPointReport:
        """Feasibility, optimality gap and complementary slackness residuals.

        Slackness is reported as the Frobenius norms of
        ``Xi_adj(Y) Z - C Z`` and ``Xi(Z) Y - D Y``, normalized by the scale
        of the objective values.
        """
        z_mat = as_matrix(z_mat)
        y_mat = as_matrix(y_mat)
        if not is_hermitian(z_mat, rtol=1e-8) or not is_hermitian(y_mat, rtol=1e-8):
            raise ShapeError("candidate SDP points must be Hermitian")
        pv = float(np.real(np.trace(self.c_mat @ z_mat)))
        dv = float(np.real(np.trace(self.d_mat @ y_mat)))
        scale = 1.0 + abs(pv) + abs(dv)
        xi_z = self.xi(z_mat)
        xi_ad_y = self.xi_adjoint(y_mat)
        prog = self.to_conic()
        x_vec, y_vec = self.encode_points(z_mat, y_mat)
        kkt = verify_kkt(prog, x_vec, y_vec, tol=tol)
        return SdpPointReport(
            primal_equality=frobenius(xi_z - self.d_mat) / scale,
            primal_min_eig=float(np.linalg.eigvalsh(hermitian_part(z_mat))[0]),
            dual_min_eig=float(np.linalg.eigvalsh(hermitian_part(xi_ad_y - self.c_mat))[0]),
            primal_value=pv,
            dual_value=dv,
            gap=abs(pv - dv) / scale,
            slackness_primal=frobenius(xi_ad_y @ z_mat - self.c_mat @ z_mat) / scale,
            slackness_dual=frobenius(xi_z @ y_mat - self.d_mat @ y_mat) / scale,
            kkt_max_residual=kkt.max_residual(),
        )


def build_standard_sdp(c_mat, d_mat, xi) -> StandardSdp:
    """Assemble a standard-form SDP from the action of its constraint map.

    The map is probed on an orthonormal Hermitian basis; a probe whose image
    fails Hermiticity raises, and the assembled adjoint is checked against
    the pairing identity on the full basis.
    """
    c_mat = as_matrix(c_mat)
    d_mat = as_matrix(d_mat)
    if not is_hermitian(c_mat) or not is_hermitian(d_mat):
        raise ShapeError("C and D must be Hermitian")
    dz = c_mat.shape[0]
    dy = d_mat.shape[0]
    xm = np.zeros((dy * dy, dz * dz))
    for k in range(dz * dz):
        coords = np.zeros(dz * dz)
        coords[k] = 1.0
        basis_el = hmat(coords, dz)
        image = as_matrix(xi(basis_el))
        if image.shape != (dy, dy):
            raise ShapeError(f"constraint map returned shape {image.shape}")
        if not is_hermitian(image, rtol=1e-9):
            raise ShapeError("constraint map is not Hermiticity preserving")
        xm[:, k] = hvec(image)
    return StandardSdp(c_mat, d_mat, xi, xm)
