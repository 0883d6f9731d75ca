"""Measurement ensembles and their application to matrices and maps.

Every ensemble materializes a stack of sensing matrices ``G_i`` in Choi
coordinates, so applying it is always ``y_i = Tr(G_i X)`` regardless of how a
functional was originally factored (state preparation plus observable,
convolution rows, rank-one probes).  The factored data is kept alongside for
tests and for consumers that want the physical picture.

Ensembles are rebuilt deterministically from (kind, m, dims, seed): the same
tuple always yields bit-identical functionals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .choi import OperatorMap, random_orthogonal, random_state_vector, random_unitary
from .linalg import BipartiteOperator, ShapeError, as_matrix


@dataclass(frozen=True)
class MeasurementEnsemble:
    kind: str
    m: int
    dims: tuple  # (dim_w, dim_v)
    seed: int
    matrices: np.ndarray  # (m, N, N) sensing matrices in Choi coordinates
    factors: dict = field(default_factory=dict, repr=False)
    params: dict = field(default_factory=dict)

    @property
    def signal_dim(self) -> int:
        return self.dims[0] * self.dims[1]


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def gaussian_ensemble(m, dims, field_kind="real", seed=0) -> MeasurementEnsemble:
    """Dense Gaussian sensing matrices, real or complex entries."""
    if m < 1:
        raise ShapeError("at least one measurement is required")
    dw, dv = dims
    n = dw * dv
    rng = _rng(seed)
    if field_kind == "real":
        mats = rng.standard_normal((m, n, n)).astype(np.complex128)
        kind = "gaussian_real"
    elif field_kind == "complex":
        mats = _complex_gaussian(rng, (m, n, n))
        kind = "gaussian_complex"
    else:
        raise ValueError(f"unknown field {field_kind!r}")
    return MeasurementEnsemble(kind, m, (dw, dv), seed, mats)


def rank_one_gaussian_ensemble(m, dims, seed=0) -> MeasurementEnsemble:
    """PSD rank-one probes a a^dag with complex Gaussian vectors a."""
    if m < 1:
        raise ShapeError("at least one measurement is required")
    dw, dv = dims
    n = dw * dv
    rng = _rng(seed)
    vecs = _complex_gaussian(rng, (m, n))
    mats = np.einsum("ki,kj->kij", vecs, vecs.conj())
    return MeasurementEnsemble(
        "rank_one_gaussian", m, (dw, dv), seed, mats, factors={"vectors": vecs}
    )


def diagonal_spectrum(n) -> np.ndarray:
    """The fixed spectrum (2/n)(1, -1, 2, -2, ...) used by the structured
    and tomography ensembles; defined for even n and has unit sup norm."""
    if n % 2:
        raise ShapeError("the alternating diagonal spectrum needs even dimension")
    half = np.arange(1, n // 2 + 1)
    vals = np.empty(n)
    vals[0::2] = half
    vals[1::2] = -half
    return 2.0 * vals / n


def structured_ensemble(m, n, seed=0, unitary_group="unitary") -> MeasurementEnsemble:
    """Rank-one map inputs paired with unit-spectral-norm observables.

    Functional j sends a map M to Tr(A_j M(x_j y_j^dag)) with x_j, y_j uniform
    on the complex unit sphere and A_j = U_j D V_j for Haar factors and the
    fixed alternating diagonal D.
    """
    if m < 1:
        raise ShapeError("at least one measurement is required")
    d_spec = np.diag(diagonal_spectrum(n))
    rng = _rng(seed)
    draw = random_unitary if unitary_group == "unitary" else random_orthogonal
    if unitary_group not in ("unitary", "orthogonal"):
        raise ValueError(f"unknown unitary group {unitary_group!r}")
    xs = np.empty((m, n), dtype=np.complex128)
    ys = np.empty((m, n), dtype=np.complex128)
    obs = np.empty((m, n, n), dtype=np.complex128)
    mats = np.empty((m, n * n, n * n), dtype=np.complex128)
    for j in range(m):
        xs[j] = random_state_vector(n, rng)
        ys[j] = random_state_vector(n, rng)
        obs[j] = draw(n, rng) @ d_spec @ draw(n, rng)
        rho = np.outer(xs[j], ys[j].conj())
        mats[j] = np.kron(obs[j], rho.T)
    return MeasurementEnsemble(
        "structured_udv",
        m,
        (n, n),
        seed,
        mats,
        factors={"x": xs, "y": ys, "observables": obs},
        params={"unitary_group": unitary_group},
    )


def tomography_spectrum(n) -> np.ndarray:
    """Non-degenerate observable spectrum (1, (n-1)/n, ..., 1/n).

    Unit sup norm like the alternating spectrum, but with nonzero trace: a
    traceless observable family is blind to the trace sector of the Choi
    matrix, which would make exact tomography impossible at any m.
    """
    return np.arange(n, 0, -1) / n


def process_tomo_ensemble(m, dims, seed=0) -> MeasurementEnsemble:
    """Pure-state preparations with Haar-rotated fixed-spectrum observables."""
    if m < 1:
        raise ShapeError("at least one measurement is required")
    dw, dv = dims
    d_spec = np.diag(tomography_spectrum(dw))
    rng = _rng(seed)
    psis = np.empty((m, dv), dtype=np.complex128)
    obs = np.empty((m, dw, dw), dtype=np.complex128)
    mats = np.empty((m, dw * dv, dw * dv), dtype=np.complex128)
    for j in range(m):
        psis[j] = random_state_vector(dv, rng)
        u = random_unitary(dw, rng)
        obs[j] = u @ d_spec @ u.conj().T
        rho = np.outer(psis[j], psis[j].conj())
        mats[j] = np.kron(obs[j], rho.T)
    return MeasurementEnsemble(
        "process_tomo",
        m,
        (dw, dv),
        seed,
        mats,
        factors={"psi": psis, "observables": obs},
    )


def circular_convolution(w, x) -> np.ndarray:
    """Circular convolution of two equal-length vectors."""
    w = np.asarray(w, dtype=np.complex128).ravel()
    x = np.asarray(x, dtype=np.complex128).ravel()
    if w.size != x.size:
        raise ShapeError("circular convolution needs equal lengths")
    length = w.size
    idx = (np.arange(length)[:, None] - np.arange(length)[None, :]) % length
    return np.einsum("j,ij->i", w, x[idx])


def fourier_matrix(length) -> np.ndarray:
    """Unitary DFT matrix with positive-exponent convention."""
    j, k = np.meshgrid(np.arange(length), np.arange(length), indexing="ij")
    return np.exp(2j * np.pi * j * k / length) / np.sqrt(length)


def deconv_ensemble(n_dim, conv_len, n_probes, seed=0) -> MeasurementEnsemble:
    """Blind-matrix-deconvolution measurements.

    Fixed real Gaussian mixing matrices B, C of shape (conv_len, n_dim) and
    real Gaussian probe vectors h^(q), m^(q) produce, per Fourier index l and
    probe q, the rank-one functional Tr(E_l M(rho_q)) with
    E_l = outer(row_l(FC), row_l(FB)) and rho_q = outer(h_q, m_q).
    """
    if n_dim < 1 or conv_len < 1 or n_probes < 1:
        raise ShapeError("deconvolution ensemble needs positive sizes")
    rng = _rng(seed)
    b_mix = rng.standard_normal((conv_len, n_dim))
    c_mix = rng.standard_normal((conv_len, n_dim))
    h = rng.standard_normal((n_probes, n_dim))
    mvecs = rng.standard_normal((n_probes, n_dim))
    four = fourier_matrix(conv_len)
    fb = four @ b_mix
    fc = four @ c_mix
    e_mats = np.einsum("li,lj->lij", fc, fb)  # rank one per Fourier row
    rhos = np.einsum("qi,qj->qij", h, mvecs)
    n2 = n_dim * n_dim
    mats = np.empty((conv_len * n_probes, n2, n2), dtype=np.complex128)
    pairs = []
    for q in range(n_probes):
        for l in range(conv_len):
            mats[q * conv_len + l] = np.kron(e_mats[l], rhos[q].T)
            pairs.append((l, q))
    return MeasurementEnsemble(
        "deconv",
        conv_len * n_probes,
        (n_dim, n_dim),
        seed,
        mats,
        factors={
            "b_mix": b_mix,
            "c_mix": c_mix,
            "h": h,
            "m": mvecs,
            "e_mats": e_mats,
            "rhos": rhos,
            "pairs": pairs,
        },
        params={"n_dim": n_dim, "conv_len": conv_len, "n_probes": n_probes},
    )


def complete_basis_ensemble(dims) -> MeasurementEnsemble:
    """All N^2 matrix units; the induced linear system determines the signal."""
    dw, dv = dims
    n = dw * dv
    mats = np.zeros((n * n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            mats[i * n + j, i, j] = 1.0
    return MeasurementEnsemble("complete_basis", n * n, (dw, dv), 0, mats)


_BUILDERS = {
    "gaussian_real": lambda m, dims, seed, params: gaussian_ensemble(m, dims, "real", seed),
    "gaussian_complex": lambda m, dims, seed, params: gaussian_ensemble(m, dims, "complex", seed),
    "rank_one_gaussian": lambda m, dims, seed, params: rank_one_gaussian_ensemble(m, dims, seed),
    "structured_udv": lambda m, dims, seed, params: structured_ensemble(
        m, dims[0], seed, params.get("unitary_group", "unitary")
    ),
    "process_tomo": lambda m, dims, seed, params: process_tomo_ensemble(m, dims, seed),
    "deconv": lambda m, dims, seed, params: deconv_ensemble(
        params["n_dim"], params["conv_len"], params["n_probes"], seed
    ),
    "complete_basis": lambda m, dims, seed, params: complete_basis_ensemble(dims),
}


def build_ensemble(kind, m, dims, seed, params=None) -> MeasurementEnsemble:
    """Rematerialize an ensemble from its specification tuple."""
    if kind not in _BUILDERS:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    return _BUILDERS[kind](m, tuple(dims), seed, params or {})


def _signal_matrix(signal, dims) -> np.ndarray:
    if isinstance(signal, OperatorMap):
        mat = signal.choi.mat
        sig_dims = (signal.dim_w, signal.dim_v)
    elif isinstance(signal, BipartiteOperator):
        mat = signal.mat
        sig_dims = (signal.dim_w, signal.dim_v)
    else:
        mat = as_matrix(signal)
        sig_dims = dims
    if sig_dims != tuple(dims) or mat.shape[0] != dims[0] * dims[1]:
        raise ShapeError(f"signal dims {sig_dims} do not match ensemble dims {tuple(dims)}")
    return mat


def apply_measurement(ensemble: MeasurementEnsemble, signal) -> np.ndarray:
    """Outcome vector y with y_i = Tr(G_i X); linear and deterministic."""
    mat = _signal_matrix(signal, ensemble.dims)
    return np.einsum("kij,ji->k", ensemble.matrices, mat)


def adjoint_measurement(ensemble: MeasurementEnsemble, v) -> np.ndarray:
    """Adjoint map satisfying <apply(X), v> = <X, adjoint(v)> (Frobenius)."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.size != ensemble.m:
        raise ShapeError("outcome vector length does not match the ensemble")
    return np.einsum("k,kji->ij", v, ensemble.matrices.conj())


def add_noise(y, eta_target, rng):
    """Additive noise of exactly the requested Euclidean norm.

    A Gaussian direction (complex when y is complex) is rescaled so that
    ||eps|| equals eta_target; returns (y + eps, ||eps||).
    """
    y = np.asarray(y)
    if eta_target < 0:
        raise ValueError("noise level must be nonnegative")
    if eta_target == 0:
        return y.copy(), 0.0
    if np.iscomplexobj(y):
        eps = _complex_gaussian(rng, y.shape)
    else:
        eps = rng.standard_normal(y.shape)
    eps *= eta_target / np.linalg.norm(eps)
    return y + eps, float(np.linalg.norm(eps))
