"""Sampled checks of descent-cone geometry.

Descent cones are unions over step sizes, so membership is probed on a
geometric grid of steps; certificates carry the base point, direction and
step that witnessed the decrease and can be re-verified independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    BipartiteOperator,
    ShapeError,
    as_matrix,
    frobenius,
    nuclear_norm,
    schatten_norm,
)
from .norms import extremality_check, sandwiched_nuclear_norm, square_norm

DEFAULT_TAU_GRID = np.geomspace(1e-6, 1e2, 24)


@dataclass
class DescentCertificate:
    base: np.ndarray
    direction: np.ndarray
    tau: float
    tag: str
    margin: float


def _norm_value(tag, x: BipartiteOperator, opts=None) -> float:
    if tag == "nuclear":
        return nuclear_norm(x.mat)
    if tag == "square":
        return square_norm(x, opts=opts).value
    raise ValueError(f"unknown norm tag {tag!r}")


def is_descent_direction(tag, x: BipartiteOperator, u, taus=None, opts=None):
    """First step on the grid along which the norm does not increase.

    Returns a :class:`DescentCertificate` or None.  The membership tolerance
    scales with the norm at the base point to absorb SDP solver noise in
    square-norm evaluations.
    """
    u = as_matrix(u)
    if frobenius(x.mat) == 0.0:
        raise ShapeError("descent cones are probed at nonzero base points")
    taus = DEFAULT_TAU_GRID if taus is None else np.asarray(taus, dtype=float)
    base_value = _norm_value(tag, x, opts)
    tol = 1e-9 * (1.0 + base_value)
    for tau in taus:
        moved = BipartiteOperator(x.mat + tau * u, x.dim_w, x.dim_v)
        value = _norm_value(tag, moved, opts)
        if value <= base_value + tol:
            return DescentCertificate(
                base=x.mat, direction=u, tau=float(tau), tag=tag,
                margin=base_value - value,
            )
    return None


def recheck_certificate(cert: DescentCertificate, dim_w, dim_v, opts=None) -> bool:
    """Recompute both norm values of a certificate from scratch."""
    x = BipartiteOperator(cert.base, dim_w, dim_v)
    moved = BipartiteOperator(cert.base + cert.tau * cert.direction, dim_w, dim_v)
    base_value = _norm_value(cert.tag, x, opts)
    return _norm_value(cert.tag, moved, opts) <= base_value + 1e-9 * (1.0 + base_value)


@dataclass
class ConeContainmentReport:
    samples: int
    violations: int
    square_certificates_checked: int
    square_certificate_failures: int


def cone_containment_check(
    x: BipartiteOperator,
    samples,
    rng,
    taus=None,
    verify_every=8,
    opts=None,
) -> ConeContainmentReport:
    """Square-norm descent directions at an extremal point must also be
    nuclear-norm descent directions.

    Directions are drawn as u = X' - X with ||X'|| square norm pushed below
    the base value through the dimension bound (dim_v times nuclear norm), so
    each sample carries a provable square-norm certificate at step one; every
    ``verify_every``-th certificate is additionally re-verified by an SDP
    solve.  The nuclear side is then probed honestly on the step grid.
    """
    ext = extremality_check(x)
    if not ext.extremal:
        raise ShapeError("cone containment is asserted at extremal points only")
    base_nuclear = ext.nuclear
    taus = DEFAULT_TAU_GRID if taus is None else np.asarray(taus, dtype=float)
    if 1.0 not in taus:
        taus = np.sort(np.append(taus, 1.0))
    n = x.dim
    violations = 0
    checked = 0
    cert_failures = 0
    for k in range(samples):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        gamma = rng.uniform(0.2, 0.98)
        x_prime = (gamma * base_nuclear / (x.dim_v * nuclear_norm(g))) * g
        u = x_prime - x.mat
        if verify_every and k % verify_every == 0:
            checked += 1
            moved = BipartiteOperator(x.mat + u, x.dim_w, x.dim_v)
            if square_norm(moved, opts=opts).value > base_nuclear + 1e-7 * (1.0 + base_nuclear):
                cert_failures += 1
                continue
        if is_descent_direction("nuclear", x, u, taus=taus) is None:
            violations += 1
    return ConeContainmentReport(
        samples=samples,
        violations=violations,
        square_certificates_checked=checked,
        square_certificate_failures=cert_failures,
    )


def active_sandwich_descent_check(x: BipartiteOperator, a, b, samples, rng, taus=None) -> int:
    """Sampled containment for one active sandwich (A, B).

    Requires the sandwiched nuclear norm to be active, i.e. to equal the
    square norm at the base point; returns the number of sampled square-norm
    descent directions that fail to descend for the sandwiched norm.
    """
    ext = extremality_check(x)
    if not ext.extremal:
        raise ShapeError("active sandwiches are certified at extremal points only")
    base = sandwiched_nuclear_norm(x, a, b)
    if abs(base - ext.nuclear) > 1e-6 * (1.0 + ext.nuclear):
        raise ShapeError("the sandwich (A, B) is not active at this point")
    taus = DEFAULT_TAU_GRID if taus is None else np.asarray(taus, dtype=float)
    if 1.0 not in taus:
        taus = np.sort(np.append(taus, 1.0))
    n = x.dim
    tol = 1e-9 * (1.0 + base)
    failures = 0
    for _ in range(samples):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        gamma = rng.uniform(0.2, 0.98)
        x_prime = (gamma * ext.nuclear / (x.dim_v * nuclear_norm(g))) * g
        u = x_prime - x.mat
        descended = False
        for tau in taus:
            moved = BipartiteOperator(x.mat + tau * u, x.dim_w, x.dim_v)
            if sandwiched_nuclear_norm(moved, a, b) <= base + tol:
                descended = True
                break
        if not descended:
            failures += 1
    return failures


def pinching_check(z, p_proj, q_proj, p) -> float:
    """Slack of the pinching inequality for Schatten order p in {1, 2}."""
    z = as_matrix(z)
    p_proj = as_matrix(p_proj)
    q_proj = as_matrix(q_proj)
    for proj in (p_proj, q_proj):
        if frobenius(proj @ proj - proj) > 1e-9 * max(1.0, frobenius(proj)):
            raise ShapeError("pinching requires orthogonal projectors")
        if frobenius(proj - proj.conj().T) > 1e-9 * max(1.0, frobenius(proj)):
            raise ShapeError("pinching requires orthogonal projectors")
    if p not in (1, 2):
        raise ValueError("pinching is checked for Schatten orders 1 and 2")
    eye = np.eye(z.shape[0])
    inner = schatten_norm(p_proj @ z @ q_proj, p) ** p
    outer = schatten_norm((eye - p_proj) @ z @ (eye - q_proj), p) ** p
    return schatten_norm(z, p) ** p - inner - outer


def random_projector(n, rank, rng) -> np.ndarray:
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    q, _ = np.linalg.qr(g)
    return q @ q.conj().T


def _tangent_project(x_mat, u):
    usv = np.linalg.svd(x_mat, full_matrices=False)
    uu, ss, vh = usv
    keep = ss > 1e-9 * (ss[0] if ss.size else 1.0)
    pc = uu[:, keep] @ uu[:, keep].conj().T
    pr = vh[keep].conj().T @ vh[keep]
    return pc @ u + u @ pr - pc @ u @ pr


def effective_rank_bound_check(x: BipartiteOperator, samples, rng, taus=None) -> float:
    """Largest nuclear-to-Frobenius ratio over sampled nuclear descent
    directions at a rank-r base point.

    Directions mix isotropic Gaussians with tangent-space-biased ones
    (half/half) to stress the bound near its extremizers; directions without
    a descent certificate on the grid are skipped.
    """
    s = np.linalg.svd(x.mat, compute_uv=False)
    rank = int(np.sum(s > 1e-9 * s[0]))
    if rank == 0:
        raise ShapeError("the base point must be nonzero")
    taus = DEFAULT_TAU_GRID if taus is None else np.asarray(taus, dtype=float)
    n = x.dim
    max_ratio = np.sqrt(rank)  # attained by the direction -X
    accepted = 0
    attempts = 0
    while accepted < samples and attempts < 40 * samples:
        attempts += 1
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if attempts % 2 == 0:
            g = 0.5 * g + 0.5 * _tangent_project(x.mat, g)
        u = g - rng.uniform(0.5, 1.5) * x.mat * (nuclear_norm(g) / nuclear_norm(x.mat))
        cert = is_descent_direction("nuclear", x, u, taus=taus)
        if cert is None:
            continue
        accepted += 1
        max_ratio = max(max_ratio, nuclear_norm(u) / frobenius(u))
    return float(max_ratio)


def sampled_min_conic_upper_bound(apply_fn, x: BipartiteOperator, tag, samples, rng, taus=None) -> float:
    """Sampled upper bound on the minimum conic singular value.

    Minimizes ||A(u)|| / ||u|| over sampled directions that certify descent
    of the tagged norm at the base point.  Sampling only ever shrinks the
    infimum's search set, so the reported number is an upper bound on the
    true minimum conic singular value, never a lower bound.
    """
    taus = DEFAULT_TAU_GRID if taus is None else np.asarray(taus, dtype=float)
    n = x.dim
    bound = np.inf
    for _ in range(samples):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        u = g - rng.uniform(0.5, 1.5) * x.mat * (nuclear_norm(g) / nuclear_norm(x.mat))
        if is_descent_direction(tag, x, u, taus=taus) is None:
            continue
        bound = min(bound, float(np.linalg.norm(apply_fn(u)) / frobenius(u)))
    return float(bound)
