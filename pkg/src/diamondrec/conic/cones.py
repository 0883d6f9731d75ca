"""Cone segments and their Euclidean projections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import ShapeError
from .embed import smat, svec, svec_len

KINDS = ("zero", "nonneg", "soc", "psd")


@dataclass(frozen=True)
class ConeSeg:
    """One segment of the product cone the slack vector lives in.

    ``size`` counts rows; a psd segment of matrix side ``side`` occupies
    ``side * (side + 1) / 2`` scaled-symmetric coordinates.
    """

    kind: str
    size: int
    side: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ShapeError(f"unknown cone kind {self.kind!r}")
        if self.kind == "psd":
            if svec_len(self.side) != self.size:
                raise ShapeError(
                    f"psd segment of side {self.side} needs {svec_len(self.side)} rows"
                )
        elif self.size < 1:
            raise ShapeError("cone segment must have positive size")


def total_rows(segs) -> int:
    return sum(s.size for s in segs)


def segment_slices(segs):
    out = []
    off = 0
    for s in segs:
        out.append((s, slice(off, off + s.size)))
        off += s.size
    return out


def _project_soc(z: np.ndarray) -> np.ndarray:
    t, tail = z[0], z[1:]
    nt = np.linalg.norm(tail)
    if nt <= t:
        return z
    if nt <= -t:
        return np.zeros_like(z)
    alpha = (t + nt) / 2.0
    out = np.empty_like(z)
    out[0] = alpha
    out[1:] = tail * (alpha / nt)
    return out


def _project_psd(z: np.ndarray, side: int) -> np.ndarray:
    s = smat(z, side)
    w, v = np.linalg.eigh(s)
    if w[0] >= 0:
        return z
    pos = w > 0
    if not np.any(pos):
        return np.zeros_like(z)
    vp = v[:, pos] * w[pos]
    return svec(vp @ v[:, pos].T)


def project_cone(segs, z: np.ndarray) -> np.ndarray:
    """Project onto the product cone K itself."""
    out = np.array(z, dtype=float, copy=True)
    for seg, sl in segment_slices(segs):
        if seg.kind == "zero":
            out[sl] = 0.0
        elif seg.kind == "nonneg":
            np.clip(out[sl], 0.0, None, out=out[sl])
        elif seg.kind == "soc":
            out[sl] = _project_soc(out[sl])
        else:
            out[sl] = _project_psd(out[sl], seg.side)
    return out


def project_dual_cone(segs, z: np.ndarray) -> np.ndarray:
    """Project onto the dual cone K*: zero rows become free, the rest are self-dual."""
    out = np.array(z, dtype=float, copy=True)
    for seg, sl in segment_slices(segs):
        if seg.kind == "zero":
            continue
        if seg.kind == "nonneg":
            np.clip(out[sl], 0.0, None, out=out[sl])
        elif seg.kind == "soc":
            out[sl] = _project_soc(out[sl])
        else:
            out[sl] = _project_psd(out[sl], seg.side)
    return out


def cone_distance(segs, z: np.ndarray) -> float:
    """Euclidean distance of a point to the product cone K."""
    return float(np.linalg.norm(z - project_cone(segs, z)))


def dual_cone_distance(segs, z: np.ndarray) -> float:
    return float(np.linalg.norm(z - project_dual_cone(segs, z)))
