"""Self-contained first-order conic solver and SDP utilities."""

from .build import ProgramBuilder, VarLayout
from .cones import ConeSeg, cone_distance, dual_cone_distance
from .embed import embed_complex, smat, svec, unembed, unembed_scaled
from .program import ConicProgram, KktReport, SolverResult, verify_kkt
from .solver import NumericBreakdownError, SolveOptions, solve
from .standard import (
    SdpPointReport,
    StandardSdp,
    build_standard_sdp,
    decode_psd_dual,
    encode_psd_dual,
    hmat,
    hvec,
)

__all__ = [
    "ConeSeg",
    "ConicProgram",
    "KktReport",
    "NumericBreakdownError",
    "ProgramBuilder",
    "SdpPointReport",
    "SolveOptions",
    "SolverResult",
    "StandardSdp",
    "VarLayout",
    "build_standard_sdp",
    "cone_distance",
    "decode_psd_dual",
    "dual_cone_distance",
    "embed_complex",
    "encode_psd_dual",
    "hmat",
    "hvec",
    "smat",
    "solve",
    "svec",
    "unembed",
    "unembed_scaled",
    "verify_kkt",
]
