"""Low-rank recovery of matrices and operator maps with square-norm
(diamond-norm) regularization, on top of a self-contained conic solver."""

from .choi import KrausSet, OperatorMap
from .linalg import BipartiteOperator
from .measure import MeasurementEnsemble, apply_measurement
from .norms import (
    check_bounds,
    diamond_norm,
    extremality_check,
    square_norm,
    variational_lower_bound,
    verify_optimal_points,
)
from .recovery import RecoveryProblem, RecoveryResult, recover

__version__ = "0.1.0"

__all__ = [
    "BipartiteOperator",
    "KrausSet",
    "MeasurementEnsemble",
    "OperatorMap",
    "RecoveryProblem",
    "RecoveryResult",
    "apply_measurement",
    "check_bounds",
    "diamond_norm",
    "extremality_check",
    "recover",
    "square_norm",
    "variational_lower_bound",
    "verify_optimal_points",
    "__version__",
]
