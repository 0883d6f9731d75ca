"""JSON wire formats for matrices, maps, ensembles, problems and reports.

Complex matrices travel as ``{"rows": r, "cols": c, "data": [[re, im], ...]}``
in row-major order; bipartite operators add the factor dimensions, operator
maps wrap their Choi matrix.  Ensembles are serialized by specification
(kind, m, dims, seed, params) and rematerialize bit-identically, or by
explicit matrices for external data.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .choi import OperatorMap
from .harness import ExperimentConfig, ResultRow
from .linalg import BipartiteOperator, ShapeError, as_matrix
from .measure import MeasurementEnsemble, build_ensemble
from .norms import SquareNormReport
from .recovery import RecoveryProblem, RecoveryResult


def matrix_to_json(x) -> dict:
    x = as_matrix(x)
    data = [[float(v.real), float(v.imag)] for v in x.reshape(-1)]
    return {"rows": int(x.shape[0]), "cols": int(x.shape[1]), "data": data}


def matrix_from_json(obj) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = np.asarray(obj["data"], dtype=float)
    if data.shape != (rows * cols, 2):
        raise ShapeError(f"matrix payload has shape {data.shape}, expected ({rows * cols}, 2)")
    return (data[:, 0] + 1j * data[:, 1]).reshape(rows, cols)


def bipartite_to_json(x: BipartiteOperator) -> dict:
    out = matrix_to_json(x.mat)
    out["dimW"] = int(x.dim_w)
    out["dimV"] = int(x.dim_v)
    return out


def bipartite_from_json(obj) -> BipartiteOperator:
    return BipartiteOperator(matrix_from_json(obj), int(obj["dimW"]), int(obj["dimV"]))


def operator_map_to_json(m: OperatorMap) -> dict:
    return {"choi": bipartite_to_json(m.choi), "dimW": int(m.dim_w), "dimV": int(m.dim_v)}


def operator_map_from_json(obj) -> OperatorMap:
    choi = bipartite_from_json(obj["choi"])
    if (choi.dim_w, choi.dim_v) != (int(obj["dimW"]), int(obj["dimV"])):
        raise ShapeError("map dims disagree with the embedded Choi matrix")
    return OperatorMap(choi)


def kraus_to_json(operators) -> list:
    return [matrix_to_json(k) for k in operators]


def kraus_from_json(obj) -> tuple:
    return tuple(matrix_from_json(k) for k in obj)


def vector_to_json(y) -> list:
    y = np.asarray(y, dtype=np.complex128).ravel()
    return [[float(v.real), float(v.imag)] for v in y]


def vector_from_json(obj) -> np.ndarray:
    data = np.asarray(obj, dtype=float)
    if data.ndim == 1:
        return data.astype(np.complex128)
    return data[:, 0] + 1j * data[:, 1]


def ensemble_to_json(e: MeasurementEnsemble, explicit=False) -> dict:
    if explicit or e.kind == "explicit":
        return {
            "kind": "explicit",
            "m": int(e.m),
            "dims": [int(e.dims[0]), int(e.dims[1])],
            "seed": int(e.seed),
            "matrices": [matrix_to_json(g) for g in e.matrices],
        }
    out = {
        "kind": e.kind,
        "m": int(e.m),
        "dims": [int(e.dims[0]), int(e.dims[1])],
        "seed": int(e.seed),
    }
    if e.params:
        out["params"] = dict(e.params)
    return out


def ensemble_from_json(obj) -> MeasurementEnsemble:
    dims = tuple(int(d) for d in obj["dims"])
    if obj["kind"] == "explicit":
        mats = np.stack([matrix_from_json(g) for g in obj["matrices"]])
        return MeasurementEnsemble("explicit", int(obj["m"]), dims, int(obj.get("seed", 0)), mats)
    return build_ensemble(
        obj["kind"], int(obj["m"]), dims, int(obj.get("seed", 0)), obj.get("params")
    )


def problem_to_json(p: RecoveryProblem) -> dict:
    return {
        "ensemble": ensemble_to_json(p.ensemble),
        "y": vector_to_json(p.y),
        "eta": float(p.eta),
        "regularizer": p.regularizer,
        "cpt": bool(p.cpt),
        "dims": [int(p.dims[0]), int(p.dims[1])],
    }


def problem_from_json(obj) -> RecoveryProblem:
    return RecoveryProblem(
        ensemble=ensemble_from_json(obj["ensemble"]),
        y=vector_from_json(obj["y"]),
        eta=float(obj.get("eta", 0.0)),
        regularizer=obj["regularizer"],
        cpt=bool(obj.get("cpt", False)),
        dims=tuple(obj["dims"]) if "dims" in obj else None,
    )


def square_norm_report_to_json(rep: SquareNormReport) -> dict:
    return {
        "value": rep.value,
        "primal_value": rep.primal_value,
        "dual_value": rep.dual_value,
        "gap": rep.gap,
        "dual_witness_y": matrix_to_json(rep.dual_y),
        "dual_witness_z": matrix_to_json(rep.dual_z),
        "primal_witness_z": matrix_to_json(rep.primal_z),
        "primal_witness_rho": matrix_to_json(rep.primal_rho),
        "primal_witness_sigma": matrix_to_json(rep.primal_sigma),
        "solver": {
            "status": rep.solver.status,
            "iterations": rep.solver.iterations,
            "residuals": {k: float(v) for k, v in rep.solver.residuals.items()},
        },
    }


def recovery_result_to_json(r: RecoveryResult) -> dict:
    out = {
        "estimate": bipartite_to_json(r.estimate),
        "objective": float(r.objective),
        "residuals": {k: float(v) for k, v in r.residuals.items()},
        "solver_status": r.solver.status,
        "solver_iterations": int(r.solver.iterations),
    }
    if r.frob_error is not None:
        out["frob_error"] = float(r.frob_error)
    return out


def config_to_json(cfg: ExperimentConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out["m_sweep"] = list(cfg.m_sweep)
    out["regularizers"] = list(cfg.regularizers)
    return out


def config_from_json(obj) -> ExperimentConfig:
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(obj) - fields
    if unknown:
        raise ValueError(f"unknown experiment config keys: {sorted(unknown)}")
    kwargs = dict(obj)
    kwargs["m_sweep"] = tuple(int(m) for m in kwargs["m_sweep"])
    if "regularizers" in kwargs:
        kwargs["regularizers"] = tuple(kwargs["regularizers"])
    return ExperimentConfig(**kwargs)


def dump(obj, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path):
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)
