"""Experiment runner for the phase-transition studies.

Each (regularizer, m, trial) cell draws a fresh ground truth and ensemble
from a seed derived deterministically from the master seed, recovers, and
counts a success when the Frobenius error is below the threshold.  Failed
solves are logged and counted as non-successes; a sweep always completes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .choi import map_of_unitary_pair, random_channel, random_orthogonal, random_unitary
from .conic import SolveOptions
from .linalg import BipartiteOperator
from .measure import (
    MeasurementEnsemble,
    apply_measurement,
    complete_basis_ensemble,
    deconv_ensemble,
    gaussian_ensemble,
    process_tomo_ensemble,
    structured_ensemble,
)
from .recovery import RecoveryProblem, recover

log = logging.getLogger(__name__)

EXPERIMENTS = ("uv_retrieval", "process_tomo", "deconv", "lowrank_gaussian")

CSV_COLUMNS = (
    "experiment",
    "regularizer",
    "m",
    "trials",
    "successes",
    "mean_frob_error",
    "median_solve_ms",
    "seed",
)

MACHINE_EPS = 2.2e-16


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    m_sweep: tuple
    trials: int = 20
    regularizers: tuple = ("nuclear", "square")
    success_threshold: float = 1e-5
    eta: object = "eps"  # "eps" or a nonnegative float
    cpt: bool = False
    master_seed: int = 0
    n: int = 2                      # local dimension (uv, process, deconv, lowrank)
    kraus_rank: int = 1             # process_tomo truth
    conv_len: int = 0               # deconv: rows of B, C; 0 means n
    rank: int = 1                   # lowrank_gaussian truth rank
    truth_kind: str = "real"        # lowrank_gaussian: "real" or "hermitian"
    ensemble: str = ""              # "" selects the experiment's default
    unitary_group: str = "orthogonal"  # group the truth factors are drawn from
    solver_tol: float = 1e-8
    solver_max_iters: int = 20000
    measure_timing: bool = True

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        sweep = tuple(int(m) for m in self.m_sweep)
        if not sweep or any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ValueError("m sweep must be nonempty and strictly increasing")
        if self.trials < 1:
            raise ValueError("at least one trial is required")
        bad = set(self.regularizers) - {"nuclear", "square"}
        if bad or not self.regularizers:
            raise ValueError(f"bad regularizer set {self.regularizers!r}")
        if self.eta != "eps" and float(self.eta) < 0:
            raise ValueError("eta must be 'eps' or a nonnegative number")
        object.__setattr__(self, "m_sweep", sweep)
        object.__setattr__(self, "regularizers", tuple(self.regularizers))

    @property
    def default_ensemble(self) -> str:
        return {
            "uv_retrieval": "structured_udv",
            "process_tomo": "process_tomo",
            "deconv": "deconv",
            "lowrank_gaussian": "gaussian_real",
        }[self.experiment]


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    regularizer: str
    m: int
    trials: int
    successes: int
    mean_frob_error: float
    median_solve_ms: float
    seed: int


@dataclass
class ExperimentOutcome:
    rows: list
    trial_errors: int = 0
    error_messages: list = field(default_factory=list)


def derive_trial_seed(master, regularizer, m, trial) -> int:
    """Deterministic 63-bit seed from the cell coordinates.

    SHA-256 of the literal string "master:regularizer:m:trial", truncated to
    8 bytes (big-endian, top bit cleared); stable across platforms and
    versions by construction.
    """
    text = f"{master}:{regularizer}:{m}:{trial}"
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFFFFFFFFFFFFFF


def _draw_truth(cfg: ExperimentConfig, rng):
    n = cfg.n
    if cfg.experiment == "uv_retrieval":
        draw = random_orthogonal if cfg.unitary_group == "orthogonal" else random_unitary
        return map_of_unitary_pair(draw(n, rng), draw(n, rng))
    if cfg.experiment == "process_tomo":
        return random_channel(n, n, cfg.kraus_rank, rng)
    if cfg.experiment == "deconv":
        draw = random_orthogonal if cfg.unitary_group == "orthogonal" else random_unitary
        u, v = draw(n, rng), draw(n, rng)
        return map_of_unitary_pair(u, v.T)
    # lowrank_gaussian
    if cfg.truth_kind == "hermitian":
        vecs = rng.standard_normal((cfg.rank, n * n)) + 1j * rng.standard_normal((cfg.rank, n * n))
        mat = sum(np.outer(w, w.conj()) for w in vecs)
    else:
        left = rng.standard_normal((n * n, cfg.rank))
        right = rng.standard_normal((n * n, cfg.rank))
        mat = (left @ right.T).astype(np.complex128)
    return BipartiteOperator(mat, n, n)


def _draw_ensemble(cfg: ExperimentConfig, m, seed) -> MeasurementEnsemble:
    kind = cfg.ensemble or cfg.default_ensemble
    n = cfg.n
    if kind == "structured_udv":
        return structured_ensemble(m, n, seed=seed, unitary_group="unitary")
    if kind == "process_tomo":
        return process_tomo_ensemble(m, (n, n), seed=seed)
    if kind == "deconv":
        conv_len = cfg.conv_len or n
        if m % conv_len:
            raise ValueError(
                f"deconvolution measurement count m={m} must be a multiple of conv_len={conv_len}"
            )
        return deconv_ensemble(n, conv_len, m // conv_len, seed=seed)
    if kind == "gaussian_real":
        return gaussian_ensemble(m, (n, n), "real", seed=seed)
    if kind == "gaussian_complex":
        return gaussian_ensemble(m, (n, n), "complex", seed=seed)
    if kind == "complete_basis":
        return complete_basis_ensemble((n, n))
    raise ValueError(f"unknown ensemble {kind!r}")


def run_trial(cfg: ExperimentConfig, regularizer, m, trial):
    """One recovery cell; returns (success, frob_error, solve_ms)."""
    seed = derive_trial_seed(cfg.master_seed, regularizer, m, trial)
    rng = np.random.default_rng(seed)
    truth = _draw_truth(cfg, rng)
    ensemble = _draw_ensemble(cfg, m, seed=derive_trial_seed(seed, "ensemble", m, trial))
    y = apply_measurement(ensemble, truth)
    eta = MACHINE_EPS * float(np.linalg.norm(y)) if cfg.eta == "eps" else float(cfg.eta)
    problem = RecoveryProblem(ensemble, y, eta, regularizer, cpt=cfg.cpt)
    opts = SolveOptions(tol=cfg.solver_tol, max_iters=cfg.solver_max_iters)
    t0 = time.perf_counter()
    result = recover(problem, opts=opts, truth=truth)
    ms = (time.perf_counter() - t0) * 1e3 if cfg.measure_timing else 0.0
    return result.frob_error <= cfg.success_threshold, result.frob_error, ms


def run_experiment_detailed(cfg: ExperimentConfig) -> ExperimentOutcome:
    """Full sweep; one row per (regularizer, m), crash-isolated per trial."""
    rows = []
    outcome = ExperimentOutcome(rows)
    for regularizer in cfg.regularizers:
        for m in cfg.m_sweep:
            successes = 0
            errors = []
            times = []
            for trial in range(cfg.trials):
                try:
                    ok, err, ms = run_trial(cfg, regularizer, m, trial)
                except Exception as exc:  # noqa: BLE001 - sweep must survive
                    msg = f"{cfg.experiment}/{regularizer}/m={m}/trial={trial}: {exc}"
                    log.warning("trial failed: %s", msg)
                    outcome.trial_errors += 1
                    outcome.error_messages.append(msg)
                    continue
                successes += ok
                errors.append(err)
                times.append(ms)
            rows.append(
                ResultRow(
                    experiment=cfg.experiment,
                    regularizer=regularizer,
                    m=m,
                    trials=cfg.trials,
                    successes=successes,
                    mean_frob_error=float(np.mean(errors)) if errors else float("nan"),
                    median_solve_ms=float(np.median(times)) if times else float("nan"),
                    seed=cfg.master_seed,
                )
            )
    return outcome


def run_experiment(cfg: ExperimentConfig) -> list:
    return run_experiment_detailed(cfg).rows


def format_rows(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.experiment,
                r.regularizer,
                r.m,
                r.trials,
                r.successes,
                f"{r.mean_frob_error:.6e}",
                f"{r.median_solve_ms:.3f}",
                r.seed,
            ]
        )
    return buf.getvalue()


def write_csv(rows, path) -> None:
    """Write rows with the fixed column order and fixed decimal formatting."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_rows(rows))


def read_csv(path) -> list:
    """Parse a results file back into rows (inverse of :func:`write_csv`)."""
    rows = []
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")
        for rec in reader:
            rows.append(
                ResultRow(
                    experiment=rec["experiment"],
                    regularizer=rec["regularizer"],
                    m=int(rec["m"]),
                    trials=int(rec["trials"]),
                    successes=int(rec["successes"]),
                    mean_frob_error=float(rec["mean_frob_error"]),
                    median_solve_ms=float(rec["median_solve_ms"]),
                    seed=int(rec["seed"]),
                )
            )
    return rows


def run_trials_parallel(cfg: ExperimentConfig, workers: int) -> ExperimentOutcome:
    """Process-parallel sweep with the same deterministic row order."""
    if workers <= 1:
        return run_experiment_detailed(cfg)
    from concurrent.futures import ProcessPoolExecutor

    cells = [
        (regularizer, m, trial)
        for regularizer in cfg.regularizers
        for m in cfg.m_sweep
        for trial in range(cfg.trials)
    ]
    results = {}
    outcome = ExperimentOutcome([])
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(run_trial, cfg, *cell): cell for cell in cells}
        for fut, cell in futures.items():
            try:
                results[cell] = fut.result()
            except Exception as exc:  # noqa: BLE001
                msg = f"{cfg.experiment}/{cell[0]}/m={cell[1]}/trial={cell[2]}: {exc}"
                log.warning("trial failed: %s", msg)
                outcome.trial_errors += 1
                outcome.error_messages.append(msg)
    for regularizer in cfg.regularizers:
        for m in cfg.m_sweep:
            done = [results[(regularizer, m, t)] for t in range(cfg.trials) if (regularizer, m, t) in results]
            outcome.rows.append(
                ResultRow(
                    experiment=cfg.experiment,
                    regularizer=regularizer,
                    m=m,
                    trials=cfg.trials,
                    successes=sum(ok for ok, _, _ in done),
                    mean_frob_error=float(np.mean([e for _, e, _ in done])) if done else float("nan"),
                    median_solve_ms=float(np.median([t for _, _, t in done])) if done else float("nan"),
                    seed=cfg.master_seed,
                )
            )
    return outcome


def with_overrides(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    return replace(cfg, **kwargs)
