"""Command-line interface: norm evaluation, recovery, experiments, geometry."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import geometry, harness, recovery, serialize
from .conic import SolveOptions
from .linalg import BipartiteOperator
from .norms import square_norm


def _cmd_norm(args) -> int:
    obj = serialize.load(args.input)
    if "dimW" in obj:
        x = serialize.bipartite_from_json(obj)
    else:
        if not args.dims:
            print("error: plain matrix input needs --dims DIMW DIMV", file=sys.stderr)
            return 1
        x = BipartiteOperator(serialize.matrix_from_json(obj), args.dims[0], args.dims[1])
    rep = square_norm(x, opts=SolveOptions(tol=args.tol))
    print(f"square_norm {rep.value:.12g}")
    print(f"diamond_norm {rep.value / x.dim_v:.12g}")
    print(f"gap {rep.gap:.3e}  solver {rep.solver.status} ({rep.solver.iterations} iters)")
    if args.report:
        serialize.dump(serialize.square_norm_report_to_json(rep), args.report)
    return 0 if rep.solver.status == "optimal" else 1


def _cmd_recover(args) -> int:
    problem = serialize.problem_from_json(serialize.load(args.problem))
    opts = SolveOptions(tol=args.tol, max_iters=args.max_iters)
    result = recovery.recover(problem, opts=opts)
    serialize.dump(serialize.recovery_result_to_json(result), args.out)
    print(
        f"status {result.solver.status}  objective {result.objective:.9g}  "
        f"misfit {result.residuals['data_misfit']:.3e}"
    )
    return 0 if result.solver.status == "optimal" else 1


def _cmd_experiment(args) -> int:
    cfg = serialize.config_from_json(serialize.load(args.config))
    if args.threads > 1:
        outcome = harness.run_trials_parallel(cfg, args.threads)
    else:
        outcome = harness.run_experiment_detailed(cfg)
    harness.write_csv(outcome.rows, args.out)
    for row in outcome.rows:
        print(
            f"{row.experiment} {row.regularizer:8s} m={row.m:4d} "
            f"successes {row.successes}/{row.trials}"
        )
    if outcome.trial_errors:
        print(f"{outcome.trial_errors} trial(s) errored", file=sys.stderr)
        return 2
    return 0


def _cmd_geomtest(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0

    def report(name, ok, detail):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += not ok

    if args.suite in ("pinching", "all"):
        worst = np.inf
        for _ in range(args.samples):
            n = int(rng.integers(2, 6))
            z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            p = geometry.random_projector(n, int(rng.integers(0, n + 1)), rng)
            q = geometry.random_projector(n, int(rng.integers(0, n + 1)), rng)
            for order in (1, 2):
                worst = min(worst, geometry.pinching_check(z, p, q, order))
        report("pinching", worst >= -1e-9, f"min slack {worst:.3e}")
    if args.suite in ("cone", "all"):
        from .choi import map_of_unitary_pair, random_unitary

        m = map_of_unitary_pair(random_unitary(2, rng), random_unitary(2, rng))
        rep = geometry.cone_containment_check(m.choi, args.samples, rng)
        report(
            "cone_containment",
            rep.violations == 0 and rep.square_certificate_failures == 0,
            f"{rep.violations} violations in {rep.samples} samples",
        )
    if args.suite in ("effective_rank", "all"):
        g = rng.standard_normal((4, 1)) + 1j * rng.standard_normal((4, 1))
        h = rng.standard_normal((4, 1)) + 1j * rng.standard_normal((4, 1))
        x = BipartiteOperator(g @ h.conj().T, 2, 2)
        ratio = geometry.effective_rank_bound_check(x, args.samples, rng)
        bound = 1.0 + np.sqrt(2.0)
        report("effective_rank", ratio <= bound + 1e-6, f"max ratio {ratio:.6f} <= {bound:.6f}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diamondrec",
        description="Low-rank recovery with square-norm (diamond-norm) regularization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="evaluate the square norm of an operator")
    p_norm.add_argument("--input", required=True, help="matrix or bipartite-operator JSON")
    p_norm.add_argument("--dims", nargs=2, type=int, metavar=("DIMW", "DIMV"))
    p_norm.add_argument("--tol", type=float, default=1e-8)
    p_norm.add_argument("--report", help="write the full report JSON here")
    p_norm.set_defaults(func=_cmd_norm)

    p_rec = sub.add_parser("recover", help="solve a recovery problem")
    p_rec.add_argument("--problem", required=True, help="problem JSON")
    p_rec.add_argument("--out", required=True, help="result JSON path")
    p_rec.add_argument("--tol", type=float, default=1e-8)
    p_rec.add_argument("--max-iters", type=int, default=50000)
    p_rec.set_defaults(func=_cmd_recover)

    p_exp = sub.add_parser("experiment", help="run a phase-transition sweep")
    p_exp.add_argument("--config", required=True, help="experiment config JSON")
    p_exp.add_argument("--out", required=True, help="results CSV path")
    p_exp.add_argument("--threads", type=int, default=1)
    p_exp.set_defaults(func=_cmd_experiment)

    p_geo = sub.add_parser("geomtest", help="run sampled geometry checks")
    p_geo.add_argument("--suite", default="all", choices=["pinching", "cone", "effective_rank", "all"])
    p_geo.add_argument("--samples", type=int, default=50)
    p_geo.add_argument("--seed", type=int, default=0)
    p_geo.set_defaults(func=_cmd_geomtest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
