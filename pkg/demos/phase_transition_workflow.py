#!/usr/bin/env python3
"""End-to-end workflow: sweep, CSV, figure.

Runs a reduced unitary-pair retrieval sweep, writes the results CSV, and (if
the plotkit companion is importable) renders the success-rate curves.
"""

import pathlib
import sys

from diamondrec import harness

OUT = pathlib.Path("uv_retrieval_demo.csv")

cfg = harness.ExperimentConfig(
    "uv_retrieval",
    m_sweep=(6, 8, 10, 12, 14),
    trials=3,
    master_seed=11,
    measure_timing=True,
)
outcome = harness.run_experiment_detailed(cfg)
harness.write_csv(outcome.rows, OUT)
print(f"wrote {OUT} ({len(outcome.rows)} rows, {outcome.trial_errors} trial errors)")
for row in outcome.rows:
    bar = "#" * row.successes + "." * (row.trials - row.successes)
    print(f"  {row.regularizer:8s} m={row.m:3d}  [{bar}]")

try:
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "plotkit"))
    import plotkit
except ImportError:
    print("plotkit (or matplotlib) not available; skipping the figure")
else:
    fig = plotkit.render_phase_plot(
        plotkit.PlotSpec(
            csv_path=str(OUT),
            out_path="uv_retrieval_demo.png",
            title="unitary-pair retrieval, 3 trials per point",
        )
    )
    print(f"wrote {fig}")
