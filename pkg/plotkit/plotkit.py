#!/usr/bin/env python3
"""Render experiment-harness CSV output as success-rate curves.

Consumes only the results CSV (columns: experiment, regularizer, m, trials,
successes, mean_frob_error, median_solve_ms, seed) and draws one curve per
(experiment, regularizer) group, success fraction against the number of
measurements.  Output is byte-stable for identical inputs: fixed style, no
timestamps.
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

EXPECTED_COLUMNS = (
    "experiment",
    "regularizer",
    "m",
    "trials",
    "successes",
    "mean_frob_error",
    "median_solve_ms",
    "seed",
)

_INT_COLUMNS = ("m", "trials", "successes", "seed")
_FLOAT_COLUMNS = ("mean_frob_error", "median_solve_ms")

_STYLE = {
    "square": {"color": "#1f5fa8", "marker": "s"},
    "nuclear": {"color": "#c44e52", "marker": "o"},
}


class SchemaError(ValueError):
    """The CSV header or a row does not match the harness output format."""


@dataclass
class PlotSpec:
    csv_path: str
    out_path: str
    group_by: tuple = ("experiment", "regularizer")
    raw_counts: bool = False
    fmt: str = "png"
    title: str = ""
    xlabel: str = "number of measurements"
    ylabel: str = ""
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.fmt not in ("png", "svg"):
            raise ValueError(f"unsupported format {self.fmt!r}")
        if not self.ylabel:
            self.ylabel = "successful trials" if self.raw_counts else "success fraction"


def load_csv(path):
    """Parse a harness results file into typed row dictionaries."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        missing = [c for c in EXPECTED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"missing column(s) {missing} in {path}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                row = dict(rec)
                for col in _INT_COLUMNS:
                    row[col] = int(rec[col])
                for col in _FLOAT_COLUMNS:
                    row[col] = float(rec[col])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}:{lineno}: malformed row ({exc})") from exc
            rows.append(row)
    return rows


def group_rows(rows, group_by):
    groups = {}
    for row in rows:
        key = tuple(row[col] for col in group_by)
        groups.setdefault(key, []).append(row)
    return groups


def render_phase_plot(spec: PlotSpec) -> str:
    """Draw one success curve per group and write the image file."""
    rows = load_csv(spec.csv_path)
    if not rows:
        raise SchemaError(f"{spec.csv_path} holds no data rows")
    groups = group_rows(rows, spec.group_by)

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    for key in sorted(groups):
        pts = sorted(groups[key], key=lambda r: r["m"])
        if not pts:
            warnings.warn(f"group {key} is empty, skipped")
            continue
        xs = [r["m"] for r in pts]
        if spec.raw_counts:
            ys = [r["successes"] for r in pts]
        else:
            ys = [r["successes"] / r["trials"] for r in pts]
        label = spec.labels.get(key, " / ".join(str(k) for k in key))
        style = _STYLE.get(key[-1], {})
        ax.plot(xs, ys, label=label, linewidth=1.6, markersize=5, **style)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if not spec.raw_counts:
        ax.set_ylim(-0.03, 1.03)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()

    if spec.fmt == "png":
        fig.savefig(spec.out_path, format="png", metadata={"Software": "plotkit"})
    else:
        with matplotlib.rc_context({"svg.hashsalt": "plotkit"}):
            fig.savefig(spec.out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return spec.out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit.py", description="Plot success-rate curves from harness CSV output"
    )
    parser.add_argument("--csv", required=True, help="results CSV from the experiment harness")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--raw-counts", action="store_true", help="plot raw success counts")
    parser.add_argument("--format", default="", choices=["", "png", "svg"])
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    fmt = args.format or ("svg" if args.out.endswith(".svg") else "png")
    spec = PlotSpec(
        csv_path=args.csv,
        out_path=args.out,
        raw_counts=args.raw_counts,
        fmt=fmt,
        title=args.title,
    )
    try:
        render_phase_plot(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
