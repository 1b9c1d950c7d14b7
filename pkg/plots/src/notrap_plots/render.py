"""Render static figures from notrap experiment CSVs.

One figure id per invocation; the renderer only reads columns from the CSV
(plus median aggregation for the error curves) and never recomputes any
estimate.  Output is deterministic: fixed style, no timestamps, and a fixed
SVG hash salt, so re-rendering identical input produces identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_IDS = ("fig3", "fig4", "fig5", "pareto")

_REQUIRED_COLUMNS = {
    "fig3": ("label", "n_tau", "rel_error"),
    "fig4": ("tau1", "n_total", "eps_extrap", "eps_meas", "feasible"),
    "fig4_right": ("n_q", "method", "tau1", "shots_total"),
    "fig5": ("d_local", "n_train", "n_tau", "rel_error"),
    "pareto": ("operator", "method", "n_g", "n_tau", "depth", "circuit_count"),
}

_STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "notrap-plots",
}


class RenderError(RuntimeError):
    """Unusable input: missing file, empty data, or absent columns."""


@dataclass(frozen=True)
class FigureSpec:
    """One rendering request: figure id, input CSV path(s), output image."""

    figure_id: str
    csv_paths: tuple
    out_path: str
    log_x: bool = False
    log_y: bool = True

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise RenderError(f"unknown figure id {self.figure_id!r}")
        if not self.csv_paths:
            raise RenderError("at least one input CSV is required")


def read_table(path, required):
    """Load a CSV as a list of dicts, insisting on the required columns."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            rows = list(reader)
    except OSError as exc:
        raise RenderError(f"cannot read {path}: {exc}") from None
    missing = [name for name in required if name not in header]
    if missing:
        raise RenderError(f"{path} is missing column(s): {', '.join(missing)}")
    if not rows:
        raise RenderError(f"{path} contains no data rows")
    return rows


def _median_by(rows, key_fields, x_field, y_field):
    """Median of ``y`` grouped by (key, x), keys and x sorted."""
    grouped = {}
    for row in rows:
        key = tuple(row[k] for k in key_fields)
        grouped.setdefault(key, {}).setdefault(float(row[x_field]), []).append(
            float(row[y_field])
        )
    out = {}
    for key in sorted(grouped):
        xs = sorted(grouped[key])
        out[key] = (xs, [float(np.median(grouped[key][x])) for x in xs])
    return out


def _finish(fig, axes, spec):
    for ax in axes:
        if spec.log_y:
            ax.set_yscale("log")
        if spec.log_x:
            ax.set_xscale("log")
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    suffix = out.suffix.lower()
    if suffix == ".svg":
        metadata = {"Date": None}
    elif suffix == ".png":
        metadata = {"Software": None}
    else:
        raise RenderError(f"unsupported output format {suffix!r}; use .png or .svg")
    fig.savefig(out, metadata=metadata)
    plt.close(fig)


def _render_fig3(spec):
    rows = read_table(spec.csv_paths[0], _REQUIRED_COLUMNS["fig3"])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for (label,), (xs, medians) in _median_by(rows, ("label",), "n_tau", "rel_error").items():
        ax.plot(xs, medians, marker="o", label=label)
    ax.set_xlabel("extrapolation points")
    ax.set_ylabel("median relative error")
    ax.legend(fontsize=7)
    _finish(fig, [ax], spec)
    return {}


def _render_fig4(spec):
    rows = read_table(spec.csv_paths[0], _REQUIRED_COLUMNS["fig4"])
    feasible = [row for row in rows if row["feasible"] == "true"]
    if not feasible:
        raise RenderError(f"{spec.csv_paths[0]} has no feasible budget rows")
    taus = [float(row["tau1"]) for row in feasible]
    totals = [float(row["n_total"]) for row in feasible]
    best = int(np.argmin(totals))

    panels = 2 if len(spec.csv_paths) > 1 else 1
    fig, axes = plt.subplots(1, panels, figsize=(5.2 * panels, 3.6))
    axes = np.atleast_1d(axes)
    ax = axes[0]
    ax.plot(taus, totals, marker="o", color="tab:green", label="total shots")
    ax.plot(
        taus, [float(r["eps_extrap"]) for r in feasible],
        marker="+", linestyle="none", color="tab:blue", label="extrapolation error",
    )
    ax.plot(
        taus, [float(r["eps_meas"]) for r in feasible],
        marker="x", linestyle="none", color="tab:cyan", label="measurement budget",
    )
    ax.plot([taus[best]], [totals[best]], marker="v", markersize=10,
            color="tab:red", label="minimum")
    ax.set_xlabel("largest evolution time")
    ax.set_ylabel("shots / error")
    ax.legend(fontsize=7)

    if panels == 2:
        right = read_table(spec.csv_paths[1], _REQUIRED_COLUMNS["fig4_right"])
        ax2 = axes[1]
        series = {}
        for row in right:
            key = row["method"] if row["method"] != "hd" else f"hd tau1={row['tau1']}"
            series.setdefault(key, []).append((int(row["n_q"]), float(row["shots_total"])))
        for key in sorted(series):
            points = sorted(series[key])
            ax2.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=key)
        ax2.set_xlabel("qubits")
        ax2.set_ylabel("total shots")
        ax2.legend(fontsize=7)

    _finish(fig, list(axes), spec)
    return {"argmin_tau": taus[best], "min_total": totals[best]}


def _render_fig5(spec):
    rows = read_table(spec.csv_paths[0], _REQUIRED_COLUMNS["fig5"])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    grouped = _median_by(rows, ("d_local", "n_train"), "n_tau", "rel_error")
    for (d_local, n_train), (xs, medians) in grouped.items():
        ax.plot(xs, medians, marker="o", label=f"d={d_local}, sites={n_train}")
    ax.set_xlabel("extrapolation points")
    ax.set_ylabel("median relative error")
    ax.legend(fontsize=7)
    _finish(fig, [ax], spec)
    return {}


def _render_pareto(spec):
    rows = read_table(spec.csv_paths[0], _REQUIRED_COLUMNS["pareto"])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    series = {}
    for row in rows:
        key = (row["operator"], row["method"], row["n_tau"])
        series.setdefault(key, []).append((int(row["depth"]), int(row["circuit_count"])))
    for (operator, method, n_tau) in sorted(series):
        points = sorted(series[(operator, method, n_tau)])
        label = f"{operator} {method}" + (f" (points={n_tau})" if n_tau else "")
        style = "o-" if method == "t" else "s"
        ax.plot([p[0] for p in points], [p[1] for p in points], style, label=label,
                markersize=4)
    ax.set_xlabel("circuit depth")
    ax.set_ylabel("distinct circuits")
    ax.set_xscale("log")
    ax.legend(fontsize=6)
    _finish(fig, [ax], spec)
    return {}


_RENDERERS = {
    "fig3": _render_fig3,
    "fig4": _render_fig4,
    "fig5": _render_fig5,
    "pareto": _render_pareto,
}


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns marker metadata (fig4's argmin position)."""
    with matplotlib.rc_context(_STYLE):
        return _RENDERERS[spec.figure_id](spec)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="notrap-render",
        description="Render a static figure from notrap experiment CSVs.",
    )
    parser.add_argument("--fig", required=True, choices=FIGURE_IDS)
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True,
        help="input CSV (repeat for the two-panel shot figure)",
    )
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--linear-y", action="store_true", help="linear y axis")
    parser.add_argument("--log-x", action="store_true", help="logarithmic x axis")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        figure_id=args.fig,
        csv_paths=tuple(args.inputs),
        out_path=args.out,
        log_x=args.log_x,
        log_y=not args.linear_y,
    )
    try:
        info = render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    summary = f"wrote {args.out}"
    if info:
        summary += " " + " ".join(f"{k}={v}" for k, v in sorted(info.items()))
    print(summary)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
