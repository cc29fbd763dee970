"""Render iteration traces and benchmark comparisons as figure files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_bench_figure", "render_trace_figure"]


def render_trace_figure(runs: list[dict], path: str | Path) -> Path:
    """One row per run: map increment with iterate overlay, then iterate path.

    ``runs`` entries carry ``alpha``, ``method``, ``iterates``, ``value`` and
    optionally ``curve`` as (x, map(x) - x) pairs over the sample range.
    """
    n = max(1, len(runs))
    fig, axes = plt.subplots(n, 2, figsize=(9.6, 3.1 * n), squeeze=False)
    for row, run in zip(axes, runs):
        ax_curve, ax_path = row
        xs = run["iterates"]
        label = f"alpha={run['alpha']:g} ({run['method']})"
        curve = run.get("curve")
        if curve:
            ax_curve.plot(
                [p[0] for p in curve],
                [p[1] for p in curve],
                lw=1.2,
                color="tab:blue",
                label="map(x) - x",
            )
            ax_curve.axhline(0.0, color="0.6", lw=0.8)
            steps = [xs[i + 1] - xs[i] for i in range(len(xs) - 1)]
            ax_curve.plot(
                xs[:-1], steps, "o", ms=4.5, color="crimson", label="iterates"
            )
            ax_curve.set_xlabel("x")
            ax_curve.set_title(label, fontsize=10)
            ax_curve.legend(fontsize=8)
        else:
            ax_curve.set_axis_off()
            ax_path.set_title(label, fontsize=10)
        ax_path.plot(range(len(xs)), xs, marker="o", ms=3.5, lw=1.0, color="tab:blue")
        ax_path.axhline(run["value"], color="0.6", lw=0.8)
        ax_path.set_xlabel("iteration")
        ax_path.set_ylabel("iterate")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_bench_figure(
    groups: list[tuple[float, list[tuple[str, list[float], float]]]],
    path: str | Path,
) -> Path:
    """Per level: iterate paths of every method toward the common value."""
    n = max(1, len(groups))
    fig, axes = plt.subplots(1, n, figsize=(4.4 * n, 3.4), squeeze=False)
    for ax, (alpha, runs) in zip(axes[0], groups):
        for method, iterates, value in runs:
            ax.plot(range(len(iterates)), iterates, marker="o", ms=3, lw=1.0, label=method)
        if runs:
            ax.axhline(runs[0][2], color="0.6", lw=0.8)
        ax.set_title(f"alpha={alpha:g}", fontsize=10)
        ax.set_xlabel("iteration")
    axes[0][0].set_ylabel("iterate")
    axes[0][-1].legend(fontsize=7)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
