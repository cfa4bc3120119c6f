"""Headless matplotlib rendering of fronts and convergence traces."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FRONT_COLORS = ("tab:red", "tab:purple", "tab:green", "tab:cyan", "tab:brown")
_BASELINE_COLORS = ("tab:blue", "tab:orange", "tab:olive", "tab:pink", "tab:gray")


def save_front_plot(
    fronts: dict[str, np.ndarray],
    baselines: dict[str, np.ndarray],
    path: str | Path,
    title: str = "Fusion trade-off fronts",
) -> None:
    """Render fronts and baseline points in objective space.

    Args:
        fronts: name -> (n, 2) array of (eer, params) rows per front.
        baselines: name -> (n, 2) array of single baseline points.
        path: output image file.
    """
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for (name, pts), color in zip(fronts.items(), _FRONT_COLORS * 8):
        pts = np.asarray(pts, dtype=float)
        order = np.argsort(pts[:, 0])
        ax.step(
            pts[order, 0] * 100.0,
            pts[order, 1],
            where="post",
            marker="o",
            markersize=4,
            color=color,
            label=name,
        )
    for (name, pts), color in zip(baselines.items(), _BASELINE_COLORS * 8):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        ax.scatter(pts[:, 0] * 100.0, pts[:, 1], marker="x", s=60, color=color, label=name, zorder=3)
    ax.set_xlabel("EER [%]")
    ax.set_ylabel("parameters")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if fronts or baselines:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_hv_plot(traces: dict[str, tuple[float, ...]], path: str | Path) -> None:
    """Render hypervolume convergence traces, one line per run."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for name, trace in traces.items():
        ax.plot(np.arange(1, len(trace) + 1), trace, label=name, linewidth=1.2)
    ax.set_xlabel("generation")
    ax.set_ylabel("normalized hypervolume")
    ax.set_title("Hypervolume convergence")
    ax.grid(True, alpha=0.3)
    if len(traces) <= 12:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
