"""Static SVG line plots for CLI runs.

Figures mirror the CSV files they sit next to; they are a convenience view,
never an output the numbers depend on.  Rendering is deterministic (fixed
hash salt, no embedded date).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "whichpath"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)


def save_pattern_figure(path: Path, p: np.ndarray, curves: list[tuple[str, np.ndarray]]) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, values in curves:
        ax.plot(p, values, lw=1.2, label=label)
    ax.set_xlabel("transverse momentum p_x (1/len)")
    ax.set_ylabel("probability density (len)")
    ax.legend(frameon=False)
    _save(fig, path)


def save_sweep_figure(
    path: Path, x: np.ndarray, fitted: np.ndarray, analytic: np.ndarray, xlabel: str
) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(x, analytic, lw=1.2, label="analytic")
    ax.plot(x, fitted, "o", ms=3.5, label="fitted")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("fringe visibility")
    ax.legend(frameon=False)
    _save(fig, path)


def save_histogram_figure(path: Path, edges: np.ndarray, masses: np.ndarray) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.stairs(masses, edges, fill=True, alpha=0.6)
    ax.set_xlabel("momentum transfer (1/len)")
    ax.set_ylabel("channel mass")
    _save(fig, path)
