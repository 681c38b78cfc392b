"""Matplotlib rendering of solver traces and reference curves.

Rendering is optional everywhere (the delimited data is the primary
output); these helpers draw directly from the same arrays the CSV
writers receive, so plot and file always agree.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_curve_figure", "save_trace_figure"]

_FIGSIZE = (6.0, 4.0)
_DPI = 150


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_curve_figure(path: str | Path, header: list[str], rows: np.ndarray,
                      title: str = "", logx: bool = False) -> Path:
    """Plot every column of a ``(header, rows)`` table against the first."""
    rows = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    x = rows[:, 0]
    for j in range(1, rows.shape[1]):
        ax.plot(x, rows[:, j], label=header[j], linewidth=1.5)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(header[0])
    ax.axhline(0.0, color="0.6", linewidth=0.8)
    if title:
        ax.set_title(title)
    if rows.shape[1] > 2:
        ax.legend(fontsize=9)
    else:
        ax.set_ylabel(header[1])
    ax.grid(True, alpha=0.3)
    return _save(fig, Path(path))


def save_trace_figure(path: str | Path, header: list[str], rows: np.ndarray,
                      title: str = "") -> Path:
    """Two-panel solver trace: per-link powers and the residual decay."""
    rows = np.asarray(rows, dtype=float)
    k = rows[:, 0]
    powers = rows[:, 1:-1]
    residual = rows[:, -1]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    for j in range(powers.shape[1]):
        ax1.plot(k, powers[:, j], label=header[1 + j], linewidth=1.5)
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("power")
    ax1.legend(fontsize=9)
    ax1.grid(True, alpha=0.3)
    pos = residual > 0
    ax2.semilogy(k[pos], residual[pos], color="C3", linewidth=1.5)
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("fixed-point residual")
    ax2.grid(True, alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return _save(fig, Path(path))
