"""Deterministic SVG figures for benchmark reports.

Figures are rendered headless with a fixed hash salt and no embedded
creation date, so the same inputs always produce byte-identical files.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SVG_SALT = "solardisagg"


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), format="svg", metadata={"Date": None})
    plt.close(fig)


def save_box_plot(groups: dict[str, list[float]], ylabel: str,
                  path: str | Path, title: str = "") -> None:
    """Box-and-whisker chart (whiskers at 1.5 IQR), one box per group."""
    plt.rcParams["svg.hashsalt"] = _SVG_SALT
    fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(groups), 4.0))
    labels = list(groups)
    ax.boxplot([groups[k] for k in labels], tick_labels=labels, whis=1.5)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def save_line_plot(x: list[float], series: dict[str, list[float]],
                   xlabel: str, ylabel: str, path: str | Path,
                   title: str = "") -> None:
    """Simple multi-series line chart with markers."""
    plt.rcParams["svg.hashsalt"] = _SVG_SALT
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, ys in series.items():
        ax.plot(x, ys, marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
