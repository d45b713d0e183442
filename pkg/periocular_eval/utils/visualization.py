"""
Visualization utilities for periocular_eval.

This module renders ROC curves and score histograms as SVG files.
"""

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# stable element ids so identical inputs give identical files
matplotlib.rcParams["svg.hashsalt"] = "periocular_eval"
SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def plot_roc(reports, path: Union[str, Path], title: str = "ROC") -> Path:
    """
    Plot one or more ROC curves.

    Parameters:
    - reports: VerificationReport or a sequence of them
    - path: SVG file to write

    Returns:
    - Path of the written file
    """
    if not isinstance(reports, (list, tuple)):
        reports = [reports]

    fig, ax = plt.subplots(figsize=(6, 6))
    for report in reports:
        label = f"{report.matcher_id} ({report.variant}) AUC={report.auc * 100:.1f}%"
        ax.plot(report.roc.far, report.roc.tar, linewidth=1.5, label=label)
    ax.plot([0, 1], [0, 1], linestyle='--', color='gray', linewidth=0.8)

    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel('False accept rate')
    ax.set_ylabel('True accept rate')
    ax.set_title(title)
    ax.grid(linestyle='--', alpha=0.7)
    ax.legend(loc='lower right', fontsize=8)
    return _save(fig, path)


def plot_score_histograms(
    genuine: Sequence[float],
    impostor: Sequence[float],
    path: Union[str, Path],
    title: str = "Score distributions",
    bins: int = 50,
) -> Path:
    """
    Plot genuine and impostor score histograms on shared bins, as densities.

    Parameters:
    - genuine, impostor: similarity scores
    - path: SVG file to write
    - bins: number of shared bins
    """
    genuine = np.asarray(genuine, dtype=np.float64)
    impostor = np.asarray(impostor, dtype=np.float64)
    both = np.concatenate([genuine, impostor])
    low, high = (float(both.min()), float(both.max())) if len(both) else (0.0, 1.0)
    if high == low:
        low, high = low - 0.5, high + 0.5
    edges = np.linspace(low, high, bins + 1)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist(impostor, bins=edges, density=True, alpha=0.6, color='tomato', label=f'impostor (n={len(impostor)})')
    ax.hist(genuine, bins=edges, density=True, alpha=0.6, color='skyblue', label=f'genuine (n={len(genuine)})')
    ax.set_xlabel('Similarity score')
    ax.set_ylabel('Density')
    ax.set_title(title)
    ax.grid(axis='y', linestyle='--', alpha=0.7)
    ax.legend()
    return _save(fig, path)
