"""Figure rendering for reports.

Every CLI run that writes delimited output also renders the matching
figures as PNG files next to it.  The Agg backend keeps rendering
headless, and no timestamps enter the files, so reruns are byte-identical.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .congeal import AlignmentReport
from .curves import CurveSet, time_grid, warp_function
from .evalkit import PairedEvalResult

_CURVE_STYLE = dict(linewidth=0.7, alpha=0.55)
_MEAN_STYLE = dict(color="black", linewidth=2.0, label="mean")
_DPI = 120


def _save(fig, path):
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def _panel(ax, curve_set: CurveSet, title: str):
    grid = time_grid(curve_set.curve_length)
    matrix = curve_set.sample_matrix()
    if curve_set.labels is None:
        for row in matrix:
            ax.plot(grid, row, **_CURVE_STYLE)
    else:
        classes = sorted(set(curve_set.labels))
        cmap = plt.get_cmap("tab10")
        for row, label in zip(matrix, curve_set.labels):
            ax.plot(grid, row, color=cmap(classes.index(label) % 10), **_CURVE_STYLE)
    ax.plot(grid, matrix.mean(axis=0), **_MEAN_STYLE)
    ax.set_title(title)
    ax.set_xlabel("t")


def alignment_figure(original: CurveSet, report: AlignmentReport, path) -> None:
    """Before/after curve panels with the ensemble mean overlaid."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    _panel(axes[0], original, "before alignment")
    _panel(axes[1], report.final_set, "after alignment")
    axes[0].legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def trace_figure(report: AlignmentReport, path) -> None:
    """Objective total per pass."""
    fig, ax = plt.subplots(figsize=(6, 4))
    iterations = np.arange(1, report.iterations_run + 1)
    ax.plot(iterations, report.objective_trace, linewidth=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective total")
    ax.set_title("objective trace")
    fig.tight_layout()
    _save(fig, path)


def warp_figure(report: AlignmentReport, path) -> None:
    """The final warp h(t) of every curve, with the identity for reference."""
    final = report.final_set
    grid = time_grid(final.curve_length)
    fig, ax = plt.subplots(figsize=(5, 5))
    for p in final.params:
        ax.plot(grid, warp_function(p, final.curve_length).h_values, **_CURVE_STYLE)
    ax.plot(grid, grid, color="black", linewidth=1.0, linestyle="--", label="identity")
    ax.set_xlabel("t")
    ax.set_ylabel("h(t)")
    ax.set_title("warping functions")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def dataset_figure(curve_set: CurveSet, path, title: str = "dataset") -> None:
    """All curves in one panel, colored by class when labels exist."""
    fig, ax = plt.subplots(figsize=(7, 4))
    _panel(ax, curve_set, title)
    fig.tight_layout()
    _save(fig, path)


def classification_figure(result: PairedEvalResult, path) -> None:
    """Aligned vs no-alignment accuracy, with per-fold scatter."""
    fig, ax = plt.subplots(figsize=(5, 4))
    pairs = ((0, result.aligned, "aligned"), (1, result.baseline, "no alignment"))
    for x, res, label in pairs:
        ax.bar(x, res.accuracy, width=0.6, alpha=0.7)
        ax.scatter(
            np.full(res.per_fold.size, x), res.per_fold, color="black", s=12, zorder=3
        )
        ax.text(x, res.accuracy + 0.02, f"{res.accuracy:.3f}", ha="center", fontsize=9)
    ax.set_xticks([0, 1])
    ax.set_xticklabels([p[2] for p in pairs])
    ax.set_ylim(0, 1.1)
    ax.set_ylabel("accuracy")
    ax.set_title(f"{result.mode.value} evaluation")
    fig.tight_layout()
    _save(fig, path)


def recovery_figure(
    original: CurveSet, aligned: CurveSet, seed_samples: np.ndarray, path
) -> None:
    """Before/after panels with the generating seed curve overlaid."""
    grid = time_grid(original.curve_length)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, cs, title in (
        (axes[0], original, "before alignment"),
        (axes[1], aligned, "after alignment"),
    ):
        for row in cs.sample_matrix():
            ax.plot(grid, row, **_CURVE_STYLE)
        ax.plot(grid, seed_samples, color="black", linewidth=2.0, label="seed")
        ax.set_title(title)
        ax.set_xlabel("t")
    axes[0].legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)
