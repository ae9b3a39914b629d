"""Figure rendering for the evaluation reports.

Every report command writes its delimited table and, next to it, a PNG of
the same data.  Uses the Agg backend so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .studies import ConvergenceStudy, NegativeStudy

_MODE_STYLE = {"pruned": "-o", "unpruned": ":s"}


def plot_convergence(study: ConvergenceStudy, out_path: str):
    """Mean relative error vs sample count, one line per mode (pruned solid,
    unpruned dotted)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    modes = sorted({r.mode for r in study.rows})
    for mode in modes:
        rows = sorted((r for r in study.rows if r.mode == mode), key=lambda r: r.theta)
        thetas = [r.theta for r in rows]
        errors = [r.mean_relative_error for r in rows]
        bars = [r.ci95 for r in rows]
        ax.errorbar(
            thetas,
            errors,
            yerr=bars,
            fmt=_MODE_STYLE.get(mode, "-"),
            capsize=3,
            label=mode,
        )
    ax.set_xscale("log")
    ax.set_xlabel("samples per estimate")
    ax.set_ylabel("mean relative error")
    ax.set_title("Sampling error vs sample count")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_negative_study(study: NegativeStudy, out_path: str):
    """Positive-vs-negative win fraction and mean score gap per hop limit."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(8, 4))
    taus = [r.tau for r in study.rows]
    left.bar([str(t) for t in taus], [r.win_fraction for r in study.rows], color="#4878a8")
    left.axhline(0.5, color="gray", linestyle="--", linewidth=1)
    left.set_ylim(0, 1)
    left.set_xlabel("hop limit")
    left.set_ylabel("positive wins fraction")
    left.set_title("Indexed concept beats random negative")
    right.bar([str(t) for t in taus], [r.mean_gap for r in study.rows], color="#a85548")
    right.set_xlabel("hop limit")
    right.set_ylabel("mean score gap")
    right.set_title("Context-relevance gap")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
