"""Render summary figures next to the delimited output.

Figures aggregate the rows the CSV writers emit: mean sum rate per
method grouped by normalization mode, mean sum rate per method grouped
by precoding-unit granularity, and cost-model totals across an antenna
sweep on a log axis.
"""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .experiment import STATUS_OK


def _mean(values):
    return sum(values) / len(values)


def _grouped_rate_bars(rows, group_key, ax, group_label):
    methods = list(dict.fromkeys(r.method for r in rows))
    groups = list(dict.fromkeys(group_key(r) for r in rows))
    means = defaultdict(list)
    for r in rows:
        if r.status == STATUS_OK:
            means[(r.method, group_key(r))].append(r.sum_rate)
    width = 0.8 / max(len(groups), 1)
    for gi, g in enumerate(groups):
        xs, ys = [], []
        for mi, m in enumerate(methods):
            vals = means.get((m, g))
            if vals:
                xs.append(mi + (gi - (len(groups) - 1) / 2) * width)
                ys.append(_mean(vals))
        ax.bar(xs, ys, width=width, label=f"{group_label}={g}")
    ax.set_xticks(range(len(methods)))
    ax.set_xticklabels(methods)
    ax.set_ylabel("mean sum rate [bit/s/Hz]")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)


def save_rate_figures(rows, out_dir: str) -> list[str]:
    """Write the normalization and granularity comparisons as PNG files.

    The normalization figure is drawn at the finest granularity present;
    the granularity figure at the first normalization mode present.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    rows = list(rows)
    if not rows:
        return written

    finest = min(r.pu_granularity for r in rows)
    subset = [r for r in rows if r.pu_granularity == finest]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    _grouped_rate_bars(subset, lambda r: r.normalization, ax, "norm")
    ax.set_title(f"Sum rate by normalization (PU granularity {finest} RB)")
    path = os.path.join(out_dir, "rate_by_normalization.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    granularities = sorted({r.pu_granularity for r in rows})
    if len(granularities) > 1:
        first_norm = rows[0].normalization
        subset = [r for r in rows if r.normalization == first_norm]
        fig, ax = plt.subplots(figsize=(6.5, 4))
        _grouped_rate_bars(subset, lambda r: r.pu_granularity, ax, "RB/PU")
        ax.set_title(f"Sum rate by PU granularity ({first_norm} normalization)")
        path = os.path.join(out_dir, "rate_by_pu_granularity.png")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written


def save_flops_figure(rows, out_dir: str) -> list[str]:
    """Cost totals per method across the antenna sweep, log scale."""
    os.makedirs(out_dir, exist_ok=True)
    rows = list(rows)
    if not rows:
        return []
    methods = list(dict.fromkeys(r.method for r in rows))
    fig, ax = plt.subplots(figsize=(6.5, 4))
    for m in methods:
        pts = sorted((r.nt, r.flops_total) for r in rows if r.method == m)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=m)
    ax.set_yscale("log")
    ax.set_xlabel("transmit antennas")
    ax.set_ylabel("FLOPs per reconstruction")
    ax.set_title("Reconstruction cost vs array size")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    path = os.path.join(out_dir, "flops_vs_antennas.png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return [path]
