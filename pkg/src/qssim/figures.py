"""Figures rendered next to the delimited reports.

Three views of a finished run: announced-op histograms per agent against
the agreed rates, per-replicate leakage / pass-rate points, and the
distribution of per-agent binomial p-values.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .detector import OP_ORDER
from .protocol import agent_name

EXPECTED_FREQS = (0.125, 0.125, 0.125, 0.125, 0.5)


def announcement_figure(rows, path: Path) -> Path:
    """Per-agent bars of announced-op frequencies, pooled over replicates."""
    n_agents = rows[0].session.n_agents
    agents = [agent_name(k) for k in range(1, n_agents + 1)]
    totals = {a: {op.value: 0 for op in OP_ORDER} for a in agents}
    for r in rows:
        for a in agents:
            for op, c in r.session.announcement_counts[a].items():
                totals[a][op] += c

    fig, ax = plt.subplots(figsize=(7, 4))
    ops = [op.value for op in OP_ORDER]
    x = np.arange(len(ops))
    width = 0.8 / max(n_agents, 1)
    for i, a in enumerate(agents):
        m = sum(totals[a].values())
        freqs = [totals[a][op] / m if m else 0.0 for op in ops]
        ax.bar(x + (i - (n_agents - 1) / 2) * width, freqs, width, label=a)
    ax.plot(x, EXPECTED_FREQS, "k_", markersize=22, label="agreed rate")
    ax.set_xticks(x, ops)
    ax.set_ylabel("announced frequency (control rounds)")
    ax.set_title(f"{rows[0].scenario_id}: announced operations")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def metrics_figure(rows, path: Path) -> Path:
    """Leakage and check pass rate per replicate, with means."""
    idx = [r.replicate for r in rows]
    leak = [r.session.leakage for r in rows]
    pr = [r.session.check_pass_rate for r in rows]
    flagged = [r.session.flagged for r in rows]

    fig, ax = plt.subplots(figsize=(7, 4))
    have_leak = [(i, v) for i, v in zip(idx, leak) if v is not None]
    if have_leak:
        xs, ys = zip(*have_leak)
        ax.plot(xs, ys, "o", ms=4, label="leakage")
        ax.axhline(sum(ys) / len(ys), color="C0", lw=1, ls="--")
    have_pass = [(i, v) for i, v in zip(idx, pr) if v is not None]
    if have_pass:
        xs, ys = zip(*have_pass)
        ax.plot(xs, ys, "s", ms=4, label="check pass rate")
    hits = [i for i, f in zip(idx, flagged) if f]
    if hits:
        ax.plot(hits, [1.02] * len(hits), "rv", ms=5, label="flagged")
    ax.set_xlabel("replicate")
    ax.set_ylim(-0.05, 1.1)
    ax.set_title(f"{rows[0].scenario_id}: session metrics")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def pvalue_figure(rows, path: Path) -> Path:
    """Histogram of the last agent's binomial p-values across replicates."""
    last = agent_name(rows[0].session.n_agents)
    pvals = [
        r.session.frequency_tests[last].p_value
        for r in rows
        if r.session.frequency_tests[last].p_value is not None
    ]
    fig, ax = plt.subplots(figsize=(7, 4))
    if pvals:
        ax.hist(pvals, bins=20, range=(0.0, 1.0), color="C2")
    alpha = rows[0].session.alpha
    ax.axvline(alpha, color="r", lw=1, label=f"alpha = {alpha}")
    ax.set_xlabel(f"H-count binomial p-value ({last})")
    ax.set_ylabel("replicates")
    ax.set_title(f"{rows[0].scenario_id}: detection p-values")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_all(rows, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        announcement_figure(rows, out_dir / "announcements.png"),
        metrics_figure(rows, out_dir / "metrics.png"),
        pvalue_figure(rows, out_dir / "pvalues.png"),
    ]


def sweep_figure(key: str, labeled_rows: list[tuple[str, list]], path: Path) -> Path:
    """Leakage and detection rate as the swept key varies."""
    labels = [v for v, _ in labeled_rows]
    leak_means = []
    detect_rates = []
    for _, rows in labeled_rows:
        leaks = [r.session.leakage for r in rows if r.session.leakage is not None]
        leak_means.append(sum(leaks) / len(leaks) if leaks else np.nan)
        detect_rates.append(sum(1 for r in rows if r.session.flagged) / len(rows))
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(x - 0.2, leak_means, 0.4, label="mean leakage")
    ax.bar(x + 0.2, detect_rates, 0.4, label="detection rate")
    ax.set_xticks(x, labels, rotation=20)
    ax.set_xlabel(key)
    ax.set_ylim(0, 1.1)
    ax.set_title(f"sweep over {key}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
