"""Render benchmark tables as figures next to their CSV outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import L1DemoResult, RegimeTable

# strip the default Software tag so repeated runs produce identical bytes
PNG_METADATA = {"Software": None}

_ALGO_STYLE = {
    "kmeans": dict(color="tab:orange", marker="s"),
    "kmedians-l1": dict(color="tab:green", marker="^"),
    "hybrid": dict(color="tab:blue", marker="o"),
}


def _style(algorithm: str) -> dict:
    return _ALGO_STYLE.get(algorithm, dict(marker="d"))


def _series(table: RegimeTable, algorithm: str):
    rows = [r for r in table.rows if r.algorithm == algorithm]
    rows.sort(key=lambda r: r.sweep_value)
    x = np.array([r.sweep_value for r in rows])
    mp = np.array([r.mp_mean for r in rows])
    mp_ci = np.array([r.mp_ci for r in rows])
    err = np.array([r.centroid_error_mean for r in rows])
    err_ci = np.array([r.centroid_error_ci for r in rows])
    return x, mp, mp_ci, err, err_ci


def save_regime_figure(table: RegimeTable, path) -> None:
    """Mean mislabeling and centroid error vs the sweep value, one line per algorithm."""
    algorithms = sorted({r.algorithm for r in table.rows})
    sweep_name = table.rows[0].sweep_name
    regime = table.rows[0].regime
    init = table.rows[0].init
    mp_label = table.rows[0].mp_metric

    fig, (ax_mp, ax_err) = plt.subplots(1, 2, figsize=(10, 4))
    for name in algorithms:
        x, mp, mp_ci, err, err_ci = _series(table, name)
        ax_mp.errorbar(x, mp, yerr=mp_ci, label=name, capsize=3, **_style(name))
        ax_err.errorbar(x, err, yerr=err_ci, label=name, capsize=3, **_style(name))
    ax_mp.set_xlabel(sweep_name)
    ax_mp.set_ylabel(mp_label)
    ax_mp.set_title(f"{regime} ({init} init): mislabeling")
    ax_mp.grid(alpha=0.3)
    ax_mp.legend()
    ax_err.set_xlabel(sweep_name)
    ax_err.set_ylabel("centroid error / separation")
    ax_err.set_title(f"{regime} ({init} init): centroid error")
    ax_err.grid(alpha=0.3)
    ax_err.legend()
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150, metadata=PNG_METADATA)
    plt.close(fig)


def save_decay_figure(table: RegimeTable, path) -> None:
    """Mislabeling on a log scale against squared signal-to-noise ratio."""
    algorithms = sorted({r.algorithm for r in table.rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in algorithms:
        x, mp, mp_ci, _, _ = _series(table, name)
        positive = mp > 0
        ax.errorbar(
            x[positive] ** 2, mp[positive], yerr=mp_ci[positive],
            label=name, capsize=3, **_style(name),
        )
    ax.set_yscale("log")
    ax.set_xlabel("snr^2")
    ax.set_ylabel("mean mislabeling proportion")
    ax.set_title("mislabeling decay vs squared signal-to-noise")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150, metadata=PNG_METADATA)
    plt.close(fig)


def save_demo_figure(result: L1DemoResult, path) -> None:
    """Bar chart of the two labeling metrics on the fixed two-cluster instance."""
    fig, ax = plt.subplots(figsize=(4.5, 4))
    means = [result.mp_l1_mean, result.mp_l2_mean]
    cis = [result.mp_l1_ci, result.mp_l2_ci]
    ax.bar(["l1-labeling", "l2-labeling"], means, yerr=cis, capsize=6,
           color=["tab:green", "tab:blue"], width=0.6)
    ax.set_ylabel("mean mislabeling proportion")
    ax.set_title("true-centroid labeling, fixed two-cluster instance")
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150, metadata=PNG_METADATA)
    plt.close(fig)
