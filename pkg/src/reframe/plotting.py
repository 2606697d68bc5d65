"""Matplotlib figures for the CLI reports (written next to the tables)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def overlap_figure(path, curves, xlabel: str, ylabel: str = r"$D\,|\langle g|\psi(e)\rangle|^2$"):
    """``curves`` maps a legend label to (x, y) arrays."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (x, y) in curves.items():
        ax.plot(x, y, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, path)


def outcome_figure(path, index, density, residual):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.plot(index, density, "o-", ms=3)
    ax1.set_ylabel("P(h)")
    ax2.semilogy(index, [max(r, 1e-18) for r in residual], "s", ms=3)
    ax2.set_ylabel("pipeline - oracle")
    ax2.set_xlabel("outcome")
    _save(fig, path)


def sweep_figure(path, sizes, metrics):
    """``metrics`` maps a column name to values along ``sizes``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, values in metrics.items():
        ax.plot(sizes, values, "o-", label=name)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("frame size")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, path)


def bhd_figure(path, j_values, m_values, probs):
    fig, ax = plt.subplots(figsize=(6, 4))
    sc = ax.scatter(m_values, j_values, c=probs, s=8, cmap="viridis")
    fig.colorbar(sc, ax=ax, label=r"$P^j_m$")
    ax.set_xlabel("m")
    ax.set_ylabel("j")
    _save(fig, path)
