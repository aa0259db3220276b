"""Figure rendering for run and sweep outputs.

Every helper writes a PNG next to the CSV data and returns the path.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIG_SIZE = (6.4, 4.0)
DPI = 150
_FLOOR = 1e-10   # keeps log axes finite when a series touches zero


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def plot_correlations(series, path, title=None):
    """g^(n)(t) on a log axis, with the g = 1 reference line."""
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    for order in sorted(series.g):
        ax.semilogy(series.times, np.clip(series.g[order], _FLOOR, None),
                    label=rf"$g^{{({order})}}$")
    ax.axhline(1.0, color="0.4", linestyle=":", linewidth=1)
    ax.set_xlabel(r"$\gamma t$")
    ax.set_ylabel(r"$g^{(n)}(t)$")
    ax.legend(loc="lower right", ncol=2)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_distributions(series, path, title=None):
    """P_n(t) (solid) against the same-mean Poisson weights (dashed)."""
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    for n in range(1, series.n_max + 1):
        line, = ax.semilogy(series.times, np.clip(series.p[:, n], _FLOOR, None),
                            label=rf"$P_{{{n}}}$")
        ax.semilogy(series.times, np.clip(series.poisson[:, n], _FLOOR, None),
                    color=line.get_color(), linestyle="--", linewidth=1, alpha=0.7)
    ax.set_xlabel(r"$\gamma t$")
    ax.set_ylabel(r"$P_n$ (solid), Poisson (dashed)")
    ax.set_ylim(bottom=_FLOOR)
    ax.legend(loc="lower right", ncol=2)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_envelope(times, envelope, path, title=None):
    """Drive intensity |eps(t)|^2 in units of gamma^2."""
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    ax.plot(times, envelope)
    ax.set_xlabel(r"$\gamma t$")
    ax.set_ylabel(r"$|\varepsilon(t)/\gamma|^2$")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_sweep(values, g_avg, axis_label, path, title=None):
    """Window-averaged g^(n) against the swept parameter."""
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    for order in sorted(g_avg):
        ax.semilogy(values, np.clip(g_avg[order], _FLOOR, None), marker="o",
                    label=rf"$\bar g^{{({order})}}$")
    ax.axhline(1.0, color="0.4", linestyle=":", linewidth=1)
    ax.set_xlabel(axis_label)
    ax.set_ylabel("window-averaged $g^{(n)}$")
    ax.legend()
    if title:
        ax.set_title(title)
    return _save(fig, path)
