"""Figures for the CLI reports.  Each function writes one PNG and returns its path."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

PARAMS = {
    "font.size": 9,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "figure.figsize": (5.0, 3.4),
    "figure.dpi": 120,
    "savefig.bbox": "tight",
    "svg.hashsalt": "moyalgeo",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_spectrum(rows, path):
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots()
        m = [r["level"] for r in rows]
        ax.plot(m, [r["analytic"] for r in rows], "o", mfc="w", label=r"$\lambda_P\sqrt{4m+2}$")
        ax.plot(m, [r["eigenvalue"] for r in rows], "x", color="k", label="numeric")
        ax.set_xlabel("level m")
        ax.set_ylabel("eigenvalue of L")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_ratio(rows, path):
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots()
        n = np.array([r["n"] for r in rows])
        lo = np.array([r["ratio_lower"] for r in rows])
        hi = np.array([r["ratio_upper"] for r in rows])
        if np.allclose(lo, hi):
            ax.loglog(n, np.abs(lo), "-", color="k", label=r"$|d_D - d'_L|/d'_L$")
        else:
            ax.fill_between(n, np.abs(lo), np.abs(hi), color="0.8", label="bracket")
            ax.loglog(n, np.maximum(np.abs(lo), np.abs(hi)), "-", color="k", label="envelope")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel("relative gap")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_bars(labels, values, path, ylabel, log=False, threshold=None):
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots()
        vals = np.asarray(values, dtype=float)
        if log:
            vals = np.maximum(vals, 1e-17)
        ax.bar(range(len(vals)), vals, color="0.55")
        ax.set_xticks(range(len(vals)))
        ax.set_xticklabels(labels, rotation=30, ha="right")
        if log:
            ax.set_yscale("log")
        if threshold is not None:
            ax.axhline(threshold, ls="--", color="k", lw=0.8)
        ax.set_ylabel(ylabel)
        return _save(fig, path)


def plot_series(x, y, path, xlabel, ylabel, loglog=True):
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots()
        ax.plot(x, np.maximum(np.asarray(y, dtype=float), 1e-17), "o-", color="k", mfc="w")
        if loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        return _save(fig, path)


def plot_grid(f, path, title=""):
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots()
        e = f.extent
        im = ax.imshow(np.abs(f.samples).T, origin="lower", extent=(-e, e, -e, e), cmap="viridis")
        fig.colorbar(im, ax=ax, label="|value|")
        ax.set_xlabel(r"$x_1$")
        ax.set_ylabel(r"$x_2$")
        ax.set_title(title)
        return _save(fig, path)
