"""SVG figures for sweeps, heatmaps and the scaling diagnostic."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no timestamp, so identical data gives identical files
RC = {
    "svg.hashsalt": "srmcts",
    "svg.fonttype": "none",
    "figure.figsize": (5.0, 3.4),
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_sweep(cells, path, x: str = "budget") -> None:
    """Error rate with 2 SE bars, one line per algorithm (and per eps when x is budget)."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        other = "eps" if x == "budget" else "budget"
        groups = {}
        for c in cells:
            groups.setdefault((c.algo, getattr(c, other)), []).append(c)
        multi = len({k[1] for k in groups}) > 1
        for (algo, o), cs in groups.items():
            cs = sorted(cs, key=lambda c: getattr(c, x))
            xs = [getattr(c, x) for c in cs]
            label = f"{algo} ({other}={o:g})" if multi else algo
            ax.errorbar(xs, [c.rate for c in cs], yerr=[2 * c.se for c in cs],
                        marker="o", ms=3, capsize=2, label=label)
        ax.set_xlabel("budget T" if x == "budget" else "eps")
        ax.set_ylabel("error rate")
        ax.legend(frameon=False, fontsize=7)
        _save(fig, path)


def plot_heatmap(mat: np.ndarray, path, title: str = "") -> None:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        im = ax.imshow(mat, cmap="viridis", aspect="auto")
        fig.colorbar(im, ax=ax, label="mean pulls")
        ax.set_xlabel("leaf")
        ax.set_ylabel("subtree")
        if title:
            ax.set_title(title)
        _save(fig, path)


def plot_scaling(fit, path) -> None:
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        xs = np.array([p[1] for p in fit.points])
        ys = np.array([p[2] for p in fit.points])
        ax.plot(xs, ys, "o", ms=4)
        grid = np.linspace(xs.min(), xs.max(), 50)
        ax.plot(grid, fit.intercept + fit.slope * grid, "-", lw=1,
                label=f"slope {fit.slope:.3g}, R^2 {fit.r2:.3f}")
        ax.set_xlabel("(KL - T) / (log(KL) H2)")
        ax.set_ylabel("ln error rate")
        ax.legend(frameon=False)
        _save(fig, path)
