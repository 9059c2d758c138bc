"""Figure rendering for the report paths.

Every CLI subcommand can render a matplotlib figure next to its delimited
output (opt-in via --plot); figures are written to files, never shown.
"""

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _finite(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = np.isfinite(xs) & np.isfinite(ys)
    return xs[keep], ys[keep]


def plot_profile(path, radii, values, title, ylabel="potential"):
    fig, ax = plt.subplots(figsize=(6, 4))
    xs, ys = _finite(radii, values)
    ax.loglog(xs, ys, marker=".", lw=1)
    ax.set_xlabel("radius")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_grid_function(path, grid, title):
    fig, ax = plt.subplots(figsize=(6, 4))
    vals = grid.values
    if grid.n == 1:
        holder = grid.as_density()
        centers = holder.cell_centers()[:, 0]
        ax.step(centers, vals, where="mid")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
    elif grid.n == 2:
        im = ax.imshow(vals.T, origin="lower", aspect="equal")
        fig.colorbar(im, ax=ax)
    else:
        ax.plot(np.sort(vals.ravel())[::-1])
        ax.set_xlabel("cell rank")
        ax.set_ylabel("u")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_report_values(path, values, best, title):
    fig, ax = plt.subplots(figsize=(6, 4))
    vals = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
    if len(vals):
        ax.plot(vals, marker="o", lw=0.8)
    if math.isfinite(best):
        ax.axhline(best, color="crimson", ls="--", lw=1,
                   label=f"best = {best:.4g}")
        ax.legend()
    ax.set_xlabel("sample")
    ax.set_ylabel("ratio")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_scaling_fit(path, lambdas, bounds, slope, title):
    fig, ax = plt.subplots(figsize=(6, 4))
    xs, ys = _finite(lambdas, bounds)
    ax.loglog(xs, ys, "o")
    if len(xs) >= 2:
        c = ys[0] / xs[0] ** slope
        grid = np.geomspace(xs.min(), xs.max(), 64)
        ax.loglog(grid, c * grid ** slope, "--",
                  label=f"slope {slope:.3f}")
        ax.legend()
    ax.set_xlabel("dilation")
    ax.set_ylabel("capacity lower bound")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
