"""Figure rendering for the report paths (sign maps, capacity sweeps).

Everything draws through the Agg backend and writes straight to files; the
CSV written next to each figure carries the same data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams.update({
    "figure.dpi": 110,
    "font.size": 9,
    "axes.titlesize": 10,
})


def sign_map(header: list[str], rows: list[list[float]], path: str, title: str = ""):
    """Two-color sign map (or discrete nearest-site map) per gap column.

    Expects the CSV layout produced by the bisector field samplers: three
    coordinate columns followed by one column per metric.  The second and
    third coordinates span the plot plane.
    """
    data = np.asarray(rows, dtype=float)
    ncols = len(header) - 3
    fig, axes = plt.subplots(1, ncols, figsize=(4.2 * ncols, 4.0), squeeze=False)
    x, y = data[:, 1], data[:, 2]
    for i in range(ncols):
        ax = axes[0][i]
        values = data[:, 3 + i]
        name = header[3 + i]
        if name.startswith("nearest_"):
            ax.scatter(x, y, c=values, s=4, cmap="tab10", rasterized=True)
        else:
            ax.scatter(x, y, c=np.sign(values), s=4, cmap="coolwarm",
                       vmin=-1, vmax=1, rasterized=True)
        ax.set_title(name)
        ax.set_xlabel(header[1])
        ax.set_ylabel(header[2])
        ax.set_aspect("equal")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def capacity_sweep_plot(rows: list[dict], path: str, title: str = ""):
    """Capacity against mesh resolution, with the point counts annotated."""
    deltas = [r["delta"] for r in rows]
    caps = [r["capacity_nats"] for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(deltas, caps, "o-")
    for r in rows:
        ax.annotate(str(r["points"]), (r["delta"], r["capacity_nats"]),
                    textcoords="offset points", xytext=(4, 4), fontsize=7)
    ax.set_xlabel("mesh step")
    ax.set_ylabel("capacity (nats)")
    ax.invert_xaxis()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
