"""PNG previews of the figure tables (optional; the CSV files are the contract)."""
from __future__ import annotations

import os

import numpy as np

from .sweep import read_table

GOLDEN = (np.sqrt(5) - 1.0) / 2.0
COLUMN_WIDTH = 3.4

RC = {
    "font.family": "serif",
    "font.size": 8,
    "mathtext.fontset": "stix",
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "lines.linewidth": 1.0,
    "figure.figsize": (COLUMN_WIDTH, COLUMN_WIDTH * GOLDEN),
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}

XLABEL = {"tau": r"$\tau$", "delta": r"$\delta$"}


def _column(rows, i):
    return np.array([float(r[i]) if r[i] != "" else np.nan for r in rows])


def plot_table(csv_path: str, png_path: str | None = None, ylabel: str = r"$g^{(2)}$") -> str:
    """Line plot of every value column against the first column."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    header, rows = read_table(csv_path)
    x = _column(rows, 0)
    png_path = png_path or os.path.splitext(csv_path)[0] + ".png"
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for i, name in enumerate(header[1:], start=1):
            style = "--" if name.startswith("perturbative") else "-"
            ax.plot(x, _column(rows, i), style, label=name.replace("_", " "))
        ax.set_xlabel(XLABEL.get(header[0], header[0]))
        ax.set_ylabel(ylabel)
        ax.legend(frameon=False)
        fig.savefig(png_path)
        plt.close(fig)
    return png_path


def plot_tables(csv_paths) -> list:
    return [plot_table(p) for p in csv_paths]
