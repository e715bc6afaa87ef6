"""Render figures from run outputs, next to the CSVs they come from.

The report path is read-only over the delimited outputs: frequency series
become line charts and node snapshots become colored grids, written as
PNGs alongside the source files. The default palette follows the PD
legend: values ascending map to blue, red, green, yellow.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from .errors import EvonetError

PALETTE = ["tab:blue", "tab:red", "tab:green", "gold",
           "tab:purple", "tab:orange", "tab:cyan", "tab:brown"]


def _color(i: int) -> str:
    return PALETTE[i % len(PALETTE)]


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise EvonetError(f"{path} is empty")
    return rows[0], rows[1:]


def render_frequency_figure(csv_path: str | Path, out_path: str | Path | None = None) -> Path:
    """Line chart of value counts over time from a freq output CSV."""
    csv_path = Path(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".png")
    header, rows = _read_csv(csv_path)
    if header[:1] != ["step"] or len(header) < 2:
        raise EvonetError(f"{csv_path} does not look like a frequency output")
    steps = [int(r[0]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, name in enumerate(header[1:]):
        counts = [int(r[i + 1]) for r in rows]
        ax.plot(steps, counts, label=name, color=_color(i), linewidth=1.2)
    ax.set_xlabel("step")
    ax.set_ylabel("count")
    ax.set_title(csv_path.stem)
    ax.legend(title=csv_path.stem.rsplit("_", 1)[-1], fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_grid_figure(
    csv_path: str | Path,
    out_path: str | Path | None = None,
    attr: str | None = None,
) -> Path:
    """Colored-cell rendering of a node snapshot CSV.

    Snapshots with integer lattice coordinates render as a grid image;
    anything else falls back to a scatter at the stored coordinates.
    """
    csv_path = Path(csv_path)
    out_path = Path(out_path) if out_path else csv_path.with_suffix(".png")
    header, rows = _read_csv(csv_path)
    if header[:3] != ["id", "x", "y"]:
        raise EvonetError(f"{csv_path} does not look like a node snapshot")
    attr_names = header[3:]
    if not attr_names:
        raise EvonetError(f"{csv_path} has no attribute columns to color by")
    attr = attr or attr_names[0]
    if attr not in attr_names:
        raise EvonetError(f"snapshot has no attribute {attr!r} (has {attr_names})")
    col = 3 + attr_names.index(attr)

    values = [r[col] for r in rows]
    distinct = sorted(set(values))
    index = {v: i for i, v in enumerate(distinct)}
    xs_raw = [r[1] for r in rows]
    ys_raw = [r[2] for r in rows]

    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    grid_like = all(v and float(v).is_integer() for v in xs_raw + ys_raw)
    if grid_like:
        xs = [int(float(v)) for v in xs_raw]
        ys = [int(float(v)) for v in ys_raw]
        w, h = max(xs) + 1, max(ys) + 1
        img = np.zeros((h, w), dtype=np.int64)
        for x, y, v in zip(xs, ys, values):
            img[y, x] = index[v]
        cmap = ListedColormap([_color(i) for i in range(len(distinct))])
        ax.imshow(img, cmap=cmap, vmin=0, vmax=max(len(distinct) - 1, 1),
                  interpolation="nearest", origin="upper")
        ax.set_xticks([])
        ax.set_yticks([])
    else:
        n = max(len(rows), 1)
        xs, ys = [], []
        for i, (xv, yv) in enumerate(zip(xs_raw, ys_raw)):
            if xv and yv:
                xs.append(float(xv))
                ys.append(float(yv))
            else:
                angle = 2.0 * np.pi * i / n
                xs.append(float(np.cos(angle)))
                ys.append(float(np.sin(angle)))
        colors = [_color(index[v]) for v in values]
        ax.scatter(xs, ys, c=colors, s=30)
        ax.set_aspect("equal")
    handles = [plt.Line2D([], [], marker="s", linestyle="", color=_color(i), label=v)
               for v, i in index.items()]
    ax.legend(handles=handles, title=attr, fontsize=8, loc="upper right")
    ax.set_title(csv_path.stem)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
    return out_path


def render_report(outdir: str | Path) -> list[Path]:
    """Render a figure for every recognized output CSV in a directory."""
    outdir = Path(outdir)
    if not outdir.is_dir():
        raise EvonetError(f"{outdir} is not a directory")
    written = []
    for path in sorted(outdir.glob("*_freq_*.csv")):
        written.append(render_frequency_figure(path))
    for path in sorted(outdir.glob("*_nodes_*.csv")):
        written.append(render_grid_figure(path))
    return written
