"""Render figure analogues from qsteer experiment CSV files.

Three figure kinds cover the experiment outputs:

* ``bloch3d`` — qubit convergence CSVs (step,fidelity,bx,by,bz,...) drawn as
  trajectories inside the Bloch sphere, one trace per input file.
* ``curves``  — generic y-vs-x line plots: the first column is the x axis and
  every numeric data column becomes a trace (fidelity/concurrence per step,
  or asymptotic fidelity per coupling strength).
* ``heatmap`` — noise sweeps (lambda,sigma,kind,mean_fidelity,...) as one
  mean-fidelity panel per noise kind.

Correctness lives in the CSVs; figures are regenerated artifacts with a fixed
size and style so reruns overwrite deterministically.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("bloch3d", "curves", "heatmap")

REQUIRED_COLUMNS = {
    "bloch3d": ("step", "bx", "by", "bz"),
    "curves": (),
    "heatmap": ("lambda", "sigma", "kind", "mean_fidelity"),
}

# bookkeeping columns that never become curve traces
NON_TRACE_COLUMNS = {"kind", "trajectories", "seed", "converged"}

FIGSIZE = (6.0, 4.5)
DPI = 130


@dataclass
class FigureSpec:
    inputs: list[str]
    kind: str
    out: str
    title: str | None = None
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; known: {', '.join(KINDS)}")
        if not self.inputs:
            raise ValueError("no input CSV files given")
        for path in self.inputs:
            if not os.path.exists(path):
                raise ValueError(f"input file {path} does not exist")


def read_csv(path: str) -> dict[str, list[str]]:
    """Parse a qsteer CSV into columns, skipping '#' metadata lines."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if not line.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    columns = {name: [] for name in header}
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise ValueError(f"{path}: row has {len(cells)} cells, header has {len(header)}")
        for name, cell in zip(header, cells):
            columns[name].append(cell)
    return columns


def check_columns(columns: dict, required, path: str) -> None:
    for name in required:
        if name not in columns:
            raise ValueError(f"{path}: missing column '{name}'")


def _floats(cells: list[str]) -> np.ndarray:
    return np.array([float(c) for c in cells])


def _trace_label(path: str, column: str, n_inputs: int) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    return f"{stem}: {column}" if n_inputs > 1 else column


def _render_bloch3d(spec: FigureSpec, fig) -> None:
    ax = fig.add_subplot(111, projection="3d")
    theta = np.linspace(0, np.pi, 13)
    phi = np.linspace(0, 2 * np.pi, 25)
    t, p = np.meshgrid(theta, phi)
    ax.plot_wireframe(
        np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t),
        color="lightgray", linewidth=0.4,
    )
    for path in spec.inputs:
        columns = read_csv(path)
        check_columns(columns, REQUIRED_COLUMNS["bloch3d"], path)
        bx, by, bz = (_floats(columns[c]) for c in ("bx", "by", "bz"))
        label = _trace_label(path, "trajectory", len(spec.inputs))
        ax.plot(bx, by, bz, marker="o", markersize=2.5, linewidth=1.0, label=label)
        ax.scatter([bx[-1]], [by[-1]], [bz[-1]], color="red", s=25)
    ax.set_xlabel(spec.labels.get("x", "x"))
    ax.set_ylabel(spec.labels.get("y", "y"))
    ax.set_zlabel(spec.labels.get("z", "z"))
    ax.set_box_aspect((1, 1, 1))
    if len(spec.inputs) > 1:
        ax.legend(fontsize=7)


def _render_curves(spec: FigureSpec, fig) -> None:
    ax = fig.add_subplot(111)
    x_name = None
    for path in spec.inputs:
        columns = read_csv(path)
        header = list(columns)
        if not header:
            raise ValueError(f"{path}: no columns")
        x_name = header[0]
        x = _floats(columns[x_name])
        plotted = 0
        for name in header[1:]:
            if name in NON_TRACE_COLUMNS:
                continue
            cells = columns[name]
            if any(c == "" for c in cells):
                continue
            ax.plot(x, _floats(cells), marker=".", markersize=3,
                    label=_trace_label(path, name, len(spec.inputs)))
            plotted += 1
        if plotted == 0:
            raise ValueError(f"{path}: no plottable data columns after '{x_name}'")
    ax.set_xlabel(spec.labels.get("x", x_name or ""))
    ax.set_ylabel(spec.labels.get("y", "value"))
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)


def _render_heatmap(spec: FigureSpec, fig) -> None:
    columns = {}
    for path in spec.inputs:
        cols = read_csv(path)
        check_columns(cols, REQUIRED_COLUMNS["heatmap"], path)
        for name, cells in cols.items():
            columns.setdefault(name, []).extend(cells)
    kinds = sorted(set(columns["kind"]))
    lams = _floats(columns["lambda"])
    sigmas = _floats(columns["sigma"])
    means = _floats(columns["mean_fidelity"])
    axes = fig.subplots(1, len(kinds), squeeze=False)[0]
    for ax, kind in zip(axes, kinds):
        mask = np.array([k == kind for k in columns["kind"]])
        lam_values = np.unique(lams[mask])
        sigma_values = np.unique(sigmas[mask])
        grid = np.full((len(sigma_values), len(lam_values)), np.nan)
        for lam, sigma, mean in zip(lams[mask], sigmas[mask], means[mask]):
            i = np.searchsorted(sigma_values, sigma)
            j = np.searchsorted(lam_values, lam)
            grid[i, j] = mean

        def span(values):
            lo, hi = values[0], values[-1]
            return (lo - 0.5, hi + 0.5) if lo == hi else (lo, hi)

        image = ax.imshow(
            grid, origin="lower", aspect="auto", vmin=min(0.5, np.nanmin(grid)), vmax=1.0,
            extent=(*span(lam_values), *span(sigma_values)),
        )
        ax.set_title(kind, fontsize=9)
        ax.set_xlabel(spec.labels.get("x", "lambda"))
        ax.set_ylabel(spec.labels.get("y", "sigma"))
        fig.colorbar(image, ax=ax, label="mean fidelity")


def render(spec: FigureSpec) -> str:
    """Draw the figure described by ``spec`` and write it to ``spec.out``."""
    fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
    try:
        if spec.kind == "bloch3d":
            _render_bloch3d(spec, fig)
        elif spec.kind == "curves":
            _render_curves(spec, fig)
        else:
            _render_heatmap(spec, fig)
        if spec.title:
            fig.suptitle(spec.title, fontsize=10)
        fig.tight_layout()
        fig.savefig(spec.out)
    finally:
        plt.close(fig)
    return spec.out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qsteer-figures",
        description="Render figure analogues from qsteer experiment CSVs.",
    )
    parser.add_argument("inputs", nargs="+", help="input CSV file(s)")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--title", default=None)
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    args = parser.parse_args(argv)
    labels = {}
    if args.xlabel:
        labels["x"] = args.xlabel
    if args.ylabel:
        labels["y"] = args.ylabel
    try:
        out = render(
            FigureSpec(inputs=args.inputs, kind=args.kind, out=args.out,
                       title=args.title, labels=labels)
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
