"""Render static figures from the simulation CLI's CSV outputs.

Five figure kinds, one per invocation:

* ``controls``        -- trap position / wavepacket centre (top) and coupling
                         strength / spin-precession parameter (bottom) vs t/t_f,
                         from ``controls.csv``
* ``density_contour`` -- total density over (x, t), assembled from a set of
                         ``density_t*.csv`` snapshots
* ``snapshots``       -- spin-up and spin-down density profiles at each
                         snapshot time, from ``density_t*.csv`` files
* ``spin_traces``     -- spin expectation values vs t/t_f, from
                         ``observables.csv``
* ``sweep``           -- final fidelity vs interaction strength, from
                         ``sweep.csv``

Rendering is read-only over its inputs and deterministic (fixed styling, no
timestamps); reruns overwrite the output file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "RenderError", "FIGURE_KINDS", "render"]


class RenderError(ValueError):
    """Unusable input: missing file, empty table, or missing columns."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSVs, figure kind, output image path.

    ``xlabel``/``ylabel`` override the kind's default axis labels (applied to
    the bottom panel of multi-panel figures).
    """

    kind: str
    inputs: tuple
    out: str
    dpi: int = 150
    xlabel: str | None = None
    ylabel: str | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise RenderError(
                f"unknown figure kind {self.kind!r}; choose from {sorted(FIGURE_KINDS)}")
        if not self.inputs:
            raise RenderError("at least one input CSV is required")


def read_table(path, required):
    """Load a CSV with a header row; enforce required columns, reject empties."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise RenderError(f"{path}: empty file") from None
            rows = [row for row in reader if row]
    except OSError as exc:
        raise RenderError(f"cannot read {path}: {exc}") from None
    missing = [name for name in required if name not in header]
    if missing:
        raise RenderError(f"{path}: missing columns {missing} (header {header})")
    if not rows:
        raise RenderError(f"{path}: no data rows")
    try:
        data = np.array(rows, dtype=float)
    except ValueError as exc:
        raise RenderError(f"{path}: non-numeric data ({exc})") from None
    return {name: data[:, i] for i, name in enumerate(header)}


def _save(fig, spec: FigureSpec, label_ax):
    if spec.xlabel is not None:
        label_ax.set_xlabel(spec.xlabel)
    if spec.ylabel is not None:
        label_ax.set_ylabel(spec.ylabel)
    fig.savefig(spec.out, dpi=spec.dpi)
    plt.close(fig)


def _render_controls(spec: FigureSpec):
    table = read_table(spec.inputs[0], ["t", "x0", "alpha", "xc", "ac"])
    t = table["t"]
    t_f = t[-1] if t[-1] != 0 else 1.0
    d = table["xc"][-1] if table["xc"][-1] != 0 else 1.0
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(5.0, 6.0), sharex=True,
                                      constrained_layout=True)
    top.plot(t / t_f, table["x0"] / d, "-", color="tab:red", label="$x_0/d$")
    top.plot(t / t_f, table["xc"] / d, "--", color="tab:blue", label="$x_c/d$")
    top.set_ylabel("position / $d$")
    top.legend(frameon=False)
    bottom.plot(t / t_f, table["alpha"], "-", color="tab:red", label=r"$\alpha$")
    bottom.plot(t / t_f, table["ac"], "--", color="tab:blue", label="$a_c$")
    bottom.set_xlabel("$t/t_f$")
    bottom.set_ylabel(r"coupling ($a_0\omega$)")
    bottom.legend(frameon=False)
    _save(fig, spec, bottom)


def _snapshot_tables(spec: FigureSpec):
    tables = []
    for path in spec.inputs:
        table = read_table(path, ["t", "x", "total", "up", "down"])
        tables.append((table["t"][0], table))
    tables.sort(key=lambda item: item[0])
    return tables


def _render_density_contour(spec: FigureSpec):
    tables = _snapshot_tables(spec)
    if len(tables) < 2:
        raise RenderError("density contour needs at least two snapshot files")
    x = tables[0][1]["x"]
    for _, table in tables:
        if len(table["x"]) != len(x) or not np.array_equal(table["x"], x):
            raise RenderError("snapshot files disagree on the spatial grid")
    times = np.array([t for t, _ in tables])
    density = np.array([table["total"] for _, table in tables])
    fig, ax = plt.subplots(figsize=(5.5, 4.0), constrained_layout=True)
    mesh = ax.pcolormesh(x, times, density, shading="nearest", cmap="magma")
    fig.colorbar(mesh, ax=ax, label=r"$|\Psi|^2$")
    ax.set_xlabel("$x$ ($a_0$)")
    ax.set_ylabel("$t$ ($1/\\omega$)")
    _save(fig, spec, ax)


def _render_snapshots(spec: FigureSpec):
    tables = _snapshot_tables(spec)
    fig, axes = plt.subplots(len(tables), 1, figsize=(5.0, 1.8 * len(tables)),
                             sharex=True, constrained_layout=True, squeeze=False)
    for ax, (t, table) in zip(axes[:, 0], tables):
        ax.plot(table["x"], table["up"], "-", color="tab:red", label="spin up")
        ax.plot(table["x"], table["down"], "--", color="tab:blue", label="spin down")
        ax.annotate(f"$t = {t:.3g}$", xy=(0.02, 0.80), xycoords="axes fraction")
        ax.set_ylabel("density")
    axes[0, 0].legend(frameon=False, loc="upper right")
    axes[-1, 0].set_xlabel("$x$ ($a_0$)")
    _save(fig, spec, axes[-1, 0])


def _render_spin_traces(spec: FigureSpec):
    table = read_table(spec.inputs[0], ["t", "sx", "sy", "sz"])
    t = table["t"]
    t_f = t[-1] if t[-1] != 0 else 1.0
    fig, ax = plt.subplots(figsize=(5.0, 3.4), constrained_layout=True)
    ax.plot(t / t_f, table["sx"], "-", color="black", label=r"$\langle\sigma_x\rangle$")
    ax.plot(t / t_f, table["sy"], ":", color="tab:red", label=r"$\langle\sigma_y\rangle$")
    ax.plot(t / t_f, table["sz"], "--", color="tab:blue", label=r"$\langle\sigma_z\rangle$")
    if "P" in table:
        ax.plot(t / t_f, table["P"], "-.", color="tab:gray", alpha=0.7, label="$P$")
    ax.set_xlabel("$t/t_f$")
    ax.set_ylabel("spin expectation")
    ax.set_ylim(-1.05, 1.05)
    ax.legend(frameon=False, ncol=2)
    _save(fig, spec, ax)


def _render_sweep(spec: FigureSpec):
    table = read_table(spec.inputs[0], ["gN", "fidelity"])
    fig, ax = plt.subplots(figsize=(5.0, 3.4), constrained_layout=True)
    ax.plot(table["gN"], table["fidelity"], "o-", color="tab:blue")
    ax.set_xlabel(r"$\tilde{g}N$")
    ax.set_ylabel("fidelity")
    _save(fig, spec, ax)


FIGURE_KINDS = {
    "controls": _render_controls,
    "density_contour": _render_density_contour,
    "snapshots": _render_snapshots,
    "spin_traces": _render_spin_traces,
    "sweep": _render_sweep,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path.  All validation happens
    before anything is written, so a failed render leaves no file behind."""
    FIGURE_KINDS[spec.kind](spec)
    return spec.out
