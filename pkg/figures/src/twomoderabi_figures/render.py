"""Rendering of twomoderabi CSV tables into publication-style figures.

This package never recomputes physics: it is a pure view of the CSV
contracts.  Each figure kind owns an exact header; files whose header does
not match are refused.

Conventions: positive-parity spectral branches in red, negative in blue;
line styles solid/dashed/dot-dashed cycle with the secondary quantum number;
order-parameter scans show four panels (a) sz, (b) n1, (c) n2, (d) jx;
evolution runs show (a) sz, (b) n1, (c) n2, (d) fidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class HeaderContractError(ValueError):
    """The CSV header does not match the figure kind's contract."""


#: Exact header per figure kind (the producing CLI's column contracts).
HEADERS = {
    "order-parameter-quad": ("g1", "g2", "sz", "n1", "n2", "jx", "chi", "E0", "n_max"),
    "spectrum": ("coupling", "k", "energy", "parity", "secondary", "j"),
    "evolution-quad": ("t", "sz", "n1", "n2", "fidelity"),
}

#: Panel layouts, in (a)-(d) order.
PANELS = {
    "order-parameter-quad": ("sz", "n1", "n2", "jx"),
    "evolution-quad": ("sz", "n1", "n2", "fidelity"),
}

PANEL_LABELS = {
    "sz": r"$\langle\hat\sigma_z\rangle$",
    "n1": r"$\langle\hat a_1^\dagger \hat a_1\rangle$",
    "n2": r"$\langle\hat a_2^\dagger \hat a_2\rangle$",
    "jx": r"$\langle\hat J_x\rangle$",
    "fidelity": r"$\mathcal{F}$",
}

_LINESTYLES = ("-", "--", "-.")


@dataclass
class FigureSpec:
    """What to render: input tables, figure kind, output path, display options."""

    csv_paths: list[str]
    kind: str
    out_path: str
    sz_shift: bool = False  # plot sz + 1 so the vacuum region reads as zero
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if isinstance(self.csv_paths, str):
            self.csv_paths = [self.csv_paths]
        if self.kind not in HEADERS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of {sorted(HEADERS)}")


def read_table(path: str, kind: str):
    """Parse one CSV, skipping '#' metadata lines and enforcing the header."""
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            if header is None:
                header = tuple(cells)
                if header != HEADERS[kind]:
                    raise HeaderContractError(
                        f"{path}: header {header} does not match the "
                        f"{kind} contract {HEADERS[kind]}")
                continue
            if len(cells) != len(header):
                raise HeaderContractError(
                    f"{path}: row has {len(cells)} cells, header has {len(header)}")
            rows.append([float(c) for c in cells])
    if header is None:
        raise HeaderContractError(f"{path}: no header row found")
    return np.asarray(rows, dtype=float).reshape(-1, len(header))


def branch_style(parity: int, secondary: int):
    """(color, linestyle) for one spectral branch."""
    color = "red" if parity > 0 else "blue"
    return color, _LINESTYLES[abs(int(secondary)) % len(_LINESTYLES)]


def shifted_sz(values: np.ndarray, sz_shift: bool) -> np.ndarray:
    """The displayed qubit inversion: bare value, or value + 1 when shifted."""
    return values + 1.0 if sz_shift else values


def _grid_from_rows(rows: np.ndarray):
    g1 = np.unique(rows[:, 0])
    g2 = np.unique(rows[:, 1])
    lookup = {(r[0], r[1]): r for r in rows}
    if len(lookup) != len(g1) * len(g2):
        raise ValueError("scan rows do not form a complete (g1, g2) grid")
    fields = {}
    for name, col in (("sz", 2), ("n1", 3), ("n2", 4), ("jx", 5)):
        z = np.empty((len(g2), len(g1)))
        for i, a in enumerate(g1):
            for j, b in enumerate(g2):
                z[j, i] = lookup[(a, b)][col]
        fields[name] = z
    return g1, g2, fields


def _apply_limits(ax, spec):
    if spec.xlim is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(*spec.ylim)


def _render_order_parameter_quad(spec: FigureSpec):
    rows = read_table(spec.csv_paths[0], spec.kind)
    g1, g2, fields = _grid_from_rows(rows)
    fig, axes = plt.subplots(2, 2, figsize=(9, 7), constrained_layout=True)
    for ax, tag, name in zip(axes.flat, "abcd", PANELS[spec.kind]):
        z = fields[name]
        label = PANEL_LABELS[name]
        if name == "sz":
            z = shifted_sz(z, spec.sz_shift)
            if spec.sz_shift:
                label = PANEL_LABELS["sz"] + " + 1"
        mesh = ax.pcolormesh(g1, g2, z, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax)
        ax.set_title(f"({tag}) {label}")
        ax.set_xlabel(r"$g_1/\omega$")
        ax.set_ylabel(r"$g_2/\omega$")
        _apply_limits(ax, spec)
    return fig


def _render_spectrum(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(7, 5), constrained_layout=True)
    for path in spec.csv_paths:
        rows = read_table(path, spec.kind)
        branches = {}
        for coupling, _, energy, parity, secondary, j in rows:
            key = (int(parity), int(secondary), int(j))
            branches.setdefault(key, []).append((coupling, energy))
        for (parity, secondary, j), pts in sorted(branches.items()):
            pts.sort()
            xs, ys = zip(*pts)
            color, style = branch_style(parity, secondary)
            ax.plot(xs, ys, color=color, linestyle=style, linewidth=1.2)
    ax.set_xlabel(r"$g/\omega$")
    ax.set_ylabel(r"$E/\omega$")
    _apply_limits(ax, spec)
    return fig


def _render_evolution_quad(spec: FigureSpec):
    rows = read_table(spec.csv_paths[0], spec.kind)
    t = rows[:, 0]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), constrained_layout=True)
    for ax, tag, (name, col) in zip(
            axes.flat, "abcd", (("sz", 1), ("n1", 2), ("n2", 3), ("fidelity", 4))):
        values = rows[:, col]
        label = PANEL_LABELS[name]
        if name == "sz":
            values = shifted_sz(values, spec.sz_shift)
            if spec.sz_shift:
                label = PANEL_LABELS["sz"] + " + 1"
        ax.plot(t, values, color="black", linewidth=1.2)
        ax.set_title(f"({tag}) {label}")
        ax.set_xlabel(r"$t\,\omega$")
        if name == "fidelity" and np.all(np.isnan(values)):
            ax.text(0.5, 0.5, "no reference", ha="center", va="center",
                    transform=ax.transAxes)
        _apply_limits(ax, spec)
    return fig


_RENDERERS = {
    "order-parameter-quad": _render_order_parameter_quad,
    "spectrum": _render_spectrum,
    "evolution-quad": _render_evolution_quad,
}


def render(spec: FigureSpec) -> str:
    """Render the figure described by spec; returns the written path."""
    fig = _RENDERERS[spec.kind](spec)
    try:
        fig.savefig(spec.out_path, dpi=150)
    finally:
        plt.close(fig)
    return spec.out_path
