"""Parameter scans, spectrum traces, and time-evolution runs.

Every run returns a small table object (columns + rows + meta) that the CLI
serializes; rows are emitted in deterministic grid order regardless of how
many workers computed them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .hilbert import HilbertSpace, Operator, QuantumState, make_space, number, pauli
from .models import (
    ModelKind,
    ModelParams,
    ResonanceError,
    _as_kind,
    build_hamiltonian,
    conserved_ops,
)
from .observables import free_rotation, order_parameters, weak_coupling_state
from .solver import (
    ConvergenceError,
    converge_truncation,
    eigensolve,
    labeled_levels_h1,
    labeled_levels_h2_equal,
)

#: Populations above this in the top two Fock levels of either mode flag a run.
LEAK_TOL = 1e-6


@dataclass
class ScanTable:
    """One row per (g1, g2) grid point, row-major in (g1, g2)."""

    columns: tuple = ("g1", "g2", "sz", "n1", "n2", "jx", "chi", "E0", "n_max")
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


@dataclass
class SpectrumTrace:
    """k lowest levels per coupling-path point; energies ascend with k."""

    columns: tuple = ("coupling", "k", "energy", "parity", "secondary", "j")
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


@dataclass
class EvolutionTrace:
    """Observables along an exact time evolution."""

    columns: tuple = ("t", "sz", "n1", "n2", "fidelity")
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def flagged(self) -> bool:
        return bool(self.meta.get("leak_max", 0.0) >= LEAK_TOL)


def _params_dict(p: ModelParams) -> dict:
    return {"omega0": p.omega0, "omega1": p.omega1, "omega2": p.omega2,
            "g1": p.g1, "g2": p.g2}


def _converged_ground(kind, p, tol, n_start, n_step, n_cap):
    """(n_max, E0, ground QuantumState); raises ConvergenceError past the cap."""
    def builder(n):
        return build_hamiltonian(kind, p, make_space(n, n))

    n_max, e0 = converge_truncation(
        builder, lambda es: es.energies[0], tol,
        n_start=n_start, n_step=n_step, n_cap=n_cap, k=1,
    )
    es = eigensolve(builder(n_max), k=1)
    return n_max, e0, es.states[0]


def _scan_row(kind, p, tol, n_start, n_step, n_cap):
    try:
        n_max, e0, ground = _converged_ground(kind, p, tol, n_start, n_step, n_cap)
        flagged = False
    except ConvergenceError:
        n_max = n_cap
        es = eigensolve(build_hamiltonian(kind, p, make_space(n_cap, n_cap)), k=1)
        e0, ground = float(es.energies[0]), es.states[0]
        flagged = True
    op = order_parameters(ground)
    row = (p.g1, p.g2, op.sz, op.n1, op.n2, op.jx, op.chi, e0, n_max)
    return row, n_max, flagged


def _scan_g1_row(args):
    kind, template, g1, g2_grid, tol, n_start, n_step, n_cap = args
    rows, flags = [], []
    warm = n_start
    for g2 in g2_grid:
        p = template.with_couplings(g1, g2)
        row, n_conv, flagged = _scan_row(kind, p, tol, warm, n_step, n_cap)
        rows.append(row)
        flags.append(flagged)
        warm = max(n_start, n_conv - n_step)  # previous point seeds the next
    return rows, flags


def phase_scan(
    model,
    p_template: ModelParams,
    g1_grid,
    g2_grid,
    tol: float = 1e-6,
    n_start: int = 4,
    n_step: int = 2,
    n_cap: int = 48,
    workers: int = 1,
) -> ScanTable:
    """Converged ground-state order parameters over a coupling grid.

    Resonance (omega0 = omega1 = omega2) is required; that is the regime the
    configuration diagrams are defined in.  Truncation is grown per point
    until E0 moves less than tol, warm-starting from the previous point of
    the same g1 row so parallel row workers give identical output.
    Unconverged points are flagged in meta["flagged_rows"], never dropped.
    """
    kind = _as_kind(model)
    if kind not in (ModelKind.H1, ModelKind.H2):
        raise ValueError(f"phase scans cover h1 or h2, got {kind}")
    if not (p_template.resonant and math.isclose(p_template.omega0, p_template.omega1,
                                                 rel_tol=1e-12)):
        raise ResonanceError("phase scans require omega0 = omega1 = omega2")
    g1_grid = [float(g) for g in g1_grid]
    g2_grid = [float(g) for g in g2_grid]

    tasks = [(kind, p_template, g1, g2_grid, tol, n_start, n_step, n_cap)
             for g1 in g1_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_g1_row, tasks))
    else:
        results = [_scan_g1_row(t) for t in tasks]

    table = ScanTable()
    flagged_rows = []
    for i, (rows, flags) in enumerate(results):
        for j, (row, flagged) in enumerate(zip(rows, flags)):
            if flagged:
                flagged_rows.append(i * len(g2_grid) + j)
            table.rows.append(row)
    table.meta = {
        "model": kind.value,
        "params": _params_dict(p_template),
        "g1_grid": g1_grid,
        "g2_grid": g2_grid,
        "tol": tol,
        "flagged_rows": flagged_rows,
    }
    return table


def spectrum_trace(
    model,
    p_template: ModelParams,
    coupling_path,
    k: int = 12,
    labeling: bool = True,
    space: HilbertSpace | None = None,
) -> SpectrumTrace:
    """k lowest levels along a path of (g1, g2) points.

    With labeling on, levels carry (parity, secondary, j) labels derived from
    the applicable conserved sectors at every point (never from energy-order
    continuation, which breaks at crossings).  The sigma_x model is labeled at
    resonant fields; the sigma_x/sigma_y model additionally needs g1 = g2.
    The reported coupling is the magnitude sqrt(g1^2 + g2^2).
    """
    kind = _as_kind(model)
    if space is None:
        space = make_space(40, 8) if kind is ModelKind.H1 else make_space(20, 20)
    trace = SpectrumTrace(meta={
        "model": kind.value,
        "params": _params_dict(p_template),
        "path": [(float(a), float(b)) for a, b in coupling_path],
        "labeling": labeling,
        "n_max1": space.n_max1,
        "n_max2": space.n_max2,
    })
    if not labeling:
        trace.columns = ("coupling", "k", "energy")
    for g1, g2 in coupling_path:
        p = p_template.with_couplings(float(g1), float(g2))
        if not labeling:
            es = eigensolve(build_hamiltonian(kind, p, space), k=k)
            for idx, e in enumerate(es.energies):
                trace.rows.append((p.g, idx, float(e)))
            continue
        if kind is ModelKind.H1:
            rows = labeled_levels_h1(p, space.n_max1, space.n_max2, k)
        elif kind is ModelKind.H2:
            rows = labeled_levels_h2_equal(p, space, k)
        else:
            raise ValueError(f"labeling is defined for h1 or h2, got {kind}")
        for idx, (e, parity, secondary, j) in enumerate(rows):
            trace.rows.append((p.g, idx, e, parity, secondary, j))
    return trace


def evolve(
    h: Operator,
    psi0: QuantumState,
    times,
    reference: str | None = None,
    p: ModelParams | None = None,
) -> EvolutionTrace:
    """Exact evolution by spectral decomposition, psi(t) = sum_k e^{-iE_k t} <k|psi0>|k>.

    When reference names a model ('h1' or 'h2') and p is supplied, each row
    also carries the fidelity against the analytic weak-coupling state after
    undoing the free-evolution phases.  meta records the conservation drifts
    (norm, energy, parity) and the cutoff-leakage maximum; leakage beyond
    LEAK_TOL flags the trace instead of dropping it.
    """
    times = [float(t) for t in times]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    space = h.space
    es_w, es_v = scipy.linalg.eigh(h.data)
    coeff = es_v.conj().T @ psi0.amplitudes

    n1 = number(space, 1).data
    n2 = number(space, 2).data
    sz = pauli(space, "z").data
    parity = conserved_ops(space)["parity"].data
    s_arr, n1_arr, n2_arr = space.level_arrays()
    leak_mask = (n1_arr >= space.n_max1 - 1) | (n2_arr >= space.n_max2 - 1)

    trace = EvolutionTrace(meta={
        "reference": reference,
        "n_max1": space.n_max1,
        "n_max2": space.n_max2,
    })
    if p is not None:
        trace.meta["params"] = _params_dict(p)
    e0 = float(np.vdot(psi0.amplitudes, h.data @ psi0.amplitudes).real)
    pi0 = float(np.vdot(psi0.amplitudes, parity @ psi0.amplitudes).real)
    norm_drift = energy_drift = parity_drift = leak_max = 0.0

    for t in times:
        amps = es_v @ (coeff * np.exp(-1j * es_w * t))
        psi = QuantumState(space, amps)
        norm_drift = max(norm_drift, abs(np.linalg.norm(amps) - 1.0))
        energy_drift = max(energy_drift,
                           abs(np.vdot(amps, h.data @ amps).real - e0) / max(1.0, abs(e0)))
        parity_drift = max(parity_drift,
                           abs(np.vdot(amps, parity @ amps).real - pi0) / max(1.0, abs(pi0)))
        leak_max = max(leak_max, float(np.sum(np.abs(amps[leak_mask]) ** 2)))
        fid = float("nan")
        if reference is not None and p is not None:
            ref = weak_coupling_state(reference, p, space, t)
            rotated = free_rotation(psi, p, t)
            fid = float(abs(np.vdot(ref.amplitudes, rotated.amplitudes)) ** 2)
        trace.rows.append((
            t,
            float(np.vdot(amps, sz @ amps).real),
            float(np.vdot(amps, n1 @ amps).real),
            float(np.vdot(amps, n2 @ amps).real),
            fid,
        ))
    trace.meta.update(
        norm_drift=norm_drift,
        energy_drift=energy_drift,
        parity_drift=parity_drift,
        leak_max=leak_max,
    )
    return trace


def critical_coupling_estimate(
    model,
    p_template: ModelParams,
    direction,
    eps: float = 0.1,
    g_max: float = 1.0,
    step: float = 0.01,
    tol: float = 1e-6,
    n_cap: int = 48,
):
    """Crossover coupling where the ground photon number first exceeds eps.

    The single-qubit transition is a smooth precursor, so this is a threshold
    estimator, not a singularity locator: the total photon number is scanned
    along the ray g*(u1, u2) in steps and the first eps-crossing is located by
    linear interpolation.  Returns (g_star, diagnostics).
    """
    kind = _as_kind(model)
    u = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("direction must be a nonzero vector")
    u = u / norm
    if u[0] < 0 or u[1] < 0:
        raise ValueError("direction must point into the first quadrant")

    gs, n_tots = [], []
    warm = 4
    prev_g, prev_n = 0.0, 0.0
    g_star = None
    for i in range(1, int(round(g_max / step)) + 1):
        g = i * step
        p = p_template.with_couplings(g * u[0], g * u[1])
        n_max, _, ground = _converged_ground(kind, p, tol, warm, 2, n_cap)
        warm = max(4, n_max - 2)
        op = order_parameters(ground)
        n_tot = op.n1 + op.n2
        gs.append(g)
        n_tots.append(n_tot)
        if n_tot >= eps:
            g_star = prev_g + (eps - prev_n) * (g - prev_g) / (n_tot - prev_n)
            break
        prev_g, prev_n = g, n_tot
    if g_star is None:
        raise ValueError(
            f"ground photon number stayed below eps = {eps} up to g = {g_max}"
        )
    diagnostics = {
        "eps": eps,
        "direction": (float(u[0]), float(u[1])),
        "scanned_g": gs,
        "n_tot": n_tots,
        "bracket": (prev_g, gs[-1]),
    }
    return float(g_star), diagnostics
