"""Order parameters, reference states, and fidelity.

The reference states cover the three analytically known regimes: truncated
coherent states, the deep-strong-coupling coherent-product ansatz, and the
weak-coupling single-excitation evolution that realizes a two-mode beam
splitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    HilbertSpace,
    QuantumState,
    expectation,
    inner,
    number,
    pauli,
)
from .models import ModelKind, ModelParams, ResonanceError, _as_kind, conserved_ops


class TruncationError(ValueError):
    """A state was requested whose tail would spill over the Fock cutoff."""


@dataclass(frozen=True)
class OrderParameters:
    """Ground-state expectations that distinguish the vacuum, single-mode and
    dual-mode configurations."""

    sz: float
    n1: float
    n2: float
    jx: float
    chi: float


def _real(value: complex) -> float:
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has a non-negligible imaginary part: {value}")
    return value.real


def order_parameters(psi: QuantumState) -> OrderParameters:
    """sz, n1, n2, jx and chi of a normalized state.

    chi equals n1 + n2 + 2*jx as an operator identity, which makes a cheap
    consistency check on any reported row.
    """
    space = psi.space
    ops = conserved_ops(space)
    return OrderParameters(
        sz=_real(expectation(pauli(space, "z"), psi)),
        n1=_real(expectation(number(space, 1), psi)),
        n2=_real(expectation(number(space, 2), psi)),
        jx=_real(expectation(ops["jx"], psi)),
        chi=_real(expectation(ops["chi"], psi)),
    )


def coherent_amplitudes(n_max: int, beta: complex) -> np.ndarray:
    """Normalized truncated coherent-state column sum_n beta^n/sqrt(n!) |n>."""
    n = np.arange(n_max + 1)
    if beta == 0:
        amps = (n == 0).astype(np.complex128)
    else:
        log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n_max + 1)))))
        log_mag = n * math.log(abs(beta)) - 0.5 * log_fact
        amps = np.exp(log_mag) * np.exp(1j * np.angle(complex(beta)) * n)
        amps /= np.linalg.norm(amps)
    return amps


def _check_truncation(n_max: int, beta: complex):
    if abs(beta) ** 2 > n_max / 4:
        raise TruncationError(
            f"|beta|^2 = {abs(beta)**2:.3f} exceeds n_max/4 = {n_max/4:.3f}; "
            f"raise the cutoff to keep the tail below 1e-8"
        )


def coherent_state(space: HilbertSpace, mode: int, beta: complex) -> QuantumState:
    """Truncated coherent state on one mode, vacuum on the other, qubit in |g>."""
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode}")
    n_max = space.n_max1 if mode == 1 else space.n_max2
    _check_truncation(n_max, beta)
    d1, d2 = space.mode_dims
    vac1 = (np.arange(d1) == 0).astype(np.complex128)
    vac2 = (np.arange(d2) == 0).astype(np.complex128)
    m1 = coherent_amplitudes(space.n_max1, beta) if mode == 1 else vac1
    m2 = coherent_amplitudes(space.n_max2, beta) if mode == 2 else vac2
    qubit = np.array([1.0, 0.0], dtype=np.complex128)
    return QuantumState(space, np.kron(qubit, np.kron(m1, m2)))


def deep_strong_ansatz(p: ModelParams, space: HilbertSpace, branch: int = +1) -> QuantumState:
    """Coherent-product ground-state ansatz of the deep-strong regime.

    branch=+1 gives (-|e> + |g>)/sqrt(2) |+a1>|+a2>, branch=-1 the parity
    image (+|e> + |g>)/sqrt(2) |-a1>|-a2>, with coherent amplitudes
    a_j = g_j/omega_j (each mode displaced along the sigma_x = -branch axis).
    """
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    alpha1 = branch * p.g1 / p.omega1
    alpha2 = branch * p.g2 / p.omega2
    _check_truncation(space.n_max1, alpha1)
    _check_truncation(space.n_max2, alpha2)
    field = np.kron(
        coherent_amplitudes(space.n_max1, alpha1),
        coherent_amplitudes(space.n_max2, alpha2),
    )
    qubit = np.array([1.0, -branch], dtype=np.complex128) / math.sqrt(2)  # (|g> -+ |e>)
    return QuantumState(space, np.kron(qubit, field))


def weak_coupling_state(model, p: ModelParams, space: HilbertSpace, t: float) -> QuantumState:
    """Analytic single-excitation evolution from |e,0,0> at resonance.

    cos(gt)|e,0,0> - i sin(gt)|g>[cos(xi)|1,0> +- sin(xi)|0,1>], with the plus
    sign for the sigma_x/sigma_x model and the minus sign for the
    sigma_x/sigma_y model.  Valid for g much smaller than omega; normalized
    for every t by construction.
    """
    kind = _as_kind(model)
    if kind not in (ModelKind.H1, ModelKind.H2):
        raise ValueError(f"weak-coupling evolution applies to h1 or h2, got {kind}")
    if not (p.resonant and math.isclose(p.omega0, p.omega1, rel_tol=1e-12)):
        raise ResonanceError("the analytic evolution requires omega0 = omega1 = omega2")
    sign = +1.0 if kind is ModelKind.H1 else -1.0
    g, xi = p.g, p.xi
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[space.index(1, 0, 0)] = math.cos(g * t)
    amps[space.index(0, 1, 0)] = -1j * math.sin(g * t) * math.cos(xi)
    amps[space.index(0, 0, 1)] = sign * -1j * math.sin(g * t) * math.sin(xi)
    return QuantumState(space, amps)


def fidelity(psi: QuantumState, phi: QuantumState) -> float:
    """|<psi|phi>|^2 between two normalized pure states."""
    return float(min(1.0, abs(inner(psi, phi)) ** 2))


def free_rotation(psi: QuantumState, p: ModelParams, t: float) -> QuantumState:
    """Apply exp(+i(omega0 sz/2 + omega1 n1 + omega2 n2)t).

    The analytic weak-coupling state carries no free-evolution phases, so an
    exactly propagated lab-frame state must be rotated by this diagonal map
    before fidelity comparison; otherwise the fidelity would oscillate at the
    bare frequencies.
    """
    s, n1, n2 = psi.space.level_arrays()
    freq = p.omega0 * (s - 0.5) + p.omega1 * n1 + p.omega2 * n2
    return QuantumState(psi.space, np.exp(1j * freq * t) * psi.amplitudes)
