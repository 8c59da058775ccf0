"""Hamiltonians of a qubit coupled to two boson modes, mode-rotation unitaries,
and the conserved operators that organize their spectra.

Model kinds
-----------
RABI   qubit + mode 1 in the standard Rabi form with effective coupling
       g = sqrt(g1^2 + g2^2); mode 2 evolves freely.
H1     both modes couple to sigma_x with strengths g1, g2.
H2     mode 1 couples to sigma_x, mode 2 to i(a2^dag - a2) sigma_y.
H1D    H1 conjugated by the two-mode displacement D(xi), tan xi = g2/g1:
       a Rabi term on mode 1 plus a beam-splitter mode-mode coupling.
H2D    the same conjugation applied to H2 (no Rabi form exists; the qubit
       couples to both modes through sigma_+/sigma_- brackets).
H1RF   H1D at resonant fields (omega1 = omega2): free mode 2 plus a Rabi model.
H2RF   H2D at resonant fields; at g1 = g2 it conserves the excitation
       imbalance n_script and splits into finite blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .hilbert import (
    HilbertSpace,
    Operator,
    annihilation,
    combine,
    number,
    pauli,
)

#: Additive constant used in the excitation-imbalance operator n_script.
#: Shifting it relabels sectors rigidly; commutation is unaffected.
N_SCRIPT_OFFSET = 0.5


class ResonanceError(ValueError):
    """A resonant-fields construction was requested with omega1 != omega2."""


def _isclose(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)


@dataclass(frozen=True)
class ModelParams:
    """Physical frequencies and couplings, all in units of a reference frequency."""

    omega0: float
    omega1: float
    omega2: float
    g1: float
    g2: float

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError("frequencies must be positive")
        if self.g1 < 0 or self.g2 < 0:
            raise ValueError("couplings must be non-negative")

    @property
    def g(self) -> float:
        """Effective qubit-field coupling sqrt(g1^2 + g2^2)."""
        return math.hypot(self.g1, self.g2)

    @property
    def xi(self) -> float:
        """Mode-mixing angle, tan xi = g2/g1 (pi/2 when g1 = 0, 0 when both vanish)."""
        if self.g1 == 0.0 and self.g2 == 0.0:
            return 0.0
        return math.atan2(self.g2, self.g1)

    @property
    def omega_eff1(self) -> float:
        """Effective frequency of the displaced first mode."""
        if self.g == 0.0:
            return self.omega1
        return (self.omega1 * self.g1**2 + self.omega2 * self.g2**2) / self.g**2

    @property
    def omega_eff2(self) -> float:
        """Effective frequency of the displaced second mode."""
        if self.g == 0.0:
            return self.omega2
        return (self.omega1 * self.g2**2 + self.omega2 * self.g1**2) / self.g**2

    @property
    def mode_coupling(self) -> float:
        """Beam-splitter coupling between the displaced modes."""
        if self.g == 0.0:
            return 0.0
        return (self.omega2 - self.omega1) * self.g1 * self.g2 / self.g**2

    @property
    def beta1(self) -> float:
        """First component of the unit coupling direction (g1/g; 0 when g = 0)."""
        return self.g1 / self.g if self.g > 0 else 0.0

    @property
    def beta2(self) -> float:
        return self.g2 / self.g if self.g > 0 else 0.0

    @property
    def resonant(self) -> bool:
        return _isclose(self.omega1, self.omega2)

    def with_couplings(self, g1: float, g2: float) -> "ModelParams":
        return replace(self, g1=g1, g2=g2)


class ModelKind(Enum):
    RABI = "rabi"
    H1 = "h1"
    H2 = "h2"
    H1D = "h1d"
    H2D = "h2d"
    H1RF = "h1rf"
    H2RF = "h2rf"


def _as_kind(kind) -> ModelKind:
    if isinstance(kind, ModelKind):
        return kind
    return ModelKind(str(kind).lower())


def _require_resonance(p: ModelParams, kind: ModelKind):
    if not p.resonant:
        raise ResonanceError(
            f"{kind.value} requires omega1 = omega2, got {p.omega1} and {p.omega2}"
        )


def build_hamiltonian(kind, p: ModelParams, space: HilbertSpace) -> Operator:
    """Assemble the requested model on the given space. Always exactly Hermitian."""
    kind = _as_kind(kind)
    a1 = annihilation(space, 1)
    a2 = annihilation(space, 2)
    n1 = number(space, 1)
    n2 = number(space, 2)
    sz = pauli(space, "z")
    sx = pauli(space, "x")

    if kind is ModelKind.RABI:
        h = combine([
            (0.5 * p.omega0, sz),
            (p.omega1, n1),
            (p.omega2, n2),
            (p.g, (a1.dag() + a1) @ sx),
        ])
    elif kind is ModelKind.H1:
        h = combine([
            (0.5 * p.omega0, sz),
            (p.omega1, n1),
            (p.omega2, n2),
            (p.g1, (a1.dag() + a1) @ sx),
            (p.g2, (a2.dag() + a2) @ sx),
        ])
    elif kind is ModelKind.H2:
        sy = pauli(space, "y")
        h = combine([
            (0.5 * p.omega0, sz),
            (p.omega1, n1),
            (p.omega2, n2),
            (p.g1, (a1.dag() + a1) @ sx),
            (1j * p.g2, (a2.dag() - a2) @ sy),
        ])
    elif kind is ModelKind.H1D:
        h = combine([
            (0.5 * p.omega0, sz),
            (p.omega_eff1, n1),
            (p.omega_eff2, n2),
            (p.mode_coupling, a1.dag() @ a2 + a1 @ a2.dag()),
            (p.g, (a1.dag() + a1) @ sx),
        ])
    elif kind is ModelKind.H2D:
        h = _h2_displaced(p, space, a1, a2, n1, n2, sz)
    elif kind is ModelKind.H1RF:
        _require_resonance(p, kind)
        h = combine([
            (0.5 * p.omega0, sz),
            (p.omega1, n1 + n2),
            (p.g, (a1.dag() + a1) @ sx),
        ])
    elif kind is ModelKind.H2RF:
        _require_resonance(p, kind)
        h = _h2_displaced(p, space, a1, a2, n1, n2, sz)
    else:  # pragma: no cover
        raise ValueError(f"unknown model kind {kind}")

    if not h.hermitian:  # combine() verified this numerically
        raise AssertionError(f"{kind.value} assembly lost hermiticity")
    return h


def _h2_displaced(p, space, a1, a2, n1, n2, sz) -> Operator:
    """Displaced form of the sigma_x/sigma_y model; the sigma_+ bracket is
    g a1^dag + ((g1^2-g2^2)/g) a1 - (2 g1 g2/g) a2, and the sigma_- bracket its
    mirror with daggered mode operators."""
    sp = pauli(space, "+")
    g = p.g
    if g == 0.0:
        diff, cross = 0.0, 0.0
    else:
        diff = (p.g1**2 - p.g2**2) / g
        cross = 2.0 * p.g1 * p.g2 / g
    bracket_plus = combine([(g, a1.dag()), (diff, a1), (-cross, a2)])
    coupling = bracket_plus @ sp
    return combine([
        (0.5 * p.omega0, sz),
        (p.omega_eff1, n1),
        (p.omega_eff2, n2),
        (p.mode_coupling, a1.dag() @ a2 + a1 @ a2.dag()),
        (1.0, coupling),
        (1.0, coupling.dag()),
    ])


def equal_coupling_jc_form(p: ModelParams, space: HilbertSpace) -> Operator:
    """Displaced equal-coupling model written directly as a Jaynes-Cummings term
    on mode 1 plus an anti-Jaynes-Cummings term on mode 2, with mode-mode
    coupling (omega2 - omega1)/2.  Must match build_hamiltonian(H2D) entrywise
    when g1 = g2."""
    if not _isclose(p.g1, p.g2):
        raise ValueError("the JC + anti-JC form exists only for g1 = g2")
    a1 = annihilation(space, 1)
    a2 = annihilation(space, 2)
    sp = pauli(space, "+")
    coupling = (a1.dag() - a2) @ sp
    return combine([
        (0.5 * p.omega0, pauli(space, "z")),
        (0.5 * (p.omega1 + p.omega2), number(space, 1) + number(space, 2)),
        (0.5 * (p.omega2 - p.omega1), a1.dag() @ a2 + a1 @ a2.dag()),
        (math.sqrt(2.0) * p.g1, coupling + coupling.dag()),
    ])


def strong_asymmetry_approximation(p: ModelParams, space: HilbertSpace) -> Operator:
    """Rabi-shaped approximation of the displaced sigma_x/sigma_y model, valid
    for g1 >> 2 g2 (the qubit then couples to mode 1 only, with strength g1)."""
    a1 = annihilation(space, 1)
    a2 = annihilation(space, 2)
    return combine([
        (0.5 * p.omega0, pauli(space, "z")),
        (p.omega_eff1, number(space, 1)),
        (p.omega_eff2, number(space, 2)),
        (p.mode_coupling, a1.dag() @ a2 + a1 @ a2.dag()),
        (p.g1, (a1.dag() + a1) @ pauli(space, "x")),
    ])


def _unitary_from_hermitian(space, h_data: np.ndarray, phase: complex) -> Operator:
    # exp(phase * i * H) by eigendecomposition; exact unitarity at machine precision
    w, v = np.linalg.eigh(h_data)
    u = (v * np.exp(1j * complex(phase).real * w)) @ v.conj().T
    return Operator(space, u)


def rotation_u(space: HilbertSpace, theta: float) -> Operator:
    """exp[i theta (a1^dag a2 + a1 a2^dag - sigma_z/2)], the joint mode-qubit rotation."""
    a1 = annihilation(space, 1)
    a2 = annihilation(space, 2)
    gen = a1.dag() @ a2 + a1 @ a2.dag() - 0.5 * pauli(space, "z")
    return _unitary_from_hermitian(space, gen.data, theta)


def displacement_d(space: HilbertSpace, xi: float) -> Operator:
    """exp[xi (a1^dag a2 - a1 a2^dag)], the two-mode beam-splitter displacement.

    The generator is real antisymmetric, so the result is real orthogonal in
    the Fock basis.
    """
    a1 = annihilation(space, 1)
    a2 = annihilation(space, 2)
    k = a1.dag() @ a2 - a1 @ a2.dag()
    # xi*K = -i*xi*(iK) with iK Hermitian
    w, v = np.linalg.eigh(1j * k.data)
    u = (v * np.exp(-1j * xi * w)) @ v.conj().T
    return Operator(space, u)


def conserved_ops(space: HilbertSpace) -> dict[str, Operator]:
    """The symmetry operators used for sector splits and order parameters.

    parity    diagonal with entries (-1)^(n1 + n2 + s); commutes with every
              model kind.
    n_total   total excitation sigma_z/2 + n1 + n2 + 1/2 (integer spectrum).
    n_script  excitation imbalance -n1 + n2 + sigma_z/2 + N_SCRIPT_OFFSET;
              conserved by the displaced resonant model at g1 = g2.
    jx        two-mode hopping (a1^dag a2 + a1 a2^dag)/2.
    chi       collective photon number (a1^dag + a2^dag)(a1 + a2).
    """
    s, n1, n2 = space.level_arrays()
    parity = Operator(
        space,
        np.diag(np.where((s + n1 + n2) % 2 == 0, 1.0, -1.0).astype(np.complex128)),
        hermitian=True,
    )
    n_total = Operator(
        space, np.diag((s + n1 + n2).astype(np.complex128)), hermitian=True
    )
    n_script = Operator(
        space,
        np.diag((n2 - n1 + s - 0.5 + N_SCRIPT_OFFSET).astype(np.complex128)),
        hermitian=True,
    )
    a1 = annihilation(space, 1)
    a2 = annihilation(space, 2)
    jx = 0.5 * (a1.dag() @ a2 + a1 @ a2.dag())
    jx.hermitian = True
    chi = (a1.dag() + a2.dag()) @ (a1 + a2)
    chi.hermitian = True
    return {
        "parity": parity,
        "n_total": n_total,
        "n_script": n_script,
        "jx": jx,
        "chi": chi,
    }
