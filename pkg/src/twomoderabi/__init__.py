"""Exact diagonalization of a qubit coupled to two boson field modes.

The package covers both two-mode extensions of the quantum Rabi model (the
sigma_x/sigma_x and the sigma_x/sigma_y coupled variants), their displaced
forms, symmetry-sector labeled spectra, ground-state configuration scans, and
single-excitation beam-splitter dynamics, all on a truncated Fock space.
"""

__version__ = "0.1.0"

from .hilbert import (
    DEFAULT_MAX_DIM,
    DimensionLimitError,
    HilbertSpace,
    Operator,
    QuantumState,
    SpaceMismatchError,
    adjoint,
    annihilation,
    apply,
    basis_state,
    combine,
    commutator,
    creation,
    expectation,
    identity,
    inner,
    interior_projector,
    make_space,
    multiply,
    number,
    pauli,
    total_photon_projector,
)
from .models import (
    ModelKind,
    ModelParams,
    N_SCRIPT_OFFSET,
    ResonanceError,
    build_hamiltonian,
    conserved_ops,
    displacement_d,
    equal_coupling_jc_form,
    rotation_u,
    strong_asymmetry_approximation,
)
from .solver import (
    ConvergenceError,
    EigenSystem,
    RabiSpectrum,
    SectorBlock,
    SectorLabel,
    converge_truncation,
    eigensolve,
    label_spectrum_h1,
    label_spectrum_h2_equal,
    labeled_levels_h1,
    labeled_levels_h2_equal,
    rabi_eigensystem,
    sector_split,
)
from .observables import (
    OrderParameters,
    TruncationError,
    coherent_amplitudes,
    coherent_state,
    deep_strong_ansatz,
    fidelity,
    free_rotation,
    order_parameters,
    weak_coupling_state,
)
from .experiments import (
    EvolutionTrace,
    LEAK_TOL,
    ScanTable,
    SpectrumTrace,
    critical_coupling_estimate,
    evolve,
    phase_scan,
    spectrum_trace,
)
