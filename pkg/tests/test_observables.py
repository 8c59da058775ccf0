import math

import numpy as np
import pytest

from twomoderabi.hilbert import (
    QuantumState,
    annihilation,
    apply,
    basis_state,
    expectation,
    inner,
    make_space,
    number,
)
from twomoderabi.models import ModelParams, ResonanceError, build_hamiltonian, conserved_ops
from twomoderabi.observables import (
    TruncationError,
    coherent_amplitudes,
    coherent_state,
    deep_strong_ansatz,
    fidelity,
    free_rotation,
    order_parameters,
    weak_coupling_state,
)
from twomoderabi.solver import eigensolve


def coherent_product(space, beta1, beta2, qubit=(1.0, 0.0)):
    """|qubit> (x) |beta1> (x) |beta2> built independently of coherent_state."""
    amps = np.kron(
        np.asarray(qubit, dtype=complex),
        np.kron(coherent_amplitudes(space.n_max1, beta1),
                coherent_amplitudes(space.n_max2, beta2)),
    )
    return QuantumState(space, amps / np.linalg.norm(amps))


class TestOrderParameters:
    def test_bare_ground(self):
        space = make_space(3, 3)
        op = order_parameters(basis_state(space, "g", 0, 0))
        assert op.sz == pytest.approx(-1.0)
        assert op.n1 == op.n2 == op.jx == op.chi == pytest.approx(0.0)

    def test_single_photon(self):
        space = make_space(3, 3)
        op = order_parameters(basis_state(space, "g", 1, 0))
        assert (op.n1, op.n2, op.jx) == (pytest.approx(1.0), pytest.approx(0.0),
                                         pytest.approx(0.0))

    def test_coherent_product_values(self):
        space = make_space(25, 25)
        op = order_parameters(coherent_product(space, 1.0, 1.0))
        assert op.n1 == pytest.approx(1.0, abs=1e-6)
        assert op.n2 == pytest.approx(1.0, abs=1e-6)
        assert op.jx == pytest.approx(1.0, abs=1e-6)
        assert op.chi == pytest.approx(4.0, abs=1e-6)

    def test_chi_identity_random_states(self):
        rng = np.random.default_rng(2)
        space = make_space(7, 6)
        for _ in range(10):
            amps = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
            psi = QuantumState(space, amps / np.linalg.norm(amps))
            op = order_parameters(psi)
            assert abs(op.chi - (op.n1 + op.n2 + 2 * op.jx)) < 1e-10

    def test_jx_of_coherent_product_is_re_beta1_beta2(self):
        # brute-force Fock-sum oracle for <(a1^dag a2 + a1 a2^dag)/2>
        space = make_space(18, 18)
        beta1, beta2 = 0.9, 0.6 + 0.4j
        a1 = coherent_amplitudes(space.n_max1, beta1)
        a2 = coherent_amplitudes(space.n_max2, beta2)
        oracle = 0.0
        for m in range(space.n_max1):
            for n in range(1, space.n_max2 + 1):
                oracle += (a1[m + 1].conjugate() * a1[m] * math.sqrt(m + 1)
                           * a2[n - 1].conjugate() * a2[n] * math.sqrt(n))
        oracle = oracle.real  # (z + z*)/2 of the hopping sum
        op = order_parameters(coherent_product(space, beta1, beta2))
        assert op.jx == pytest.approx(oracle, abs=1e-8)
        # the closed form carries a single power of each amplitude, not two
        assert op.jx == pytest.approx((np.conj(beta1) * beta2).real, abs=1e-6)
        assert abs(op.jx - 2 * (np.conj(beta1) * beta2).real) > 0.5


class TestCoherentState:
    def test_zero_amplitude_is_vacuum(self):
        space = make_space(6, 6)
        psi = coherent_state(space, 1, 0.0)
        assert fidelity(psi, basis_state(space, "g", 0, 0)) == pytest.approx(1.0)

    def test_annihilation_eigenstate(self):
        space = make_space(25, 2)
        psi = coherent_state(space, 1, 1.0)
        a = annihilation(space, 1)
        assert expectation(a, psi) == pytest.approx(1.0, abs=1e-6)

    def test_mean_photon_number(self):
        space = make_space(2, 30)
        psi = coherent_state(space, 2, 1.5)
        assert expectation(number(space, 2), psi) == pytest.approx(2.25, abs=1e-6)
        assert expectation(number(space, 1), psi) == pytest.approx(0.0, abs=1e-12)

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            coherent_state(make_space(8, 8), 1, 2.0)  # |beta|^2 = 4 > 8/4

    def test_norm(self):
        psi = coherent_state(make_space(25, 4), 1, 1.2 + 0.5j)
        assert abs(psi.norm() - 1.0) < 1e-10


class TestDeepStrongAnsatz:
    def test_reduces_to_single_mode_case(self):
        p = ModelParams(1.0, 1.0, 1.0, 1.2, 0.0)
        space = make_space(12, 4)
        psi = deep_strong_ansatz(p, space, branch=+1)
        # mode 2 stays in vacuum when g2 = 0
        assert expectation(number(space, 2), psi) == pytest.approx(0.0, abs=1e-12)
        assert expectation(number(space, 1), psi) == pytest.approx(1.44, abs=1e-6)

    def test_order_parameters(self):
        p = ModelParams(1.0, 1.0, 1.0, 1.0, 0.8)
        space = make_space(16, 12)
        op = order_parameters(deep_strong_ansatz(p, space, branch=+1))
        assert op.sz == pytest.approx(0.0, abs=1e-12)
        assert op.n1 == pytest.approx((p.g1 / p.omega1) ** 2, abs=1e-6)
        assert op.n2 == pytest.approx((p.g2 / p.omega2) ** 2, abs=1e-6)

    def test_branches_are_parity_images(self):
        p = ModelParams(1.0, 1.0, 1.0, 0.9, 0.7)
        space = make_space(14, 12)
        parity = conserved_ops(space)["parity"]
        plus = deep_strong_ansatz(p, space, branch=+1)
        minus = deep_strong_ansatz(p, space, branch=-1)
        flipped = apply(parity, plus)
        assert fidelity(flipped, minus) == pytest.approx(1.0, abs=1e-6)

    def test_overlap_with_numerical_ground_state(self):
        # single-mode deep-strong regime at coupling 3
        p = ModelParams(1.0, 1.0, 1.0, 3.0, 0.0)
        space = make_space(60, 2)
        ground = eigensolve(build_hamiltonian("h1", p, space), k=1).states[0]
        plus = deep_strong_ansatz(p, space, +1)
        minus = deep_strong_ansatz(p, space, -1)
        even = plus + minus
        even = even.normalized()
        assert fidelity(even, ground) > 0.95

    def test_invalid_branch(self):
        with pytest.raises(ValueError):
            deep_strong_ansatz(ModelParams(1, 1, 1, 0.1, 0.1), make_space(4, 4), 0)


class TestWeakCouplingState:
    def test_initial_state(self):
        space = make_space(4, 4)
        p = ModelParams(1.0, 1.0, 1.0, 0.1, 0.1)
        psi = weak_coupling_state("h1", p, space, 0.0)
        assert fidelity(psi, basis_state(space, "e", 0, 0)) == pytest.approx(1.0)

    def test_balanced_split_at_transfer_time(self):
        space = make_space(4, 4)
        p = ModelParams(1.0, 1.0, 1.0, 0.1, 0.1)  # xi = pi/4
        t = math.pi / (2 * p.g)
        psi = weak_coupling_state("h1", p, space, t)
        target = (basis_state(space, "g", 1, 0) + basis_state(space, "g", 0, 1)) * (1 / math.sqrt(2))
        assert fidelity(psi, target) == pytest.approx(1.0, abs=1e-12)

    def test_sign_convention_differs_between_models(self):
        space = make_space(4, 4)
        p = ModelParams(1.0, 1.0, 1.0, 0.1, 0.1)
        t = math.pi / (2 * p.g)
        psi1 = weak_coupling_state("h1", p, space, t)
        psi2 = weak_coupling_state("h2", p, space, t)
        amp1 = inner(basis_state(space, "g", 0, 1), psi1)
        amp2 = inner(basis_state(space, "g", 0, 1), psi2)
        assert amp1 == pytest.approx(-amp2)

    def test_split_ratio_exact(self):
        space = make_space(4, 4)
        p = ModelParams(1.0, 1.0, 1.0, math.sqrt(3), 1.0)  # cos^2 : sin^2 = 3 : 1
        t = math.pi / (2 * p.g)
        psi = weak_coupling_state("h1", p, space, t)
        n1 = expectation(number(space, 1), psi).real
        n2 = expectation(number(space, 2), psi).real
        assert n1 / n2 == pytest.approx(3.0, rel=1e-12)

    def test_norm_for_all_times(self):
        space = make_space(3, 3)
        p = ModelParams(1.0, 1.0, 1.0, 0.2, 0.1)
        for t in np.linspace(0, 20, 17):
            assert abs(weak_coupling_state("h2", p, space, t).norm() - 1.0) < 1e-12

    def test_requires_full_resonance(self):
        space = make_space(3, 3)
        with pytest.raises(ResonanceError):
            weak_coupling_state("h1", ModelParams(1.0, 1.0, 1.1, 0.1, 0.1), space, 1.0)
        with pytest.raises(ResonanceError):
            weak_coupling_state("h1", ModelParams(0.9, 1.0, 1.0, 0.1, 0.1), space, 1.0)

    def test_tracks_exact_evolution_at_weak_coupling(self):
        g = 0.01
        p = ModelParams(1.0, 1.0, 1.0, g / math.sqrt(2), g / math.sqrt(2))
        space = make_space(6, 6)
        h = build_hamiltonian("h1", p, space)
        w, v = np.linalg.eigh(h.data)
        psi0 = basis_state(space, "e", 0, 0).amplitudes
        coeff = v.conj().T @ psi0
        for t in np.linspace(0.0, math.pi / g, 25):
            exact = QuantumState(space, v @ (coeff * np.exp(-1j * w * t)))
            rotated = free_rotation(exact, p, t)
            ref = weak_coupling_state("h1", p, space, t)
            assert fidelity(ref, rotated) > 0.999


class TestFidelity:
    def test_self_and_orthogonal(self):
        space = make_space(3, 3)
        a = basis_state(space, "g", 1, 0)
        b = basis_state(space, "e", 0, 2)
        assert fidelity(a, a) == pytest.approx(1.0)
        assert fidelity(a, b) == pytest.approx(0.0)

    def test_phase_invariant(self):
        space = make_space(3, 3)
        a = basis_state(space, "g", 1, 1)
        assert fidelity(a, a * np.exp(0.7j)) == pytest.approx(1.0)
