import math

import numpy as np
import pytest

from twomoderabi.hilbert import (
    commutator,
    identity,
    make_space,
    total_photon_projector,
)
from twomoderabi.models import (
    ModelKind,
    ModelParams,
    ResonanceError,
    build_hamiltonian,
    conserved_ops,
    displacement_d,
    equal_coupling_jc_form,
    rotation_u,
    strong_asymmetry_approximation,
)
from twomoderabi.solver import rabi_eigensystem


def maxabs(op):
    return np.max(np.abs(op.data))


def random_params(rng, resonant=False, equal=False):
    omega0 = rng.uniform(0.5, 2.0)
    omega1 = rng.uniform(0.5, 2.0)
    omega2 = omega1 if resonant else rng.uniform(0.5, 2.0)
    g1 = rng.uniform(0.0, 2.0)
    g2 = g1 if equal else rng.uniform(0.0, 2.0)
    return ModelParams(omega0, omega1, omega2, g1, g2)


class TestModelParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(0.0, 1.0, 1.0, 0.1, 0.1)
        with pytest.raises(ValueError):
            ModelParams(1.0, 1.0, 1.0, -0.1, 0.1)

    def test_derived_quantities(self):
        p = ModelParams(1.0, 1.0, 2.0, 3.0, 4.0)
        assert p.g == pytest.approx(5.0)
        assert math.tan(p.xi) == pytest.approx(4.0 / 3.0)
        assert p.omega_eff1 == pytest.approx((1 * 9 + 2 * 16) / 25)
        assert p.omega_eff2 == pytest.approx((1 * 16 + 2 * 9) / 25)
        assert p.mode_coupling == pytest.approx((2 - 1) * 12 / 25)
        assert p.beta1 == pytest.approx(0.6)
        assert p.beta2 == pytest.approx(0.8)

    def test_xi_degenerate_directions(self):
        assert ModelParams(1, 1, 1, 0.0, 0.7).xi == pytest.approx(math.pi / 2)
        assert ModelParams(1, 1, 1, 0.0, 0.0).xi == 0.0

    def test_zero_coupling_effective_frequencies(self):
        p = ModelParams(1.0, 0.7, 1.3, 0.0, 0.0)
        assert p.omega_eff1 == 0.7
        assert p.omega_eff2 == 1.3
        assert p.mode_coupling == 0.0


class TestBuildHamiltonian:
    def test_every_kind_is_hermitian(self):
        rng = np.random.default_rng(3)
        space = make_space(5, 5)
        for kind in ModelKind:
            p = random_params(rng, resonant=kind in (ModelKind.H1RF, ModelKind.H2RF))
            h = build_hamiltonian(kind, p, space)
            assert h.hermitian and h.hermiticity_defect() < 1e-12

    def test_decoupled_spectrum(self):
        p = ModelParams(1.0, 1.0, 1.0, 0.0, 0.0)
        space = make_space(4, 4)
        w = np.linalg.eigvalsh(build_hamiltonian("h1", p, space).data)
        s, n1, n2 = space.level_arrays()
        expected = np.sort(np.where(s == 1, 0.5, -0.5) + n1 + n2)
        np.testing.assert_allclose(w, expected, atol=1e-12)
        assert w[0] == pytest.approx(-0.5)

    def test_h2_reduces_to_h1_without_second_coupling(self):
        p = ModelParams(0.8, 1.0, 1.2, 0.6, 0.0)
        space = make_space(6, 6)
        h1 = build_hamiltonian("h1", p, space)
        h2 = build_hamiltonian("h2", p, space)
        assert maxabs(h1 - h2) < 1e-14

    def test_h1rf_isomorphic_to_rabi_plus_free_mode(self):
        space = make_space(20, 20)
        p = ModelParams(1.0, 1.0, 1.0, 0.3, 0.4)
        full = np.linalg.eigvalsh(build_hamiltonian("h1rf", p, space).data)
        rabi = rabi_eigensystem(1.0, 1.0, 0.5, 20)
        sums = np.sort(np.concatenate(
            [rabi.energies + n_b for n_b in range(21)]))
        np.testing.assert_allclose(full[:30], sums[:30], atol=1e-10)

    def test_rabi_kind_deep_strong(self):
        p = ModelParams(1.0, 1.0, 1.0, 3.0, 0.0)
        space = make_space(40, 1)
        w = np.linalg.eigvalsh(build_hamiltonian("rabi", p, space).data)
        assert abs(w[0] + 9.0) / 9.0 < 0.05  # E0 ~ -g^2/omega
        assert w[1] - w[0] < 1e-3  # quasi-degenerate ground pair

    def test_rf_kinds_reject_detuned_fields(self):
        p = ModelParams(1.0, 1.0, 1.2, 0.3, 0.3)
        for kind in ("h1rf", "h2rf"):
            with pytest.raises(ResonanceError):
                build_hamiltonian(kind, p, make_space(3, 3))

    def test_h1rf_drops_mode_coupling(self):
        p = ModelParams(1.0, 0.9, 0.9, 0.4, 0.7)
        space = make_space(8, 8)
        h1d = build_hamiltonian("h1d", p, space)
        h1rf = build_hamiltonian("h1rf", p, space)
        assert maxabs(h1d - h1rf) < 1e-12


class TestRotation:
    def test_identity_at_zero(self):
        space = make_space(4, 4)
        assert maxabs(rotation_u(space, 0.0) - identity(space)) < 1e-12

    def test_full_turn_invariance(self):
        space = make_space(12, 12)
        proj = total_photon_projector(space, 8)
        p = ModelParams(0.9, 1.0, 1.3, 0.5, 0.8)
        u = rotation_u(space, 2 * math.pi)
        for kind in ("h1", "h2"):
            h = build_hamiltonian(kind, p, space)
            assert maxabs(proj @ (u @ h @ u.dag() - h) @ proj) < 1e-8

    def test_equal_coupling_invariance_at_any_angle(self):
        # holds for g1 = g2 with resonant fields
        space = make_space(12, 12)
        proj = total_photon_projector(space, 8)
        p = ModelParams(0.9, 1.0, 1.0, 0.4, 0.4)
        h = build_hamiltonian("h2", p, space)
        u = rotation_u(space, 0.7)
        assert maxabs(proj @ (u @ h @ u.dag() - h) @ proj) < 1e-8

    def test_unequal_couplings_break_invariance(self):
        space = make_space(10, 10)
        proj = total_photon_projector(space, 6)
        p = ModelParams(0.9, 1.0, 1.0, 0.8, 0.3)
        h = build_hamiltonian("h2", p, space)
        u = rotation_u(space, 0.7)
        assert maxabs(proj @ (u @ h @ u.dag() - h) @ proj) > 1e-2


class TestDisplacement:
    def test_identity_at_zero(self):
        space = make_space(4, 4)
        assert maxabs(displacement_d(space, 0.0) - identity(space)) < 1e-12

    def test_real_orthogonal(self):
        space = make_space(6, 6)
        d = displacement_d(space, 0.6)
        assert np.max(np.abs(d.data.imag)) < 1e-12
        assert maxabs(d @ d.dag() - identity(space)) < 1e-12

    @pytest.mark.parametrize("p", [
        ModelParams(0.9, 1.0, 1.3, 0.5, 0.8),
        ModelParams(1.2, 0.7, 1.1, 1.1, 0.3),
        ModelParams(1.0, 1.0, 1.0, 0.6, 0.6),
    ])
    def test_conjugation_reaches_displaced_forms(self, p):
        space = make_space(16, 16)
        proj = total_photon_projector(space, 12)
        d = displacement_d(space, p.xi)
        for lab, displaced in (("h1", "h1d"), ("h2", "h2d")):
            h = build_hamiltonian(lab, p, space)
            hd = build_hamiltonian(displaced, p, space)
            assert maxabs(proj @ (d @ h @ d.dag() - hd) @ proj) < 1e-6

    def test_negative_angle_swaps_mode_roles(self):
        # tan xi' = -g1/g2 moves the qubit coupling onto mode 2 and swaps the
        # effective frequencies; the hopping term changes sign.
        from twomoderabi.hilbert import annihilation, combine, number, pauli

        p = ModelParams(0.9, 1.0, 1.3, 0.5, 0.8)
        space = make_space(14, 14)
        proj = total_photon_projector(space, 10)
        xi_swap = math.atan2(-p.g1, p.g2)
        d = displacement_d(space, xi_swap)
        transformed = d @ build_hamiltonian("h1", p, space) @ d.dag()
        a1, a2 = annihilation(space, 1), annihilation(space, 2)
        expected = combine([
            (0.5 * p.omega0, pauli(space, "z")),
            (p.omega_eff2, number(space, 1)),
            (p.omega_eff1, number(space, 2)),
            (-p.mode_coupling, a1.dag() @ a2 + a1 @ a2.dag()),
            (p.g, (a2.dag() + a2) @ pauli(space, "x")),
        ])
        assert maxabs(proj @ (transformed - expected) @ proj) < 1e-6


class TestConservedOps:
    def test_parity_diagonal_values(self):
        space = make_space(3, 3)
        ops = conserved_ops(space)
        diag = np.real(np.diag(ops["parity"].data))
        assert diag[space.index(0, 0, 0)] == 1.0   # |g,0,0>
        assert diag[space.index(1, 0, 0)] == -1.0  # |e,0,0>
        assert diag[space.index(0, 1, 1)] == 1.0
        assert set(np.unique(diag)) == {-1.0, 1.0}
        # consistent with exp(-i pi N_total)
        n_tot = np.real(np.diag(ops["n_total"].data))
        np.testing.assert_allclose(diag, np.cos(np.pi * n_tot), atol=1e-12)

    def test_parity_commutes_with_both_models(self):
        rng = np.random.default_rng(5)
        space = make_space(10, 10)
        parity = conserved_ops(space)["parity"]
        for _ in range(5):
            for kind in ("h1", "h2"):
                h = build_hamiltonian(kind, random_params(rng), space)
                assert maxabs(commutator(h, parity)) < 1e-10

    def test_imbalance_conservation_needs_equal_couplings(self):
        space = make_space(8, 8)
        n_script = conserved_ops(space)["n_script"]
        p_eq = ModelParams(1.1, 0.9, 0.9, 0.7, 0.7)
        assert maxabs(commutator(build_hamiltonian("h2rf", p_eq, space), n_script)) < 1e-10
        p_uneq = ModelParams(1.1, 0.9, 0.9, 0.8, 0.4)
        assert maxabs(commutator(build_hamiltonian("h2rf", p_uneq, space), n_script)) > 1e-3

    def test_chi_decomposition(self):
        space = make_space(5, 4)
        ops = conserved_ops(space)
        from twomoderabi.hilbert import number

        recomposed = number(space, 1) + number(space, 2) + 2.0 * ops["jx"]
        assert maxabs(ops["chi"] - recomposed) < 1e-12

    def test_hermitian(self):
        ops = conserved_ops(make_space(4, 4))
        for op in ops.values():
            assert op.hermiticity_defect() < 1e-12


class TestEquivalences:
    def test_equal_coupling_jc_anti_jc_form(self):
        space = make_space(8, 8)
        p = ModelParams(0.9, 1.0, 1.4, 0.55, 0.55)
        assert maxabs(build_hamiltonian("h2d", p, space)
                      - equal_coupling_jc_form(p, space)) < 1e-12

    def test_jc_form_rejects_unequal_couplings(self):
        with pytest.raises(ValueError):
            equal_coupling_jc_form(ModelParams(1, 1, 1, 0.4, 0.5), make_space(3, 3))

    def test_h1_h1d_spectra_converge_together(self):
        p = ModelParams(0.9, 1.0, 1.2, 0.4, 0.3)
        deviations = []
        for n_max in (8, 12, 16):
            space = make_space(n_max, n_max)
            w_lab = np.linalg.eigvalsh(build_hamiltonian("h1", p, space).data)[:10]
            w_disp = np.linalg.eigvalsh(build_hamiltonian("h1d", p, space).data)[:10]
            deviations.append(np.max(np.abs(w_lab - w_disp)))
        assert deviations[2] <= deviations[1] + 1e-12
        assert deviations[1] <= deviations[0] + 1e-12
        assert deviations[2] < 1e-8

    def test_strong_asymmetry_approximation(self):
        # for g1 >= 10 g2 the lowest levels agree within the loose 2*g2 bound
        space = make_space(12, 12)
        p = ModelParams(1.0, 1.0, 1.2, 1.0, 0.1)
        exact = np.linalg.eigvalsh(build_hamiltonian("h2d", p, space).data)[:6]
        approx = np.linalg.eigvalsh(strong_asymmetry_approximation(p, space).data)[:6]
        assert np.max(np.abs(exact - approx)) < 2 * p.g2
