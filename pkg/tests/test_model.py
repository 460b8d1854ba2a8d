"""Continuous-model operations: fluxes, sources, eigenstructure, energy."""

import numpy as np
import pytest

from hypsgn.model import (HyperbolicSGN, MildBottomSGN, ModelError, PhysParams,
                          StateGradient, make_model)
from oracles import fd_flux_jacobian, noncons_matrix_exact

P = PhysParams(9.81, 20.0)
FULL = HyperbolicSGN(1)
MILD = MildBottomSGN()


def random_states(n, rng, cmin=5.0, cmax=40.0):
    """Valid random 1D states per the documented ranges."""
    h = rng.uniform(0.1, 2.0, n)
    prim = np.stack([h,
                     rng.uniform(-1, 1, n),
                     rng.uniform(-1, 1, n),
                     rng.uniform(-1, 1, n),
                     rng.uniform(-1, 1, n),
                     rng.uniform(-1, 1, n)], axis=-1)
    U = prim * h[:, None]
    U[:, 0] = h
    c = rng.uniform(cmin, cmax, n)
    return U, c


class TestFlux:
    def test_still_water_flux_vanishes(self):
        U = np.array([1.0, 0, 0, 0, 0, 0])
        assert np.all(FULL.flux(U, P, 0) == 0.0)

    def test_unit_momentum(self):
        U = np.array([1.0, 1.0, 0, 0, 0, 0])
        assert FULL.flux(U, P, 0) == pytest.approx([1, 1, 0, 0, 400, 0])

    def test_mild_variant(self):
        U = np.array([2.0, 2.0, 0.0, 4.0])
        assert MILD.flux(U, P, 0) == pytest.approx([2, 6, 0, 804])

    def test_nonpositive_depth_rejected(self):
        with pytest.raises(ModelError):
            FULL.flux(np.array([0.0, 0, 0, 0, 0, 0]), P, 0)
        with pytest.raises(ModelError):
            FULL.flux(np.array([-0.5, 0, 0, 0, 0, 0]), P, 0)


class TestNonconsProduct:
    def test_flat_gradients_vanish(self):
        U = np.array([1.2, 0.4, 0.1, -0.2, 0.3, 0.5])
        out = FULL.noncons_axis(U, np.zeros(6), 0.0, P, 0)
        assert np.all(out == 0.0)

    def test_hydrostatic_and_bottom_terms(self):
        U = np.array([1.0, 0, 0, 0, 0, 0])
        dU = np.zeros(6)
        dU[0] = 0.1
        out = FULL.noncons_axis(U, dU, 0.2, P, 0)
        assert out == pytest.approx([0, 2.943, 0, 0, 0, 0])

    def test_pressure_row(self):
        U = np.array([1.0, 2.0, 0, 0, 0, 0])
        dU = np.zeros(6)
        dU[0] = 0.5
        out = FULL.noncons_axis(U, dU, 0.0, P, 0)
        assert out[4] == pytest.approx(-400.0)

    def test_state_gradient_wrapper(self):
        U = np.array([1.0, 0, 0, 0, 0, 0])
        du = np.zeros((1, 6))
        du[0, 0] = 0.1
        grad = StateGradient(du, np.array([0.2]))
        out = FULL.noncons_product(U, grad, P)
        assert out[1] == pytest.approx(2.943)


class TestSource:
    def test_lake_at_rest(self):
        U = np.array([1.7, 0, 0, 0, 0, 0])
        assert np.all(FULL.source(U, P) == 0.0)

    def test_bottom_pressure_balance(self):
        # pb=1, p=0.5: the sigma source -6 pb + 12 p cancels
        U = np.array([1.0, 0, 0, 0, 0.5, 1.0])
        assert FULL.source(U, P) == pytest.approx([0, 0, 1, 0, 0, 0])

    def test_relaxation_rows(self):
        # sigma = 0.1, w = sigma/2: the pb row cancels, the p row relaxes
        U = np.array([1.0, 0, 0.05, 0.1, 0, 0])
        S = FULL.source(U, P)
        assert S == pytest.approx([0, 0, 0, 0, -40.0, 0], abs=1e-12)

    def test_mild_variant_rows(self):
        U = np.array([1.0, 0, 0.2, 0.6])
        S = MILD.source(U, P)
        assert S == pytest.approx([0, 0, 0.9, -160.0])


class TestEigenstructure:
    def test_still_water_speeds(self):
        U = np.array([1.0, 0, 0, 0, 0, 0])
        lam = FULL.eigenvalues(U, P)
        a = np.sqrt(409.81)
        assert lam == pytest.approx([-a, 0, 0, 0, 0, a])

    def test_shift_by_velocity(self):
        U = np.array([1.0, 2.0, 0, 0, 0, 0])
        lam = FULL.eigenvalues(U, P)
        a = np.sqrt(409.81)
        assert lam == pytest.approx([2 - a, 2, 2, 2, 2, 2 + a])

    def test_pair_symmetry_at_rest(self):
        U = np.array([1.4, 0, 0, 0, 0, 0])
        lam = FULL.eigenvalues(U, P)
        assert lam[0] == pytest.approx(-lam[-1])

    def test_negative_radicand_raises(self):
        U = np.array([1.0, 0, 0, 0, -12.0, 0])
        with pytest.raises(ModelError):
            FULL.eigenvalues(U, PhysParams(9.81, 1.0))

    def test_r1_constant(self):
        U = np.array([0.8, 0.3, -0.2, 0.5, 0.1, 0.4])
        R = FULL.eigenvectors(U, P)
        assert np.all(R[0] == [0, 0, 0, 1, 0, 0])

    def test_r4_example(self):
        U = np.array([1.0, 0, 0, 0, 0, 0])
        R = FULL.eigenvectors(U, P)
        assert R[3] == pytest.approx([1, 0, 0, 0, -9.81, 0])

    def test_residual_against_analytic_matrix(self):
        rng = np.random.default_rng(11)
        U, cs = random_states(200, rng)
        for Ui, ci in zip(U, cs):
            pp = PhysParams(9.81, ci)
            A = FULL.quasilinear_matrix(Ui, pp)
            R = FULL.eigenvectors(Ui, pp)
            lam = FULL.eigenvector_values(Ui, pp)
            res = A @ R.T - R.T * lam[None, :]
            norm = np.linalg.norm(A) * np.max(np.abs(R), axis=1)
            assert np.max(np.abs(res).max(axis=0) / (1e-12 * norm)) < 1.0

    def test_residual_against_fd_jacobian(self):
        # A assembled independently: extended-precision central differences
        # of the flux (step 1e-7) plus the exact B
        rng = np.random.default_rng(5)
        U, cs = random_states(30, rng)
        for Ui, ci in zip(U, cs):
            pp = PhysParams(9.81, ci)
            A = fd_flux_jacobian(Ui, 9.81, ci) + noncons_matrix_exact(Ui, 9.81, ci)
            R = FULL.eigenvectors(Ui, pp)
            lam = FULL.eigenvector_values(Ui, pp)
            res = np.max(np.abs(A @ R.T - R.T * lam[None, :]))
            tol = 1e-10 * (1.0 + np.max(np.abs(A).sum(axis=1)))
            assert res <= tol

    def test_max_signal_speed(self):
        still = np.array([1.0, 0, 0, 0, 0, 0])
        s = FULL.max_signal_speed(still, still, P, 0)
        assert s == pytest.approx(np.sqrt(409.81))
        left = np.array([1.0, 1.0, 0, 0, 0, 0])
        right = np.array([1.0, -3.0, 0, 0, 0, 0])
        assert FULL.max_signal_speed(left, right, P, 0) == pytest.approx(
            3.0 + np.sqrt(409.81))

    def test_max_signal_dominates_eigenvalues(self):
        rng = np.random.default_rng(3)
        U, cs = random_states(100, rng)
        for i in range(0, 100, 2):
            pp = PhysParams(9.81, cs[i])
            s = FULL.max_signal_speed(U[i], U[i + 1], pp, 0)
            lam = np.concatenate([FULL.eigenvalues(U[i], pp),
                                  FULL.eigenvalues(U[i + 1], pp)])
            assert s >= np.max(np.abs(lam)) - 1e-13


class TestEnergy:
    def test_rest_energy(self):
        U = np.array([1.0, 0, 0, 0, 0, 0])
        assert FULL.energy_density(U, 0.0, P) == pytest.approx(4.905)

    def test_energy_proportional_to_depth(self):
        U = np.array([1e-8, 0, 0, 0, 0, 0])
        assert FULL.energy_density(U, 0.0, P) < 1e-7

    def test_energy_c_independent_without_pressure(self):
        U = np.array([1.0, 0.4, 0.2, 0.1, 0, 0])
        e1 = FULL.energy_density(U, 0.1, PhysParams(9.81, 10.0))
        e2 = FULL.energy_density(U, 0.1, PhysParams(9.81, 20.0))
        assert e1 == pytest.approx(e2, abs=0.0)

    def test_pressure_penalty_shrinks_with_c(self):
        rng = np.random.default_rng(9)
        U, _ = random_states(50, rng)
        U[:, 4] = np.maximum(np.abs(U[:, 4]), 0.05)
        U[:, 5] = np.maximum(np.abs(U[:, 5]), 0.05)
        for Ui in U:
            es = [FULL.energy_density(Ui, 0.0, PhysParams(9.81, c))
                  for c in (5.0, 10.0, 20.0, 40.0)]
            assert np.all(np.diff(es) < 0.0)

    def test_energy_flux_values(self):
        U0 = np.array([1.0, 0, 0, 0, 0, 0])
        assert FULL.energy_flux(U0, 0.0, P) == 0.0
        U1 = np.array([1.0, 1.0, 0, 0, 0, 0])
        assert FULL.energy_flux(U1, 0.0, P) == pytest.approx(10.31, abs=1e-12)
        U2 = U1.copy()
        U2[1] = -1.0
        assert FULL.energy_flux(U2, 0.0, P) == pytest.approx(-10.31, abs=1e-12)


class TestConstraints:
    def test_sigma_constraint_satisfied(self):
        # sigma = -h du/dx exactly
        h, dudx = 1.3, 0.4
        U = np.array([h, 0, 0, -h * dudx * h, 0, 0])
        du = np.zeros((1, 6))
        du[0, 1] = h * dudx  # d(hu)/dx with dh/dx = 0
        grad = StateGradient(du, np.zeros(1))
        r_sig, _ = FULL.constraint_residuals(U, grad)
        assert abs(r_sig) < 1e-14

    def test_vertical_velocity_constraint(self):
        # flat bottom, u=0, w = sigma/2
        U = np.array([1.0, 0, 0.05, 0.1, 0, 0])
        grad = StateGradient(np.zeros((1, 6)), np.zeros(1))
        _, r_w = FULL.constraint_residuals(U, grad)
        assert abs(r_w) < 1e-15

    def test_sigma_residual_value(self):
        U = np.array([1.0, 0, 0, -0.1, 0, 0])
        du = np.zeros((1, 6))
        du[0, 1] = 0.2
        grad = StateGradient(du, np.zeros(1))
        r_sig, _ = FULL.constraint_residuals(U, grad)
        assert r_sig == pytest.approx(0.1)


class TestConversions:
    def test_round_trip(self):
        rng = np.random.default_rng(1)
        U, _ = random_states(1000, rng)
        back = FULL.conserved(FULL.primitive(U))
        assert np.max(np.abs(back - U) / (np.abs(U) + 1e-30)) < 1e-14

    def test_mild_round_trip(self):
        U = np.array([[0.5, 0.2, -0.1, 0.3], [1.5, -0.4, 0.2, 0.9]])
        back = MILD.conserved(MILD.primitive(U))
        assert np.allclose(back, U, rtol=1e-14, atol=0.0)


class TestVariantLimit:
    def test_fluxes_match_on_restriction(self):
        U6 = np.array([1.1, 0.5, 0.2, -0.3, 0.4, 0.7])
        U4 = U6[[0, 1, 2, 4]]
        F6 = FULL.flux(U6, P, 0)
        F4 = MILD.flux(U4, P, 0)
        assert F6[[0, 1, 2, 4]] == pytest.approx(F4)

    def test_flat_bottom_mass_momentum_agree(self):
        U6 = np.array([1.1, 0.5, 0.2, -0.3, 0.4, 0.7])
        U4 = U6[[0, 1, 2, 4]]
        dU6 = np.array([0.3, 0.1, 0.0, 0.0, 0.2, 0.1])
        dU4 = dU6[[0, 1, 2, 4]]
        nc6 = FULL.noncons_axis(U6, dU6, 0.0, P, 0)
        nc4 = MILD.noncons_axis(U4, dU4, 0.0, P, 0)
        assert nc6[[0, 1]] == pytest.approx(nc4[[0, 1]])

    def test_steep_bottom_momentum_differs(self):
        # with dzb = 1 the momentum rows see (g h + pb) vs (g h + 1.5 p)
        U6 = np.array([1.1, 0.5, 0.2, -0.3, 0.4, 0.7])
        U4 = U6[[0, 1, 2, 4]]
        nc6 = FULL.noncons_axis(U6, np.zeros(6), 1.0, P, 0)
        nc4 = MILD.noncons_axis(U4, np.zeros(4), 1.0, P, 0)
        assert abs(nc6[1] - nc4[1]) > 1e-3


class TestTwoDimensional:
    M2 = HyperbolicSGN(2)

    def test_flux_tensor_slots(self):
        U = np.array([1.0, 0.5, -0.3, 0.2, 0.1, 0.4, 0.6])
        F1 = self.M2.flux(U, P, 0)
        F2 = self.M2.flux(U, P, 1)
        u, v = 0.5, -0.3
        assert F1 == pytest.approx([0.5, 0.5 * u + 0.4, 0.5 * v, 0.5 * 0.2,
                                    0.5 * 0.1, 0.5 * (0.4 + 400), 0.5 * 0.6])
        assert F2 == pytest.approx([-0.3, -0.3 * u, -0.3 * v + 0.4, -0.3 * 0.2,
                                    -0.3 * 0.1, -0.3 * (0.4 + 400), -0.3 * 0.6])

    def test_source_slots(self):
        U = np.array([1.0, 0, 0, 0.05, 0.1, 0.5, 1.0])
        S = self.M2.source(U, P)
        assert S == pytest.approx([0, 0, 0, 1.0, -6 + 6, -40.0,
                                   -2400 * (0.05 - 0.05)])

    def test_noncons_directions(self):
        U = np.array([1.0, 0.5, -0.3, 0, 0, 0, 0])
        dUx = np.zeros(7)
        dUx[0] = 0.2
        out = self.M2.noncons_axis(U, dUx, 0.0, P, 0)
        assert out[1] == pytest.approx(9.81 * 0.2)
        assert out[5] == pytest.approx(-400 * 0.5 * 0.2)
        out_y = self.M2.noncons_axis(U, dUx, 0.0, P, 1)
        assert out_y[2] == pytest.approx(9.81 * 0.2)
        assert out_y[5] == pytest.approx(-400 * (-0.3) * 0.2)

    def test_rotated_eigenvalues(self):
        U = np.array([1.0, 0.5, -0.3, 0, 0, 0, 0])
        n = np.array([0.6, 0.8])
        lam = self.M2.eigenvalues(U, P, n)
        un = 0.6 * 0.5 + 0.8 * (-0.3)
        a = np.sqrt(9.81 + 400)
        assert lam[0] == pytest.approx(un - a)
        assert lam[-1] == pytest.approx(un + a)
        assert np.allclose(lam[1:-1], un)

    def test_energy_includes_both_velocities(self):
        U = np.array([1.0, 0.3, 0.4, 0, 0, 0, 0])
        E = self.M2.energy_density(U, 0.0, P)
        assert E == pytest.approx(0.5 * (0.09 + 0.16 + 9.81))


def test_make_model_dispatch():
    assert make_model("full", 1).ncomp == 6
    assert make_model("full", 2).ncomp == 7
    assert make_model("mild", 1).ncomp == 4
    with pytest.raises(ValueError):
        make_model("mild", 2)
    with pytest.raises(ValueError):
        make_model("other", 1)
