"""Digitized field: grids, operators, Hamiltonians, eigensolvers."""

import numpy as np
import pytest

import golden
from seqht import field
from seqht.field import FieldGrid, HamiltonianSpec, MomentumGrid


def half_ulp(value: float) -> float:
    """Half of the least significant printed digit at 4 significant figures."""
    import math

    if value == 0:
        return 5e-5
    exponent = math.floor(math.log10(abs(value)))
    return 0.5 * 10.0 ** (exponent - 3) + 1e-12


class TestGrids:
    def test_field_grid_symmetry(self):
        grid = FieldGrid(5, 4.0)
        vals = grid.values()
        assert vals[0] == -4.0 and vals[-1] == 4.0
        assert np.max(np.abs(vals + vals[::-1])) < 1e-14
        assert grid.delta_phi == pytest.approx(8.0 / 31.0)

    def test_momentum_grid(self):
        mom = MomentumGrid(5, 4.0)
        vals = mom.values()
        assert np.max(np.abs(vals + vals[::-1])) < 1e-12
        # spacing relation delta_pi = 2 pi / (2^n delta_phi)
        grid = FieldGrid(5, 4.0)
        assert mom.delta_pi == pytest.approx(2 * np.pi / (grid.dim * grid.delta_phi))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            HamiltonianSpec(lam=-1.0)
        with pytest.raises(ValueError):
            HamiltonianSpec(nu_cut_phi4=13)
        with pytest.raises(ValueError):
            FieldGrid(0, 4.0)


class TestOperators:
    def test_phi_power_endpoint(self):
        grid = FieldGrid(5, 4.0)
        assert field.phi_power_operator(grid, 2)[0] == pytest.approx(16.0)

    def test_phi_squared_mean(self):
        grid = FieldGrid(5, 4.0)
        mean = np.mean(field.phi_power_operator(grid, 2)) / grid.delta_phi**2
        assert mean == pytest.approx(341.0 / 4.0)

    def test_power_validation(self):
        with pytest.raises(ValueError):
            field.phi_power_operator(FieldGrid(3, 4.0), 0)

    def test_kernel_unitary(self):
        w = field.centered_fourier_kernel(5)
        assert np.max(np.abs(w.conj().T @ w - np.eye(32))) < 1e-12

    def test_pi_squared_eigenvalues_match_momentum_grid(self):
        grid = FieldGrid(5, 4.0)
        eigs = np.sort(np.linalg.eigvalsh(field.pi_squared_operator(grid)))
        expected = np.sort(MomentumGrid(5, 4.0).values() ** 2)
        assert np.max(np.abs(eigs - expected)) < 1e-10

    def test_oscillator_low_spectrum(self):
        # at cutoff 4 only the lowest ~5 levels stay within 1e-2 of n + 1/2
        # (level 7 sits at 7.276); the optimal cutoff holds all 8
        grid = FieldGrid(5, 4.0)
        eigs = np.linalg.eigvalsh(field.build_hamiltonian(grid, HamiltonianSpec(lam=0.0)))
        assert np.max(np.abs(eigs[:5] - (np.arange(5) + 0.5))) < 1e-2
        assert eigs[0] == pytest.approx(0.500, abs=5e-4)
        assert eigs[1] == pytest.approx(1.500, abs=5e-4)
        assert eigs[2] == pytest.approx(2.500, abs=5e-4)
        assert eigs[7] == pytest.approx(7.276, abs=5e-4)
        opt = FieldGrid(5, field.optimal_phi_max(5))
        eigs_opt = np.linalg.eigvalsh(field.build_hamiltonian(opt, HamiltonianSpec(lam=0.0)))
        assert np.max(np.abs(eigs_opt[:8] - (np.arange(8) + 0.5))) < 1e-2


class TestHamiltonian:
    def test_published_ground_energies(self):
        grid = FieldGrid(5, 4.0)
        full = field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0))
        trunc = field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0, nu_cut_phi4=14))
        assert np.linalg.eigvalsh(full)[0] == pytest.approx(0.6735, abs=5e-5)
        assert np.linalg.eigvalsh(trunc)[0] == pytest.approx(0.7003, abs=5e-5)

    def test_lambda_zero_reduces_to_oscillator(self):
        grid = FieldGrid(4, 4.0)
        free = field.build_hamiltonian(grid, HamiltonianSpec(lam=0.0))
        pi2 = 0.5 * field.pi_squared_operator(grid)
        phi2 = 0.5 * np.diag(field.phi_power_operator(grid, 2))
        assert np.max(np.abs(free - pi2 - phi2)) < 1e-14

    def test_hermiticity(self):
        grid = FieldGrid(6, 4.0)
        ham = field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0, nu_cut_phi4=14))
        assert np.max(np.abs(ham - ham.conj().T)) < 1e-12

    def test_reflection_symmetry_preserved(self):
        grid = FieldGrid(5, 4.0)
        ham = field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0, nu_cut_phi4=14))
        reflected = ham[::-1, ::-1]
        assert np.max(np.abs(ham - reflected)) < 1e-12

    def test_truncated_deviation_below_five_percent(self):
        grid = FieldGrid(5, 4.0)
        full = np.linalg.eigvalsh(field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0)))
        trunc = np.linalg.eigvalsh(
            field.build_hamiltonian(grid, HamiltonianSpec(lam=10.0, nu_cut_phi4=14))
        )
        rel = np.abs(trunc[:8] - full[:8]) / full[:8]
        assert np.max(rel) < 0.05

    def test_matrix_free_operator_matches_dense(self):
        grid = FieldGrid(6, 4.0)
        spec = HamiltonianSpec(lam=10.0, nu_cut_phi4=14)
        dense = field.build_hamiltonian(grid, spec)
        op = field.hamiltonian_operator(grid, spec)
        rng = np.random.default_rng(0)
        v = rng.normal(size=64) + 1j * rng.normal(size=64)
        assert np.max(np.abs(op @ v - dense @ v)) < 1e-10


class TestGroundState:
    def test_trivial_two_level(self):
        energy, state = field.ground_state(np.diag([1.0, 2.0]))
        assert energy == pytest.approx(1.0)
        assert np.allclose(state, [1.0, 0.0])

    def test_free_ground_peak(self):
        grid = FieldGrid(5, 4.0)
        state = field.free_ground_state(grid)
        assert np.max(np.abs(state)) == pytest.approx(0.3784, abs=5e-5)
        assert state[0] == pytest.approx(8.155e-5, abs=5e-9)

    def test_target_peak(self):
        grid = FieldGrid(5, 4.0)
        state = field.target_ground_state(grid, 10.0)
        assert np.max(np.abs(state)) == pytest.approx(0.4153, abs=5e-5)

    def test_published_amplitude_columns(self):
        grid = FieldGrid(5, 4.0)
        target10 = field.target_ground_state(grid, 10.0)
        target60 = field.target_ground_state(grid, 60.0)
        free = field.free_ground_state(grid)
        for j, row in enumerate(golden.GROUND_AMPLITUDES):
            assert abs(target10[j]) == pytest.approx(abs(row[1]), abs=5e-4)
            assert abs(target60[j]) == pytest.approx(abs(row[3]), abs=5e-4)
            assert abs(free[j]) == pytest.approx(row[4], rel=2e-3)

    def test_iterative_matches_dense(self):
        grid = FieldGrid(9, 4.0)
        spec = HamiltonianSpec(lam=10.0, nu_cut_phi4=14)
        e_it, v_it = field.ground_state(
            field.hamiltonian_operator(grid, spec), v0=field.free_ground_state(grid)
        )
        dense = field.build_hamiltonian(grid, spec)
        e_dn = np.linalg.eigvalsh(dense)[0]
        assert e_it == pytest.approx(e_dn, abs=1e-9)

    def test_phase_convention(self):
        grid = FieldGrid(4, 4.0)
        state = field.free_ground_state(grid)
        k = np.argmax(np.abs(state))
        assert state[k] > 0


class TestAnalyticStates:
    def test_edge_value(self):
        grid = FieldGrid(5, 4.0)
        state = field.analytic_ho_state(0, grid)
        assert state[0] == pytest.approx(1.280e-4, abs=5e-8)
        assert np.max(state) == pytest.approx(0.3784, abs=5e-5)

    def test_overlap_with_numeric_ground(self):
        grid = FieldGrid(5, 4.0)
        analytic = field.analytic_ho_state(0, grid)
        numeric = field.free_ground_state(grid)
        assert abs(np.vdot(analytic, numeric)) ** 2 > 0.9999

    def test_orthogonality(self):
        grid = FieldGrid(5, 4.0)
        s0 = field.analytic_ho_state(0, grid)
        s1 = field.analytic_ho_state(1, grid)
        assert abs(np.vdot(s0, s1)) < 1e-6


class TestOptimalCutoff:
    def test_values(self):
        assert field.optimal_phi_max(5) == pytest.approx(8.431, abs=1e-3)
        assert field.optimal_phi_max(1) == pytest.approx(2.108, abs=1e-3)

    def test_scaling(self):
        for n in range(1, 8):
            ratio = field.optimal_phi_max(n + 2) / field.optimal_phi_max(n)
            assert ratio == pytest.approx(2.0, rel=1e-12)

    def test_optimal_grid_spectrum(self):
        grid = FieldGrid(5, field.optimal_phi_max(5))
        eigs = np.linalg.eigvalsh(field.build_hamiltonian(grid, HamiltonianSpec(lam=0.0)))
        assert np.max(np.abs(eigs[:10] - (np.arange(10) + 0.5))) < 5e-3


class TestExports:
    def test_state_csv_header(self):
        grid = FieldGrid(2, 4.0)
        text = field.state_to_csv(np.array([1.0, 0, 0, 0]), grid)
        assert text.startswith("# n_qubits=2 phi_max=4.0\n")
        assert "index,real,imag" in text

    def test_hamiltonian_csv(self):
        grid = FieldGrid(2, 4.0)
        ham = field.build_hamiltonian(grid, HamiltonianSpec(lam=0.0))
        text = field.hamiltonian_to_csv(ham, grid)
        assert text.startswith("# n_qubits=2")
        assert len(text.strip().splitlines()) >= 6
