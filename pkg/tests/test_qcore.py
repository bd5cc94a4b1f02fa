import math

import numpy as np
import pytest

from conftest import random_density, random_state
from fermicool.qcore import (
    BasisMismatchError,
    BasisTag,
    QuantumState,
    eigh,
    evolve_exact,
    evolve_trotter,
    expectation,
    fidelity,
    gibbs_state,
    partial_trace_fridge,
    purity,
    trace_distance,
)


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


class TestEigh:
    def test_sorted_eigenvalues(self):
        spec = eigh(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0])

    def test_dimer_sector_closed_form(self, dimer):
        u, t = 2.0, 1.0
        root = math.sqrt(u * u + 16 * t * t)
        expected = sorted([0.0, u, (u - root) / 2, (u + root) / 2])
        assert np.allclose(dimer["spectrum"].eigenvalues, expected, atol=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_reconstruction(self, seed):
        h = random_hermitian(8, seed)
        spec = eigh(h)
        v = spec.eigenvectors
        assert np.max(np.abs(v @ np.diag(spec.eigenvalues) @ v.conj().T - h)) < 1e-9
        assert np.max(np.abs(v.conj().T @ v - np.eye(8))) < 1e-10

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_degenerate_subspaces_reproducible(self):
        h = np.diag([1.0, 1.0, 2.0])
        a = eigh(h)
        b = eigh(h.copy())
        assert np.array_equal(a.eigenvectors, b.eigenvectors)


class TestEvolution:
    def test_zero_time_is_identity(self):
        psi = random_state(6, 3)
        out = evolve_exact(random_hermitian(6, 4), psi, 0.0)
        assert np.allclose(out, psi, atol=1e-12)

    def test_diagonal_hamiltonian_preserves_populations(self):
        h = np.diag([0.0, 1.0, 2.5])
        psi = random_state(3, 5)
        out = evolve_exact(h, psi, 1.7)
        assert np.allclose(np.abs(out) ** 2, np.abs(psi) ** 2, atol=1e-12)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_norm_and_energy_conserved(self, seed):
        h = random_hermitian(10, seed)
        psi = random_state(10, seed + 10)
        out = evolve_exact(h, psi, 3.3)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-9)
        assert expectation(h, out) == pytest.approx(expectation(h, psi), abs=1e-9)
        rho = random_density(10, seed + 20)
        out_rho = evolve_exact(h, rho, 3.3)
        assert np.trace(out_rho).real == pytest.approx(1.0, abs=1e-9)

    def test_trotter_commuting_parts_exact(self):
        parts = [np.diag([1.0, 2.0, 0.0]), np.diag([0.5, -1.0, 2.0])]
        psi = random_state(3, 0)
        exact = evolve_exact(parts[0] + parts[1], psi, 2.1)
        for n in (1, 3, 7):
            trotter = evolve_trotter(parts, psi, 2.1, n)
            assert np.max(np.abs(trotter - exact)) < 1e-9

    def test_trotter_first_order_convergence(self):
        parts = [random_hermitian(6, 1), random_hermitian(6, 2)]
        psi = random_state(6, 3)
        exact = evolve_exact(parts[0] + parts[1], psi, 1.0)
        errors = []
        grid = [4, 8, 16, 32, 64]
        for n in grid:
            errors.append(np.linalg.norm(evolve_trotter(parts, psi, 1.0, n) - exact))
        slope = np.polyfit(np.log(grid), np.log(errors), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.2)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_trotter_error_bound(self, seed):
        # first-order error stays below dt * t * (sum of part norms)^2
        dims = 16
        parts = [random_hermitian(dims, seed * 3 + k) for k in range(3)]
        psi = random_state(dims, seed + 30)
        t, n = 0.8, 20
        exact = evolve_exact(sum(parts), psi, t)
        approx = evolve_trotter(parts, psi, t, n)
        e_max = sum(np.linalg.norm(p, ord=2) for p in parts)
        bound = (t / n) * t * e_max**2
        assert np.linalg.norm(approx - exact) <= bound

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evolve_exact(np.eye(3), random_state(4, 0), 1.0)


class TestPartialTrace:
    def test_product_state(self):
        rho_s = random_density(4, 1)
        composite = np.kron(rho_s, np.diag([1.0, 0.0]))
        assert np.allclose(partial_trace_fridge(composite), rho_s, atol=1e-12)

    def test_bell_state_gives_mixed(self):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        reduced = partial_trace_fridge(bell)
        assert np.allclose(reduced, np.eye(2) / 2, atol=1e-12)

    def test_trace_preserved(self):
        rho = random_density(12, 3)
        assert np.trace(partial_trace_fridge(rho)).real == pytest.approx(1.0, abs=1e-10)

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            partial_trace_fridge(random_density(5, 0))

    def test_untagged_fridge_rejected(self):
        state = QuantumState(random_density(4, 2), BasisTag(dim=4, with_fridge=False))
        with pytest.raises(BasisMismatchError):
            partial_trace_fridge(state)


class TestFidelity:
    def test_identical_pure(self):
        psi = random_state(5, 0)
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_pure(self):
        assert fidelity(np.array([1, 0, 0]), np.array([0, 1, 0])) == pytest.approx(0.0)

    def test_maximally_mixed_vs_pure(self):
        d = 6
        assert fidelity(np.eye(d) / d, random_state(d, 1)) == pytest.approx(1 / d)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_symmetric(self, seed):
        a = random_density(5, seed)
        b = random_density(5, seed + 7)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)

    def test_mixed_self_fidelity_is_one(self):
        rho = random_density(5, 9)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_tag_mismatch(self):
        a = QuantumState(random_state(4, 0), BasisTag(dim=4))
        b = QuantumState(random_state(4, 1), BasisTag(dim=4, with_fridge=True))
        with pytest.raises(BasisMismatchError):
            fidelity(a, b)

    def test_trace_distance_basic(self):
        a = np.diag([1.0, 0.0]).astype(complex)
        b = np.diag([0.0, 1.0]).astype(complex)
        assert trace_distance(a, b) == pytest.approx(1.0)


class TestGibbs:
    def test_infinite_temperature(self):
        spec = eigh(np.diag([0.0, 1.0, 2.0]))
        assert np.allclose(gibbs_state(spec, 0.0), np.eye(3) / 3)

    def test_zero_temperature_nondegenerate(self, dimer):
        rho = gibbs_state(dimer["spectrum"], np.inf)
        ground = dimer["spectrum"].ground_state()
        assert np.allclose(rho, np.outer(ground, ground.conj()), atol=1e-10)

    def test_zero_temperature_degenerate_is_uniform_projector(self):
        spec = eigh(np.diag([1.0, 1.0, 3.0]))
        rho = gibbs_state(spec, np.inf)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.allclose(rho[:2, :2], np.eye(2) / 2, atol=1e-10)

    def test_two_level_populations(self):
        omega, beta = 1.3, 0.8
        spec = eigh(np.diag([0.0, omega]))
        rho = gibbs_state(spec, beta)
        z = 1 + np.exp(-beta * omega)
        assert rho[0, 0].real == pytest.approx(1 / z, abs=1e-12)
        assert rho[1, 1].real == pytest.approx(np.exp(-beta * omega) / z, abs=1e-12)

    def test_populations_monotone(self, dimer):
        rho = gibbs_state(dimer["spectrum"], 1.7)
        v = dimer["spectrum"].eigenvectors
        pops = np.real(np.diag(v.conj().T @ rho @ v))
        assert np.all(np.diff(pops) <= 1e-12)

    def test_purity_helpers(self):
        assert purity(random_state(4, 0)) == 1.0
        assert purity(np.eye(4) / 4) == pytest.approx(0.25)
