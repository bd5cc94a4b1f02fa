import numpy as np
import pytest

from fermicool.cooling import (
    CoolingParams,
    FridgeSpec,
    ResonanceCollisionError,
    assemble,
    cooling_step,
    fridge_energy_trace,
    rwa_error_estimate,
)
from fermicool.couplers import Coupler, ideal_coupler
from fermicool.qcore import eigh, expectation, fidelity, trace_distance


def two_level_setup(omega=1.0):
    h = np.diag([0.0, omega])
    spec = eigh(h)
    return h, spec, ideal_coupler(spec, 1, 0)


class TestAssemble:
    def test_decoupled_blocks_keep_fridge_cold(self):
        h, spec, coupler = two_level_setup()
        params = CoolingParams(weakening=50)
        res = cooling_step(spec.eigenvectors[:, 1], None, coupler, 1.0, CoolingParams(), h_s=h)
        assembled = assemble(h, FridgeSpec(1.0), 0.0, coupler)
        psi = np.kron(spec.eigenvectors[:, 1], [1.0, 0.0]).astype(complex)
        from fermicool.qcore import evolve_exact

        out = evolve_exact(assembled, psi, 37.0)
        assert np.sum(np.abs(out[1::2]) ** 2) < 1e-12

    def test_resonant_block_eigenvalues(self):
        # spectrum shifted so the ground energy is -omega: the coupled
        # four-level block then has energies {-w, +w, -a, +a}
        omega, alpha = 1.0, 0.01
        h = np.diag([-omega, 0.0])
        spec = eigh(h)
        coupler = ideal_coupler(spec, 1, 0)
        assembled = assemble(h, FridgeSpec(omega), alpha, coupler)
        vals = np.sort(np.linalg.eigvalsh(assembled))
        assert np.allclose(vals, [-omega, -alpha, alpha, omega], atol=1e-12)

    def test_hermitian_for_random_couplers(self):
        rng = np.random.default_rng(0)
        h = np.diag(rng.normal(size=4))
        for seed in range(3):
            g = np.random.default_rng(seed)
            v = g.normal(size=(4, 4)) + 1j * g.normal(size=(4, 4))
            coupler = Coupler("random", v)
            assembled = assemble(h, FridgeSpec(0.7), 0.02, coupler)
            assert np.max(np.abs(assembled - assembled.conj().T)) < 1e-12

    def test_dimension_mismatch(self):
        h = np.diag([0.0, 1.0])
        coupler = Coupler("bad", np.zeros((3, 3)))
        with pytest.raises(ValueError):
            assemble(h, FridgeSpec(1.0), 0.1, coupler)


class TestCoolingStep:
    def test_ground_state_untouched(self, dimer):
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        omega = spec.eigenvalues[1] - spec.eigenvalues[0]
        res = cooling_step(spec.ground_state(), None, coupler, omega, CoolingParams(), h_s=dimer["h"])
        assert res.fridge_occupation < 1e-9
        ground_dm = np.outer(spec.ground_state(), spec.ground_state().conj())
        assert trace_distance(res.rho_after, ground_dm) < 1e-9

    def test_excited_state_fully_transferred(self, dimer):
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        omega = spec.eigenvalues[1] - spec.eigenvalues[0]
        res = cooling_step(
            spec.eigenvectors[:, 1], None, coupler, omega,
            CoolingParams(weakening=100, time_mode="half_pi"), h_s=dimer["h"],
        )
        assert res.fridge_occupation == pytest.approx(1.0, abs=1e-6)
        assert fidelity(spec.ground_state(), res.rho_after) == pytest.approx(1.0, abs=1e-6)
        assert res.fridge_energy == pytest.approx(omega * res.fridge_occupation, abs=1e-10)

    def test_mixed_population_peak(self, dimer):
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        omega = spec.eigenvalues[1] - spec.eigenvalues[0]
        psi = (spec.ground_state() + spec.eigenvectors[:, 1]) / np.sqrt(2)
        res = cooling_step(psi, None, coupler, omega, CoolingParams(time_mode="half_pi"), h_s=dimer["h"])
        assert res.fridge_occupation == pytest.approx(0.5, abs=1e-6)

    def test_energy_bookkeeping(self, dimer):
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        omega = spec.eigenvalues[1] - spec.eigenvalues[0]
        psi = spec.eigenvectors[:, 1]
        before = expectation(dimer["h"], psi)
        res = cooling_step(psi, None, coupler, omega, CoolingParams(time_mode="half_pi"), h_s=dimer["h"])
        after = expectation(dimer["h"], res.rho_after)
        assert before - after == pytest.approx(res.fridge_energy, abs=1e-6)

    def test_sector_support_preserved(self, flagship, flagship_free_couplers):
        spec = flagship["spectrum"]
        psi = spec.eigenvectors[:, 3]
        res = cooling_step(psi, None, flagship_free_couplers[4], 1.0, CoolingParams(), h_s=flagship["h"])
        assert np.trace(res.rho_after).real == pytest.approx(1.0, abs=1e-10)

    def test_monotone_cooling_with_full_ideal_set(self, dimer):
        spec = dimer["spectrum"]
        couplers = [ideal_coupler(spec, j, 0) for j in range(1, spec.dim)]
        rng = np.random.default_rng(5)
        psi = rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
        rho = np.outer(psi, psi.conj())
        rho /= np.trace(rho)
        energy = expectation(dimer["h"], rho)
        params = CoolingParams(time_mode="half_pi")
        for _ in range(3):
            for coupler in couplers:
                res = cooling_step(rho, None, coupler, coupler.free_gap, params, h_s=dimer["h"])
                rho = res.rho_after
                new_energy = expectation(dimer["h"], rho)
                assert new_energy <= energy + 1e-8
                energy = new_energy

    def test_requires_hamiltonian(self, dimer):
        coupler = ideal_coupler(dimer["spectrum"], 1, 0)
        with pytest.raises(ValueError):
            cooling_step(dimer["spectrum"].ground_state(), None, coupler, 1.0, CoolingParams())

    def test_fridge_bound(self, dimer):
        # peak fridge energy under an ideal coupler never exceeds omega * P_j
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        omega = spec.eigenvalues[1] - spec.eigenvalues[0]
        rng = np.random.default_rng(3)
        for seed in range(4):
            g = np.random.default_rng(seed)
            psi = g.normal(size=4) + 1j * g.normal(size=4)
            psi /= np.linalg.norm(psi)
            p_j = abs(np.vdot(spec.eigenvectors[:, 1], psi)) ** 2
            res = cooling_step(psi, None, coupler, omega, CoolingParams(time_mode="half_pi"), h_s=dimer["h"])
            assert res.fridge_energy <= omega * p_j + 1e-6


class TestTransferTrace:
    def test_no_population_no_transfer(self, dimer):
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        omega = spec.eigenvalues[1] - spec.eigenvalues[0]
        alpha = omega / 100
        trace = fridge_energy_trace(
            spec.eigenvectors[:, 2], coupler, omega, alpha,
            np.linspace(0, np.pi / alpha, 20), h_s=dimer["h"],
        )
        assert max(occ for _, occ in trace) < 1e-10

    def test_closed_form(self, dimer):
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        omega = spec.eigenvalues[1] - spec.eigenvalues[0]
        alpha = omega / 100
        grid = np.linspace(0.0, np.pi / alpha, 100)
        trace = fridge_energy_trace(spec.eigenvectors[:, 1], coupler, omega, alpha, grid, h_s=dimer["h"])
        predicted = 0.5 * (1 - np.cos(2 * alpha * grid))
        worst = max(abs(occ - p) for (_, occ), p in zip(trace, predicted))
        assert worst < 1e-8
        # peak at half period, back to zero at the full period
        assert trace[-1][1] == pytest.approx(0.0, abs=1e-8)
        peak = max(occ for _, occ in trace)
        assert peak == pytest.approx(1.0, abs=1e-3)


class TestRwaEstimate:
    def test_vanishing_coupling(self):
        assert rwa_error_estimate(0.0, 1.0, [0.5, 2.0]) == 0.0

    def test_single_gap(self):
        assert rwa_error_estimate(0.01, 1.0, [1.1]) == pytest.approx(0.1)

    def test_collision(self):
        with pytest.raises(ResonanceCollisionError):
            rwa_error_estimate(0.01, 1.0, [1.0])

    def test_flagship_dominant_gaps(self, flagship):
        # with the default weakening the off-resonant admixture stays small
        gaps = flagship["spectrum"].gaps_from_ground()
        dominant = [g for g in np.unique(np.round(gaps, 9)) if g > 0.5]
        omega = dominant[2]
        alpha = omega / 100.0
        others = [g for g in dominant if abs(g - omega) > 1e-9]
        assert rwa_error_estimate(alpha, omega, others) < 0.05
