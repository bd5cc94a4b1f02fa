import numpy as np
import pytest

from fermicool.cooling import CoolingParams
from fermicool.couplers import ideal_coupler
from fermicool.lattice import LatticeSpec, build_hubbard
from fermicool.qcore import eigh, fidelity
from fermicool.spectroscopy import (
    ControlParams,
    ScanAbortError,
    ScanPoint,
    coefficient_spread_bound,
    control_function,
    detect_resonances,
    initial_omega,
    scan,
    smallest_populated_gap,
)


class TestControlFunction:
    def test_monotone_decreasing_in_occupation(self):
        params = ControlParams(x1=1.0)
        grid = np.logspace(-12, 0, 40)
        steps = [control_function(e, params) for e in grid]
        assert all(a >= b for a, b in zip(steps, steps[1:]))

    def test_endpoint_values(self):
        params = ControlParams(x1=1.0, x2=-10.0, x3=0.5)
        cold = control_function(1e-12, params)
        hot = control_function(1.0, params)
        assert cold == pytest.approx(np.exp(-10.0 / 13.5), rel=1e-12)
        assert hot == pytest.approx(np.exp(-10.0 / 1.5), rel=1e-12)
        assert cold > hot

    def test_positive_and_finite_everywhere(self):
        params = ControlParams(x1=0.37)
        for e in np.linspace(0.0, 1.0, 101):
            step = control_function(e, params)
            assert np.isfinite(step)
            assert step > 0

    def test_clamping_handles_zero_and_overshoot(self):
        params = ControlParams(x1=1.0)
        assert control_function(0.0, params) == control_function(1e-12, params)
        assert control_function(1.3, params) == control_function(1.0, params)

    def test_unresolved_x1_rejected(self):
        with pytest.raises(ValueError):
            control_function(0.5, ControlParams())

    def test_resolution(self):
        params = ControlParams().resolved(10.0)
        assert params.x1 == pytest.approx(0.5)
        explicit = ControlParams(x1=0.2).resolved(10.0)
        assert explicit.x1 == pytest.approx(0.2)


class TestInitialOmega:
    def test_direct_value(self):
        spec = eigh(np.diag([0.0, 1.0, 3.0]))
        assert initial_omega(spec, 0.1) == pytest.approx(3.3)

    def test_norm_bound_dominates_exact(self):
        for u in (0.0, 1.0, 3.0):
            h = build_hubbard(LatticeSpec(1, 2, 1.0, u))
            from fermicool.lattice import fock_matrix

            spec = eigh(fock_matrix(h))
            assert coefficient_spread_bound(h) >= spec.spread() - 1e-12

    def test_requires_positive_delta(self):
        with pytest.raises(ValueError):
            initial_omega(1.0, 0.0)

    def test_smallest_populated_gap_skips_degeneracy(self):
        spec = eigh(np.diag([0.0, 0.0, 0.5, 1.0]))
        assert smallest_populated_gap(spec) == pytest.approx(0.5)


def _points(omegas, occupations):
    return [ScanPoint(o, occ, 0.0, 0.0) for o, occ in zip(omegas, occupations)]


class TestDetectResonances:
    def test_all_zero_trace_is_empty(self):
        pts = _points(np.linspace(5, 1, 9), np.zeros(9))
        assert detect_resonances(pts, 0.2) == []

    def test_single_clean_peak(self):
        omegas = np.linspace(5, 1, 9)
        ys = np.array([0.0, 0.1, 0.4, 0.9, 0.4, 0.1, 0.0, 0.0, 0.0])
        peaks = detect_resonances(_points(omegas, ys), 0.2)
        assert len(peaks) == 1
        assert peaks[0] == pytest.approx(omegas[3], abs=0.25)

    def test_plateau_midpoint(self):
        omegas = np.array([5.0, 4.0, 3.0, 2.0, 1.0])
        ys = np.array([0.0, 0.8, 0.8, 0.8, 0.0])
        peaks = detect_resonances(_points(omegas, ys), 0.2)
        assert peaks == [pytest.approx(3.0)]

    def test_threshold_filters_small_bumps(self):
        omegas = np.linspace(10, 1, 10)
        ys = np.array([0, 0.05, 0, 0, 0.9, 0, 0.05, 0, 0, 0.0])
        peaks = detect_resonances(_points(omegas, ys), 0.2)
        assert len(peaks) == 1

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            detect_resonances([], 0.2)


class TestScan:
    def test_ground_state_flat_trace(self, dimer):
        spec = dimer["spectrum"]
        couplers = [ideal_coupler(spec, j, 0) for j in (1, 2, 3)]
        rho, ledger, trace = scan(
            spec.ground_state(), dimer["h"], couplers, ControlParams(), CoolingParams(), spectrum=spec
        )
        assert ledger.drop_empty().resonances == {}
        assert fidelity(spec.ground_state(), rho) == pytest.approx(1.0, abs=1e-6)
        occupations = [p.fridge_occupation for pts in trace.points.values() for p in pts]
        assert max(occupations) < 1e-8

    def test_single_gap_detected_within_one_step(self, dimer):
        spec = dimer["spectrum"]
        coupler = ideal_coupler(spec, 1, 0)
        gap = spec.eigenvalues[1] - spec.eigenvalues[0]
        psi = (spec.ground_state() + spec.eigenvectors[:, 1]) / np.sqrt(2)
        # fast approach so the level is not drained before the peak; the
        # raised threshold drops the coherent side ripples of the response
        control = ControlParams(x1=0.1 * 1.1 * spec.spread(), rel_threshold=0.5)
        rho, ledger, trace = scan(
            psi, dimer["h"], [coupler], control, CoolingParams(weakening=50, time_mode="half_pi"),
            spectrum=spec,
        )
        freqs = ledger.drop_empty().resonances.get(coupler.label, [])
        assert len(freqs) == 1
        omegas = np.array([p.omega for p in trace.points[coupler.label]])
        best = freqs[0]
        idx = int(np.argmin(np.abs(omegas - best)))
        local_step = abs(omegas[max(idx, 1)] - omegas[max(idx, 1) - 1])
        assert abs(best - gap) <= local_step

    def test_omega_strictly_decreasing_and_terminates(self, dimer):
        spec = dimer["spectrum"]
        couplers = [ideal_coupler(spec, 1, 0)]
        _, _, trace = scan(
            spec.eigenvectors[:, 1], dimer["h"], couplers, ControlParams(), CoolingParams(), spectrum=spec
        )
        omegas = [p.omega for p in trace.points[couplers[0].label]]
        assert all(a > b for a, b in zip(omegas, omegas[1:]))
        assert omegas[0] == pytest.approx(1.1 * spec.spread())
        assert omegas[-1] >= smallest_populated_gap(spec) - 1e-9

    def test_determinism(self, dimer):
        spec = dimer["spectrum"]
        couplers = [ideal_coupler(spec, j, 0) for j in (1, 2)]
        psi = (spec.ground_state() + spec.eigenvectors[:, 1]) / np.sqrt(2)
        out1 = scan(psi, dimer["h"], couplers, ControlParams(), CoolingParams(), spectrum=spec)
        out2 = scan(psi, dimer["h"], couplers, ControlParams(), CoolingParams(), spectrum=spec)
        assert np.array_equal(out1[0], out2[0])
        assert out1[1].resonances == out2[1].resonances

    def test_sector_trace_preserved(self, dimer):
        spec = dimer["spectrum"]
        couplers = [ideal_coupler(spec, 1, 0)]
        rho, _, _ = scan(
            spec.eigenvectors[:, 1], dimer["h"], couplers, ControlParams(), CoolingParams(), spectrum=spec
        )
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)

    def test_abort_on_iteration_budget(self, dimer):
        spec = dimer["spectrum"]
        couplers = [ideal_coupler(spec, 1, 0)]
        with pytest.raises(ScanAbortError):
            scan(
                spec.eigenvectors[:, 1], dimer["h"], couplers,
                ControlParams(), CoolingParams(), spectrum=spec, max_iterations=3,
            )

    def test_window_override(self, dimer):
        spec = dimer["spectrum"]
        couplers = [ideal_coupler(spec, 1, 0)]
        _, _, trace = scan(
            spec.eigenvectors[:, 1], dimer["h"], couplers, ControlParams(),
            CoolingParams(), spectrum=spec, omega_start=1.5,
        )
        omegas = [p.omega for p in trace.points[couplers[0].label]]
        assert omegas[0] == pytest.approx(1.5)
