"""Controlled downward frequency scan: cool at each fridge gap, let the
measured fridge occupation throttle the step size, and collect the
frequencies where each coupler made the fridge heat up.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cooling import CoolingParams, StepResult, cooling_step
from .couplers import Coupler
from .qcore import Spectrum, eigh, expectation, fidelity


class ScanAbortError(RuntimeError):
    """The scan stopped making progress (step-size underflow)."""


@dataclass(frozen=True)
class ControlParams:
    """Parameters of the dynamic step-size control and scan window.

    The step is x1 * exp(x2 / ((1 - log10(occupation)) + x3)); with x2 < 0 it
    shrinks as the fridge occupation climbs toward 1.  ``x1 = None`` resolves
    to 5% of the initial frequency at scan time.  ``delta`` is the relative
    overshoot of the starting frequency above the largest gap; ``omega_min``
    (when set) overrides the default stop at the smallest populated gap.
    """

    x1: float | None = None
    x2: float = -10.0
    x3: float = 0.5
    delta: float = 0.1
    omega_min: float | None = None
    ef_floor: float = 1e-12
    rel_threshold: float = 0.2

    def __post_init__(self):
        if self.x1 is not None and self.x1 <= 0:
            raise ValueError("x1 must be positive")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not 0 < self.ef_floor < 1:
            raise ValueError("ef_floor must sit strictly between 0 and 1")

    def resolved(self, omega_start: float) -> "ControlParams":
        if self.x1 is not None:
            return self
        return dataclasses.replace(self, x1=0.05 * omega_start)


MIN_STEP = 1e-12
# occupation below this is indistinguishable from numerical noise
SIGNAL_FLOOR = 1e-9


def control_function(fridge_occupation: float, params: ControlParams) -> float:
    """Dynamic frequency decrement; large when the fridge stays cold, small
    as the occupation approaches 1."""
    if params.x1 is None:
        raise ValueError("x1 is unresolved; call params.resolved(omega_start) first")
    occ = min(max(fridge_occupation, params.ef_floor), 1.0)
    step = params.x1 * np.exp(params.x2 / ((1.0 - np.log10(occ)) + params.x3))
    return float(max(step, MIN_STEP))


@dataclass(frozen=True)
class ScanPoint:
    omega: float
    fridge_occupation: float
    fidelity_to_ground: float
    system_energy: float
    # resonance witness: |occupation after - occupation at reset|; equals the
    # occupation itself for ground-state resets
    signal: float | None = None

    @property
    def witness(self) -> float:
        return self.fridge_occupation if self.signal is None else self.signal


@dataclass
class ScanTrace:
    """Per-coupler history of the scan, omegas strictly decreasing."""

    points: dict[str, list[ScanPoint]] = field(default_factory=dict)

    def append(self, label: str, point: ScanPoint):
        self.points.setdefault(label, []).append(point)

    def rows(self):
        """Flat (coupler_id, omega, occupation, infidelity, energy) rows."""
        for label, pts in self.points.items():
            for p in pts:
                yield (label, p.omega, p.fridge_occupation, 1.0 - p.fidelity_to_ground, p.system_energy)


@dataclass
class ResonanceLedger:
    """Map from coupler id to the frequencies at which its trace peaked."""

    resonances: dict[str, list[float]] = field(default_factory=dict)

    def drop_empty(self) -> "ResonanceLedger":
        return ResonanceLedger({k: list(v) for k, v in self.resonances.items() if v})

    def total(self) -> int:
        return sum(len(v) for v in self.resonances.values())


def initial_omega(spread: Spectrum | float, delta: float) -> float:
    """(1 + delta) times the spectral spread (max gap above the ground state).

    Accepts an exact decomposition or a precomputed upper bound on the
    spread, e.g. from :func:`coefficient_spread_bound`.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    value = spread.spread() if isinstance(spread, Spectrum) else float(spread)
    return (1.0 + delta) * value


def coefficient_spread_bound(op) -> float:
    """Upper bound on the spectral spread from the coefficient 1-norm.

    Every ladder product has operator norm at most 1, so the spread is at
    most twice the sum of absolute coefficients.
    """
    return 2.0 * float(sum(abs(t.coefficient) for t in op.terms))


def smallest_populated_gap(spectrum: Spectrum, tol: float = 1e-9) -> float:
    """First nonzero gap above the ground state (skips exact degeneracies)."""
    gaps = spectrum.gaps_from_ground()
    above = gaps[gaps > tol]
    if len(above) == 0:
        raise ValueError("spectrum has no gap above the ground state")
    return float(above[0])


def scan(
    rho_s: np.ndarray,
    h_s: np.ndarray,
    couplers: Sequence[Coupler],
    control: ControlParams,
    cooling: CoolingParams,
    spectrum: Spectrum | None = None,
    omega_start: float | None = None,
    fridge_state: Callable[[float], np.ndarray] | None = None,
    noise_channel: Callable[[np.ndarray], np.ndarray] | None = None,
    max_iterations: int = 200_000,
) -> tuple[np.ndarray, ResonanceLedger, ScanTrace]:
    """Shared downward frequency sweep over all couplers.

    At each frequency every coupler runs one cooling step (sequentially, on
    the evolving state); the largest fridge occupation seen at that frequency
    feeds the control function, which sets the next decrement.  Peaks in the
    per-coupler occupation traces become the resonance ledger.

    ``omega_start`` overrides the default spectral-spread starting frequency
    (e.g. to restrict the scan to a low-energy window).  ``fridge_state``
    maps the current frequency to a fridge state for resets (defaults to the
    ground state); ``noise_channel`` is applied to the system state after
    every cooling step.
    """
    if spectrum is None:
        spectrum = eigh(h_s)
    omega = initial_omega(spectrum, control.delta) if omega_start is None else omega_start
    control = control.resolved(omega)
    omega_min = control.omega_min
    if omega_min is None:
        omega_min = smallest_populated_gap(spectrum)
    ground = spectrum.ground_state()

    rho = np.asarray(rho_s, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    trace = ScanTrace()
    iterations = 0
    while omega >= omega_min:
        iterations += 1
        if iterations > max_iterations:
            raise ScanAbortError(
                f"scan exceeded {max_iterations} frequency steps; "
                f"step size underflow near omega = {omega:.6g}"
            )
        rho_f = None if fridge_state is None else fridge_state(omega)
        occ_reset = 0.0
        if rho_f is not None:
            rf = np.asarray(rho_f)
            occ_reset = float(np.real(rf[1, 1])) if rf.ndim == 2 else float(np.abs(rf[1]) ** 2)
        best_signal = 0.0
        for coupler in couplers:
            result: StepResult = cooling_step(rho, rho_f, coupler, omega, cooling, h_s=h_s)
            rho = result.rho_after
            if noise_channel is not None:
                rho = noise_channel(rho)
            signal = abs(result.fridge_occupation - occ_reset)
            point = ScanPoint(
                omega=omega,
                fridge_occupation=result.fridge_occupation,
                fidelity_to_ground=fidelity(ground, rho),
                system_energy=expectation(h_s, rho),
                signal=signal,
            )
            trace.append(coupler.label, point)
            best_signal = max(best_signal, signal)
        omega = omega - control_function(best_signal, control)
    ledger = ResonanceLedger(ledger_from_trace(trace, control.rel_threshold))
    return rho, ledger, trace


def _refine_peak(omegas: np.ndarray, ys: np.ndarray, i: int) -> float:
    """Sub-grid peak position from a parabola through the three samples
    around the maximum; the shift is clamped to the neighbouring interval."""
    if i == 0 or i == len(ys) - 1:
        return float(omegas[i])
    x0, x1, x2 = omegas[i - 1], omegas[i], omegas[i + 1]
    y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    if denom == 0:
        return float(x1)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a >= 0:
        return float(x1)
    vertex = -b / (2 * a)
    lo, hi = min(x0, x2), max(x0, x2)
    return float(min(max(vertex, lo), hi))


def _series_peaks(omegas: np.ndarray, ys: np.ndarray, floor: float) -> list[float]:
    """Local maxima of one series at or above ``floor``; plateaus collapse to
    their midpoint frequency, isolated maxima are parabola-refined."""
    peaks = []
    i, n = 0, len(ys)
    while i < n:
        j = i
        while j + 1 < n and ys[j + 1] == ys[i]:
            j += 1
        left_ok = i == 0 or ys[i - 1] < ys[i]
        right_ok = j == n - 1 or ys[j + 1] < ys[i]
        if left_ok and right_ok and ys[i] >= floor and ys[i] > 0.0:
            if j == i:
                peaks.append(_refine_peak(omegas, ys, i))
            else:
                peaks.append(float(0.5 * (omegas[i] + omegas[j])))
        i = j + 1
    return peaks


def _trace_maximum(trace: ScanTrace) -> float:
    return max(
        (p.witness for pts in trace.points.values() for p in pts),
        default=0.0,
    )


def ledger_from_trace(trace: ScanTrace, rel_threshold: float) -> dict[str, list[float]]:
    """Per-coupler resonance frequencies.

    The detection floor is rel_threshold times the occupation maximum over
    the whole trace, so couplers that never heated the fridge contribute
    nothing instead of spurious wiggle maxima.  A trace whose maximum sits at
    numerical-noise level has no resonances at all.
    """
    top = _trace_maximum(trace)
    if top <= SIGNAL_FLOOR:
        return {label: [] for label in trace.points}
    out = {}
    for label, pts in trace.points.items():
        ys = np.array([p.witness for p in pts])
        omegas = np.array([p.omega for p in pts])
        out[label] = _series_peaks(omegas, ys, rel_threshold * top)
    return out


def detect_resonances(
    trace: ScanTrace | Sequence[ScanPoint], rel_threshold: float
) -> list[float]:
    """Frequencies of occupation maxima above rel_threshold times the trace
    maximum, merged over couplers and sorted descending (scan order)."""
    if isinstance(trace, ScanTrace):
        per_coupler = ledger_from_trace(trace, rel_threshold)
        return sorted((f for v in per_coupler.values() for f in v), reverse=True)
    points = list(trace)
    if len(points) == 0:
        raise ValueError("empty trace")
    ys = np.array([p.witness for p in points])
    omegas = np.array([p.omega for p in points])
    if ys.max() <= SIGNAL_FLOOR:
        return []
    return _series_peaks(omegas, ys, rel_threshold * ys.max())
