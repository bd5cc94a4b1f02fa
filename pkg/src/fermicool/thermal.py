"""Thermal-state preparation: probabilistic fridge resets, detailed-balance
coupler sampling, and the subspace thermalization driver.

Setting beta to infinity turns every operation here back into its
ground-state-cooling counterpart.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .cooling import FRIDGE_EXCITED, FRIDGE_GROUND, CoolingParams, cooling_step
from .couplers import Coupler
from .qcore import Spectrum, gibbs_state
from .spectroscopy import ControlParams, ResonanceLedger, ScanTrace, scan
from .sweep import SweepSpec, pseudo_sweep

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThermalParams:
    """Target inverse temperature and step budget for thermalization."""

    beta: float
    n_steps: int = 40
    rng_seed: int = 0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")


def reset_probability_ground(beta: float, omega: float) -> float:
    """p_0 = e^{beta omega / 2} / (e^{beta omega / 2} + e^{-beta omega / 2})."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if np.isinf(beta):
        return 1.0
    return float(1.0 / (1.0 + np.exp(-beta * omega)))


def thermal_fridge(beta: float, omega: float) -> np.ndarray:
    """The expected reset state diag(p_0, p_1); the sampling average."""
    p0 = reset_probability_ground(beta, omega)
    return np.diag([p0, 1.0 - p0]).astype(complex)


def probabilistic_reset(beta: float, omega: float, rng: np.random.Generator) -> np.ndarray:
    """Sample |0><0| with probability p_0, else |1><1|."""
    p0 = reset_probability_ground(beta, omega)
    return FRIDGE_GROUND if rng.random() < p0 else FRIDGE_EXCITED


def therm_step(
    rho_s: np.ndarray,
    coupler: Coupler,
    omega: float,
    beta: float,
    cooling: CoolingParams,
    rng: np.random.Generator | None = None,
    h_s: np.ndarray | None = None,
    expected: bool = False,
) -> np.ndarray:
    """Probabilistic reset followed by one cooling step; returns the traced
    system state.

    ``expected=True`` replaces the sampled reset with the thermal fridge
    state diag(p_0, p_1), which gives the exact average over reset outcomes
    (the channel is linear in the fridge state).
    """
    if expected:
        rho_f = thermal_fridge(beta, omega)
    else:
        if rng is None:
            raise ValueError("sampling mode needs an rng")
        rho_f = probabilistic_reset(beta, omega, rng)
    return cooling_step(rho_s, rho_f, coupler, omega, cooling, h_s=h_s).rho_after


@dataclass(frozen=True)
class CouplerDistribution:
    """Sampling weights over ordered level pairs (source, target).

    The canonical choice v_(j,k) proportional to exp(-beta E_k) satisfies
    detailed balance, making the Gibbs distribution stationary under the
    induced classical rate equations.
    """

    pairs: tuple[tuple[int, int], ...]
    probabilities: np.ndarray
    beta: float
    energies: np.ndarray  # level energies, ground-shifted

    def __post_init__(self):
        if abs(self.probabilities.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    def sample(self, rng: np.random.Generator) -> tuple[int, int]:
        idx = rng.choice(len(self.pairs), p=self.probabilities)
        return self.pairs[idx]


def build_coupler_distribution(
    spectrum: Spectrum,
    beta: float,
    d_c: int,
    pairs: Sequence[tuple[int, int]] | None = None,
) -> CouplerDistribution:
    """Canonical detailed-balance weights over level pairs within the lowest
    ``d_c`` levels: v_(j,k) ~ exp(-beta E_k) / (d_c - 1).

    ``pairs`` restricts the support (e.g. to transitions a coupler family can
    actually drive); weights are renormalized, which preserves pairwise
    detailed balance.
    """
    if d_c < 2:
        raise ValueError("d_c must be at least 2")
    energies = spectrum.eigenvalues[:d_c] - spectrum.eigenvalues[0]
    if pairs is None:
        pairs = [(j, k) for j in range(d_c) for k in range(d_c) if j != k]
    else:
        pairs = [tuple(p) for p in pairs]
        for j, k in pairs:
            if j == k or not (0 <= j < d_c and 0 <= k < d_c):
                raise ValueError(f"invalid pair ({j}, {k})")
    if np.isinf(beta):
        weights = np.array([1.0 if k == 0 else 0.0 for _, k in pairs])
    else:
        weights = np.array([np.exp(-beta * energies[k]) for _, k in pairs])
    total = weights.sum()
    if total == 0.0:
        raise ValueError("no pair has support under this beta")
    return CouplerDistribution(tuple(pairs), weights / total, beta, energies)


def detailed_balance_check(
    dist: CouplerDistribution, tol: float = 1e-10
) -> tuple[bool, float]:
    """Evaluate, for every level j, the net stationary flow
    sum_k v_(k,j) e^{-beta E_k} - (sum_k v_(j,k)) e^{-beta E_j}; balanced
    when the largest residual is below ``tol``."""
    d = len(dist.energies)
    v = np.zeros((d, d))
    for (j, k), p in zip(dist.pairs, dist.probabilities):
        v[j, k] = p
    boltz = np.exp(-dist.beta * dist.energies) if not np.isinf(dist.beta) else (dist.energies == 0).astype(float)
    residuals = np.array(
        [v[:, j] @ boltz - v[j, :].sum() * boltz[j] for j in range(d)]
    )
    worst = float(np.max(np.abs(residuals)))
    return worst < tol, worst


def rate_matrix(dist: CouplerDistribution) -> np.ndarray:
    """Generator L of dP/dt = L P for the classical population flow."""
    d = len(dist.energies)
    v = np.zeros((d, d))
    for (j, k), p in zip(dist.pairs, dist.probabilities):
        v[j, k] = p
    lmat = v.T.copy()  # L[k, j] = v_(j,k): flow j -> k
    lmat[np.diag_indices(d)] -= v.sum(axis=1)
    return lmat


def evolve_rate_equations(
    dist: CouplerDistribution, p0: np.ndarray, t: float
) -> np.ndarray:
    """Propagate classical populations for time t under the rate equations."""
    return scipy.linalg.expm(rate_matrix(dist) * t) @ np.asarray(p0, dtype=float)


def stationary_populations(dist: CouplerDistribution, t: float = 1e6) -> np.ndarray:
    d = len(dist.energies)
    return evolve_rate_equations(dist, np.full(d, 1.0 / d), t)


def stoch_therm_step(
    rho_s: np.ndarray,
    couplers_by_pair: Mapping[frozenset, Coupler],
    ledger: ResonanceLedger,
    dist: CouplerDistribution,
    cooling: CoolingParams,
    rng: np.random.Generator,
    h_s: np.ndarray | None = None,
) -> np.ndarray:
    """One stochastic thermalization step.

    Samples a level pair from the distribution, points the fridge down
    (ground reset) for a lowering pair or up (excited reset) for a heating
    pair, and cools at every ledger frequency of the coupler serving that
    pair.  Pairs without a coupler or ledger entry are skipped with a
    diagnostic.
    """
    source, target = dist.sample(rng)
    key = frozenset((source, target))
    coupler = couplers_by_pair.get(key)
    if coupler is None or coupler.label not in ledger.resonances:
        log.info("sampled pair (%d, %d) has no ledgered coupler; skipped", source, target)
        return rho_s
    rho_f = FRIDGE_GROUND if source > target else FRIDGE_EXCITED
    rho = rho_s
    for omega in ledger.resonances[coupler.label]:
        rho = cooling_step(rho, rho_f, coupler, omega, cooling, h_s=h_s).rho_after
    return rho


def spectroscopy_therm(
    rho_s: np.ndarray,
    h_s: np.ndarray,
    couplers: Sequence[Coupler],
    beta: float,
    control: ControlParams,
    cooling: CoolingParams,
    spectrum: Spectrum,
    rng: np.random.Generator | None = None,
    omega_start: float | None = None,
    expected: bool = True,
) -> tuple[np.ndarray, ResonanceLedger, ScanTrace]:
    """Frequency scan with thermally reset fridge states.

    ``expected=True`` (default) resets to the thermal fridge density matrix,
    the exact average over probabilistic resets, which keeps the resonance
    traces deterministic; ``expected=False`` samples each reset.
    """
    if expected:
        fridge = lambda omega: thermal_fridge(beta, omega)
    else:
        if rng is None:
            raise ValueError("sampling mode needs an rng")
        fridge = lambda omega: probabilistic_reset(beta, omega, rng)
    return scan(
        rho_s,
        h_s,
        couplers,
        control,
        cooling,
        spectrum=spectrum,
        omega_start=omega_start,
        fridge_state=fridge,
    )


def subspace_therm(
    easy_ground: np.ndarray,
    sweep_spec: SweepSpec,
    h_s: np.ndarray,
    couplers: Sequence[Coupler],
    thermal: ThermalParams,
    control: ControlParams,
    cooling: CoolingParams,
    spectrum: Spectrum,
    d_c: int,
    rng: np.random.Generator,
    omega_start: float | None = None,
    therm_cooling: CoolingParams | None = None,
    mode: str = "passes",
    observer=None,
) -> tuple[np.ndarray, ResonanceLedger]:
    """Sweep, scan with thermal resets, re-sweep, then thermalize against the
    collected ledger.

    ``mode="passes"`` (default): each of the n_steps is one pass over every
    ledgered (coupler, frequency) entry, highest frequency first, with the
    fridge reset to its thermal state before each application; a resonant
    application then drives its level pair toward the target temperature
    exactly, so the passes act as a deterministic Gibbs sampler.  At
    beta = infinity the thermal reset is the ground state and the driver
    reduces to the subspace-cooling recool stage.

    ``mode="stochastic"`` samples one level pair per step from the
    detailed-balance distribution (restricted to the pairs free couplers can
    serve, which preserves detailed balance) and points a pure fridge along
    the sampled direction.
    """
    if therm_cooling is None:
        therm_cooling = cooling
    rho = pseudo_sweep(easy_ground, sweep_spec)
    _, ledger, _ = spectroscopy_therm(
        rho, h_s, couplers, thermal.beta, control, cooling, spectrum, rng,
        omega_start=omega_start,
    )
    ledger = ledger.drop_empty()
    rho = pseudo_sweep(easy_ground, sweep_spec)

    if mode == "passes":
        by_label = {c.label: c for c in couplers}
        entries = sorted(
            ((freq, label) for label, freqs in ledger.resonances.items() for freq in freqs),
            key=lambda e: (-e[0], e[1]),
        )
        for step in range(thermal.n_steps):
            for freq, label in entries:
                rho_f = thermal_fridge(thermal.beta, freq)
                rho = cooling_step(rho, rho_f, by_label[label], freq, therm_cooling, h_s=h_s).rho_after
            if observer is not None:
                observer(step, rho)
        return rho, ledger

    if mode != "stochastic":
        raise ValueError(f"unknown thermalization mode {mode!r}")
    by_pair = {}
    for c in couplers:
        if c.pair is not None:
            by_pair[frozenset(c.pair)] = c
    if np.isinf(thermal.beta):
        for coupler in couplers:
            for omega in ledger.resonances.get(coupler.label, []):
                rho = cooling_step(rho, None, coupler, omega, therm_cooling, h_s=h_s).rho_after
        return rho, ledger
    star_pairs = [(j, k) for j in range(d_c) for k in range(d_c) if j != k and 0 in (j, k)]
    dist = build_coupler_distribution(spectrum, thermal.beta, d_c, pairs=star_pairs)
    for step in range(thermal.n_steps):
        rho = stoch_therm_step(rho, by_pair, ledger, dist, therm_cooling, rng, h_s=h_s)
        if observer is not None:
            observer(step, rho)
    return rho, ledger


def gibbs_target(spectrum: Spectrum, beta: float) -> np.ndarray:
    """Sector Gibbs state for the given inverse temperature."""
    return gibbs_state(spectrum, beta)
