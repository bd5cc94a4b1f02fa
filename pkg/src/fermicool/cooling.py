"""Assembly of the coupled system-fridge Hamiltonian and the elementary
cooling step: evolve, measure the fridge, trace it out.

The fridge is a single qubit with Hamiltonian omega * (-Z/2 + 1/2), i.e.
levels 0 and omega, sitting in the last tensor factor of the composite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .couplers import Coupler
from .qcore import eigh, evolve_exact, partial_trace_fridge

FRIDGE_NUMBER = np.diag([0.0, 1.0])  # -Z/2 + 1/2
FRIDGE_RAISE = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|
FRIDGE_GROUND = np.diag([1.0, 0.0]).astype(complex)
FRIDGE_EXCITED = np.diag([0.0, 1.0]).astype(complex)


class ResonanceCollisionError(ValueError):
    """A supposedly off-resonant gap coincides with the fridge frequency."""


@dataclass(frozen=True)
class FridgeSpec:
    """Tunable-gap fridge qubit; ground state |0> at energy 0, |1> at omega."""

    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("fridge gap must be positive")

    def hamiltonian(self) -> np.ndarray:
        return self.omega * FRIDGE_NUMBER


@dataclass(frozen=True)
class CoolingParams:
    """Coupling strength and evolution-time policy for one cooling step.

    The coupling is weakened to alpha = omega / weakening; the step runs for
    half a transfer period (pi / 2 alpha, where an ideal resonant swap
    peaks), a full one (pi / alpha), or an explicit time.
    """

    weakening: float = 100.0
    time_mode: str = "half_pi"
    explicit_time: float | None = None

    def __post_init__(self):
        if self.weakening < 2:
            raise ValueError("weakening factor must be at least 2")
        if self.time_mode not in ("half_pi", "pi", "explicit"):
            raise ValueError(f"unknown time mode {self.time_mode!r}")
        if self.time_mode == "explicit" and self.explicit_time is None:
            raise ValueError("explicit time mode needs explicit_time")

    def alpha(self, omega: float) -> float:
        return omega / self.weakening

    def evolution_time(self, alpha: float) -> float:
        if self.time_mode == "half_pi":
            return np.pi / (2 * alpha)
        if self.time_mode == "pi":
            return np.pi / alpha
        return float(self.explicit_time)


@dataclass(frozen=True)
class StepResult:
    rho_after: np.ndarray  # system density matrix, fridge traced out
    fridge_energy: float  # omega * occupation
    fridge_occupation: float  # <H_F> in [0, 1]


def assemble(h_s: np.ndarray, fridge: FridgeSpec, alpha: float, coupler: Coupler) -> np.ndarray:
    """H_S (x) 1 + 1 (x) omega H_F + alpha (V (x) |1><0| + h.c.)."""
    d = h_s.shape[0]
    v = coupler.system_matrix
    if v.shape != (d, d):
        raise ValueError("coupler does not match the system dimension")
    interaction = np.kron(v, FRIDGE_RAISE)
    h = (
        np.kron(h_s, np.eye(2))
        + np.kron(np.eye(d), fridge.hamiltonian())
        + alpha * (interaction + interaction.conj().T)
    )
    return h


def cooling_step(
    rho_s: np.ndarray,
    rho_f: np.ndarray | None,
    coupler: Coupler,
    omega: float,
    params: CoolingParams,
    h_s: np.ndarray | None = None,
) -> StepResult:
    """One reset-evolve-measure cycle.

    ``rho_s`` may be a sector vector or density matrix; ``rho_f`` defaults to
    the fridge ground state.  ``h_s`` is the system Hamiltonian on the same
    sector (required; keyword for call-site clarity).
    """
    if h_s is None:
        raise ValueError("cooling_step needs the system Hamiltonian h_s")
    if rho_f is None:
        rho_f = FRIDGE_GROUND
    rho_f = np.asarray(rho_f, dtype=complex)
    if rho_f.ndim == 1:
        rho_f = np.outer(rho_f, rho_f.conj())
    alpha = params.alpha(omega)
    t = params.evolution_time(alpha)
    h = assemble(h_s, FridgeSpec(omega), alpha, coupler)

    rho_s = np.asarray(rho_s, dtype=complex)
    if rho_s.ndim == 1 and np.allclose(rho_f, FRIDGE_GROUND):
        # pure fast path
        psi = np.kron(rho_s, np.array([1.0, 0.0], dtype=complex))
        out = evolve_exact(h, psi, t)
        occupation = float(np.sum(np.abs(out[1::2]) ** 2))
        rho_after = partial_trace_fridge(out)
    else:
        if rho_s.ndim == 1:
            rho_s = np.outer(rho_s, rho_s.conj())
        rho = np.kron(rho_s, rho_f)
        out = evolve_exact(h, rho, t)
        d = out.shape[0] // 2
        occupation = float(np.real(np.einsum("ifif->f", out.reshape(d, 2, d, 2))[1]))
        rho_after = partial_trace_fridge(out)
    occupation = float(np.clip(occupation, 0.0, 1.0))
    return StepResult(rho_after, omega * occupation, occupation)


def fridge_energy_trace(
    psi_s: np.ndarray,
    coupler: Coupler,
    omega: float,
    alpha: float,
    t_grid,
    h_s: np.ndarray | None = None,
) -> list[tuple[float, float]]:
    """Fridge occupation <H_F>(t) along a time grid, for a pure system state.

    For an ideal resonant coupler with source overlap q this follows
    q^2/2 * (1 - cos(2 alpha t)).
    """
    if h_s is None:
        raise ValueError("fridge_energy_trace needs the system Hamiltonian h_s")
    psi = np.kron(np.asarray(psi_s, dtype=complex), np.array([1.0, 0.0], dtype=complex))
    h = assemble(h_s, FridgeSpec(omega), alpha, coupler)
    spec = eigh(h, canonicalize=False)
    amps = spec.eigenvectors.conj().T @ psi
    out = []
    for t in np.asarray(t_grid, dtype=float):
        psi_t = spec.eigenvectors @ (np.exp(-1j * spec.eigenvalues * t) * amps)
        occ = float(np.sum(np.abs(psi_t[1::2]) ** 2))
        out.append((float(t), occ))
    return out


def rwa_error_estimate(alpha: float, omega: float, gaps) -> float:
    """max over off-resonant gaps of alpha / |omega - gap|, a diagnostic for
    how strongly the weak-coupling approximation is strained."""
    gaps = np.asarray(list(gaps), dtype=float)
    if len(gaps) == 0:
        return 0.0
    dist = np.abs(omega - gaps)
    if np.any(dist == 0.0):
        raise ResonanceCollisionError("a listed gap coincides with omega exactly")
    return float(np.max(alpha / dist))
