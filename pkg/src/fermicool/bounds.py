"""Closed-form runtime bounds for sweeps, subspace cooling, and spectroscopy,
plus the subspace-size window where the combined routine beats a plain sweep.

All constants implied by the asymptotics are set to 1; treat every output as
an order-of-magnitude estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundInputs:
    """Quantities entering the runtime estimates.

    k_const: squared norm of the Hamiltonian path derivative.
    alpha: system-fridge coupling strength.
    gap: minimal gap along the sweep path.
    gap_c: maximal neighbour gap inside the cooled subspace.
    d_c: cooled subspace dimension.
    avg_step: mean frequency decrement of the spectroscopy scan.
    """

    k_const: float
    alpha: float
    gap: float
    gap_c: float
    d_c: int
    avg_step: float

    def __post_init__(self):
        for name in ("k_const", "alpha", "gap", "gap_c", "avg_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.d_c < 1:
            raise ValueError("d_c must be at least 1")


def t_sweep_bound(inputs: BoundInputs) -> float:
    """Full adiabatic sweep time K / (alpha gap^2)."""
    return inputs.k_const / (inputs.alpha * inputs.gap**2)


def t_sub_bound(inputs: BoundInputs) -> float:
    """Subspace cooling time K gap / (alpha gap_c^3) + d_c (d_c - 1) / alpha."""
    ps = inputs.k_const * inputs.gap / (inputs.alpha * inputs.gap_c**3)
    cool = inputs.d_c * (inputs.d_c - 1) / inputs.alpha
    return ps + cool


def t_spec_bound(inputs: BoundInputs) -> float:
    """Spectroscopy time K gap / (alpha gap_c^3)
    + d_c (d_c - 1)^2 gap_c / (alpha avg_step)."""
    ps = inputs.k_const * inputs.gap / (inputs.alpha * inputs.gap_c**3)
    spec = inputs.d_c * (inputs.d_c - 1) ** 2 * inputs.gap_c / (inputs.alpha * inputs.avg_step)
    return ps + spec


@dataclass(frozen=True)
class SubspaceWindow:
    """Upper bounds on d_c for the combined routine to beat a plain sweep.

    ``exact`` inverts d_c (d_c - 1) <= budget, so membership matches the
    t_sub <= t_sweep comparison identically; ``quadratic`` uses the
    d_c^2 ~ d_c (d_c - 1) simplification, and ``small_gap_limit`` is its
    gap << gap_c limit sqrt(K) / gap.
    """

    budget: float  # (K / gap^2) (1 - gap^3 / gap_c^3)
    exact: float
    quadratic: float
    small_gap_limit: float

    def admits(self, d_c: int) -> bool:
        return d_c * (d_c - 1) <= self.budget


def d_c_window(k_const: float, gap: float, gap_c: float) -> SubspaceWindow:
    """Solve the crossover inequality for the admissible subspace size.

    Requires gap <= gap_c; a larger minimal gap leaves no advantage window
    (budget clamps at zero).
    """
    if k_const <= 0 or gap <= 0 or gap_c <= 0:
        raise ValueError("inputs must be positive")
    if gap > gap_c:
        raise ValueError("gap exceeds gap_c; the window is empty")
    budget = (k_const / gap**2) * (1.0 - gap**3 / gap_c**3)
    budget = max(budget, 0.0)
    exact = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * budget))
    quadratic = float(np.sqrt(budget))
    small_gap_limit = float(np.sqrt(k_const) / gap)
    return SubspaceWindow(budget, float(exact), quadratic, small_gap_limit)
