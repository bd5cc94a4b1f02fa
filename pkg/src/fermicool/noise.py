"""Depolarizing channels between cooling steps and the net-cooling threshold.

Full-space noise mixes toward the identity on the whole qubit register and
therefore leaks weight out of the particle-number sector; sector-scope noise
mixes toward the uniform state on the sector only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseSpec:
    """Depolarization strength per application and its scope."""

    lam: float
    scope: str = "full_space"

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        if self.scope not in ("full_space", "sector"):
            raise ValueError(f"unknown scope {self.scope!r}")


def depolarize(rho: np.ndarray, lam: float) -> np.ndarray:
    """(1 - lambda) rho + lambda * identity / dim on rho's own space."""
    dim = rho.shape[0]
    return (1.0 - lam) * rho + lam * np.eye(dim) / dim


def depolarize_sector_block(block: np.ndarray, lam: float, full_dim: int) -> np.ndarray:
    """Full-space depolarization as seen by one sector block.

    The block keeps (1 - lambda) of itself plus the sector's share
    lambda / full_dim per diagonal entry; the remaining lambda weight leaks
    into other sectors, where no coupler or observable ever reaches it, so
    tracking the (subnormalized) block is exact.
    """
    d = block.shape[0]
    return (1.0 - lam) * block + lam * np.eye(d) / full_dim


def make_noise_channel(spec: NoiseSpec | None, sector_dim: int, full_dim: int):
    """Channel acting on a sector block (possibly subnormalized), or None.

    Sector scope injects weight proportional to the block's trace so the
    channel stays trace preserving on subnormalized blocks.
    """
    if spec is None or spec.lam == 0.0:
        return None
    if spec.scope == "full_space":
        return lambda block: depolarize_sector_block(block, spec.lam, full_dim)

    def sector_channel(block: np.ndarray) -> np.ndarray:
        weight = float(np.real(np.trace(block)))
        return (1.0 - spec.lam) * block + spec.lam * weight * np.eye(sector_dim) / sector_dim

    return sector_channel


def noise_threshold(e_j: float, e_max: float, weakening: float, d_c: int) -> float:
    """Depolarization rate below which cooling the gap ``e_j`` still wins:
    4 e_j^2 / (W^2 d_c^4 e_max^2 pi^2)."""
    if e_j <= 0 or e_max <= 0 or weakening <= 0 or d_c <= 0:
        raise ValueError("inputs must be positive")
    return float(4.0 * e_j**2 / (weakening**2 * d_c**4 * e_max**2 * np.pi**2))
