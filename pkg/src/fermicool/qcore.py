"""States, spectra, exact and Trotterized evolution, fidelities, Gibbs states.

States are plain complex arrays: 1-D for pure vectors, 2-D for density
matrices.  A :class:`QuantumState` wrapper adds an optional basis tag
(sector, fridge factor) which is checked where it matters; bare arrays are
accepted everywhere and skip the tag checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import SectorSpec

HERMITICITY_TOL = 1e-10
DEGENERACY_TOL = 1e-10


class BasisMismatchError(ValueError):
    """Two states carry incompatible basis tags."""


@dataclass(frozen=True)
class BasisTag:
    dim: int
    sector: SectorSpec | None = None
    with_fridge: bool = False


@dataclass(frozen=True)
class QuantumState:
    """Pure vector or density matrix with an optional basis tag."""

    data: np.ndarray
    tag: BasisTag | None = None

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def check(self, tol: float = 1e-10):
        """Validate normalization (and, for densities, Hermiticity and positivity)."""
        if self.is_pure:
            if abs(np.linalg.norm(self.data) - 1.0) > tol:
                raise ValueError("pure state is not normalized")
        else:
            if abs(np.trace(self.data).real - 1.0) > tol:
                raise ValueError("density matrix trace differs from 1")
            if np.max(np.abs(self.data - self.data.conj().T)) > tol:
                raise ValueError("density matrix is not Hermitian")
            if np.min(np.linalg.eigvalsh(self.data)) < -tol:
                raise ValueError("density matrix has a negative eigenvalue")
        return self


def _unwrap(state) -> tuple[np.ndarray, BasisTag | None]:
    if isinstance(state, QuantumState):
        return state.data, state.tag
    return np.asarray(state, dtype=complex), None


def as_density(state) -> np.ndarray:
    data, _ = _unwrap(state)
    if data.ndim == 1:
        return np.outer(data, data.conj())
    return data


@dataclass(frozen=True)
class Spectrum:
    """Full spectral decomposition, eigenvalues ascending, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    tag: BasisTag | None = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def ground_state(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    def gaps_from_ground(self) -> np.ndarray:
        return self.eigenvalues - self.eigenvalues[0]

    def spread(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


def _canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real positive."""
    mags = np.abs(vec)
    pivot = int(np.argmax(mags > mags.max() - 1e-12))
    if mags[pivot] == 0:
        return vec
    return vec * (np.conj(vec[pivot]) / mags[pivot])


def _canonicalize_degenerate(vals: np.ndarray, vecs: np.ndarray, tol: float) -> np.ndarray:
    """Re-orthonormalize each degenerate cluster deterministically.

    Within a cluster, projected standard basis vectors are Gram-Schmidt
    orthonormalized in order of descending projected norm (lowest index wins
    ties), which removes the arbitrariness of the LAPACK output.
    """
    out = vecs.copy()
    n = len(vals)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= tol:
            stop += 1
        k = stop - start
        if k == 1:
            out[:, start] = _canonical_phase(out[:, start])
        else:
            block = out[:, start:stop]
            proj = block @ block.conj().T
            chosen: list[np.ndarray] = []
            residual = proj.copy()
            for _ in range(k):
                norms = np.linalg.norm(residual, axis=0)
                pivot = int(np.argmax(norms > norms.max() - 1e-12))
                v = residual[:, pivot]
                v = v / np.linalg.norm(v)
                chosen.append(_canonical_phase(v))
                residual = residual - np.outer(v, v.conj() @ residual)
            out[:, start:stop] = np.column_stack(chosen)
        start = stop
    return out


def eigh(
    h: np.ndarray,
    tag: BasisTag | None = None,
    degeneracy_tol: float = DEGENERACY_TOL,
    canonicalize: bool = True,
) -> Spectrum:
    """Spectral decomposition of a Hermitian matrix with deterministic
    handling of degenerate subspaces, so reruns are bit-stable.

    ``canonicalize=False`` skips the degenerate-subspace normalization; use
    it when only basis-independent quantities (e.g. exp(-iHt)) are derived.
    """
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > HERMITICITY_TOL * max(1.0, np.abs(h).max()):
        raise ValueError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(h)
    if canonicalize:
        scale = max(1.0, float(np.abs(vals).max()))
        vecs = _canonicalize_degenerate(vals, vecs, degeneracy_tol * scale)
    return Spectrum(vals, vecs, tag)


def evolve_exact(h, state, t: float):
    """Apply exp(-i h t) through the eigendecomposition of ``h``.

    ``h`` may be a Hermitian matrix or a precomputed :class:`Spectrum`.
    Vectors map to vectors, density matrices to density matrices.
    """
    spec = h if isinstance(h, Spectrum) else eigh(h, canonicalize=False)
    data, tag = _unwrap(state)
    if data.shape[0] != spec.dim:
        raise ValueError("dimension mismatch between Hamiltonian and state")
    phases = np.exp(-1j * spec.eigenvalues * t)
    v = spec.eigenvectors
    if data.ndim == 1:
        out = v @ (phases * (v.conj().T @ data))
    else:
        u = v * phases  # v @ diag(phases)
        out = u @ (v.conj().T @ data @ v) @ u.conj().T
    if isinstance(state, QuantumState):
        return QuantumState(out, tag)
    return out


def evolve_trotter(parts, state, t: float, n_steps: int):
    """First-order product formula: ((prod_k exp(-i parts[k] t/n)))^n applied
    to the state, factors multiplied in list order."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    data, tag = _unwrap(state)
    dt = t / n_steps
    step = np.eye(data.shape[0], dtype=complex)
    for part in parts:
        spec = eigh(part, canonicalize=False)
        u = (spec.eigenvectors * np.exp(-1j * spec.eigenvalues * dt)) @ spec.eigenvectors.conj().T
        step = step @ u
    total = np.linalg.matrix_power(step, n_steps)
    out = total @ data if data.ndim == 1 else total @ data @ total.conj().T
    if isinstance(state, QuantumState):
        return QuantumState(out, tag)
    return out


def partial_trace_fridge(rho) -> np.ndarray:
    """Trace out a single fridge qubit sitting in the last tensor factor."""
    data, tag = _unwrap(rho)
    if tag is not None and not tag.with_fridge:
        raise BasisMismatchError("state is not tagged with a fridge factor")
    if data.ndim == 1:
        data = np.outer(data, data.conj())
    dim = data.shape[0]
    if dim % 2 != 0:
        raise ValueError("dimension is not divisible by the fridge dimension")
    d = dim // 2
    return np.einsum("ifjf->ij", data.reshape(d, 2, d, 2))


def fridge_reduced(rho) -> np.ndarray:
    """The 2x2 reduced state of the fridge (last tensor factor)."""
    data, _ = _unwrap(rho)
    if data.ndim == 1:
        data = np.outer(data, data.conj())
    d = data.shape[0] // 2
    return np.einsum("ifig->fg", data.reshape(d, 2, d, 2))


def _sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(a, b) -> float:
    """Uhlmann fidelity; reduces to |<a|b>|^2 for pure inputs.

    Raises :class:`BasisMismatchError` when both states carry tags and the
    tags differ.
    """
    da, ta = _unwrap(a)
    db, tb = _unwrap(b)
    if ta is not None and tb is not None and ta != tb:
        raise BasisMismatchError(f"basis tags differ: {ta} vs {tb}")
    if da.shape[0] != db.shape[0]:
        raise BasisMismatchError("state dimensions differ")
    if da.ndim == 1 and db.ndim == 1:
        return float(np.abs(np.vdot(da, db)) ** 2)
    if da.ndim == 1:
        return float(np.real(da.conj() @ db @ da))
    if db.ndim == 1:
        return float(np.real(db.conj() @ da @ db))
    sq = _sqrtm_psd(da)
    inner = sq @ db @ sq
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(vals)) ** 2)


def trace_distance(a, b) -> float:
    diff = as_density(a) - as_density(b)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def expectation(op: np.ndarray, state) -> float:
    data, _ = _unwrap(state)
    if data.ndim == 1:
        return float(np.real(data.conj() @ op @ data))
    return float(np.real(np.trace(op @ data)))


def gibbs_state(spec: Spectrum, beta: float, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """exp(-beta H)/Z over the decomposed space.

    ``beta = inf`` returns the ground projector, spread uniformly over exact
    degeneracies (eigenvalues within ``degeneracy_tol`` of the minimum).
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    e = spec.eigenvalues
    if np.isinf(beta):
        ground = e - e[0] <= degeneracy_tol * max(1.0, abs(e[0]))
        weights = ground.astype(float)
    else:
        weights = np.exp(-beta * (e - e[0]))
    weights = weights / weights.sum()
    v = spec.eigenvectors
    return (v * weights) @ v.conj().T


def purity(rho) -> float:
    data, _ = _unwrap(rho)
    if data.ndim == 1:
        return 1.0
    return float(np.real(np.trace(data @ data)))
