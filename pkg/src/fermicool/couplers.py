"""Couplers that swap one system excitation into the fridge qubit.

A coupler is stored as its sector-matrix lowering part; assembling the
Hermitian interaction (tensoring with the fridge raising operator and adding
the conjugate) happens in :mod:`fermicool.cooling`.  Free couplers also
retain their ladder-operator factorization for Pauli decomposition reports.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import comb

import numpy as np

from . import lattice as lat
from .lattice import (
    DOWN,
    UP,
    FockSum,
    LadderTerm,
    LatticeSpec,
    SectorBasis,
    SectorSpec,
    hopping_matrix,
    mode_index,
)
from .paulis import PauliSum, pauli_to_matrix
from .qcore import Spectrum, eigh

log = logging.getLogger(__name__)

GROUND_DEGENERACY_TOL = 1e-9


class DegenerateGroundError(Exception):
    """The free ground manifold is degenerate and no resolution was supplied."""


@dataclass(frozen=True)
class BogoliubovBasis:
    """Single-particle diagonalization of the quadratic (free) model.

    ``transform`` has the new modes as columns: the k-th diagonal mode is
    built from site operators as sum_i transform[i, k] * a†_{site i, spin}.
    The same basis applies to both spin species.
    """

    energies: np.ndarray  # ascending
    transform: np.ndarray  # n_sites x n_sites unitary

    @property
    def n_sites(self) -> int:
        return len(self.energies)


def diagonalize_quadratic(free: FockSum) -> BogoliubovBasis:
    """Diagonalize a number-conserving, spin-symmetric quadratic FockSum.

    Raises ValueError when the input has non-quadratic terms or couples the
    spin species asymmetrically.
    """
    n_modes = free.n_modes
    n_sites = n_modes // 2
    coeff = np.zeros((n_modes, n_modes), dtype=complex)
    for term in free.terms:
        if len(term.factors) != 2 or term.factors[0][1] is not True or term.factors[1][1] is not False:
            raise ValueError("input is not purely quadratic of the form a† a")
        p, q = term.factors[0][0], term.factors[1][0]
        coeff[p, q] += term.coefficient
    up = coeff[0::2, 0::2]
    down = coeff[1::2, 1::2]
    if np.any(coeff[0::2, 1::2]) or np.any(coeff[1::2, 0::2]):
        raise ValueError("quadratic input mixes spin species")
    if not np.allclose(up, down, atol=1e-12):
        raise ValueError("spin-asymmetric quadratic input is not supported")
    spec = eigh(up)
    return BogoliubovBasis(spec.eigenvalues.real, spec.eigenvectors)


def _mode_op(basis: BogoliubovBasis, k: int, spin: int, dagger: bool) -> FockSum:
    """Diagonal-mode ladder operator expressed in the site operators."""
    n_modes = 2 * basis.n_sites
    col = basis.transform[:, k]
    terms = tuple(
        LadderTerm(c if dagger else np.conj(c), ((mode_index(i, spin), dagger),))
        for i, c in enumerate(col)
        if c != 0
    )
    return FockSum(terms, n_modes)


@dataclass(frozen=True)
class SlaterState:
    """Free eigenstate from filling diagonal modes on the vacuum."""

    occupied_up: tuple[int, ...]
    occupied_down: tuple[int, ...]
    energy: float
    vector: np.ndarray  # realized in the sector basis


def slater_state(
    basis: BogoliubovBasis,
    occupied_up,
    occupied_down,
    sector: SectorBasis,
) -> SlaterState:
    """Fill the listed diagonal modes (ascending order per spin, up before
    down) on the vacuum and realize the vector in the sector basis."""
    occupied_up = tuple(sorted(occupied_up))
    occupied_down = tuple(sorted(occupied_down))
    for occ in (occupied_up, occupied_down):
        if len(set(occ)) != len(occ):
            raise ValueError("duplicate mode index")
        if any(k < 0 or k >= basis.n_sites for k in occ):
            raise ValueError("mode index out of range")
    if (len(occupied_up), len(occupied_down)) != (sector.sector.n_up, sector.sector.n_down):
        raise ValueError("occupation does not match the sector")
    ops = [_mode_op(basis, k, UP, True) for k in occupied_up]
    ops += [_mode_op(basis, k, DOWN, True) for k in occupied_down]
    state = {0: 1.0 + 0.0j}
    for op in reversed(ops):
        state = lat.apply_fock_to_state(op, state)
    vec = lat.state_to_sector_vector(state, sector)
    norm = np.linalg.norm(vec)
    if not np.isclose(norm, 1.0, atol=1e-9):
        raise AssertionError("Slater vector is not normalized")
    energy = float(sum(basis.energies[k] for k in occupied_up + occupied_down))
    return SlaterState(occupied_up, occupied_down, energy, vec)


def enumerate_slater_configurations(basis: BogoliubovBasis, sector: SectorSpec):
    """All (occupied_up, occupied_down, energy) triples, sorted by energy then
    by a lexicographic mode mask, so indexing is deterministic."""
    n = basis.n_sites
    configs = []
    for ups in itertools.combinations(range(n), sector.n_up):
        for downs in itertools.combinations(range(n), sector.n_down):
            energy = float(sum(basis.energies[k] for k in ups + downs))
            mask = sum(1 << (2 * k) for k in ups) + sum(1 << (2 * k + 1) for k in downs)
            configs.append((ups, downs, energy, mask))
    configs.sort(key=lambda c: (round(c[2], 10), c[3]))
    return [(u, d, e) for u, d, e, _ in configs]


@dataclass(frozen=True)
class Coupler:
    """Lowering part of a system-fridge interaction, tagged with metadata.

    ``system_matrix`` acts on the sector and plays the role of
    |target><source|; the full interaction is
    system_matrix (x) |1><0| + Hermitian conjugate.
    """

    label: str
    system_matrix: np.ndarray
    free_gap: float | None = None
    pair: tuple[int, int] | None = None  # (source level, target level)
    fock_factors: tuple[FockSum, ...] | None = None


def ideal_coupler(spec: Spectrum, j: int, k: int = 0) -> Coupler:
    """|E_k><E_j| from the exact eigenbasis; the unreachable reference design."""
    if j == k:
        raise ValueError("source and target levels must differ")
    if not (0 <= j < spec.dim and 0 <= k < spec.dim):
        raise ValueError("level index out of range")
    vj = spec.eigenvectors[:, j]
    vk = spec.eigenvectors[:, k]
    gap = float(spec.eigenvalues[j] - spec.eigenvalues[k])
    return Coupler(
        label=f"ideal_{j}_{k}",
        system_matrix=np.outer(vk, vj.conj()),
        free_gap=gap,
        pair=(j, k),
    )


def resolve_degenerate_ground(
    basis: BogoliubovBasis,
    sector: SectorBasis,
    lattice_spec: LatticeSpec,
    epsilon_u: float | None = None,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Pick one occupation choice out of a degenerate free ground manifold.

    The free Hamiltonian plus a small Coulomb term (strength ``epsilon_u``,
    default 1e-3 * max(1, U)) is diagonalized on the manifold; the returned
    choice is the candidate determinant with the largest weight in the
    minimal-eigenvalue combination.
    """
    configs = enumerate_slater_configurations(basis, sector.sector)
    e0 = configs[0][2]
    manifold = [c for c in configs if c[2] - e0 <= GROUND_DEGENERACY_TOL]
    if len(manifold) == 1:
        return manifold[0][0], manifold[0][1]
    if epsilon_u is None:
        epsilon_u = 1e-3 * max(1.0, abs(lattice_spec.coulomb_u))

    states = [slater_state(basis, u, d, sector) for u, d, _ in manifold]
    if epsilon_u == 0.0:
        log.warning("epsilon_u = 0 leaves the ground manifold degenerate; using first candidate")
        return manifold[0][0], manifold[0][1]
    coulomb = lat.build_hubbard(
        LatticeSpec(lattice_spec.rows, lattice_spec.cols, 0.0, 1.0, lattice_spec.boundary)
    )
    cmat = lat.fock_matrix(coulomb, sector)
    vecs = np.column_stack([s.vector for s in states])
    restricted = epsilon_u * (vecs.conj().T @ cmat @ vecs)
    sub = eigh(restricted)
    weights = np.abs(sub.eigenvectors[:, 0])
    choice = int(np.argmax(weights > weights.max() - 1e-12))
    return manifold[choice][0], manifold[choice][1]


def free_couplers(
    basis: BogoliubovBasis,
    sector: SectorBasis,
    d_c: int | None = None,
    ground: tuple[tuple[int, ...], tuple[int, ...]] | None = None,
) -> list[Coupler]:
    """Couplers |free ground><free excited j| for the lowest excited
    configurations, expressed on the sector basis.

    ``d_c`` bounds the cooled subspace: the first d_c - 1 excited
    configurations get a coupler (all of them when omitted).  A degenerate
    ground manifold requires an explicit ``ground`` occupation choice, e.g.
    from :func:`resolve_degenerate_ground`.
    """
    configs = enumerate_slater_configurations(basis, sector.sector)
    if d_c is not None and d_c > len(configs):
        raise ValueError("d_c exceeds the sector dimension")
    e0 = configs[0][2]
    if ground is None:
        degenerate = len(configs) > 1 and configs[1][2] - e0 <= GROUND_DEGENERACY_TOL
        if degenerate:
            raise DegenerateGroundError(
                "degenerate free ground manifold: pass an occupation choice"
            )
        ground = (configs[0][0], configs[0][1])
    ground = (tuple(sorted(ground[0])), tuple(sorted(ground[1])))
    gs = slater_state(basis, ground[0], ground[1], sector)

    excited = [c for c in configs if (c[0], c[1]) != ground]
    if d_c is not None:
        excited = excited[: d_c - 1]
    out = []
    for idx, (ups, downs, energy) in enumerate(excited, start=1):
        st = slater_state(basis, ups, downs, sector)
        factors = tuple(
            [_mode_op(basis, k, UP, True) for k in ground[0]]
            + [_mode_op(basis, k, DOWN, True) for k in ground[1]]
            + [_mode_op(basis, k, DOWN, False) for k in sorted(downs, reverse=True)]
            + [_mode_op(basis, k, UP, False) for k in sorted(ups, reverse=True)]
        )
        out.append(
            Coupler(
                label=f"free_{idx}_0",
                system_matrix=np.outer(gs.vector, st.vector.conj()),
                free_gap=energy - gs.energy,
                pair=(idx, 0),
                fock_factors=factors,
            )
        )
    return out


def coupler_fock_matrix(coupler: Coupler) -> np.ndarray:
    """Full-space matrix of the coupler's ladder factorization."""
    if coupler.fock_factors is None:
        raise ValueError(f"coupler {coupler.label} retains no ladder form")
    n_modes = coupler.fock_factors[0].n_modes
    mat = np.eye(1 << n_modes, dtype=complex)
    for op in coupler.fock_factors:
        mat = mat @ lat.fock_matrix(op)
    return mat


def _restrict_to_sector(full: np.ndarray, sector: SectorBasis) -> np.ndarray:
    return full[np.ix_(sector.states, sector.states)]


def _normalized(mat: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(mat, ord=2)
    return mat if norm == 0 else mat / norm


def symmetry_couplers(spec: LatticeSpec, sector: SectorBasis) -> list[Coupler]:
    """Couplers from encoded hopping, number, and on-site pair operators.

    System parts are hop-like (X_p X_q + Y_p Y_q)/2 on equal-spin edge
    orbitals, Z_p on every spin-orbital, and Z Z on the two orbitals of each
    site; all conserve the (n_up, n_down) sector.  Each part is normalized to
    unit spectral norm so families are comparable under one coupling strength.
    """
    n_modes = spec.n_modes
    idn = "I" * n_modes
    parts: list[tuple[str, PauliSum]] = []
    for i, j in spec.edges():
        for spin, tagsp in ((UP, "up"), (DOWN, "down")):
            p, q = mode_index(i, spin), mode_index(j, spin)
            xx = idn[:p] + "X" + idn[p + 1 : q] + "X" + idn[q + 1 :]
            yy = idn[:p] + "Y" + idn[p + 1 : q] + "Y" + idn[q + 1 :]
            parts.append((f"hop_{i}_{j}_{tagsp}", PauliSum({xx: 0.5, yy: 0.5}, n_modes)))
    for p in range(n_modes):
        parts.append((f"num_{p}", PauliSum({idn[:p] + "Z" + idn[p + 1 :]: 1.0}, n_modes)))
    for i in range(spec.n_sites):
        p, q = mode_index(i, UP), mode_index(i, DOWN)
        zz = idn[:p] + "Z" + idn[p + 1 : q] + "Z" + idn[q + 1 :]
        parts.append((f"pair_{i}", PauliSum({zz: 1.0}, n_modes)))
    out = []
    for label, ps in parts:
        full = pauli_to_matrix(ps)
        out.append(
            Coupler(label=label, system_matrix=_normalized(_restrict_to_sector(full, sector)))
        )
    return out


def coulomb_couplers(spec: LatticeSpec, sector: SectorBasis) -> list[Coupler]:
    """Couplers that move one fermion off a doubly occupied site to a
    neighbouring site, lowering the U = 0-excited configurations.

    Each directed edge and spin gives a†_{j,s} a_{i,s} n_{i,sbar}; these
    annihilate every doubly-occupancy-free configuration.
    """
    if spec.coulomb_u == 0:
        raise ValueError("Coulomb couplers need a nonzero on-site repulsion")
    n_modes = spec.n_modes
    out = []
    for i, j in spec.edges():
        for src, dst in ((i, j), (j, i)):
            for spin, tagsp in ((UP, "up"), (DOWN, "down")):
                other = DOWN if spin == UP else UP
                p_src = mode_index(src, spin)
                p_dst = mode_index(dst, spin)
                p_other = mode_index(src, other)
                term = LadderTerm(
                    1.0,
                    (
                        (p_dst, True),
                        (p_src, False),
                        (p_other, True),
                        (p_other, False),
                    ),
                )
                op = FockSum((term,), n_modes)
                mat = lat.fock_matrix(op, sector)
                if np.linalg.norm(mat) == 0:
                    continue
                out.append(
                    Coupler(
                        label=f"unpair_{src}_to_{dst}_{tagsp}",
                        system_matrix=_normalized(mat),
                    )
                )
    return out


def coulomb_ground_state(
    spec: LatticeSpec, sector: SectorBasis, spectrum: Spectrum | None = None
) -> np.ndarray:
    """Deterministic representative of the hopping-free ground manifold.

    For U > 0 the t = 0 ground states are the double-occupancy-free
    configurations; hopping only connects them at second order, so a small-t
    perturbation cannot rank them.  At desk scale we pick the candidate with
    the largest overlap with the exact interacting ground state (lowest basis
    index on ties), which stays a constant-depth computational state.
    """
    if spec.coulomb_u <= 0:
        raise ValueError("the hopping-free ground manifold needs U > 0")
    n = spec.n_sites
    candidates = [
        idx
        for idx, mask in enumerate(sector.states)
        if all(
            not ((int(mask) >> (2 * i)) & 1 and (int(mask) >> (2 * i + 1)) & 1)
            for i in range(n)
        )
    ]
    if not candidates:  # more particles than sites of one spin: double occupancy forced
        raise ValueError("sector admits no double-occupancy-free configuration")
    if len(candidates) == 1:
        choice = candidates[0]
    else:
        if spectrum is None:
            spectrum = eigh(lat.fock_matrix(lat.build_hubbard(spec), sector))
        weights = np.abs(spectrum.ground_state()[candidates])
        choice = candidates[int(np.argmax(weights > weights.max() - 1e-12))]
    vec = np.zeros(sector.dimension, dtype=complex)
    vec[choice] = 1.0
    return vec


def free_spectrum_multiset(basis: BogoliubovBasis, sector: SectorSpec) -> np.ndarray:
    """Sorted energies of every Slater configuration in the sector."""
    n = basis.n_sites
    expected = comb(n, sector.n_up) * comb(n, sector.n_down)
    energies = [e for _, _, e in enumerate_slater_configurations(basis, sector)]
    assert len(energies) == expected
    return np.sort(np.asarray(energies))
