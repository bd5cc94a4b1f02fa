"""Rectangular Fermi-Hubbard lattices and fermionic operators in the occupation basis.

Spin-orbitals are indexed ``p = 2 * site + spin`` with ``spin = 0`` for up and
``1`` for down, sites in row-major order.  A basis state is a bit-mask over the
``2 * n_sites`` modes (bit ``p`` set means mode ``p`` occupied) and stands for
``a†_{p1} a†_{p2} ... |vac>`` with ``p1 < p2 < ...``, so annihilating mode ``p``
picks up the sign ``(-1)**(number of occupied modes below p)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

UP = 0
DOWN = 1


class SectorLeakageError(Exception):
    """An operator mapped a sector basis state outside the sector."""


@dataclass(frozen=True)
class LatticeSpec:
    """Rectangular lattice with hopping rate ``hopping_t`` and on-site repulsion ``coulomb_u``."""

    rows: int
    cols: int
    hopping_t: float = 1.0
    coulomb_u: float = 0.0
    boundary: str = "open"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("lattice must have at least one site")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if not (np.isfinite(self.hopping_t) and np.isfinite(self.coulomb_u)):
            raise ValueError("hopping_t and coulomb_u must be finite")

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites

    def site(self, row: int, col: int) -> int:
        return row * self.cols + col

    def edges(self) -> list[tuple[int, int]]:
        """Nearest-neighbour site pairs (i, j) with i < j, each edge once."""
        pairs = set()
        for r, c in itertools.product(range(self.rows), range(self.cols)):
            i = self.site(r, c)
            if self.cols > 1:
                j = self.site(r, (c + 1) % self.cols)
                if c + 1 < self.cols or self.boundary == "periodic":
                    pairs.add((min(i, j), max(i, j)))
            if self.rows > 1:
                j = self.site((r + 1) % self.rows, c)
                if r + 1 < self.rows or self.boundary == "periodic":
                    pairs.add((min(i, j), max(i, j)))
        return sorted(pairs)


@dataclass(frozen=True)
class SectorSpec:
    """Fixed particle numbers (n_up, n_down); both are conserved by the Hubbard Hamiltonian."""

    n_up: int
    n_down: int

    def __post_init__(self):
        if self.n_up < 0 or self.n_down < 0:
            raise ValueError("occupations must be non-negative")


def mode_index(site: int, spin: int) -> int:
    return 2 * site + spin


@dataclass(frozen=True)
class LadderTerm:
    """A scalar times an ordered product of ladder operators.

    ``factors`` are listed in operator order (leftmost first), so the last
    factor acts on a ket first.  No normal ordering is assumed.
    """

    coefficient: complex
    factors: tuple[tuple[int, bool], ...]  # (mode, dagger)

    def dagger(self) -> "LadderTerm":
        rev = tuple((m, not d) for m, d in reversed(self.factors))
        return LadderTerm(np.conj(self.coefficient), rev)


@dataclass(frozen=True)
class FockSum:
    """Weighted sum of ladder-operator products on ``n_modes`` spin-orbitals."""

    terms: tuple[LadderTerm, ...]
    n_modes: int

    def __post_init__(self):
        for t in self.terms:
            for mode, _ in t.factors:
                if not 0 <= mode < self.n_modes:
                    raise ValueError(f"mode {mode} out of range for {self.n_modes} modes")

    def __add__(self, other: "FockSum") -> "FockSum":
        if self.n_modes != other.n_modes:
            raise ValueError("mode counts differ")
        return FockSum(self.terms + other.terms, self.n_modes)

    def scaled(self, c: complex) -> "FockSum":
        return FockSum(
            tuple(LadderTerm(c * t.coefficient, t.factors) for t in self.terms),
            self.n_modes,
        )

    def dagger(self) -> "FockSum":
        return FockSum(tuple(t.dagger() for t in self.terms), self.n_modes)

    def product(self, other: "FockSum") -> "FockSum":
        """Operator product, expanded term by term (self acts after other)."""
        if self.n_modes != other.n_modes:
            raise ValueError("mode counts differ")
        terms = tuple(
            LadderTerm(a.coefficient * b.coefficient, a.factors + b.factors)
            for a in self.terms
            for b in other.terms
        )
        return FockSum(terms, self.n_modes)


def ladder_op(mode: int, dagger: bool, n_modes: int, coefficient: complex = 1.0) -> FockSum:
    return FockSum((LadderTerm(coefficient, ((mode, dagger),)),), n_modes)


def number_op(mode: int, n_modes: int) -> FockSum:
    return FockSum((LadderTerm(1.0, ((mode, True), (mode, False))),), n_modes)


def build_hubbard(spec: LatticeSpec) -> FockSum:
    """Hubbard Hamiltonian: -t sum over edges and spins of hops (both directions)
    plus U times the number of doubly occupied sites."""
    terms = []
    t, u = spec.hopping_t, spec.coulomb_u
    if t != 0.0:
        for i, j in spec.edges():
            for spin in (UP, DOWN):
                p, q = mode_index(i, spin), mode_index(j, spin)
                terms.append(LadderTerm(-t, ((p, True), (q, False))))
                terms.append(LadderTerm(-t, ((q, True), (p, False))))
    if u != 0.0:
        for i in range(spec.n_sites):
            up, dn = mode_index(i, UP), mode_index(i, DOWN)
            terms.append(
                LadderTerm(u, ((up, True), (up, False), (dn, True), (dn, False)))
            )
    return FockSum(tuple(terms), spec.n_modes)


def build_free(spec: LatticeSpec) -> FockSum:
    """The U = 0 (free-fermion) limit of :func:`build_hubbard`; purely quadratic."""
    free_spec = LatticeSpec(
        spec.rows, spec.cols, spec.hopping_t, 0.0, spec.boundary
    )
    return build_hubbard(free_spec)


def hopping_matrix(spec: LatticeSpec) -> np.ndarray:
    """Single-spin quadratic coefficient matrix M with M[i, j] = -t on lattice edges."""
    m = np.zeros((spec.n_sites, spec.n_sites))
    for i, j in spec.edges():
        m[i, j] = m[j, i] = -spec.hopping_t
    return m


@dataclass(frozen=True)
class SectorBasis:
    """Occupation basis of a (n_up, n_down) sector, masks sorted ascending."""

    n_sites: int
    sector: SectorSpec
    states: np.ndarray = field(compare=False)  # int64 masks, ascending

    @property
    def dimension(self) -> int:
        return len(self.states)

    @property
    def n_modes(self) -> int:
        return 2 * self.n_sites

    def index_of(self, masks: np.ndarray) -> np.ndarray:
        """Positions of the given masks in the basis; raises on outsiders."""
        idx = np.searchsorted(self.states, masks)
        bad = (idx >= self.dimension) | (self.states[np.minimum(idx, self.dimension - 1)] != masks)
        if np.any(bad):
            raise SectorLeakageError(
                f"state left the ({self.sector.n_up}, {self.sector.n_down}) sector"
            )
        return idx


def sector_basis(n_sites: int, sector: SectorSpec) -> SectorBasis:
    """Enumerate all masks with the requested per-spin occupations.

    The dimension is C(n_sites, n_up) * C(n_sites, n_down).
    """
    if sector.n_up > n_sites or sector.n_down > n_sites:
        raise ValueError("occupation exceeds site count")
    masks = []
    for ups in itertools.combinations(range(n_sites), sector.n_up):
        up_mask = sum(1 << mode_index(i, UP) for i in ups)
        for downs in itertools.combinations(range(n_sites), sector.n_down):
            masks.append(up_mask + sum(1 << mode_index(i, DOWN) for i in downs))
    states = np.sort(np.asarray(masks, dtype=np.int64))
    assert len(states) == comb(n_sites, sector.n_up) * comb(n_sites, sector.n_down)
    return SectorBasis(n_sites, sector, states)


def apply_term_to_masks(term: LadderTerm, masks: np.ndarray):
    """Apply one ladder product to an array of basis masks.

    Returns (amplitudes, out_masks); killed entries have amplitude 0 and an
    unspecified mask.
    """
    amp = np.full(masks.shape, term.coefficient, dtype=complex)
    cur = masks.astype(np.int64, copy=True)
    for mode, dagger in reversed(term.factors):
        occupied = (cur >> mode) & 1
        ok = occupied == (0 if dagger else 1)
        amp[~ok] = 0.0
        parity = np.bitwise_count(cur & ((np.int64(1) << mode) - 1)) & 1
        amp[parity == 1] *= -1.0
        cur = np.where(ok, cur ^ (np.int64(1) << mode), cur)
    return amp, cur


def fock_matrix(op: FockSum, basis: SectorBasis | None = None) -> np.ndarray:
    """Dense matrix of ``op`` in the occupation basis.

    With ``basis=None`` the full 2**n_modes space is used and the basis index
    equals the mask.  With a :class:`SectorBasis`, any term that maps a basis
    state onto a nonzero vector outside the sector raises
    :class:`SectorLeakageError` rather than silently truncating.
    """
    if basis is None:
        masks = np.arange(1 << op.n_modes, dtype=np.int64)
        dim = len(masks)
        lookup = None
    else:
        if basis.n_modes != op.n_modes:
            raise ValueError("mode counts differ")
        masks = basis.states
        dim = basis.dimension
        lookup = basis.index_of
    cols = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for term in op.terms:
        amp, out = apply_term_to_masks(term, masks)
        live = amp != 0
        if not np.any(live):
            continue
        rows = out[live] if lookup is None else lookup(out[live])
        np.add.at(mat, (rows, cols[live]), amp[live])
    return mat


def apply_fock_to_state(op: FockSum, state: dict[int, complex]) -> dict[int, complex]:
    """Apply a FockSum to a sparse mask-amplitude map (no sector restriction)."""
    out: dict[int, complex] = {}
    in_masks = np.fromiter(state.keys(), dtype=np.int64, count=len(state))
    in_amps = np.fromiter(state.values(), dtype=complex, count=len(state))
    for term in op.terms:
        amp, res = apply_term_to_masks(term, in_masks)
        amp = amp * in_amps
        for a, m in zip(amp, res):
            if a != 0:
                out[int(m)] = out.get(int(m), 0.0) + a
    return {m: a for m, a in out.items() if a != 0}


def state_to_sector_vector(state: dict[int, complex], basis: SectorBasis) -> np.ndarray:
    """Project a sparse mask-amplitude map onto a sector basis vector."""
    vec = np.zeros(basis.dimension, dtype=complex)
    for mask, a in state.items():
        vec[basis.index_of(np.asarray([mask], dtype=np.int64))[0]] = a
    return vec


def total_number_matrix(basis: SectorBasis, spin: int) -> np.ndarray:
    """Matrix of the total number operator for one spin species on the sector."""
    terms = tuple(
        LadderTerm(1.0, ((mode_index(i, spin), True), (mode_index(i, spin), False)))
        for i in range(basis.n_sites)
    )
    return fock_matrix(FockSum(terms, basis.n_modes), basis)
