"""End-to-end drivers: model assembly from a config, the subspace cooling
pipeline (sweep, scan, sweep, targeted recool), thermalization, and the
exact-results oracle bundle.

Full-space noise is tracked through the sector block plus a leaked-weight
scalar: couplers and observables never touch other particle-number sectors,
so the subnormalized block evolves exactly (see noise module).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import lattice as lat
from .config import ExperimentConfig, config_hash, config_to_dict
from .cooling import cooling_step
from .couplers import (
    Coupler,
    coulomb_couplers,
    coulomb_ground_state,
    diagonalize_quadratic,
    free_couplers,
    ideal_coupler,
    resolve_degenerate_ground,
    slater_state,
    symmetry_couplers,
)
from .noise import make_noise_channel
from .qcore import Spectrum, eigh, expectation, fidelity, gibbs_state
from .runio import rng_for
from .spectroscopy import ResonanceLedger, ScanTrace, initial_omega, scan
from .sweep import SweepSpec, pseudo_sweep
from .thermal import ThermalParams, subspace_therm


@dataclass(frozen=True)
class Model:
    """Everything derived from (lattice, sector): Hamiltonians, the exact
    decomposition, and the free-model diagonalization."""

    config: ExperimentConfig
    basis: lat.SectorBasis
    h_target: np.ndarray
    h_free: np.ndarray
    h_onsite: np.ndarray  # hopping switched off
    spectrum: Spectrum
    bogoliubov: object
    free_ground: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def dim(self) -> int:
        return self.basis.dimension

    @property
    def full_dim(self) -> int:
        return 1 << self.basis.n_modes


def build_model(config: ExperimentConfig) -> Model:
    spec = config.lattice
    basis = lat.sector_basis(spec.n_sites, config.sector)
    h_target = lat.fock_matrix(lat.build_hubbard(spec), basis)
    h_free = lat.fock_matrix(lat.build_free(spec), basis)
    onsite = lat.LatticeSpec(spec.rows, spec.cols, 0.0, spec.coulomb_u, spec.boundary)
    h_onsite = lat.fock_matrix(lat.build_hubbard(onsite), basis)
    spectrum = eigh(h_target)
    bog = diagonalize_quadratic(lat.build_free(spec))
    ground = resolve_degenerate_ground(bog, basis, spec)
    return Model(config, basis, h_target, h_free, h_onsite, spectrum, bog, ground)


def build_couplers(config: ExperimentConfig, model: Model) -> list[Coupler]:
    family = config.coupler_family
    if family == "free":
        return free_couplers(model.bogoliubov, model.basis, d_c=config.d_c, ground=model.free_ground)
    if family == "ideal":
        d_c = config.d_c or model.dim
        return [ideal_coupler(model.spectrum, j, 0) for j in range(1, d_c)]
    if family == "symmetry":
        return symmetry_couplers(config.lattice, model.basis)
    if family == "coulomb":
        return coulomb_couplers(config.lattice, model.basis)
    raise ValueError(f"unknown coupler family {family!r}")


def checkerboard_state(model: Model) -> np.ndarray:
    """Deterministic computational start: alternate spins over sites in
    row-major order until the sector occupations are exhausted."""
    spec = model.config.lattice
    sector = model.config.sector
    order_up, order_down = [], []
    for site in range(spec.n_sites):
        row, col = divmod(site, spec.cols)
        (order_up if (row + col) % 2 == 0 else order_down).append(site)
    ups = (order_up + order_down)[: sector.n_up]
    downs = (order_down + order_up)[: sector.n_down]
    mask = sum(1 << lat.mode_index(i, lat.UP) for i in ups) + sum(
        1 << lat.mode_index(i, lat.DOWN) for i in downs
    )
    vec = np.zeros(model.dim, dtype=complex)
    vec[model.basis.index_of(np.asarray([mask], dtype=np.int64))[0]] = 1.0
    return vec


def initial_state(config: ExperimentConfig, model: Model) -> np.ndarray:
    if config.start_state == "computational":
        return checkerboard_state(model)
    if config.start_state == "slater":
        return slater_state(
            model.bogoliubov, model.free_ground[0], model.free_ground[1], model.basis
        ).vector
    if config.start_state == "coulomb":
        return coulomb_ground_state(config.lattice, model.basis, model.spectrum)
    raise ValueError(f"unknown start state {config.start_state!r}")


def sweep_start_hamiltonian(config: ExperimentConfig, model: Model) -> np.ndarray:
    """The easy endpoint matching the chosen start state."""
    return model.h_onsite if config.start_state == "coulomb" else model.h_free


def scan_window(config: ExperimentConfig, model: Model) -> float:
    """Initial scan frequency: overshoot above the largest gap of interest
    (the whole spectrum, or the d_c lowest levels in subspace mode)."""
    if config.d_c is None:
        return initial_omega(model.spectrum, config.control.delta)
    top_gap = float(
        model.spectrum.eigenvalues[config.d_c - 1] - model.spectrum.eigenvalues[0]
    )
    return (1.0 + config.control.delta) * top_gap


@dataclass
class RunRecord:
    """Deterministic summary of one pipeline run."""

    kind: str
    config: dict
    config_hash: str
    stages: dict = field(default_factory=dict)
    ledger: dict = field(default_factory=dict)
    trace_rows: list = field(default_factory=list)
    final_fidelity: float = 0.0
    final_energy: float = 0.0
    leaked_weight: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "config_hash": self.config_hash,
            "stages": self.stages,
            "ledger": self.ledger,
            "trace_rows": self.trace_rows,
            "final_fidelity": self.final_fidelity,
            "final_energy": self.final_energy,
            "leaked_weight": self.leaked_weight,
        }


def _record(kind: str, config: ExperimentConfig) -> RunRecord:
    return RunRecord(kind=kind, config=config_to_dict(config), config_hash=config_hash(config))


def _ledger_entries(ledger: ResonanceLedger, couplers) -> list[tuple[float, Coupler]]:
    by_label = {c.label: c for c in couplers}
    entries = [
        (freq, by_label[label])
        for label, freqs in ledger.resonances.items()
        for freq in freqs
        if label in by_label
    ]
    entries.sort(key=lambda e: (-e[0], e[1].label))
    return entries


def run_subspace_cooling(config: ExperimentConfig) -> RunRecord:
    """Sweep to a low-energy state, scan to build the resonance ledger, then
    sweep again and cool deterministically at every ledgered frequency
    (``cool_repeats`` ordered passes, highest frequency first)."""
    model = build_model(config)
    couplers = build_couplers(config, model)
    start = initial_state(config, model)
    ground = model.spectrum.ground_state()
    record = _record("subspace_cooling", config)
    noise = make_noise_channel(config.noise, model.dim, model.full_dim)

    record.stages["start_fidelity"] = fidelity(ground, start)
    if config.sweep.enabled:
        sweep_spec = SweepSpec(
            sweep_start_hamiltonian(config, model),
            model.h_target,
            config.sweep.total_time,
            config.sweep.n_trotter,
        )
        rho = pseudo_sweep(start, sweep_spec, noise_channel=noise)
    else:
        rho = np.outer(start, start.conj())
    record.stages["post_sweep_fidelity"] = fidelity(ground, rho)

    rho_scan, ledger, trace = scan(
        rho,
        model.h_target,
        couplers,
        config.control,
        config.cooling,
        spectrum=model.spectrum,
        omega_start=scan_window(config, model),
        noise_channel=noise,
    )
    record.stages["post_scan_fidelity"] = fidelity(ground, rho_scan)
    ledger = ledger.drop_empty()
    record.ledger = {k: list(v) for k, v in ledger.resonances.items()}
    record.trace_rows = [list(r) for r in trace.rows()]

    if config.sweep.enabled:
        rho2 = pseudo_sweep(start, sweep_spec, noise_channel=noise)
    else:
        rho2 = np.outer(start, start.conj())
    entries = _ledger_entries(ledger, couplers)
    for _ in range(config.cool_repeats):
        for freq, coupler in entries:
            rho2 = cooling_step(rho2, None, coupler, freq, config.cooling, h_s=model.h_target).rho_after
            if noise is not None:
                rho2 = noise(rho2)
    record.final_fidelity = fidelity(ground, rho2)
    record.final_energy = expectation(model.h_target, rho2)
    record.leaked_weight = max(0.0, 1.0 - float(np.real(np.trace(rho2))))
    record.stages["post_recool_fidelity"] = record.final_fidelity
    return record


def run_scan(config: ExperimentConfig) -> RunRecord:
    """Spectroscopy-and-cooling in one pass (no sweep, no recool stage)."""
    model = build_model(config)
    couplers = build_couplers(config, model)
    start = initial_state(config, model)
    ground = model.spectrum.ground_state()
    record = _record("scan", config)
    noise = make_noise_channel(config.noise, model.dim, model.full_dim)
    record.stages["start_fidelity"] = fidelity(ground, start)
    rho, ledger, trace = scan(
        start,
        model.h_target,
        couplers,
        config.control,
        config.cooling,
        spectrum=model.spectrum,
        omega_start=scan_window(config, model),
        noise_channel=noise,
    )
    record.final_fidelity = fidelity(ground, rho)
    record.final_energy = expectation(model.h_target, rho)
    record.leaked_weight = max(0.0, 1.0 - float(np.real(np.trace(rho))))
    record.ledger = {k: list(v) for k, v in ledger.drop_empty().resonances.items()}
    record.trace_rows = [list(r) for r in trace.rows()]
    return record


def run_thermalization(config: ExperimentConfig) -> RunRecord:
    """Subspace thermalization toward the sector Gibbs state."""
    if config.thermal is None:
        raise ValueError("config has no thermal section")
    model = build_model(config)
    couplers = build_couplers(config, model)
    start = initial_state(config, model)
    record = _record("thermalization", config)
    beta = config.thermal.resolve_beta(float(model.spectrum.eigenvalues[0]))
    target = gibbs_state(model.spectrum, beta)
    sweep_spec = SweepSpec(
        sweep_start_hamiltonian(config, model),
        model.h_target,
        config.sweep.total_time,
        config.sweep.n_trotter,
    )
    params = ThermalParams(beta, config.thermal.n_steps, config.rng_seed)
    rng = rng_for(config.rng_seed, 0, "thermalization")
    record.stages["start_fidelity_to_gibbs"] = fidelity(target, np.outer(start, start.conj()))
    trajectory = []

    def observe(step, rho_now):
        trajectory.append(
            [step, fidelity(target, rho_now), expectation(model.h_target, rho_now)]
        )

    rho, ledger = subspace_therm(
        start,
        sweep_spec,
        model.h_target,
        couplers,
        params,
        config.control,
        config.cooling,
        model.spectrum,
        config.thermal.d_c,
        rng,
        omega_start=scan_window(config, model),
        mode=config.thermal.mode,
        observer=observe,
    )
    record.trace_rows = trajectory
    record.final_fidelity = fidelity(target, rho)
    record.final_energy = expectation(model.h_target, rho)
    record.stages["beta"] = beta
    record.stages["beta_times_e0"] = beta * abs(float(model.spectrum.eigenvalues[0]))
    record.stages["fidelity_to_gibbs"] = record.final_fidelity
    record.ledger = {k: list(v) for k, v in ledger.resonances.items()}
    return record


def run_oracle(config: ExperimentConfig, max_dim: int = 4096) -> dict:
    """Exact spectra, gaps, and reference states for downstream checks."""
    model = build_model(config)
    if model.dim > max_dim:
        raise ValueError(f"sector dimension {model.dim} exceeds the oracle budget {max_dim}")
    e = model.spectrum.eigenvalues
    gaps = np.unique(np.round(e - e[0], 12))
    out = {
        "dimension": model.dim,
        "eigenvalues": [float(x) for x in e],
        "gaps_from_ground": [float(g) for g in gaps if g > 1e-12],
        "ground_energy": float(e[0]),
        "spread": float(e[-1] - e[0]),
        "free_single_particle": [float(x) for x in model.bogoliubov.energies],
    }
    if config.thermal is not None:
        beta = config.thermal.resolve_beta(out["ground_energy"])
        target = gibbs_state(model.spectrum, beta)
        out["gibbs_diagonal"] = [float(np.real(x)) for x in np.diag(target)]
        out["beta"] = beta
    return out
