"""Ancilla-assisted cooling and thermalization simulator for Fermi-Hubbard
lattices: exact fermionic operator algebra, Jordan-Wigner encodings, coupler
construction from the solvable free model, controlled spectroscopy scans,
pseudo-adiabatic sweeps, Gibbs-state preparation, and noise studies."""

from .bounds import BoundInputs, d_c_window, t_spec_bound, t_sub_bound, t_sweep_bound
from .config import ExperimentConfig, SweepConfig, ThermalConfig, config_from_dict, load_config
from .cooling import (
    CoolingParams,
    FridgeSpec,
    StepResult,
    assemble,
    cooling_step,
    fridge_energy_trace,
    rwa_error_estimate,
)
from .couplers import (
    BogoliubovBasis,
    Coupler,
    SlaterState,
    coulomb_couplers,
    coulomb_ground_state,
    diagonalize_quadratic,
    free_couplers,
    ideal_coupler,
    resolve_degenerate_ground,
    slater_state,
    symmetry_couplers,
)
from .lattice import (
    FockSum,
    LadderTerm,
    LatticeSpec,
    SectorBasis,
    SectorLeakageError,
    SectorSpec,
    build_free,
    build_hubbard,
    fock_matrix,
    sector_basis,
)
from .noise import NoiseSpec, depolarize, noise_threshold
from .paulis import PauliSum, decompose_coupler, jordan_wigner, matrix_to_pauli, pauli_to_matrix
from .pipelines import (
    RunRecord,
    build_model,
    run_oracle,
    run_scan,
    run_subspace_cooling,
    run_thermalization,
)
from .qcore import (
    QuantumState,
    Spectrum,
    eigh,
    evolve_exact,
    evolve_trotter,
    fidelity,
    gibbs_state,
    partial_trace_fridge,
    trace_distance,
)
from .spectroscopy import (
    ControlParams,
    ResonanceLedger,
    ScanTrace,
    control_function,
    detect_resonances,
    initial_omega,
    scan,
)
from .sweep import SweepSpec, adiabatic_error_estimate, pseudo_sweep, slow_sweep
from .thermal import (
    CouplerDistribution,
    ThermalParams,
    build_coupler_distribution,
    detailed_balance_check,
    probabilistic_reset,
    stoch_therm_step,
    subspace_therm,
    therm_step,
)

__version__ = "0.1.0"
