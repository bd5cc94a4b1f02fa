"""Reproduction presets: each figure id runs a tuned experiment on the
reference 2x2 lattice and emits delimited data plus a rendered image.

The presets freeze the parameters found to reproduce the published
desk-scale behaviour of each experiment; see the configs below.
"""

from __future__ import annotations

import os

import numpy as np

from . import plotting
from .config import (
    ExperimentConfig,
    SweepConfig,
    ThermalConfig,
    config_hash,
)
from .cooling import CoolingParams, cooling_step
from .couplers import coupler_fock_matrix, free_couplers
from .lattice import LatticeSpec, SectorSpec
from .noise import NoiseSpec
from .paulis import decompose_coupler, format_pauli_string
from .pipelines import (
    build_couplers,
    build_model,
    checkerboard_state,
    initial_state,
    run_scan,
    run_subspace_cooling,
    run_thermalization,
)
from .qcore import fidelity
from .runio import GENERATOR, write_csv, write_json
from .spectroscopy import ControlParams, scan
from .sweep import SweepSpec, slow_sweep

FIGURE_IDS = ("fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9", "table1")

_FLAGSHIP = dict(lattice=LatticeSpec(2, 2, 1.0, 2.0), sector=SectorSpec(2, 2))
_BROAD = CoolingParams(weakening=20.0, time_mode="pi")


def flagship_scan_config(noise: NoiseSpec | None = None) -> ExperimentConfig:
    """Full-spectrum controlled scan from a computational state."""
    return ExperimentConfig(
        **_FLAGSHIP,
        coupler_family="free",
        start_state="computational",
        cooling=_BROAD,
        noise=noise,
    )


def subspace_config(
    d_c: int,
    start_state: str,
    sweep_on: bool = True,
    noise: NoiseSpec | None = None,
    total_time: float = 20.0,
) -> ExperimentConfig:
    return ExperimentConfig(
        **_FLAGSHIP,
        coupler_family="free",
        d_c=d_c,
        start_state=start_state,
        cooling=_BROAD,
        sweep=SweepConfig(sweep_on, total_time, 5),
        cool_repeats=10,
        noise=noise,
    )


def thermal_config(n_steps: int = 40, seed: int = 0) -> ExperimentConfig:
    """Warm Gibbs target at beta |E0| = 1 via ledger passes."""
    return ExperimentConfig(
        **_FLAGSHIP,
        coupler_family="free",
        d_c=20,
        start_state="coulomb",
        cooling=_BROAD,
        control=ControlParams(rel_threshold=0.02),
        sweep=SweepConfig(True, 5.0, 5),
        thermal=ThermalConfig(beta_times_e0=1.0, n_steps=n_steps, d_c=20),
        rng_seed=seed,
    )


def _meta(config: ExperimentConfig, experiment: str) -> dict:
    return {
        "generator": GENERATOR,
        "experiment": experiment,
        "config_hash": config_hash(config),
    }


def run_fig2(out_dir: str) -> dict:
    """Controlled spectroscopy over the full spectrum: occupation and
    infidelity traces against the fridge gap, with exact gaps as markers."""
    config = flagship_scan_config()
    record = run_scan(config)
    model = build_model(config)
    gaps = [g for g in np.unique(np.round(model.spectrum.gaps_from_ground(), 9)) if g > 1e-9]
    meta = _meta(config, "fig2")
    csv_path = os.path.join(out_dir, "fig2_scan.csv")
    write_csv(csv_path, ["coupler_id", "omega", "fridge_occupation", "infidelity", "energy"], record.trace_rows, meta)
    write_json(os.path.join(out_dir, "fig2_ledger.json"), {"resonances": record.ledger, "true_gaps": list(map(float, gaps)), "final_fidelity": record.final_fidelity}, meta)
    plotting.render_scan(os.path.join(out_dir, "fig2.png"), record.trace_rows, gaps, "controlled cooling spectroscopy")
    return {"final_fidelity": record.final_fidelity, "csv": csv_path}


def _dc_study(out_dir: str, figure_id: str, start_state: str) -> dict:
    d_grid = (2, 4, 6, 8)
    rows = []
    for d_c in d_grid:
        finals = {}
        scans = {}
        for sweep_on in (True, False):
            rec = run_subspace_cooling(subspace_config(d_c, start_state, sweep_on))
            finals[sweep_on] = 1.0 - rec.stages["post_recool_fidelity"]
            scans[sweep_on] = 1.0 - rec.stages["post_scan_fidelity"]
        rows.append((d_c, scans[True], scans[False], finals[True], finals[False]))
    config = subspace_config(d_grid[0], start_state)
    model = build_model(config)
    start = initial_state(config, model)
    plateau = 1.0 - slow_sweep(
        start,
        SweepSpec(model.h_onsite if start_state == "coulomb" else model.h_free, model.h_target, 20.0, 5),
    ).fidelity_to_ground
    meta = _meta(config, figure_id)
    csv_path = os.path.join(out_dir, f"{figure_id}_dc_study.csv")
    write_csv(
        csv_path,
        ["d_c", "scan_infidelity_sweep", "scan_infidelity_nosweep", "final_infidelity_sweep", "final_infidelity_nosweep"],
        rows,
        meta | {"slow_sweep_infidelity": repr(plateau)},
    )
    plotting.render_dc_study(
        os.path.join(out_dir, f"{figure_id}.png"),
        [(r[0], r[1], r[2]) for r in rows],
        plateau,
        f"sweep benefit vs subspace size ({start_state} start)",
    )
    return {"rows": rows, "slow_sweep_infidelity": plateau, "csv": csv_path}


def run_fig3(out_dir: str) -> dict:
    """Sweep benefit per subspace size from the on-site (t = 0) ground."""
    return _dc_study(out_dir, "fig3", "coulomb")


def run_fig5(out_dir: str) -> dict:
    """Sweep benefit per subspace size from the free (U = 0) ground."""
    return _dc_study(out_dir, "fig5", "slater")


def run_fig6(out_dir: str) -> dict:
    """Thermalization trajectory toward the warm sector Gibbs state."""
    config = thermal_config()
    record = run_thermalization(config)
    meta = _meta(config, "fig6")
    csv_path = os.path.join(out_dir, "fig6_thermalization.csv")
    write_csv(csv_path, ["step", "fidelity_to_gibbs", "energy"], record.trace_rows, meta)
    write_json(
        os.path.join(out_dir, "fig6_summary.json"),
        {"stages": record.stages, "final_fidelity_to_gibbs": record.final_fidelity, "ledger": record.ledger},
        meta,
    )
    plotting.render_thermal(os.path.join(out_dir, "fig6.png"), record.trace_rows, None, "subspace thermalization")
    return {"final_fidelity": record.final_fidelity, "csv": csv_path}


def run_fig7(out_dir: str) -> dict:
    """Depolarizing-noise study: the sweep preamble keeps the pipeline above
    the no-sweep baseline."""
    noise = NoiseSpec(1e-4, "full_space")
    results = {}
    for sweep_on in (True, False):
        rec = run_subspace_cooling(subspace_config(8, "slater", sweep_on, noise=noise))
        results[sweep_on] = rec
    config = subspace_config(8, "slater", True, noise=noise)
    meta = _meta(config, "fig7")
    rows = [
        ("with_sweep", *[results[True].stages[k] for k in ("start_fidelity", "post_sweep_fidelity", "post_scan_fidelity", "post_recool_fidelity")]),
        ("no_sweep", *[results[False].stages[k] for k in ("start_fidelity", "post_sweep_fidelity", "post_scan_fidelity", "post_recool_fidelity")]),
    ]
    csv_path = os.path.join(out_dir, "fig7_noise_study.csv")
    write_csv(csv_path, ["variant", "start", "post_sweep", "post_scan", "post_recool"], rows, meta)
    plotting.render_noise_comparison(
        os.path.join(out_dir, "fig7.png"),
        results[True].stages,
        results[False].stages,
        "depolarizing noise 1e-4, full register",
    )
    return {
        "with_sweep": results[True].final_fidelity,
        "no_sweep": results[False].final_fidelity,
        "csv": csv_path,
    }


def run_fig8(out_dir: str) -> dict:
    """Full-spectrum scan under sector-conserving noise."""
    config = flagship_scan_config(noise=NoiseSpec(1e-5, "sector"))
    record = run_scan(config)
    model = build_model(config)
    gaps = [g for g in np.unique(np.round(model.spectrum.gaps_from_ground(), 9)) if g > 1e-9]
    meta = _meta(config, "fig8")
    csv_path = os.path.join(out_dir, "fig8_scan.csv")
    write_csv(csv_path, ["coupler_id", "omega", "fridge_occupation", "infidelity", "energy"], record.trace_rows, meta)
    plotting.render_scan(os.path.join(out_dir, "fig8.png"), record.trace_rows, gaps, "scan under sector noise")
    return {"final_fidelity": record.final_fidelity, "csv": csv_path}


def run_fig9(out_dir: str) -> dict:
    """Sorted Pauli amplitudes of every free coupler, plus each coupler's
    dominant string."""
    config = flagship_scan_config()
    model = build_model(config)
    couplers = free_couplers(model.bogoliubov, model.basis, ground=model.free_ground)
    meta = _meta(config, "fig9")
    rows = []
    dominant = []
    curves = {}
    for coupler in couplers:
        entries = decompose_coupler(coupler_fock_matrix(coupler))
        curves[coupler.label] = [e[1] for e in entries]
        for rank, (letters, coeff) in enumerate(entries):
            rows.append((coupler.label, rank, format_pauli_string(letters), coeff))
        dominant.append((coupler.label, format_pauli_string(entries[0][0]), entries[0][1]))
    csv_path = os.path.join(out_dir, "fig9_decomposition.csv")
    write_csv(csv_path, ["coupler_id", "rank", "pauli_string", "abs_coefficient"], rows, meta)
    write_csv(os.path.join(out_dir, "fig9_dominant_strings.csv"), ["coupler_id", "pauli_string", "abs_coefficient"], dominant, meta)
    plotting.render_decomposition(os.path.join(out_dir, "fig9.png"), curves, "free coupler Pauli amplitudes")
    spreads = {
        label: coeffs[0] / coeffs[-1] for label, coeffs in curves.items() if coeffs[-1] > 0
    }
    return {"csv": csv_path, "min_spread": min(spreads.values()), "curves": {k: len(v) for k, v in curves.items()}}


TABLE1_START_FIDELITY = 0.4509


def table1_start_state(model) -> np.ndarray:
    """Deterministic state with the reference ground-state fidelity: the
    ground component is rescaled to the target weight and the rest comes
    from the checkerboard computational state."""
    ground = model.spectrum.ground_state()
    raw = checkerboard_state(model)
    overlap = np.vdot(ground, raw)
    perp = raw - overlap * ground
    perp = perp / np.linalg.norm(perp)
    psi = np.sqrt(TABLE1_START_FIDELITY) * ground + np.sqrt(1.0 - TABLE1_START_FIDELITY) * perp
    return psi / np.linalg.norm(psi)


def run_table1(out_dir: str) -> dict:
    """Fidelity improvement of a scan run with each single free coupler."""
    config = flagship_scan_config()
    model = build_model(config)
    couplers = build_couplers(config, model)
    psi0 = table1_start_state(model)
    ground = model.spectrum.ground_state()
    base_fid = fidelity(ground, psi0)
    rows = []
    for coupler in couplers:
        rho, _, _ = scan(
            psi0,
            model.h_target,
            [coupler],
            config.control,
            config.cooling,
            spectrum=model.spectrum,
        )
        rows.append((coupler.label, fidelity(ground, rho) - base_fid, coupler.free_gap))
    meta = _meta(config, "table1") | {"start_fidelity": repr(base_fid)}
    csv_path = os.path.join(out_dir, "table1_coupler_improvements.csv")
    write_csv(csv_path, ["coupler_id", "fidelity_improvement", "free_gap"], rows, meta)
    plotting.render_improvements(
        os.path.join(out_dir, "table1.png"),
        [(r[0], r[1]) for r in rows],
        "single-coupler scan improvements",
    )
    return {"rows": rows, "start_fidelity": base_fid, "csv": csv_path}


_RUNNERS = {
    "fig2": run_fig2,
    "fig3": run_fig3,
    "fig5": run_fig5,
    "fig6": run_fig6,
    "fig7": run_fig7,
    "fig8": run_fig8,
    "fig9": run_fig9,
    "table1": run_table1,
}


def run_figure(figure_id: str, out_dir: str) -> dict:
    if figure_id not in _RUNNERS:
        raise ValueError(f"unknown figure id {figure_id!r}; known: {', '.join(FIGURE_IDS)}")
    os.makedirs(out_dir, exist_ok=True)
    return _RUNNERS[figure_id](out_dir)
