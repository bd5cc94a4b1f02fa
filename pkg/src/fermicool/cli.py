"""Command-line harness: batch experiments, figure reproduction, oracles,
bound calculators, and coupler decomposition reports.

Exit codes: 0 success, 2 configuration error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .bounds import BoundInputs, d_c_window, t_spec_bound, t_sub_bound, t_sweep_bound
from .config import (
    ConfigError,
    ExperimentConfig,
    config_from_dict,
    config_hash,
    config_to_dict,
    load_config,
)
from .couplers import coupler_fock_matrix
from .figures import FIGURE_IDS, run_figure
from .lattice import SectorLeakageError
from .paulis import decompose_coupler, format_pauli_string
from .pipelines import (
    build_couplers,
    build_model,
    initial_state,
    run_oracle,
    run_scan,
    run_subspace_cooling,
    run_thermalization,
    sweep_start_hamiltonian,
)
from .qcore import fidelity
from .runio import GENERATOR, write_csv, write_json
from .spectroscopy import ScanAbortError
from .sweep import SweepSpec, pseudo_sweep, slow_sweep


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
    else:
        config = ExperimentConfig()
    data = config_to_dict(config)
    overrides = {
        ("lattice", "rows"): args.rows,
        ("lattice", "cols"): args.cols,
        ("lattice", "hopping_t"): args.hopping_t,
        ("lattice", "coulomb_u"): args.coulomb_u,
        ("sector", "n_up"): args.n_up,
        ("sector", "n_down"): args.n_down,
        ("coupler_family",): args.family,
        ("d_c",): args.d_c,
        ("start_state",): args.start,
        ("cooling", "weakening"): args.weakening,
        ("cooling", "time_mode"): args.time_mode,
        ("sweep", "total_time"): args.sweep_time,
        ("rng_seed",): args.seed,
        ("output_dir",): args.out,
    }
    for path, value in overrides.items():
        if value is None:
            continue
        node = data
        for key in path[:-1]:
            node = node[key]
        node[path[-1]] = value
    return config_from_dict(data)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--rows", type=int)
    parser.add_argument("--cols", type=int)
    parser.add_argument("--hopping-t", dest="hopping_t", type=float)
    parser.add_argument("--coulomb-u", dest="coulomb_u", type=float)
    parser.add_argument("--n-up", dest="n_up", type=int)
    parser.add_argument("--n-down", dest="n_down", type=int)
    parser.add_argument("--family", choices=("free", "ideal", "symmetry", "coulomb"))
    parser.add_argument("--d-c", dest="d_c", type=int)
    parser.add_argument("--start", choices=("computational", "slater", "coulomb"))
    parser.add_argument("--weakening", type=float)
    parser.add_argument("--time-mode", dest="time_mode", choices=("half_pi", "pi", "explicit"))
    parser.add_argument("--sweep-time", dest="sweep_time", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory")


def _emit_record(record, config: ExperimentConfig, name: str):
    out_dir = config.output_dir
    os.makedirs(out_dir, exist_ok=True)
    meta = {"generator": GENERATOR, "experiment": name, "config_hash": record.config_hash}
    write_json(os.path.join(out_dir, f"{name}_record.json"), record.to_dict(), meta)
    if record.trace_rows:
        columns = (
            ["coupler_id", "omega", "fridge_occupation", "infidelity", "energy"]
            if name != "thermalize"
            else ["step", "fidelity_to_gibbs", "energy"]
        )
        write_csv(os.path.join(out_dir, f"{name}_trace.csv"), columns, record.trace_rows, meta)
    print(f"{name}: final fidelity {record.final_fidelity:.6f} -> {out_dir}/")


def cmd_cool(args) -> int:
    config = _config_from_args(args)
    record = run_subspace_cooling(config)
    _emit_record(record, config, "cool")
    return 0


def cmd_scan(args) -> int:
    config = _config_from_args(args)
    record = run_scan(config)
    _emit_record(record, config, "scan")
    return 0


def cmd_thermalize(args) -> int:
    config = _config_from_args(args)
    if config.thermal is None:
        data = config_to_dict(config)
        data["thermal"] = {
            "beta_times_e0": args.beta_times_e0 if args.beta_times_e0 is not None else 1.0,
            "n_steps": args.n_steps,
            "d_c": config.d_c or 20,
        }
        if args.beta is not None:
            data["thermal"] = {"beta": args.beta, "n_steps": args.n_steps, "d_c": config.d_c or 20}
        config = config_from_dict(data)
    record = run_thermalization(config)
    _emit_record(record, config, "thermalize")
    return 0


def cmd_sweep(args) -> int:
    config = _config_from_args(args)
    model = build_model(config)
    start = initial_state(config, model)
    spec = SweepSpec(
        sweep_start_hamiltonian(config, model),
        model.h_target,
        config.sweep.total_time,
        config.sweep.n_trotter,
    )
    rho = pseudo_sweep(start, spec)
    ground = model.spectrum.ground_state()
    result = {
        "start_fidelity": fidelity(ground, start),
        "pseudo_sweep_fidelity": fidelity(ground, rho),
        "total_time": config.sweep.total_time,
        "n_trotter": config.sweep.n_trotter,
    }
    if args.slow:
        slow = slow_sweep(start, spec)
        result["slow_sweep_fidelity"] = slow.fidelity_to_ground
        result["slow_sweep_converged"] = slow.converged
        result["slow_sweep_total_time"] = slow.total_time
    os.makedirs(config.output_dir, exist_ok=True)
    write_json(
        os.path.join(config.output_dir, "sweep_report.json"),
        result,
        {"generator": GENERATOR, "experiment": "sweep", "config_hash": config_hash(config)},
    )
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def cmd_oracle(args) -> int:
    config = _config_from_args(args)
    bundle = run_oracle(config)
    os.makedirs(config.output_dir, exist_ok=True)
    path = os.path.join(config.output_dir, "oracle.json")
    write_json(path, bundle, {"generator": GENERATOR, "experiment": "oracle", "config_hash": config_hash(config)})
    print(f"oracle: dimension {bundle['dimension']}, ground energy {bundle['ground_energy']:.6f} -> {path}")
    return 0


def cmd_figure(args) -> int:
    out = args.out or "figures"
    result = run_figure(args.figure_id, out)
    printable = {k: v for k, v in result.items() if isinstance(v, (int, float, str))}
    print(json.dumps(printable, indent=2, sort_keys=True))
    return 0


def cmd_bounds(args) -> int:
    inputs = BoundInputs(
        k_const=args.k_const,
        alpha=args.alpha,
        gap=args.gap,
        gap_c=args.gap_c,
        d_c=args.d_c,
        avg_step=args.avg_step,
    )
    window = d_c_window(args.k_const, args.gap, args.gap_c)
    report = {
        "inputs": dataclasses.asdict(inputs),
        "t_sweep": t_sweep_bound(inputs),
        "t_subspace": t_sub_bound(inputs),
        "t_spectroscopy": t_spec_bound(inputs),
        "d_c_window": dataclasses.asdict(window),
        "d_c_admitted": window.admits(args.d_c),
        "note": "order-of-magnitude estimates; asymptotic constants set to 1",
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_json(os.path.join(args.out, "bounds.json"), report, {"generator": GENERATOR, "experiment": "bounds"})
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_decompose(args) -> int:
    config = _config_from_args(args)
    model = build_model(config)
    couplers = build_couplers(config, model)
    rows = []
    for coupler in couplers:
        if coupler.fock_factors is not None:
            entries = decompose_coupler(coupler_fock_matrix(coupler))
        else:
            entries = decompose_coupler(coupler.system_matrix)
        for rank, (letters, coeff) in enumerate(entries):
            if args.top and rank >= args.top:
                break
            rows.append((coupler.label, rank, format_pauli_string(letters), coeff))
    os.makedirs(config.output_dir, exist_ok=True)
    path = os.path.join(config.output_dir, "coupler_decomposition.csv")
    write_csv(
        path,
        ["coupler_id", "rank", "pauli_string", "abs_coefficient"],
        rows,
        {"generator": GENERATOR, "experiment": "decompose", "config_hash": config_hash(config)},
    )
    print(f"decompose: {len(rows)} rows -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermicool",
        description="Fridge-qubit cooling and thermalization experiments on Fermi-Hubbard lattices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cool", help="subspace cooling pipeline (sweep, scan, recool)")
    _add_common(p)
    p.set_defaults(fn=cmd_cool)

    p = sub.add_parser("scan", help="controlled spectroscopy scan")
    _add_common(p)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("thermalize", help="subspace thermalization toward a Gibbs state")
    _add_common(p)
    p.add_argument("--beta", type=float)
    p.add_argument("--beta-times-e0", dest="beta_times_e0", type=float)
    p.add_argument("--n-steps", dest="n_steps", type=int, default=40)
    p.set_defaults(fn=cmd_thermalize)

    p = sub.add_parser("sweep", help="pseudo-adiabatic sweep report")
    _add_common(p)
    p.add_argument("--slow", action="store_true", help="also converge a slow sweep")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("oracle", help="exact spectra and reference states")
    _add_common(p)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("figure", help="run a reproduction preset")
    p.add_argument("figure_id", choices=FIGURE_IDS)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_figure)

    p = sub.add_parser("bounds", help="runtime bound calculators")
    p.add_argument("--k-const", dest="k_const", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gap", type=float, required=True)
    p.add_argument("--gap-c", dest="gap_c", type=float, required=True)
    p.add_argument("--d-c", dest="d_c", type=int, required=True)
    p.add_argument("--avg-step", dest="avg_step", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("decompose", help="coupler Pauli decomposition report")
    _add_common(p)
    p.add_argument("--top", type=int, help="keep only the strongest entries per coupler")
    p.set_defaults(fn=cmd_decompose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ScanAbortError, SectorLeakageError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
