"""Experiment configuration: strict JSON schema, defaults, content hashing.

Configs are plain nested dataclasses mirroring the library parameter types;
loading rejects unknown keys so typos fail loudly, and the canonical JSON
form is hashed so run records can prove which configuration produced them.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from .cooling import CoolingParams
from .lattice import LatticeSpec, SectorSpec
from .noise import NoiseSpec
from .spectroscopy import ControlParams


class ConfigError(ValueError):
    """Invalid or unknown configuration content (CLI exit code 2)."""


@dataclass(frozen=True)
class SweepConfig:
    enabled: bool = True
    total_time: float = 20.0
    n_trotter: int = 5

    def __post_init__(self):
        if self.total_time <= 0 or self.n_trotter < 1:
            raise ConfigError("sweep needs positive total_time and n_trotter >= 1")


@dataclass(frozen=True)
class ThermalConfig:
    """Target temperature, given either as beta or as beta times |ground
    energy| (resolved against the oracle at run time)."""

    beta: float | None = None
    beta_times_e0: float | None = None
    n_steps: int = 40
    d_c: int = 5
    mode: str = "passes"

    def __post_init__(self):
        if (self.beta is None) == (self.beta_times_e0 is None):
            raise ConfigError("set exactly one of beta, beta_times_e0")
        if self.beta is not None and self.beta < 0:
            raise ConfigError("beta must be non-negative")
        if self.n_steps < 1 or self.d_c < 2:
            raise ConfigError("n_steps >= 1 and d_c >= 2 required")
        if self.mode not in ("passes", "stochastic"):
            raise ConfigError(f"unknown thermalization mode {self.mode!r}")

    def resolve_beta(self, ground_energy: float) -> float:
        if self.beta is not None:
            return self.beta
        return self.beta_times_e0 / abs(ground_energy)


START_STATES = ("computational", "slater", "coulomb")
COUPLER_FAMILIES = ("free", "ideal", "symmetry", "coulomb")


@dataclass(frozen=True)
class ExperimentConfig:
    lattice: LatticeSpec = field(default_factory=lambda: LatticeSpec(2, 2, 1.0, 2.0))
    sector: SectorSpec = field(default_factory=lambda: SectorSpec(2, 2))
    coupler_family: str = "free"
    d_c: int | None = None
    start_state: str = "computational"
    cooling: CoolingParams = field(default_factory=CoolingParams)
    control: ControlParams = field(default_factory=ControlParams)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    thermal: ThermalConfig | None = None
    noise: NoiseSpec | None = None
    cool_repeats: int = 10
    rng_seed: int = 0
    output_dir: str = "runs"

    def __post_init__(self):
        if self.coupler_family not in COUPLER_FAMILIES:
            raise ConfigError(f"unknown coupler family {self.coupler_family!r}")
        if self.start_state not in START_STATES:
            raise ConfigError(f"unknown start state {self.start_state!r}")
        if self.d_c is not None and self.d_c < 2:
            raise ConfigError("d_c must be at least 2")
        if self.cool_repeats < 1:
            raise ConfigError("cool_repeats must be at least 1")


_SECTION_TYPES = {
    "lattice": LatticeSpec,
    "sector": SectorSpec,
    "cooling": CoolingParams,
    "control": ControlParams,
    "sweep": SweepConfig,
    "thermal": ThermalConfig,
    "noise": NoiseSpec,
}

_OPTIONAL_SECTIONS = ("thermal", "noise")


def _build_section(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    kwargs = {}
    for key, value in data.items():
        if value is not None and key in ("beta", "beta_times_e0") and value == "inf":
            value = float("inf")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a validated config; unknown keys anywhere are rejected."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}")
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in _SECTION_TYPES:
            if value is None:
                if key not in _OPTIONAL_SECTIONS:
                    raise ConfigError(f"{key}: section cannot be null")
                kwargs[key] = None
            else:
                kwargs[key] = _build_section(_SECTION_TYPES[key], value, key)
        else:
            kwargs[key] = value
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def _jsonable(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, float) and value == float("inf"):
        return "inf"
    return value


def config_to_dict(config: ExperimentConfig) -> dict:
    return _jsonable(config)


def canonical_json(obj) -> str:
    """Deterministic JSON rendering (sorted keys, minimal separators)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_json(config_to_dict(config)).encode()).hexdigest()[:16]
