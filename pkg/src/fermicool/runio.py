"""Deterministic run artifacts: seeded counter-based RNG streams and
CSV/JSON writers with provenance headers."""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

GENERATOR = "fermicool 0.1.0"


def rng_for(seed: int, step: int, purpose: str) -> np.random.Generator:
    """Counter-based generator keyed by (seed, step, purpose).

    Independent streams never overlap and do not depend on draw order
    elsewhere, so parallel trajectories stay reproducible.
    """
    digest = hashlib.sha256(f"{seed}:{step}:{purpose}".encode()).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _format_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows, meta: dict | None = None):
    """CSV with '# key: value' provenance header lines."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}: {value}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(v) for v in row) + "\n")


def write_json(path, obj, meta: dict | None = None):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    payload = {"meta": meta or {}, "data": obj}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_csv_rows(path):
    """Rows of a headered CSV back as lists of strings (meta lines skipped)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#") or not line:
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    return header, rows
