"""Matplotlib renderers for the experiment presets; every figure lands next
to its delimited data files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: str):
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def render_scan(path, rows, gaps, title: str):
    """Two panels against the fridge gap: infidelity of the evolving state
    and the fridge occupation, with the exact transition energies dashed."""
    by_coupler: dict[str, list] = {}
    for label, omega, occ, infid, energy in rows:
        by_coupler.setdefault(label, []).append((omega, occ, infid))
    fig, (ax_f, ax_e) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    shown = 0
    for label, pts in by_coupler.items():
        pts = np.array([(o, c, i) for o, c, i in pts])
        order = np.argsort(pts[:, 0])
        if shown == 0:
            ax_f.plot(pts[order, 0], pts[order, 2], color="tab:purple", lw=1.2)
        ax_e.plot(pts[order, 0], pts[order, 1], lw=0.8, alpha=0.7)
        shown += 1
    for g in gaps:
        ax_e.axvline(g, color="red", ls="--", lw=0.7, alpha=0.7)
    ax_f.set_ylabel("infidelity")
    ax_f.set_yscale("log")
    ax_e.set_ylabel("fridge occupation")
    ax_e.set_xlabel("fridge gap")
    ax_f.set_title(title)
    _save(fig, path)


def render_dc_study(path, rows, plateau: float | None, title: str):
    """Final infidelity against the cooled-subspace size, swept vs plain."""
    rows = sorted(rows)
    d = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(d, [r[1] for r in rows], "o-", label="with sweep")
    ax.semilogy(d, [r[2] for r in rows], "s-", label="no sweep")
    if plateau is not None:
        ax.axhline(plateau, color="gray", ls=":", label="slow-sweep floor")
    ax.set_xlabel("cooled subspace size")
    ax.set_ylabel("final infidelity")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def render_thermal(path, rows, target_line: float | None, title: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    steps = [r[0] for r in rows]
    ax.plot(steps, [r[1] for r in rows], "o-", label="fidelity to Gibbs")
    if target_line is not None:
        ax.axhline(target_line, color="gray", ls=":", label="reference")
    ax.set_xlabel("thermalization step")
    ax.set_ylabel("fidelity")
    ax.set_ylim(0, 1.02)
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def render_noise_comparison(path, stages_with, stages_without, title: str):
    labels = ["start", "after sweep", "after scan", "after recool"]
    keys = ["start_fidelity", "post_sweep_fidelity", "post_scan_fidelity", "post_recool_fidelity"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(labels, [stages_with[k] for k in keys], "o-", label="with sweep")
    ax.plot(labels, [stages_without[k] for k in keys], "s-", label="no sweep")
    ax.set_ylabel("fidelity to ground state")
    ax.set_ylim(0, 1.02)
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def render_decomposition(path, curves: dict[str, list[float]], title: str):
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, coeffs in curves.items():
        ax.semilogy(range(len(coeffs)), coeffs, lw=0.8, alpha=0.75)
    ax.set_xlabel("sorted component index")
    ax.set_ylabel("absolute amplitude")
    ax.set_title(title)
    _save(fig, path)


def render_improvements(path, rows, title: str):
    fig, ax = plt.subplots(figsize=(8, 4))
    labels = [r[0] for r in rows]
    ax.bar(range(len(rows)), [r[1] for r in rows])
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_ylabel("fidelity improvement")
    ax.set_title(title)
    _save(fig, path)
