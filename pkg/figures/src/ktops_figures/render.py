"""Render the four standard figures from experiment CSV files.

Rendering is read-only over its inputs and deterministic: timestamps are
suppressed (SVG date metadata stripped; PNG carries none), so rerunning a
spec reproduces the image byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm

from .io import SchemaError, detect_kind, load_columns

__all__ = ["FigureSpec", "render"]

KINDS = ("evolution", "husimi", "decay", "rates")

# marker sequence for per-reference-time / per-initial-condition series
MARKERS = ("+", "x", "*", "s", "o", "d", "v", "^")


@dataclass(frozen=True)
class FigureSpec:
    kind: str  # evolution | husimi | decay | rates
    inputs: tuple[str, ...]
    output: str
    log_y: bool | None = None  # None = the kind's default scale


def _save(fig, output: str) -> None:
    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if out.suffix == ".svg" else None
    fig.savefig(out, dpi=150, metadata=metadata)
    plt.close(fig)


def _render_evolution(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for path in spec.inputs:
        kind = detect_kind(path, ("entropy", "pt_compare"))
        cols = load_columns(path, kind)
        if kind == "entropy":
            ax.plot(cols["t"], cols["s_lin_scaled"], lw=1.2, label=Path(path).stem)
        else:
            ax.plot(
                cols["t"], cols["s_lin_exact_scaled"], lw=1.2,
                label=f"{Path(path).stem} exact",
            )
            ax.plot(
                cols["t"], cols["s_lin_pt_scaled"], lw=1.2, ls="--",
                label=f"{Path(path).stem} 2nd-order",
            )
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("t (kick periods)")
    ax.set_ylabel(r"$S_{\mathrm{lin}} / S_0$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _render_husimi(spec: FigureSpec):
    if len(spec.inputs) != 1:
        raise SchemaError("husimi takes exactly one input CSV")
    cols = load_columns(spec.inputs[0], "husimi")
    theta = np.unique(cols["theta"])
    phi = np.unique(cols["phi"])
    if theta.size * phi.size != cols["q"].size:
        raise SchemaError(
            f"{spec.inputs[0]}: rows do not form a full theta x phi grid "
            f"({theta.size} x {phi.size} != {cols['q'].size})"
        )
    # rows are written theta-major
    q = cols["q"].reshape(theta.size, phi.size)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.8), sharey=True)
    ax1.contour(phi, theta, q, levels=10, linewidths=0.8)
    ax1.set_title("contour (linear)")
    floor = max(q.max() * 1e-8, np.finfo(float).tiny)
    mesh = ax2.pcolormesh(
        phi, theta, np.clip(q, floor, None),
        norm=LogNorm(vmin=floor, vmax=q.max()), shading="nearest",
    )
    fig.colorbar(mesh, ax=ax2)
    ax2.set_title("density (log)")
    for ax in (ax1, ax2):
        ax.set_xlabel(r"$\phi$")
    ax1.set_ylabel(r"$\theta$")
    ax1.invert_yaxis()
    fig.tight_layout()
    return fig


def _render_decay(spec: FigureSpec):
    if len(spec.inputs) != 1:
        raise SchemaError("decay takes exactly one input CSV")
    cols = load_columns(spec.inputs[0], "correlation")
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for i, t_ref in enumerate(np.unique(cols["t_ref"])):
        mask = cols["t_ref"] == t_ref
        ax.plot(
            cols["tau"][mask], cols["abs_d"][mask],
            marker=MARKERS[i % len(MARKERS)], ms=5, lw=0.7,
            label=f"t = {int(t_ref)}",
        )
    if spec.log_y is None or spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$|D(t+\tau,\, t)|$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _render_rates(spec: FigureSpec):
    if len(spec.inputs) != 1:
        raise SchemaError("rates takes exactly one input CSV")
    cols = load_columns(spec.inputs[0], "rates")
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for i, init_id in enumerate(np.unique(cols["init_id"])):
        mask = cols["init_id"] == init_id
        ax.plot(
            cols["k"][mask], cols["gamma_scaled"][mask],
            marker=MARKERS[i % len(MARKERS)], ms=6, ls="none",
            label=f"init {int(init_id)}",
        )
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\Gamma$ (slope of $S_{\mathrm{lin}}/S_0$)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


_RENDERERS = {
    "evolution": _render_evolution,
    "husimi": _render_husimi,
    "decay": _render_decay,
    "rates": _render_rates,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the output path."""
    if spec.kind not in _RENDERERS:
        raise SchemaError(f"unknown figure kind {spec.kind!r} (choose from {KINDS})")
    if not spec.inputs:
        raise SchemaError("at least one input CSV is required")
    fig = _RENDERERS[spec.kind](spec)
    _save(fig, spec.output)
    return Path(spec.output)
