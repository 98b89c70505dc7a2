"""One-period maps for single and coupled kicked tops.

One period = free pi/2 rotation about y, then all delta-kick phases (the
nonlinear twists and the coupling, which commute because all of them are
diagonal in the Jz (x) Jz basis). States are sampled immediately after the
full period map, i.e. post-kick.

The coupled unitary is never materialized. A two-top state lives on a
(dim1, dim2) complex amplitude grid A with A[m1, m2] indexed by ascending
magnetic numbers; one period applies the single-top unitaries to rows and
columns and the coupling phase table elementwise, keeping memory O(dim^2)
and per-step work O(dim^3) instead of O(dim^4).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import NumericalInvariantError
from .spin import SpinQuantum, as_spin, build_operators, m_values

__all__ = [
    "SingleTopFloquet",
    "StructuredFloquet",
    "build_single_top",
    "build_coupled",
    "product_state",
    "step",
    "evolve",
]

# Per-step drift guard; construction keeps the true drift near 1e-15/step.
NORM_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class SingleTopFloquet:
    """One-period unitary u = exp(-i k Jz^2/(2j)) exp(-i (pi/2) Jy)."""

    spin: SpinQuantum
    k: float
    u: np.ndarray


@dataclass(frozen=True)
class StructuredFloquet:
    """Coupled one-period map: two single-top unitaries plus the diagonal
    coupling phase table exp(-i epsilon m1 m2 / j1)."""

    top1: SingleTopFloquet
    top2: SingleTopFloquet
    epsilon: float
    coupling_phase: np.ndarray


@lru_cache(maxsize=None)
def _half_turn_y(twoj: int) -> np.ndarray:
    """exp(-i (pi/2) Jy), via Hermitian eigendecomposition, cached per j.

    Reused across k values; the k-dependent kick is a cheap diagonal factor.
    """
    ops = build_operators(twoj / 2.0)
    evals, evecs = np.linalg.eigh(ops.jy)
    rot = (evecs * np.exp(-0.5j * np.pi * evals)) @ evecs.conj().T
    rot.flags.writeable = False
    return rot


def build_single_top(j, k: float) -> SingleTopFloquet:
    """Single-top one-period map for nonlinearity k.

    The Jz^2 kick is applied as elementwise phases exp(-i k m^2/(2j)) on the
    rows of the cached pi/2 rotation about y.
    """
    sq = as_spin(j)
    rot = _half_turn_y(int(round(2.0 * sq.j)))
    if sq.j > 0:
        m = m_values(sq)
        kick = np.exp(-1j * k * m**2 / (2.0 * sq.j))
    else:
        kick = np.ones(1, dtype=complex)
    return SingleTopFloquet(sq, float(k), kick[:, None] * rot)


def build_coupled(j, k1: float, k2: float, epsilon: float, j2=None) -> StructuredFloquet:
    """Coupled pair sharing spin j (a second spin may be passed for the
    second top, but the coupling table always divides by the first top's j)."""
    sq1 = as_spin(j)
    sq2 = sq1 if j2 is None else as_spin(j2)
    top1 = build_single_top(sq1, k1)
    top2 = build_single_top(sq2, k2)
    if sq1.j > 0:
        phase = np.exp(-1j * epsilon * np.outer(m_values(sq1), m_values(sq2)) / sq1.j)
    else:
        phase = np.ones((1, sq2.dim), dtype=complex)
    return StructuredFloquet(top1, top2, float(epsilon), phase)


def product_state(state1: np.ndarray, state2: np.ndarray) -> np.ndarray:
    """Amplitude grid of |state1> (x) |state2>."""
    return np.outer(state1, state2)


def step(state: np.ndarray, f: StructuredFloquet) -> np.ndarray:
    """Advance the amplitude grid by one kick period.

    A <- u1 . A . u2^T (per-subsystem rotation+kick), then A <- phase o A
    (elementwise coupling kick). Norm is preserved to machine precision.
    """
    if state.shape != f.coupling_phase.shape:
        raise ValueError(
            f"state grid {state.shape} does not match coupled map {f.coupling_phase.shape}"
        )
    a = f.top1.u @ state @ f.top2.u.T
    a *= f.coupling_phase
    return a


def evolve(
    initial: np.ndarray,
    f: StructuredFloquet,
    steps: int,
    observer: Callable[[int, np.ndarray], None] | None = None,
) -> np.ndarray:
    """Apply `step` exactly `steps` times, monitoring norm drift per step.

    The observer receives (t, state) after each application, t = 1..steps;
    the passed state is a fresh array and may be retained by the observer.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    state = initial
    for t in range(1, steps + 1):
        state = step(state, f)
        drift = abs(np.linalg.norm(state) - 1.0)
        if drift > NORM_DRIFT_TOL:
            raise NumericalInvariantError(
                f"norm drift {drift:.3e} at step {t} exceeds {NORM_DRIFT_TOL:.0e}"
            )
        if observer is not None:
            observer(t, state)
    return state
