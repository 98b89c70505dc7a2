"""Angular-momentum operators and spin coherent states in the |j,m> basis.

Conventions shared by every module (hbar = 1 throughout):

* basis ordered by m ascending, m = -j ... +j;
* coherent state |theta,phi> = exp(i theta (Jx sin phi - Jy cos phi)) |j,j>,
  i.e. the highest-weight state rotated by theta about the axis
  (-sin phi, cos phi, 0), so that <J> points along
  (sin theta cos phi, sin theta sin phi, cos theta).

The global phase of the coherent state is fixed by the rotation above; it
drops out of every quantity computed downstream, but the amplitudes returned
here match the rotation operator exactly, not just up to phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import NumericalInvariantError

__all__ = [
    "SpinQuantum",
    "SpinOperators",
    "as_spin",
    "m_values",
    "build_operators",
    "coherent_state",
    "expectation",
]


@dataclass(frozen=True)
class SpinQuantum:
    """Spin magnitude j; 2j must be a nonnegative integer."""

    j: float

    def __post_init__(self) -> None:
        twoj = 2.0 * self.j
        if not np.isfinite(twoj) or twoj < 0 or abs(twoj - round(twoj)) > 1e-12:
            raise ValueError(f"2j must be a nonnegative integer, got j={self.j!r}")
        object.__setattr__(self, "j", round(twoj) / 2.0)

    @property
    def dim(self) -> int:
        return int(round(2.0 * self.j)) + 1


def as_spin(j) -> SpinQuantum:
    """Coerce a plain number to SpinQuantum (validating 2j integrality)."""
    return j if isinstance(j, SpinQuantum) else SpinQuantum(float(j))


def m_values(j) -> np.ndarray:
    """Magnetic quantum numbers m = -j ... +j, ascending."""
    sq = as_spin(j)
    return np.arange(sq.dim, dtype=float) - sq.j


@dataclass(frozen=True)
class SpinOperators:
    """Dense Hermitian jx, jy, jz for one spin; jz diagonal with m ascending."""

    spin: SpinQuantum
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray


def build_operators(j) -> SpinOperators:
    """Build jx, jy, jz from the ladder operators.

    <j,m+1|J+|j,m> = sqrt(j(j+1) - m(m+1)), jx = (J+ + J-)/2,
    jy = (J+ - J-)/(2i), jz = diag(m).
    """
    sq = as_spin(j)
    m = m_values(sq)
    jz = np.diag(m.astype(complex))
    c = np.sqrt(sq.j * (sq.j + 1.0) - m[:-1] * (m[:-1] + 1.0))
    jp = np.zeros((sq.dim, sq.dim), dtype=complex)
    jp[np.arange(1, sq.dim), np.arange(sq.dim - 1)] = c
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    return SpinOperators(sq, jx, jy, jz)


def _coherent_radial(sq: SpinQuantum, theta: float) -> np.ndarray:
    """|<j,m|theta,phi>| for m ascending, evaluated in log space.

    The magnitude is sqrt(C(2j, j+m)) cos(theta/2)^(j+m) sin(theta/2)^(j-m);
    logs keep binomials of large 2j inside float range.
    """
    n_up = np.arange(sq.dim, dtype=float)  # j + m
    n_dn = 2.0 * sq.j - n_up  # j - m
    half_log_binom = 0.5 * (
        gammaln(2.0 * sq.j + 1.0) - gammaln(n_up + 1.0) - gammaln(n_dn + 1.0)
    )
    ch = np.cos(theta / 2.0)
    sh = np.sin(theta / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = (
            half_log_binom
            + np.where(n_up > 0, n_up * np.log(ch), 0.0)
            + np.where(n_dn > 0, n_dn * np.log(sh), 0.0)
        )
    return np.exp(log_mag)


def coherent_phases(sq: SpinQuantum, phi: float) -> np.ndarray:
    """Azimuthal phase factors exp(i (j-m) phi) for m ascending."""
    n_dn = (sq.dim - 1) - np.arange(sq.dim, dtype=float)
    return np.exp(1j * n_dn * phi)


def coherent_state(j, theta: float, phi: float) -> np.ndarray:
    """Spin coherent state |theta,phi> as a unit-norm complex vector.

    Closed-form amplitudes of the rotated highest-weight state:
    <j,m|theta,phi> = sqrt(C(2j, j+m)) cos(theta/2)^(j+m)
                      (sin(theta/2) e^(i phi))^(j-m).
    """
    sq = as_spin(j)
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    amp = _coherent_radial(sq, theta) * coherent_phases(sq, phi)
    return amp / np.linalg.norm(amp)


def expectation(op: np.ndarray, state: np.ndarray) -> float:
    """<state|op|state> for Hermitian op; the imaginary residue is checked
    against 1e-10 (relative to the real part) and then discarded."""
    state = np.asarray(state)
    op = np.asarray(op)
    if op.shape != (state.size, state.size):
        raise ValueError(
            f"operator shape {op.shape} does not match state dimension {state.size}"
        )
    val = np.vdot(state, op @ state)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NumericalInvariantError(
            f"expectation has imaginary residue {val.imag:.3e}; operator not Hermitian?"
        )
    return float(val.real)
