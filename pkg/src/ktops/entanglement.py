"""Reduced density matrices, entanglement entropies, and Husimi distributions.

Entropies use natural logs, so s_lin <= s_vn holds eigenvalue by eigenvalue
and the maximally mixed value is ln(dim).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalInvariantError
from .spin import SpinQuantum, _coherent_radial, coherent_phases

__all__ = [
    "EntropySeries",
    "HusimiGrid",
    "reduce_first",
    "reduce_second",
    "von_neumann",
    "linear_entropy",
    "entropies_from_state",
    "sphere_grid",
    "husimi",
]

# Eigenvalues below this flag a corrupted density matrix rather than roundoff.
EIG_FLOOR = -1e-8


def reduce_first(state: np.ndarray) -> np.ndarray:
    """rho of the first subsystem: A A^dagger for the amplitude grid A."""
    a = np.asarray(state)
    return a @ a.conj().T


def reduce_second(state: np.ndarray) -> np.ndarray:
    """rho of the second subsystem: A^T A^* for the amplitude grid A."""
    a = np.asarray(state)
    return a.T @ a.conj()


def _clamped_spectrum(rho: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < EIG_FLOOR:
        raise NumericalInvariantError(
            f"corrupted density matrix: eigenvalue {lam.min():.3e} below {EIG_FLOOR:.0e}"
        )
    return np.clip(lam, 0.0, 1.0)


def von_neumann(rho: np.ndarray) -> float:
    """-Tr(rho ln rho) in nats, with eigenvalues clamped to [0,1] and
    0 ln 0 = 0."""
    lam = _clamped_spectrum(np.asarray(rho))
    nz = lam[lam > 0.0]
    return float(-(nz * np.log(nz)).sum())


def linear_entropy(rho: np.ndarray) -> float:
    """1 - Tr(rho^2), computed as 1 - sum |rho_mm'|^2."""
    r = np.asarray(rho)
    return float(1.0 - (np.abs(r) ** 2).sum())


def entropies_from_state(state: np.ndarray) -> tuple[float, float]:
    """(s_vn, s_lin) of the first subsystem from the Schmidt spectrum.

    s_lin is evaluated as the all-positive cross-term sum
    2 sum_{i<k} lam_i lam_k, which resolves near-product states down to
    ~1e-32 where the subtraction 1 - Tr(rho^2) would round to the 1e-16
    floor.
    """
    sv = np.linalg.svd(np.asarray(state), compute_uv=False)
    lam = sv * sv
    lam = lam / lam.sum()
    tails = np.concatenate([np.cumsum(lam[::-1])[-2::-1], [0.0]])
    s_lin = float(2.0 * (lam * tails).sum())
    nz = lam[lam > 0.0]
    s_vn = float(-(nz * np.log(nz)).sum())
    return s_vn, s_lin


@dataclass(frozen=True)
class EntropySeries:
    """Per-step subsystem entropies of one coupled run (t = 0 included).

    s_vn is None when the producing run tracked only the linear entropy.
    s0 = 2 epsilon^2 j^2 is the scaling of the producing run (0 at eps=0).
    """

    t: np.ndarray
    s_lin: np.ndarray
    s_vn: np.ndarray | None
    dim1: int
    s0: float


def sphere_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre-in-cos(theta) x uniform-in-phi sphere grid.

    Returns (theta ascending, Gauss-Legendre weights, phi). The quadrature
    sum_i w_i (2 pi / n_phi) f(theta_i, phi_k) integrates spherical
    harmonics exactly up to degree min(2 n_theta - 1, n_phi - 1).
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)[::-1].copy()
    weights = w[::-1].copy()
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    return theta, weights, phi


@dataclass(frozen=True)
class HusimiGrid:
    """q(theta, phi) = <theta phi| rho |theta phi> on a sphere grid."""

    spin: SpinQuantum
    theta: np.ndarray
    phi: np.ndarray
    q: np.ndarray
    theta_weights: np.ndarray

    def quadrature(self, values: np.ndarray) -> float:
        """Integrate a (n_theta, n_phi) sampled function over the sphere."""
        dphi = 2.0 * np.pi / len(self.phi)
        return float((self.theta_weights[:, None] * values).sum() * dphi)

    def normalization(self) -> float:
        """(2j+1)/(4 pi) * integral of q; equals 1 for an adequate grid."""
        return (2.0 * self.spin.j + 1.0) / (4.0 * np.pi) * self.quadrature(self.q)

    def area_fraction_above(self, level: float) -> float:
        """Fraction of the sphere's area where q exceeds `level`."""
        return self.quadrature((self.q > level).astype(float)) / (4.0 * np.pi)


def husimi(rho: np.ndarray, n_theta: int, n_phi: int) -> HusimiGrid:
    """Husimi function of a subsystem density matrix.

    Coherent-state amplitudes separate into a radial profile in theta and
    azimuthal phases in phi, so each theta row is evaluated with one dense
    matrix product; no per-node matrix exponentials.

    The grid must resolve the state for the normalization invariant to hold:
    n_theta >= j + 1 and n_phi >= 2j + 2 make the quadrature exact.
    """
    rho = np.asarray(rho)
    if n_theta < 2 or n_phi < 2:
        raise ValueError("husimi grid sizes must be >= 2")
    dim = rho.shape[0]
    sq = SpinQuantum((dim - 1) / 2.0)
    theta, weights, phi = sphere_grid(n_theta, n_phi)
    phases = np.stack([coherent_phases(sq, p) for p in phi])
    q = np.empty((n_theta, n_phi))
    for i, th in enumerate(theta):
        c = phases * _coherent_radial(sq, th)[None, :]
        t = c.conj() @ rho
        q[i] = (t * c).sum(axis=1).real
    if q.min() < -1e-10:
        raise NumericalInvariantError(
            f"Husimi value {q.min():.3e} below zero; density matrix not PSD?"
        )
    q = np.clip(q, 0.0, None)
    grid = HusimiGrid(sq, theta, phi, q, weights)
    norm = grid.normalization()
    if abs(norm - 1.0) > 1e-6:
        raise NumericalInvariantError(
            f"Husimi quadrature normalization {norm!r} off by more than 1e-6; "
            f"grid too coarse for j={sq.j} (need n_theta >= j+1, n_phi >= 2j+2)"
        )
    return grid
