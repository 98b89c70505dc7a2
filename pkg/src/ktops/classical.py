"""Classical kicked-top map on the unit sphere with tangent-map Lyapunov
exponents, used to classify nonlinearity regimes and to pick chaotic-sea
initial conditions.

The stroboscope matches the quantum map: quarter turn about y first,
(x, y, z) -> (z, y, -x), then a twist about z by the angle k*z (the
counterclockwise sense follows from the Heisenberg evolution of J+ under
the Jz^2 kick).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "LyapunovEstimate",
    "RegimeStats",
    "sphere_point",
    "to_angles",
    "classical_step",
    "tangent_step",
    "lyapunov",
    "regime_scan",
    "chaotic_sea_points",
]


def sphere_point(theta: float, phi: float) -> np.ndarray:
    """Unit vector (sin t cos p, sin t sin p, cos t)."""
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def to_angles(p: np.ndarray) -> tuple[float, float]:
    """(theta, phi) of a sphere point, phi in [0, 2 pi)."""
    theta = math.acos(max(-1.0, min(1.0, float(p[2]))))
    phi = math.atan2(float(p[1]), float(p[0])) % (2.0 * math.pi)
    return theta, phi


def classical_step(p: np.ndarray, k: float) -> np.ndarray:
    """One kick period: quarter turn about y, twist about z by k*z,
    renormalized to counter floating-point drift."""
    x, y, z = float(p[0]), float(p[1]), float(p[2])
    x, z = z, -x
    a = k * z
    c, s = math.cos(a), math.sin(a)
    x, y = c * x - s * y, s * x + c * y
    r = math.sqrt(x * x + y * y + z * z)
    return np.array([x / r, y / r, z / r])


def _frame(p: np.ndarray) -> np.ndarray:
    """Orthonormal tangent-plane basis at p, as a 3x2 matrix."""
    axis = np.array([0.0, 0.0, 1.0]) if abs(p[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(axis, p)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(p, e1)
    return np.stack([e1, e2], axis=1)


_J_ROT = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])


def tangent_step(p: np.ndarray, k: float) -> tuple[np.ndarray, np.ndarray]:
    """(next point, 2x2 tangent map) expressed in local orthonormal frames.

    Keeping tangent vectors in the 2D tangent plane avoids spurious radial
    growth; the returned matrix has unit determinant (area preservation).
    """
    e0 = _frame(p)
    p1 = np.array([p[2], p[1], -p[0]])
    a = k * p1[2]
    c, s = math.cos(a), math.sin(a)
    x2 = c * p1[0] - s * p1[1]
    y2 = s * p1[0] + c * p1[1]
    p2 = np.array([x2, y2, p1[2]])
    p2 /= np.linalg.norm(p2)
    j_tw = np.array([[c, -s, -k * y2], [s, c, k * x2], [0.0, 0.0, 1.0]])
    m = _frame(p2).T @ (j_tw @ _J_ROT) @ e0
    return p2, m


@dataclass(frozen=True)
class LyapunovEstimate:
    lam: float  # nats per step
    steps_used: int
    transient_discarded: int


def lyapunov(
    p: np.ndarray,
    k: float,
    steps: int,
    transient: int = 100,
    renorm_interval: int = 1,
) -> LyapunovEstimate:
    """Largest Lyapunov exponent via the tangent map with periodic
    renormalization (Benettin scheme)."""
    if steps < 1000:
        raise ValueError(f"steps must be >= 1000 for a reported estimate, got {steps}")
    q = np.asarray(p, dtype=float)
    q = q / np.linalg.norm(q)
    for _ in range(transient):
        q = classical_step(q, k)
    v = np.array([1.0, 0.0])
    acc = 0.0
    for t in range(1, steps + 1):
        q, m = tangent_step(q, k)
        v = m @ v
        if t % renorm_interval == 0:
            s = np.linalg.norm(v)
            acc += math.log(s)
            v /= s
    if steps % renorm_interval:
        acc += math.log(np.linalg.norm(v))
    return LyapunovEstimate(acc / steps, steps, transient)


@dataclass(frozen=True)
class RegimeStats:
    k: float
    lambda_mean: float
    lambda_max: float
    samples: int


def _random_points(samples: int, rng: np.random.Generator) -> list[np.ndarray]:
    z = rng.uniform(-1.0, 1.0, samples)
    ph = rng.uniform(0.0, 2.0 * np.pi, samples)
    r = np.sqrt(1.0 - z**2)
    return [np.array([r[i] * np.cos(ph[i]), r[i] * np.sin(ph[i]), z[i]]) for i in range(samples)]


def regime_scan(
    k_grid: Sequence[float], samples: int, steps: int = 1000, seed: int = 0
) -> list[RegimeStats]:
    """Mean/max Lyapunov exponent over seeded random sphere points per k.

    The same sample points are reused across the grid so the k-trend is not
    confounded by sampling noise.
    """
    if not len(k_grid):
        raise ValueError("k_grid must be nonempty")
    pts = _random_points(samples, np.random.default_rng(seed))
    out = []
    for k in k_grid:
        lams = [lyapunov(p, k, steps).lam for p in pts]
        out.append(RegimeStats(float(k), float(np.mean(lams)), float(np.max(lams)), samples))
    return out


def chaotic_sea_points(
    k: float,
    count: int,
    seed: int = 0,
    threshold: float = 0.1,
    steps: int = 1000,
    max_tries: int | None = None,
) -> list[np.ndarray]:
    """Seeded random sphere points whose Lyapunov exponent at k exceeds
    `threshold` (the operational chaotic-sea test)."""
    rng = np.random.default_rng(seed)
    limit = 200 * count if max_tries is None else max_tries
    out: list[np.ndarray] = []
    for _ in range(limit):
        p = _random_points(1, rng)[0]
        if lyapunov(p, k, steps).lam > threshold:
            out.append(p)
            if len(out) == count:
                return out
    raise RuntimeError(
        f"found only {len(out)}/{count} chaotic-sea points at k={k} "
        f"after {limit} tries (threshold {threshold})"
    )
