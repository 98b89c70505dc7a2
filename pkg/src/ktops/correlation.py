"""Heisenberg Jz correlation kernels of the uncoupled tops and the
second-order estimates built on them: the perturbative linear entropy,
its stationary production rate, exponential-decay fits, and the coth
saturation law.

Kernel convention: c(m, n) = j^-2 (<Jz^m Jz^n> - <Jz^m><Jz^n>), where
Jz^n = (U^dag)^n Jz U^n under the single-top one-period map U and the
expectation is taken in the top's own initial state. Kernels are stored
for 0 <= m, n <= T; index 0 is kept for diagnostics, every physical sum
starts at 1 (the first kick).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entanglement import EntropySeries
from .errors import DecayNotResolvableError, FitRegionError, NumericalInvariantError
from .floquet import build_single_top
from .spin import as_spin, m_values

__all__ = [
    "CorrelationTable",
    "PtPrediction",
    "RateFit",
    "DecayFit",
    "WindowPolicy",
    "entropy_scale",
    "heisenberg_correlation",
    "d_kernel",
    "pt_entropy",
    "pt_entropy_series",
    "pt_rate",
    "fit_linear_region",
    "fit_exponential_decay",
    "coth_rate",
    "equilibration_time",
]


def entropy_scale(epsilon: float, j) -> float:
    """The entropy scaling 2 epsilon^2 j^2."""
    sq = as_spin(j)
    return 2.0 * epsilon**2 * sq.j**2


def heisenberg_correlation(j, k: float, psi0: np.ndarray, T: int) -> np.ndarray:
    """Normalized Jz covariance kernel c(m, n) over the window 0..T.

    Uses the vector recurrence phi_n = U^n psi0, w_n = Jz phi_n,
    <Jz^m Jz^n> = <w_m| U^(m-n) |w_n> for m >= n (conjugate symmetry below
    the diagonal), which costs O(T^2) single-top matrix-vector products
    instead of O(T) dense operator conjugations.
    """
    if T < 1:
        raise ValueError(f"window T must be >= 1, got {T}")
    sq = as_spin(j)
    u = build_single_top(sq, k).u
    m = m_values(sq)

    phi = np.asarray(psi0, dtype=complex)
    w = np.empty((T + 1, sq.dim), dtype=complex)
    e = np.empty(T + 1)
    for n in range(T + 1):
        w[n] = m * phi
        e[n] = np.vdot(phi, w[n]).real
        if n < T:
            phi = u @ phi

    g = np.empty((T + 1, T + 1), dtype=complex)
    for n in range(T + 1):
        v = w[n].copy()
        g[n, n] = np.vdot(w[n], v)
        for mm in range(n + 1, T + 1):
            v = u @ v
            g[mm, n] = np.vdot(w[mm], v)
    iu = np.triu_indices(T + 1, k=1)
    g[iu] = np.conj(g.T[iu])

    return (g - np.outer(e, e)) / sq.j**2


@dataclass(frozen=True)
class CorrelationTable:
    """Kernels c1, c2 and their elementwise product d over one window."""

    c1: np.ndarray
    c2: np.ndarray
    d: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.d is None:
            object.__setattr__(self, "d", self.c1 * self.c2)

    @property
    def window(self) -> int:
        return self.c1.shape[0] - 1


def d_kernel(c1: np.ndarray, c2: np.ndarray) -> CorrelationTable:
    """Combine two single-top kernels into d(m, n) = c1(m, n) c2(m, n)."""
    if c1.shape != c2.shape:
        raise ValueError(f"kernel windows differ: {c1.shape} vs {c2.shape}")
    return CorrelationTable(c1, c2)


def _checked_real(total: complex) -> float:
    if abs(total.imag) > 1e-10 * max(1.0, abs(total.real)):
        raise NumericalInvariantError(
            f"kernel sum has imaginary residue {total.imag:.3e}"
        )
    return float(total.real)


@dataclass(frozen=True)
class PtPrediction:
    """Perturbative linear entropy series s0 * sum_{m,n=1..t} d(m,n)."""

    s0: float
    series: np.ndarray  # indexed by t = 0..T


def pt_entropy(table: CorrelationTable, epsilon: float, j, t: int) -> float:
    """Perturbative linear entropy at step t."""
    if t > table.window:
        raise ValueError(f"t={t} exceeds kernel window {table.window}")
    if t < 1:
        return 0.0
    total = _checked_real(table.d[1 : t + 1, 1 : t + 1].sum())
    val = entropy_scale(epsilon, j) * total
    if val < -1e-12:
        raise NumericalInvariantError(
            f"perturbative entropy {val:.3e} below -1e-12; kernel not PSD?"
        )
    return val


def pt_entropy_series(
    table: CorrelationTable, epsilon: float, j, t_max: int | None = None
) -> PtPrediction:
    """Perturbative entropy for every t = 0..t_max via incremental row sums."""
    T = table.window if t_max is None else t_max
    if T > table.window:
        raise ValueError(f"t_max={T} exceeds kernel window {table.window}")
    s0 = entropy_scale(epsilon, j)
    out = np.zeros(T + 1)
    acc = 0.0
    for t in range(1, T + 1):
        acc += table.d[t, t].real + 2.0 * table.d[t, 1:t].real.sum()
        out[t] = acc
    series = s0 * out
    if series.min() < -1e-12:
        raise NumericalInvariantError("perturbative entropy series dipped below -1e-12")
    return PtPrediction(s0, series)


def pt_rate(table: CorrelationTable, s0: float, t_start: int, t_end: int) -> float:
    """Window-averaged perturbative production rate
    s0/(T''-T') * sum_{m,n=T'..T''} d(m,n)."""
    if not 0 <= t_start < t_end <= table.window:
        raise ValueError(
            f"bad window [{t_start}, {t_end}] for kernel window {table.window}"
        )
    total = _checked_real(table.d[t_start : t_end + 1, t_start : t_end + 1].sum())
    return s0 * total / (t_end - t_start)


@dataclass(frozen=True)
class WindowPolicy:
    """Selection of the t-linear fitting window [T', T''].

    T' falls back to `default_t_start` when not given explicitly (callers
    may precompute an equilibration time for weakly chaotic tops); T''
    defaults to the last step whose s_lin is still below
    saturation_fraction * (1 - 1/dim1).
    """

    t_start: int | None = None
    t_end: int | None = None
    default_t_start: int = 5
    saturation_fraction: float = 0.3
    min_span: int = 5


@dataclass(frozen=True)
class RateFit:
    """Least-squares entropy slope over [t_start, t_end]."""

    t_start: int
    t_end: int
    gamma_raw: float  # slope of s_lin per step
    gamma_scaled: float  # slope of s_lin/s0 per step
    quality: float  # coefficient of determination


def fit_linear_region(series: EntropySeries, policy: WindowPolicy | None = None) -> RateFit:
    """Fit the stationary production rate on an entropy series."""
    policy = policy or WindowPolicy()
    t = np.asarray(series.t)
    if t.size < 10:
        raise FitRegionError(f"series of {t.size} samples too short to fit (need >= 10)")
    t0 = policy.default_t_start if policy.t_start is None else policy.t_start
    if policy.t_end is not None:
        t1 = policy.t_end
    else:
        cap = policy.saturation_fraction * (1.0 - 1.0 / series.dim1)
        below = t[series.s_lin <= cap]
        t1 = int(below[-1]) if below.size else -1
    t1 = min(t1, int(t[-1]))
    if t1 - t0 < policy.min_span:
        raise FitRegionError(
            f"no window satisfying policy: [{t0}, {t1}] spans less than {policy.min_span} steps"
        )
    mask = (t >= t0) & (t <= t1)
    tw = t[mask].astype(float)
    sw = series.s_lin[mask]
    slope, intercept = np.polyfit(tw, sw, 1)
    resid = sw - (slope * tw + intercept)
    sstot = ((sw - sw.mean()) ** 2).sum()
    quality = 1.0 if sstot == 0.0 else max(0.0, 1.0 - (resid**2).sum() / sstot)
    scaled = slope / series.s0 if series.s0 > 0 else float("nan")
    return RateFit(int(t0), int(t1), float(slope), float(scaled), float(quality))


@dataclass(frozen=True)
class DecayFit:
    """Exponential model |d(t_ref+tau, t_ref)| = d0 exp(-gamma tau)."""

    d0: float
    gamma: float
    quality: float
    lags_used: int


def fit_exponential_decay(
    table: CorrelationTable, t_ref: int, noise_floor_ratio: float = 1e-3
) -> DecayFit:
    """Fit the decay rate of |d| away from the diagonal at t_ref.

    Only the initial drop is fitted: the usable lags run from tau = 0 until
    |d| either falls below noise_floor_ratio * |d(t_ref, t_ref)| or stops
    decreasing, whichever comes first -- both mark the onset of the
    post-decay fluctuation plateau, which can bounce far above the floor.
    Fewer than three usable lags means the decay happened within a step
    and no rate can be quoted honestly.
    """
    T = table.window
    if T < t_ref + 5:
        raise ValueError(f"kernel window {T} too short past t_ref={t_ref} (need +5)")
    vals = np.abs(table.d[t_ref:, t_ref])
    floor = noise_floor_ratio * vals[0]
    n_usable = vals.size
    hit_floor = False
    for tau in range(1, vals.size):
        if vals[tau] <= floor or vals[tau] >= vals[tau - 1]:
            n_usable = tau
            hit_floor = vals[tau] <= floor
            break
    if n_usable < 3:
        reason = (
            "decay faster than resolvable"
            if hit_floor
            else "no monotone initial decay (oscillatory kernel)"
        )
        raise DecayNotResolvableError(
            f"{reason} at t_ref={t_ref}: {n_usable} usable lag(s)"
        )
    x = np.arange(n_usable, dtype=float)
    y = np.log(vals[:n_usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    sstot = ((y - y.mean()) ** 2).sum()
    quality = 1.0 if sstot == 0.0 else max(0.0, 1.0 - (resid**2).sum() / sstot)
    return DecayFit(float(np.exp(intercept)), float(-slope), float(quality), n_usable)


def coth_rate(s0: float, d0: float, gamma: float) -> float:
    """Saturation-law rate s0 * d0 * coth(gamma/2) for an exponential kernel."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return s0 * d0 / np.tanh(gamma / 2.0)


def equilibration_time(
    j, k: float, psi0: np.ndarray, max_steps: int = 50, tol: float = 0.2
) -> int | None:
    """First step whose Jz moments look sphere-uniform, or None.

    Checks |<Jz>|/j <= tol and |<Jz^2>/j^2 - 1/3| <= tol/3 along the
    single-top trajectory: the entrance condition of the stationary
    production region for weakly chaotic tops.
    """
    sq = as_spin(j)
    u = build_single_top(sq, k).u
    m = m_values(sq)
    v = np.asarray(psi0, dtype=complex)
    for t in range(max_steps + 1):
        p = np.abs(v) ** 2
        e1 = float((m * p).sum()) / sq.j
        e2 = float((m**2 * p).sum()) / sq.j**2
        if abs(e1) <= tol and abs(e2 - 1.0 / 3.0) <= tol / 3.0:
            return t
        v = u @ v
    return None
