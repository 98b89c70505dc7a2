import numpy as np
import pytest

from conftest import random_state

from ktops import (
    CorrelationTable,
    DecayNotResolvableError,
    EntropySeries,
    FitRegionError,
    WindowPolicy,
    build_operators,
    build_single_top,
    coherent_state,
    coth_rate,
    d_kernel,
    entropy_scale,
    equilibration_time,
    fit_exponential_decay,
    fit_linear_region,
    heisenberg_correlation,
    pt_entropy,
    pt_entropy_series,
    pt_rate,
)
from ktops.experiments import run_entropy_series


def exp_kernel_table(d0, gamma, T):
    """Synthetic d(m,n) = d0 exp(-gamma |m-n|) as a product of two sqrt kernels."""
    idx = np.arange(T + 1, dtype=float)
    d = d0 * np.exp(-gamma * np.abs(np.subtract.outer(idx, idx)))
    c = np.sqrt(d).astype(complex)
    return d_kernel(c, c)


@pytest.fixture(scope="module")
def kernel_k7():
    psi = coherent_state(80, 0.89, 0.63)
    c = heisenberg_correlation(80, 7.0, psi, 80)
    return d_kernel(c, c.copy())


@pytest.fixture(scope="module")
def kernel_k1():
    psi = coherent_state(80, 0.89, 0.63)
    c = heisenberg_correlation(80, 1.0, psi, 80)
    return d_kernel(c, c.copy())


def test_kernel_variance_at_zero_lag():
    # coherent-state oracle: c(0,0) = Var(Jz)/j^2 = sin(theta)^2 / (2j)
    c = heisenberg_correlation(80, 7.0, coherent_state(80, 0.89, 0.63), 1)
    expected = np.sin(0.89) ** 2 / 160.0
    assert abs(c[0, 0].real - expected) < 1e-10 * expected
    assert abs(c[0, 0].imag) < 1e-15


def test_kernel_period_four_at_k0():
    c = heisenberg_correlation(5, 0.0, coherent_state(5, 0.89, 0.63), 9)
    assert np.abs(c[4:, 4:] - c[:-4, :-4]).max() < 1e-12


def test_kernel_matches_dense_heisenberg_oracle(rng):
    # independent route: explicit operator conjugation A_n = u^dag A_{n-1} u
    j, k, T = 2, 7.0, 6
    psi = random_state(rng, 5)
    u = build_single_top(j, k).u
    jz = build_operators(j).jz
    heis = [jz]
    for _ in range(T):
        heis.append(u.conj().T @ heis[-1] @ u)
    oracle = np.empty((T + 1, T + 1), dtype=complex)
    for m in range(T + 1):
        for n in range(T + 1):
            prod = np.vdot(psi, heis[m] @ heis[n] @ psi)
            means = np.vdot(psi, heis[m] @ psi) * np.vdot(psi, heis[n] @ psi)
            oracle[m, n] = (prod - means) / j**2
    got = heisenberg_correlation(j, k, psi, T)
    assert np.abs(got - oracle).max() < 1e-12


def test_kernel_hermitian_and_psd(rng):
    for j, k in [(3, 2.5), (6, 7.0)]:
        psi = random_state(rng, int(2 * j) + 1)
        c = heisenberg_correlation(j, k, psi, 20)
        assert np.array_equal(c, c.conj().T)
        assert np.linalg.eigvalsh(c).min() > -1e-8
        d = d_kernel(c, c.copy()).d
        assert np.linalg.eigvalsh((d + d.conj().T) / 2).min() > -1e-8


def test_d_kernel_window_mismatch():
    with pytest.raises(ValueError):
        d_kernel(np.eye(3, dtype=complex), np.eye(4, dtype=complex))


def test_d_kernel_identical_tops():
    psi = coherent_state(10, 0.89, 0.63)
    c1 = heisenberg_correlation(10, 7.0, psi, 12)
    c2 = heisenberg_correlation(10, 7.0, psi, 12)
    assert np.abs(c1 - c2).max() < 1e-12
    table = d_kernel(c1, c2)
    assert np.abs(table.d - c1 * c2).max() == 0.0
    assert np.allclose(np.diag(table.d), np.abs(np.diag(c1)) ** 2, atol=1e-15)
    # conjugate symmetry carries over to d
    assert np.abs(table.d - table.d.conj().T).max() < 1e-15


def test_pt_entropy_basics(kernel_k7):
    j = 80
    assert pt_entropy(kernel_k7, 0.0, j, 50) == 0.0
    s0 = entropy_scale(1e-4, j)
    expected = s0 * kernel_k7.d[1, 1].real
    assert abs(pt_entropy(kernel_k7, 1e-4, j, 1) - expected) < 1e-18
    with pytest.raises(ValueError):
        pt_entropy(kernel_k7, 1e-4, j, kernel_k7.window + 1)


def test_pt_entropy_series_consistency(kernel_k7):
    j, eps = 80, 1e-4
    pred = pt_entropy_series(kernel_k7, eps, j)
    assert pred.series[0] == 0.0
    assert pred.series.min() > -1e-12
    for t in (1, 7, 40, 80):
        assert abs(pred.series[t] - pt_entropy(kernel_k7, eps, j, t)) < 1e-15


def test_pt_rate_diagonal_kernel():
    T, d0 = 60, 0.2
    c = np.sqrt(d0) * np.eye(T + 1, dtype=complex)
    table = d_kernel(c, c.copy())
    s0 = 3.0
    w = 50
    got = pt_rate(table, s0, 5, 55)
    assert abs(got - s0 * d0 * (w + 1) / w) < 1e-12


def test_pt_rate_exponential_matches_coth():
    s0, d0, gamma = 2.0, 0.3, 2.0
    table = exp_kernel_table(d0, gamma, 100)
    got = pt_rate(table, s0, 0, 100)
    # analytic geometric-series oracle: coth(1) = 1.3130352854993312
    assert abs(got - s0 * d0 * 1.3130352854993312) < 0.01 * s0 * d0


@pytest.mark.parametrize("gamma", [0.5, 1.0])
def test_pt_rate_converges_to_coth(gamma):
    # relative error < 1% once the window exceeds 50/gamma
    window = int(np.ceil(50 / gamma))
    table = exp_kernel_table(1.0 / 9.0, gamma, window)
    got = pt_rate(table, 1.0, 0, window)
    ref = coth_rate(1.0, 1.0 / 9.0, gamma)
    assert abs(got - ref) / ref < 0.01


def test_pt_rate_bad_window(kernel_k7):
    with pytest.raises(ValueError):
        pt_rate(kernel_k7, 1.0, 10, 10)
    with pytest.raises(ValueError):
        pt_rate(kernel_k7, 1.0, 0, kernel_k7.window + 1)


def make_series(values, s0=1.0, dim1=161):
    arr = np.asarray(values, dtype=float)
    return EntropySeries(np.arange(arr.size), arr, None, dim1, s0)


def test_fit_linear_exact_line():
    a = 2.5e-4
    t = np.arange(0, 101)
    fit = fit_linear_region(make_series(a * t, s0=0.5))
    assert abs(fit.gamma_raw - a) < 1e-15
    assert abs(fit.gamma_scaled - a / 0.5) < 1e-15
    assert fit.quality == 1.0
    assert fit.t_start == 5


def test_fit_linear_saturating_exponential():
    t = np.arange(0, 101, dtype=float)
    s = 1.0 - np.exp(-t / 200.0)
    # early-window slope approximates the initial rate 1/tau = 5e-3
    fit = fit_linear_region(make_series(s), WindowPolicy(t_start=0, t_end=10))
    assert abs(fit.gamma_raw - 5e-3) < 0.05 * 5e-3
    # policy-selected window agrees with explicit-sum least squares
    fit = fit_linear_region(make_series(s))
    assert fit.t_end == 70  # last step below 0.3 * (1 - 1/161)
    mask = (t >= fit.t_start) & (t <= fit.t_end)
    x, y = t[mask], s[mask]
    slope = ((x - x.mean()) * (y - y.mean())).sum() / ((x - x.mean()) ** 2).sum()
    assert abs(fit.gamma_raw - slope) < 1e-12


def test_fit_linear_errors():
    with pytest.raises(FitRegionError):
        fit_linear_region(make_series(np.zeros(5)))
    with pytest.raises(FitRegionError):
        fit_linear_region(make_series(np.full(50, 0.9)))  # saturated from step 0


def test_fit_exponential_synthetic_recovery():
    table = exp_kernel_table(1.0 / 9.0, 1.5, 30)
    fit = fit_exponential_decay(table, 10)
    assert abs(fit.d0 - 1.0 / 9.0) < 1e-6
    assert abs(fit.gamma - 1.5) < 1e-6
    assert fit.quality > 1.0 - 1e-12


def test_fit_exponential_window_too_short():
    table = exp_kernel_table(1.0, 1.0, 10)
    with pytest.raises(ValueError):
        fit_exponential_decay(table, 8)


def test_fit_exponential_regular_top_poor_or_rejected(kernel_k1):
    # slow decay with large oscillations: either no monotone prefix to fit
    # or a low-quality slow fit
    for t_ref in (40, 50, 60, 70):
        try:
            fit = fit_exponential_decay(kernel_k1, t_ref)
        except DecayNotResolvableError:
            continue
        assert fit.gamma < 0.5 or fit.quality < 0.8


def test_fit_exponential_chaotic_top_fast_or_unresolvable(kernel_k7):
    for t_ref in (40, 50, 60, 70):
        try:
            fit = fit_exponential_decay(kernel_k7, t_ref)
        except DecayNotResolvableError:
            continue
        assert fit.gamma > 2.0


def test_coth_rate_values():
    assert abs(coth_rate(1.0, 1.0 / 9.0, 2.0) - 1.3130352854993312 / 9.0) < 1e-12
    # slow-decay enhancement: coth(0.05) = 20.0166638895501 (mpmath)
    assert abs(coth_rate(1.0, 1.0, 0.1) - 20.0166638895501) < 1e-10
    # strong-chaos limit converges to s0 * d0
    assert abs(coth_rate(2.0, 1.0 / 9.0, 40.0) - 2.0 / 9.0) < 1e-12
    with pytest.raises(ValueError):
        coth_rate(1.0, 1.0, 0.0)


def test_simulated_rate_matches_pt_rate():
    # cross-module consistency at j=80, k=7, eps=1e-3
    j, k, eps, steps = 80, 7.0, 1e-3, 100
    psi = coherent_state(j, 0.89, 0.63)
    table = d_kernel(
        heisenberg_correlation(j, k, psi, steps),
        heisenberg_correlation(j, k, psi, steps),
    )
    series = run_entropy_series(j, k, k, eps, (0.89, 0.63, 0.89, 0.63), steps, method="gram")
    fit = fit_linear_region(series)
    ref = pt_rate(table, series.s0, fit.t_start, fit.t_end)
    assert abs(fit.gamma_raw - ref) / ref < 0.15


def test_equilibration_time():
    # strongly chaotic top equilibrates within a few steps
    t_eq = equilibration_time(80, 7.0, coherent_state(80, 0.89, 0.63))
    assert t_eq is not None and t_eq <= 5
    # pure rotation never spreads a coherent state over the sphere
    assert equilibration_time(80, 0.0, coherent_state(80, 0.89, 0.63)) is None
