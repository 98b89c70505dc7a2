import numpy as np
import pytest

from conftest import random_grid, random_unitary

from ktops import (
    NumericalInvariantError,
    build_coupled,
    coherent_state,
    entropies_from_state,
    husimi,
    linear_entropy,
    product_state,
    reduce_first,
    reduce_second,
    step,
    von_neumann,
)


def naive_reduce_first(a):
    d1, d2 = a.shape
    rho = np.zeros((d1, d1), dtype=complex)
    for m in range(d1):
        for mp in range(d1):
            for n in range(d2):
                rho[m, mp] += a[m, n] * np.conj(a[mp, n])
    return rho


def naive_reduce_second(a):
    d1, d2 = a.shape
    rho = np.zeros((d2, d2), dtype=complex)
    for n in range(d2):
        for npp in range(d2):
            for m in range(d1):
                rho[n, npp] += a[m, n] * np.conj(a[m, npp])
    return rho


def test_reduce_product_state_rank_one():
    a = coherent_state(3, 1.0, 0.4)
    b = coherent_state(3, 2.0, 1.4)
    rho = reduce_first(product_state(a, b))
    assert np.abs(rho - np.outer(a, a.conj())).max() < 1e-12
    assert von_neumann(rho) < 1e-12
    assert linear_entropy(rho) < 1e-12


def test_singlet_is_maximally_mixed():
    grid = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex) / np.sqrt(2.0)
    rho = reduce_first(grid)
    assert np.abs(rho - np.eye(2) / 2).max() < 1e-12
    assert abs(von_neumann(rho) - np.log(2.0)) < 1e-12
    assert abs(linear_entropy(rho) - 0.5) < 1e-12


def test_partial_trace_matches_naive_loops(rng):
    a = random_grid(rng, 5, 5)  # j = 2 pair
    assert np.abs(reduce_first(a) - naive_reduce_first(a)).max() < 1e-12
    assert np.abs(reduce_second(a) - naive_reduce_second(a)).max() < 1e-12
    assert abs(np.trace(reduce_first(a)) - 1.0) < 1e-10


def test_von_neumann_values():
    assert von_neumann(np.diag([1.0, 0.0, 0.0])) == 0.0
    d = 161
    assert abs(von_neumann(np.eye(d) / d) - np.log(d)) < 1e-10
    assert abs(von_neumann(np.diag([0.75, 0.25])) - 0.5623351446188083) < 1e-12


def test_von_neumann_flags_corrupted_density():
    with pytest.raises(NumericalInvariantError):
        von_neumann(np.diag([1.1, -0.1]))


def test_linear_entropy_values():
    assert linear_entropy(np.diag([1.0, 0.0])) == 0.0
    d = 161
    assert abs(linear_entropy(np.eye(d) / d) - (1.0 - 1.0 / d)) < 1e-12
    assert abs(linear_entropy(np.diag([0.75, 0.25])) - 0.375) < 1e-12


def test_state_route_matches_density_route(rng):
    for _ in range(5):
        a = random_grid(rng, 7, 9)
        s_vn, s_lin = entropies_from_state(a)
        rho = reduce_first(a)
        assert abs(s_vn - von_neumann(rho)) < 1e-10
        assert abs(s_lin - linear_entropy(rho)) < 1e-10
        assert s_lin <= s_vn + 1e-12


def test_subsystem_entropies_equal(rng):
    for _ in range(5):
        a = random_grid(rng, 6, 11)
        assert abs(von_neumann(reduce_first(a)) - von_neumann(reduce_second(a))) < 1e-9


def test_local_unitary_invariance(rng):
    a = random_grid(rng, 6, 6)
    s_vn, s_lin = entropies_from_state(a)
    for _ in range(3):
        u1 = random_unitary(rng, 6)
        u2 = random_unitary(rng, 6)
        b = u1 @ a @ u2.T
        assert abs(entropies_from_state(b)[0] - s_vn) < 1e-9
        assert abs(entropies_from_state(b)[1] - s_lin) < 1e-9


def test_uncoupled_evolution_preserves_entropies(rng):
    j = 5
    f = build_coupled(j, 7.0, 4.0, 0.0)
    grid = random_grid(rng, 11, 11)
    s_vn, s_lin = entropies_from_state(grid)
    for _ in range(20):
        grid = step(grid, f)
    assert abs(entropies_from_state(grid)[0] - s_vn) < 1e-9
    assert abs(entropies_from_state(grid)[1] - s_lin) < 1e-9


def test_husimi_coherent_projector_peaks_at_center():
    j, theta0, phi0 = 20, 1.1, 2.2
    c = coherent_state(j, theta0, phi0)
    grid = husimi(np.outer(c, c.conj()), 64, 128)
    i, k = np.unravel_index(grid.q.argmax(), grid.q.shape)
    assert i == np.abs(grid.theta - theta0).argmin()
    assert k == np.abs(grid.phi - phi0).argmin()
    assert grid.q.max() <= 1.0 + 1e-12


def test_husimi_maximally_mixed_is_flat():
    d = 11
    grid = husimi(np.eye(d) / d, 16, 24)
    assert np.abs(grid.q - 1.0 / d).max() < 1e-12
    assert abs(grid.normalization() - 1.0) < 1e-6


def test_husimi_normalization_mixed_state(rng):
    j = 10
    states = [coherent_state(j, th, ph) for th, ph in [(0.5, 0.1), (2.0, 3.0), (1.2, 4.4)]]
    rho = sum(np.outer(c, c.conj()) for c in states) / len(states)
    grid = husimi(rho, 32, 48)
    assert abs(grid.normalization() - 1.0) < 1e-6
    assert grid.q.min() >= 0.0


def test_husimi_rejects_tiny_grid():
    with pytest.raises(ValueError):
        husimi(np.eye(3) / 3, 1, 8)


def test_husimi_rejects_unresolving_grid():
    # j=10 needs n_theta >= 11 for the quadrature to close
    c = coherent_state(10, 1.0, 1.0)
    with pytest.raises(NumericalInvariantError):
        husimi(np.outer(c, c.conj()), 4, 6)


def test_area_fraction_measures_support():
    d = 11
    grid = husimi(np.eye(d) / d, 16, 24)
    assert abs(grid.area_fraction_above(1.0 / (2 * d)) - 1.0) < 1e-12
    assert grid.area_fraction_above(2.0 / d) == 0.0
