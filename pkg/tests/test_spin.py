import numpy as np
import pytest
from scipy.linalg import expm

from ktops import (
    NumericalInvariantError,
    SpinQuantum,
    build_operators,
    coherent_state,
    expectation,
    m_values,
)
from ktops.entanglement import sphere_grid


def test_spin_quantum_validation():
    assert SpinQuantum(0.5).dim == 2
    assert SpinQuantum(80).dim == 161
    assert SpinQuantum(0).dim == 1
    with pytest.raises(ValueError):
        SpinQuantum(0.3)
    with pytest.raises(ValueError):
        SpinQuantum(-1.0)


def test_jz_defining_representation():
    ops = build_operators(0.5)
    assert np.allclose(ops.jz, np.diag([-0.5, 0.5]))


def test_j1_ladder_algebra():
    ops = build_operators(1)
    assert np.allclose(ops.jz, np.diag([-1.0, 0.0, 1.0]))
    off = 1.0 / np.sqrt(2.0)
    assert np.allclose(ops.jx, [[0, off, 0], [off, 0, off], [0, off, 0]])


def test_commutator_j80():
    ops = build_operators(80)
    comm = ops.jx @ ops.jy - ops.jy @ ops.jx
    assert np.abs(comm - 1j * ops.jz).max() < 1e-10


def test_hermiticity_exact():
    ops = build_operators(7.5)
    for op in (ops.jx, ops.jy, ops.jz):
        assert np.array_equal(op, op.conj().T)


@pytest.mark.parametrize("j", [0.5, 1, 3.5, 40, 100])
def test_casimir(j):
    ops = build_operators(j)
    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    target = j * (j + 1) * np.eye(ops.spin.dim)
    assert np.abs(casimir - target).max() / (j * (j + 1)) < 1e-9


def test_coherent_poles():
    c = coherent_state(80, 0.0, 1.234)
    expect = np.zeros(161)
    expect[-1] = 1.0
    assert np.allclose(c, expect, atol=1e-12)
    c = coherent_state(80, np.pi, 0.0)
    expect = np.zeros(161)
    expect[0] = 1.0
    # full flip lands on |j,-j> up to a global phase
    assert abs(abs(np.vdot(expect, c)) - 1.0) < 1e-10


def test_coherent_theta_domain():
    with pytest.raises(ValueError):
        coherent_state(5, -0.1, 0.0)
    with pytest.raises(ValueError):
        coherent_state(5, np.pi + 0.1, 0.0)


def test_coherent_jz_expectation():
    ops = build_operators(80)
    c = coherent_state(80, 0.89, 0.63)
    assert abs(np.linalg.norm(c) - 1.0) < 1e-12
    assert abs(expectation(ops.jz, c) - 80 * np.cos(0.89)) < 1e-10 * 80


@pytest.mark.parametrize("j", [0.5, 2, 9])
@pytest.mark.parametrize("angles", [(0.89, 0.63), (2.2, -1.1), (np.pi / 2, 3.0)])
def test_coherent_matches_rotation_oracle(j, angles):
    # independent route: scaling-and-squaring exponential of the rotation
    # generator applied to the highest-weight state
    theta, phi = angles
    ops = build_operators(j)
    top = np.zeros(ops.spin.dim, dtype=complex)
    top[-1] = 1.0
    ref = expm(1j * theta * (ops.jx * np.sin(phi) - ops.jy * np.cos(phi))) @ top
    assert np.abs(coherent_state(j, theta, phi) - ref).max() < 1e-10


def test_expectation_eigenstate_and_identity():
    ops = build_operators(12)
    top = np.zeros(25, dtype=complex)
    top[-1] = 1.0
    assert abs(expectation(ops.jz, top) - 12.0) < 1e-12
    assert abs(expectation(np.eye(25), top) - 1.0) < 1e-12


def test_expectation_variance_at_equator():
    # coherent-state moments: <Jz> = 0 and <Jz^2> = j/2 at theta = pi/2
    j = 80
    ops = build_operators(j)
    c = coherent_state(j, np.pi / 2, 0.63)
    assert abs(expectation(ops.jz, c)) < 1e-10 * j
    assert abs(expectation(ops.jz @ ops.jz, c) - j / 2) < 1e-8 * j


def test_expectation_dimension_mismatch():
    with pytest.raises(ValueError):
        expectation(np.eye(3), np.array([1.0, 0.0]))


def test_expectation_flags_imaginary_residue():
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)  # anti-Hermitian
    with pytest.raises(NumericalInvariantError):
        expectation(skew, np.array([1.0, 1.0j]) / np.sqrt(2))


def test_coherent_resolution_of_identity():
    j = 2
    dim = 5
    theta, w, phi = sphere_grid(8, 12)
    total = np.zeros((dim, dim), dtype=complex)
    for i, th in enumerate(theta):
        for ph in phi:
            c = coherent_state(j, th, ph)
            total += w[i] * np.outer(c, c.conj())
    total *= (2 * j + 1) / (4 * np.pi) * (2 * np.pi / len(phi))
    assert np.abs(total - np.eye(dim)).max() < 1e-6


def test_m_values_ordering():
    assert np.array_equal(m_values(1.5), [-1.5, -0.5, 0.5, 1.5])
