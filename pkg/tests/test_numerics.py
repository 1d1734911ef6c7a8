import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from dicke_blockade.errors import IntegrationError, PreconditionError
from dicke_blockade.numerics import (
    SpectralPropagator, check_hermitian, evolve_state, hermitian_eigensystem, integrate_master,
    rk4_transfer_matrix,
)

from conftest import random_hermitian


def test_jx_spin_one_spectrum():
    # J_x for j = 1: eigenvalues of the characteristic polynomial -l^3 + l
    jx = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]) / np.sqrt(2)
    eig = hermitian_eigensystem(jx)
    assert np.allclose(eig.eigenvalues, np.sort(np.roots([-1, 0, 1, 0]).real), atol=1e-12)
    for k in range(3):
        v = eig.eigenvectors[:, k]
        assert np.max(np.abs(jx @ v - eig.eigenvalues[k] * v)) < 1e-10


def test_degenerate_identity_is_canonical():
    eig = hermitian_eigensystem(np.eye(4))
    assert np.allclose(eig.eigenvectors, np.eye(4))


def test_non_hermitian_rejected():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(PreconditionError, match="not Hermitian"):
        check_hermitian(m)
    with pytest.raises(PreconditionError):
        hermitian_eigensystem(m)


def test_deterministic(rng):
    h = random_hermitian(rng, 7)
    a, b = hermitian_eigensystem(h), hermitian_eigensystem(h.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_eigensystem_properties(d, seed):
    h = random_hermitian(np.random.default_rng(seed), d)
    eig = hermitian_eigensystem(h)
    v = eig.eigenvectors
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    assert np.max(np.abs(v.conj().T @ v - np.eye(d))) < 1e-10
    assert np.max(np.abs(eig.reconstruct() - h)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.floats(-5, 5), st.integers(0, 2**31 - 1))
def test_propagator_matches_expm_and_is_unitary(d, t, seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, d)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    out = evolve_state(h, psi, t)
    assert abs(np.linalg.norm(out) - 1) < 1e-10
    assert np.max(np.abs(out - expm(-1j * h * t) @ psi)) < 1e-9


def test_propagator_zero_time_and_shape(rng):
    h = random_hermitian(rng, 3)
    psi = np.array([1, 0, 0], dtype=complex)
    assert np.allclose(SpectralPropagator(h)(psi, 0.0), psi, atol=1e-14)
    with pytest.raises(PreconditionError):
        SpectralPropagator(h)(np.ones(4), 1.0)
    with pytest.raises(PreconditionError):
        evolve_state(h, 2 * psi, 1.0)


def test_rk4_pure_decay():
    # two-level decay: excited population follows exp(-gamma t)
    g = 0.7
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    sp = sm.conj().T

    def rhs(rho, t):
        return g * (sm @ rho @ sp - 0.5 * (sp @ sm @ rho + rho @ sp @ sm))

    rho0 = np.diag([0.0, 1.0]).astype(complex)
    rho = integrate_master(rhs, rho0, 3.0, 1e-3)
    assert abs(rho[1, 1].real - np.exp(-g * 3.0)) < 1e-10
    assert abs(np.trace(rho) - 1) < 1e-12


def test_rk4_rabi_closed_form():
    om = 1.3
    h = om * np.array([[0, 1], [1, 0]], dtype=complex)

    def rhs(rho, t):
        return -1j * (h @ rho - rho @ h)

    rho = integrate_master(rhs, np.diag([1.0, 0.0]).astype(complex), 2.0, 1e-3)
    assert abs(rho[1, 1].real - np.sin(om * 2.0) ** 2) < 1e-9


def test_rk4_lands_on_end_and_zero_time():
    calls = []

    def rhs(rho, t):
        calls.append(t)
        return np.zeros_like(rho)

    rho0 = np.diag([1.0, 0.0]).astype(complex)
    assert np.array_equal(integrate_master(rhs, rho0, 0.0, 0.1), rho0)
    integrate_master(rhs, rho0, 1.0, 0.3)
    assert len(calls) == 4 * 4


def test_rk4_trace_drift_detected():
    def rhs(rho, t):
        return rho  # not trace preserving

    with pytest.raises(IntegrationError, match="reduce dt"):
        integrate_master(rhs, np.diag([1.0, 0.0]).astype(complex), 1.0, 0.01)


def test_transfer_matrix_equals_one_step(rng):
    g = random_hermitian(rng, 4) * 1j
    x = rng.normal(size=4) + 0j
    dt = 0.05
    k1 = g @ x
    k2 = g @ (x + dt / 2 * k1)
    k3 = g @ (x + dt / 2 * k2)
    k4 = g @ (x + dt * k3)
    step = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert np.allclose(rk4_transfer_matrix(g, dt) @ x, step, atol=1e-14)
