import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dicke_blockade.dynamics import (
    RegressionPropagator, g2_equal_time, g2_regression, g2_steady, g2_steady_curve, g2_unitary,
    g2_unitary_curve, lindblad_rhs, liouvillian, steady_state, steady_state_nullspace,
)
from dicke_blockade.errors import ConvergenceError, PreconditionError, UndefinedCoherenceError
from dicke_blockade.model import ModelParams, driven_hamiltonian
from dicke_blockade.numerics import integrate_master
from dicke_blockade.perturbation import g2_perturbative_low
from dicke_blockade.spin import DensityMatrix, DickeBasis, dicke_state, superposition

from conftest import figure_params


def random_rho(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = a @ a.conj().T
    return r / np.trace(r).real


def test_equal_time_examples():
    for n, ref in ((2, 0.5), (10, 1 - 4 / 120)):
        assert g2_equal_time(superposition(DickeBasis(n), [0, 1])) == pytest.approx(ref, abs=1e-12)
    b = DickeBasis(6)
    assert g2_equal_time(dicke_state(b, -2)) == 0
    with pytest.raises(UndefinedCoherenceError):
        g2_equal_time(dicke_state(b, -3))


def test_unitary_reduces_at_zero_and_is_static_without_drive():
    p = figure_params(6)
    psi = superposition(p.basis, [0, 1])
    assert g2_unitary(p, psi, 0.0).value == pytest.approx(g2_equal_time(psi), abs=1e-12)
    still = p.with_(Omega=0.0)
    vals = [s.value for s in g2_unitary_curve(still, psi, np.linspace(0, 20, 41))]
    assert np.ptp(vals) < 1e-12
    s = g2_unitary(p, psi, 1.0)
    assert s.method == "exact_unitary" and s.t_ref == "0" and s.value >= 0


def test_unitary_dark_state():
    p = figure_params(4)
    with pytest.raises(UndefinedCoherenceError):
        g2_unitary(p, dicke_state(p.basis, -2), 0.5)


def test_fig5_exact_curve():
    p = figure_params(2)
    psi = superposition(p.basis, [0, 1])
    taus = np.arange(0, 30.0001, 0.05)
    ex = np.array([s.value for s in g2_unitary_curve(p, psi, taus)])
    pt = np.array([g2_perturbative_low(p, t) for t in taus])
    assert np.all(ex < 1) and np.max(np.abs(ex - pt)) <= 0.05


def test_rhs_examples(rng):
    p = ModelParams(3, 100, -1000, n_a=0.7, gamma=0.8)
    ground = dicke_state(p.basis, -1.5).density_matrix().matrix
    assert np.max(np.abs(lindblad_rhs(p)(ground))) == 0
    driven = p.with_(Omega=0.2)
    for _ in range(5):
        rho = random_rho(rng, 4)
        assert abs(np.trace(lindblad_rhs(driven)(rho))) < 1e-12
        vec = liouvillian(driven) @ rho.reshape(-1)
        assert np.allclose(vec.reshape(4, 4), lindblad_rhs(driven)(rho), atol=1e-12)


def test_closed_system_conserves_energy(rng):
    p = ModelParams(4, 100, -1000, n_a=0.3, Omega=0.3)
    h = driven_hamiltonian(p)
    rho0 = random_rho(rng, 5)
    rho = integrate_master(lindblad_rhs(p), rho0, 2.0, 1e-3)
    assert abs(np.trace(h @ rho) - np.trace(h @ rho0)) < 1e-9


def test_trajectory_trace_and_hermiticity():
    p = figure_params(5, gamma=1.0, delta=0.3)
    rhs = lindblad_rhs(p)
    rho = dicke_state(p.basis, -2.5).density_matrix().matrix
    for _ in range(10):
        rho = integrate_master(rhs, rho, 0.5, 1e-3)
        assert abs(np.trace(rho).real - 1) < 1e-8
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-8


def test_steady_state_without_drive_is_ground():
    p = ModelParams(4, 100, -1000, n_a=0.4, gamma=1.0)
    ss = steady_state(p)
    assert ss.matrix[0, 0].real > 1 - 1e-6


@pytest.mark.parametrize("n", [2, 3, 5, 10])
def test_steady_state_checks(n):
    p = figure_params(n, gamma=1.0, delta=0.4)
    ss = steady_state(p)
    assert abs(np.trace(ss.matrix).real - 1) < 1e-8
    assert ss.rho.min_eigenvalue > -1e-8
    assert ss.residual < 1e-9
    assert np.max(np.abs(ss.matrix - steady_state_nullspace(p).matrix)) < 1e-7


def test_steady_state_errors():
    with pytest.raises(PreconditionError):
        steady_state(figure_params(3))
    with pytest.raises(ConvergenceError):
        steady_state(figure_params(3, gamma=1.0), max_horizon=1e-3)
    with pytest.raises(PreconditionError):
        steady_state(figure_params(3, gamma=1.0), DickeBasis(4))


def test_steady_g2_zero_lag_and_real():
    p = figure_params(5, gamma=1.0, delta=1.4)
    ss = steady_state(p)
    assert g2_steady(p, 0.0).value == pytest.approx(g2_equal_time(ss.rho), abs=1e-10)
    vals = g2_regression(p, ss.matrix, np.linspace(0, 10, 21))
    assert max(abs(v.imag) for v in vals) < 1e-10
    curve = g2_steady_curve(p, [0.0, 5.0])
    assert curve[1].t_ref == "steady" and curve[1].method == "lindblad_regression"


def test_regression_consistency_weak_decay():
    p = figure_params(4, gamma=1e-6)
    psi = superposition(p.basis, [0, 1])
    taus = np.linspace(0, 2, 11)
    reg = g2_regression(p, psi.density_matrix().matrix, taus)
    uni = [s.value for s in g2_unitary_curve(p, psi, taus)]
    assert np.max(np.abs(np.real(reg) - uni)) < 1e-3


def test_regression_grid_must_ascend():
    p = figure_params(3, gamma=1.0)
    prop = RegressionPropagator(p)
    with pytest.raises(PreconditionError):
        prop.trajectory(np.eye(4).reshape(-1) / 4, [1.0, 0.5])


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 3, 4, 5]), st.floats(-0.5, 2.0), st.floats(0, 8))
def test_g2_non_negative(n, d, tau):
    p = figure_params(n, gamma=1.0, delta=d)
    assert g2_steady(p, tau).value >= -1e-12
    if n % 2 == 0:
        assert g2_unitary(p, superposition(p.basis, [0, 1]), tau).value >= 0
