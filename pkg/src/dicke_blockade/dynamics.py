"""Exact coherence functions: unitary g2(tau, 0) and steady-state g2(tau, inf).

The dissipative case uses the collective-decay master equation

    d rho/dt = -i[H, rho] + gamma (J- rho J+ - {J+J-, rho}/2)

with H the rotating-frame driven Hamiltonian, and evaluates two-time
correlators with the quantum regression theorem (the regression operator
J- rho J+ is propagated by the same generator).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, IntegrationError, PreconditionError, UndefinedCoherenceError
from .model import ModelParams, driven_hamiltonian
from .numerics import SpectralPropagator, rk4_transfer_matrix, symmetrize_vec
from .spin import DensityMatrix, DickeBasis, PureState, State, dicke_state, expectation, number_operator, op_collective

DENOM_TOL = 1e-14
METHODS = ("exact_unitary", "perturbative_low", "perturbative_high", "lindblad_regression")


@dataclass(frozen=True)
class G2Sample:
    tau: float
    t_ref: str  # "0" or "steady"
    value: float
    method: str


def _ops(basis: DickeBasis):
    return op_collective(basis, "J_plus"), op_collective(basis, "J_minus"), number_operator(basis)


def g2_equal_time(state: State, basis: DickeBasis | None = None) -> float:
    """<J+J+J-J-> / <J+J->^2."""
    basis = state.basis if basis is None else basis
    jp, jm, n = _ops(basis)
    denom = expectation(n, state).real
    if denom <= DENOM_TOL:
        raise UndefinedCoherenceError(f"<J+J-> = {denom:.3e}: g2 undefined for this state")
    return expectation(jp @ jp @ jm @ jm, state).real / denom ** 2


def g2_unitary_curve(params: ModelParams, initial: PureState, taus) -> list:
    """Exact g2(tau, 0) under the driven Hamiltonian for every tau."""
    basis = initial.basis
    if basis.n_atoms != params.n_atoms:
        raise PreconditionError("initial state and params disagree on N")
    _, jm, n = _ops(basis)
    psi = initial.amplitudes
    psi_p = jm @ psi
    norm_p = float(np.vdot(psi_p, psi_p).real)
    if norm_p <= DENOM_TOL:
        raise UndefinedCoherenceError(f"<J+J-> = {norm_p:.3e} in the initial state")
    diag_n = np.diag(n).real
    prop = SpectralPropagator(driven_hamiltonian(params, basis))
    out = []
    for tau in taus:
        a = prop(psi_p, tau)
        b = prop(psi, tau)
        den = float(np.sum(diag_n * np.abs(b) ** 2))
        if den <= DENOM_TOL:
            raise UndefinedCoherenceError(f"<J+J->(tau) = {den:.3e} at tau = {tau}")
        num = float(np.sum(diag_n * np.abs(a) ** 2))
        out.append(G2Sample(float(tau), "0", num / (norm_p * den), "exact_unitary"))
    return out


def g2_unitary(params: ModelParams, initial: PureState, tau: float) -> G2Sample:
    return g2_unitary_curve(params, initial, [tau])[0]


# ---------------------------------------------------------------------------
# master equation


def lindblad_rhs(params: ModelParams):
    """Callable rho, t -> d rho/dt for the collective-decay master equation."""
    basis = params.basis
    h = driven_hamiltonian(params, basis)
    jp, jm, n = _ops(basis)
    g = params.gamma

    def rhs(rho: np.ndarray, t: float = 0.0) -> np.ndarray:
        out = -1j * (h @ rho - rho @ h)
        if g:
            out = out + g * (jm @ rho @ jp - 0.5 * (n @ rho + rho @ n))
        return out

    return rhs


def liouvillian(params: ModelParams) -> np.ndarray:
    """Matrix of the master-equation generator on row-major vec(rho)."""
    basis = params.basis
    h = driven_hamiltonian(params, basis)
    _, jm, n = _ops(basis)
    eye = np.eye(basis.dim)
    L = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    if params.gamma:
        L = L + params.gamma * (
            np.kron(jm, jm.conj()) - 0.5 * np.kron(n, eye) - 0.5 * np.kron(eye, n.T)
        )
    return L


def default_dt(params: ModelParams) -> float:
    """1e-3 * min(1/gamma, 1/max|H_ij|)."""
    hmax = float(np.max(np.abs(driven_hamiltonian(params))))
    scales = [1 / params.gamma] if params.gamma > 0 else []
    if hmax > 0:
        scales.append(1 / hmax)
    return 1e-3 * (min(scales) if scales else 1.0)


@dataclass(frozen=True, eq=False)
class SteadyState:
    rho: DensityMatrix
    t_converged: float
    dt: float
    residual: float  # max |L rho|

    @property
    def matrix(self) -> np.ndarray:
        return self.rho.matrix


def _steady_state_rk4(params: ModelParams, dt: float | None, max_horizon: float | None,
                      rhs_tol: float, step_tol: float) -> SteadyState:
    if params.gamma <= 0:
        raise PreconditionError("steady state needs gamma > 0")
    basis = params.basis
    d = basis.dim
    dt = default_dt(params) if dt is None else dt
    if max_horizon is None:
        rates = [1 / params.gamma] + ([1 / params.Omega] if params.Omega > 0 else [])
        max_horizon = 1e3 * max(rates)
    L = liouvillian(params)
    step = rk4_transfer_matrix(L, dt)
    x = dicke_state(basis, -basis.j).density_matrix().matrix.reshape(-1)
    # The fixed-step RK4 trajectory is advanced in blocks of 1, 1, 2, 4, ... steps by
    # repeated squaring of the one-step map; this is the same sequence of RK4 updates.
    block = step
    n_block = 1
    t = 0.0
    trace0 = 1.0
    polished = 0
    while True:
        x_new = symmetrize_vec(block @ x, d)
        t += n_block * dt
        tr = x_new.reshape(d, d).trace().real
        drift = abs(tr - trace0)
        if drift > 1e-6:
            raise IntegrationError(f"trace drifted by {drift:.3e} at t = {t:.4g}; reduce dt ({dt:.3e})")
        # exact RK4 preserves the trace; remove the round-off accumulated by squaring
        x_new = x_new / tr
        change = float(np.max(np.abs(x_new - x)))
        x = x_new
        one_step = float(np.max(np.abs(step @ x - x)))
        residual = float(np.max(np.abs(L @ x)))
        if one_step < step_tol and residual < rhs_tol and change < step_tol:
            # two extra doublings push the remaining transient to round-off level
            polished += 1
            if polished > 2:
                break
        if t > max_horizon:
            raise ConvergenceError(
                f"no steady state within t = {max_horizon:.4g} (residual {residual:.3e}, change {change:.3e})"
            )
        block = block @ block
        n_block *= 2
    rho = x.reshape(d, d)
    rho = rho / rho.trace().real
    return SteadyState(DensityMatrix(basis, rho), t, dt, residual)


@functools.lru_cache(maxsize=512)
def _steady_state_cached(params: ModelParams, dt, max_horizon, rhs_tol, step_tol) -> SteadyState:
    return _steady_state_rk4(params, dt, max_horizon, rhs_tol, step_tol)


def steady_state(params: ModelParams, basis: DickeBasis | None = None, *, dt: float | None = None,
                 max_horizon: float | None = None, rhs_tol: float = 1e-9,
                 step_tol: float = 1e-12) -> SteadyState:
    """Long-time RK4 limit of the master equation started from |j,-j><j,-j|.

    Results are memoised per parameter set; the returned object is read-only.
    """
    if basis is not None and basis.n_atoms != params.n_atoms:
        raise PreconditionError("basis and params disagree on N")
    return _steady_state_cached(params, dt, max_horizon, rhs_tol, step_tol)


def steady_state_nullspace(params: ModelParams) -> DensityMatrix:
    """Independent steady state: solve L vec(rho) = 0 with Tr rho = 1 directly."""
    if params.gamma <= 0:
        raise PreconditionError("steady state needs gamma > 0")
    basis = params.basis
    d = basis.dim
    L = liouvillian(params)
    a = np.vstack([L, np.eye(d).reshape(1, -1)])
    b = np.zeros(d * d + 1, dtype=complex)
    b[-1] = 1.0
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    rho = x.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(basis, rho / rho.trace().real)


class RegressionPropagator:
    """Propagates vectorised operators with the RK4 map of the Liouvillian over tau gaps."""

    def __init__(self, params: ModelParams, dt: float | None = None):
        self.dim = params.basis.dim
        self.dt = default_dt(params) if dt is None else dt
        self.L = liouvillian(params)
        self._cache: dict = {}

    def _map(self, gap: float) -> np.ndarray:
        key = round(gap, 12)
        if key not in self._cache:
            n = max(1, math.ceil(gap / self.dt - 1e-9))
            self._cache[key] = np.linalg.matrix_power(rk4_transfer_matrix(self.L, gap / n), n)
        return self._cache[key]

    def trajectory(self, x0: np.ndarray, taus) -> list:
        taus = [float(t) for t in taus]
        if any(b < a for a, b in zip(taus, taus[1:])) or (taus and taus[0] < 0):
            raise PreconditionError("tau grid must be non-negative and ascending")
        out = []
        x = np.asarray(x0, dtype=complex).reshape(-1)
        t_prev = 0.0
        for t in taus:
            gap = t - t_prev
            if gap > 0:
                x = symmetrize_vec(self._map(gap) @ x, self.dim)
            out.append(x.reshape(self.dim, self.dim))
            t_prev = t
        return out


def g2_regression(params: ModelParams, rho: np.ndarray, taus, dt: float | None = None) -> list:
    """g2(tau, t) for a reference density matrix rho = rho(t), via quantum regression.

    Tr[J+J- L_tau(J- rho J+)] / (Tr[J+J- rho] Tr[J+J- L_tau(rho)]).
    """
    basis = params.basis
    jp, jm, n = _ops(basis)
    rho = np.asarray(rho, dtype=complex)
    den0 = float(np.trace(n @ rho).real)
    if den0 <= DENOM_TOL:
        raise UndefinedCoherenceError(f"<J+J-> = {den0:.3e} in the reference state")
    prop = RegressionPropagator(params, dt)
    nums = prop.trajectory(jm @ rho @ jp, taus)
    dens = prop.trajectory(rho, taus)
    out = []
    for tau, xn, xd in zip(taus, nums, dens):
        d1 = float(np.trace(n @ xd).real)
        if d1 <= DENOM_TOL:
            raise UndefinedCoherenceError(f"<J+J->(tau) = {d1:.3e} at tau = {tau}")
        out.append(complex(np.trace(n @ xn)) / (den0 * d1))
    return out


def g2_steady_curve(params: ModelParams, taus) -> list:
    """g2(tau, inf) on the converged steady state; both denominator traces coincide there."""
    ss = steady_state(params)
    basis = params.basis
    jp, jm, n = _ops(basis)
    rho = ss.matrix
    den = float(np.trace(n @ rho).real)
    if den <= DENOM_TOL:
        raise UndefinedCoherenceError(f"<J+J-> = {den:.3e} in the steady state")
    prop = RegressionPropagator(params, ss.dt)
    out = []
    for tau, x in zip(taus, prop.trajectory(jm @ rho @ jp, taus)):
        val = complex(np.trace(n @ x)) / den ** 2
        out.append(G2Sample(float(tau), "steady", val.real, "lindblad_regression"))
    return out


def g2_steady(params: ModelParams, tau: float) -> G2Sample:
    return g2_steady_curve(params, [tau])[0]
