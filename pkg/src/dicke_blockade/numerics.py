"""Dense complex linear algebra and fixed-step time integration.

Everything here works on plain ``numpy`` arrays. Matrices are complex128,
states are 1-D complex vectors. Density matrices are vectorised row-major
(``rho.reshape(-1)``), so ``vec(A @ X @ B) == kron(A, B.T) @ vec(X)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import IntegrationError, PreconditionError

HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def max_asymmetry(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {m.shape}")
    asym = max_asymmetry(m)
    if asym > tol:
        raise PreconditionError(f"matrix is not Hermitian: max |M - M^dagger| = {asym:.3e}")
    return m


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    # first significant component made real and positive
    k = int(np.argmax(np.abs(v) > 1e-8 * np.max(np.abs(v))))
    return v * (abs(v[k]) / v[k])


def _canonical_cluster(vecs: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the span of ``vecs``.

    Projects the standard basis vectors onto the span in index order and keeps
    the first ``k`` linearly independent ones (Gram-Schmidt), so the result does
    not depend on how LAPACK happened to rotate a degenerate block.
    """
    dim, k = vecs.shape
    proj = vecs @ vecs.conj().T
    basis: list[np.ndarray] = []
    for i in range(dim):
        w = proj[:, i].copy()
        for b in basis:
            w -= (b.conj() @ w) * b
        norm = np.linalg.norm(w)
        if norm > 1e-6:
            basis.append(w / norm)
            if len(basis) == k:
                break
    return np.column_stack(basis)


def hermitian_eigensystem(m: np.ndarray) -> EigenSystem:
    """Full spectral decomposition of a Hermitian matrix, eigenvalues ascending.

    Degenerate eigenvectors are re-orthonormalised canonically and every column
    gets a fixed phase, so repeated calls give bit-identical output.
    """
    m = check_hermitian(m)
    m = 0.5 * (m + m.conj().T)
    vals, vecs = np.linalg.eigh(m)
    scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
    out = vecs.copy()
    i = 0
    n = len(vals)
    while i < n:
        k = i + 1
        while k < n and vals[k] - vals[i] < DEGENERACY_TOL * scale:
            k += 1
        if k - i > 1:
            out[:, i:k] = _canonical_cluster(vecs[:, i:k])
        i = k
    for c in range(n):
        out[:, c] = _canonical_phase(out[:, c])
    return EigenSystem(eigenvalues=vals, eigenvectors=out)


class SpectralPropagator:
    """U(t) = exp(-iHt) for a fixed Hermitian H, built once from its eigensystem."""

    def __init__(self, h: np.ndarray):
        self.eig = hermitian_eigensystem(h)
        self.dim = h.shape[0]

    def __call__(self, psi: np.ndarray, t: float) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (self.dim,):
            raise PreconditionError(f"state has shape {psi.shape}, Hamiltonian is {self.dim}x{self.dim}")
        v = self.eig.eigenvectors
        return v @ (np.exp(-1j * self.eig.eigenvalues * t) * (v.conj().T @ psi))


def evolve_state(h: np.ndarray, psi: np.ndarray, t: float) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise PreconditionError(f"state is not normalised (norm = {norm:.12f})")
    return SpectralPropagator(h)(psi, t)


def _rk4_step(rhs: Callable, rho: np.ndarray, t: float, dt: float) -> np.ndarray:
    k1 = rhs(rho, t)
    k2 = rhs(rho + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs(rho + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs(rho + dt * k3, t + dt)
    return rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_master(
    rhs: Callable[[np.ndarray, float], np.ndarray],
    rho0: np.ndarray,
    t_end: float,
    dt: float,
    trace_tol: float = 1e-6,
) -> np.ndarray:
    """Fixed-step RK4 for d(rho)/dt = rhs(rho, t), returning rho(t_end).

    The step is shrunk slightly so that an integer number of steps lands on
    ``t_end`` exactly. Hermiticity is restored after every step.
    """
    if dt <= 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise PreconditionError(f"t_end must be non-negative, got {t_end}")
    rho = np.array(rho0, dtype=complex)
    tr0 = np.trace(rho).real
    if abs(tr0 - 1.0) > 1e-10:
        raise PreconditionError(f"initial density matrix has trace {tr0:.12f}")
    n_steps = math.ceil(t_end / dt - 1e-9) if t_end > 0 else 0
    if n_steps == 0:
        return rho
    h = t_end / n_steps
    t = 0.0
    for _ in range(n_steps):
        rho = _rk4_step(rhs, rho, t, h)
        rho = 0.5 * (rho + rho.conj().T)
        t += h
        drift = abs(np.trace(rho).real - tr0)
        if drift > trace_tol:
            raise IntegrationError(
                f"trace drifted by {drift:.3e} at t = {t:.6g}; reduce dt (currently {h:.3e})"
            )
    return rho


def rk4_transfer_matrix(generator: np.ndarray, dt: float) -> np.ndarray:
    """One RK4 step of the linear ODE x' = G x, written as a matrix.

    For a linear right-hand side the four RK4 stages collapse to the degree-4
    Taylor polynomial of exp(G dt); applying this matrix is the same update as
    calling :func:`integrate_master` for one step.
    """
    z = np.asarray(generator, dtype=complex) * dt
    eye = np.eye(z.shape[0], dtype=complex)
    return eye + z @ (eye + z @ (eye / 2 + z @ (eye / 6 + z / 24)))


def symmetrize_vec(x: np.ndarray, dim: int) -> np.ndarray:
    r = x.reshape(dim, dim)
    return (0.5 * (r + r.conj().T)).reshape(-1)
