"""Symmetric Dicke basis |j, m> and collective angular-momentum operators.

Rows are ordered by ascending m: row 0 is m = -j, row N is m = +j.
Half-integer quantum numbers are carried internally as the integer 2m.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import PreconditionError

OPERATORS = ("J_plus", "J_minus", "J_z", "J_squared")


def _two_m(m: float) -> int:
    tm = round(2 * float(m))
    if abs(2 * float(m) - tm) > 1e-9:
        raise PreconditionError(f"m = {m} is not a half-integer")
    return tm


@dataclass(frozen=True)
class DickeBasis:
    n_atoms: int

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise PreconditionError(f"n_atoms must be a positive integer, got {self.n_atoms}")

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.dim) - self.j

    def contains(self, m: float) -> bool:
        try:
            tm = _two_m(m)
        except PreconditionError:
            return False
        return -self.n_atoms <= tm <= self.n_atoms and (tm - self.n_atoms) % 2 == 0

    def index(self, m: float) -> int:
        """Row of |j, m>; raises for m outside [-j, j] or of the wrong parity."""
        tm = _two_m(m)
        if not (-self.n_atoms <= tm <= self.n_atoms) or (tm - self.n_atoms) % 2:
            raise PreconditionError(f"m = {m} is not a valid magnetic number for j = {self.j}")
        return (tm + self.n_atoms) // 2


@dataclass(frozen=True, eq=False)
class PureState:
    basis: DickeBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise PreconditionError(f"expected {self.basis.dim} amplitudes, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-10:
            raise PreconditionError(f"amplitudes are not normalised (sum |c_m|^2 = {norm:.12f})")
        object.__setattr__(self, "amplitudes", amps)

    def c(self, m: float) -> complex:
        return complex(self.amplitudes[self.basis.index(m)])

    def density_matrix(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(self.basis, np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: DickeBasis
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        d = self.basis.dim
        if rho.shape != (d, d):
            raise PreconditionError(f"expected a {d}x{d} density matrix, got shape {rho.shape}")
        object.__setattr__(self, "matrix", rho)
        if self.validate:
            asym = float(np.max(np.abs(rho - rho.conj().T)))
            if asym > 1e-10:
                raise PreconditionError(f"density matrix not Hermitian (max asymmetry {asym:.3e})")
            tr = np.trace(rho).real
            if abs(tr - 1.0) > 1e-8:
                raise PreconditionError(f"density matrix trace is {tr:.12f}")
            lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
            if lo < -1e-8:
                raise PreconditionError(f"density matrix has negative eigenvalue {lo:.3e}")

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())


State = Union[PureState, DensityMatrix]


def op_collective(basis: DickeBasis, which: str) -> np.ndarray:
    """Matrix of J_plus, J_minus, J_z or J_squared on the Dicke basis."""
    m = basis.m_values
    j = basis.j
    if which == "J_z":
        return np.diag(m).astype(complex)
    if which == "J_squared":
        return j * (j + 1) * np.eye(basis.dim, dtype=complex)
    if which in ("J_plus", "J_minus"):
        # <j, m+1| J+ |j, m> = sqrt((j - m)(j + m + 1))
        lower = m[:-1]
        jp = np.diag(np.sqrt((j - lower) * (j + lower + 1)), k=-1).astype(complex)
        return jp if which == "J_plus" else jp.T.copy()
    raise PreconditionError(f"unknown operator {which!r}; expected one of {OPERATORS}")


def number_operator(basis: DickeBasis) -> np.ndarray:
    """J+J-, diagonal with entries (j + m)(j - m + 1)."""
    m = basis.m_values
    j = basis.j
    return np.diag((j + m) * (j - m + 1)).astype(complex)


def dicke_state(basis: DickeBasis, m: float) -> PureState:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index(m)] = 1.0
    return PureState(basis, amps)


def superposition(basis: DickeBasis, ms, weights=None) -> PureState:
    """Normalised superposition of Dicke states; equal weights by default."""
    ms = list(ms)
    w = np.ones(len(ms), dtype=complex) if weights is None else np.asarray(weights, dtype=complex)
    amps = np.zeros(basis.dim, dtype=complex)
    for mm, c in zip(ms, w):
        amps[basis.index(mm)] += c
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise PreconditionError("superposition has zero norm")
    return PureState(basis, amps / norm)


def expectation(op: np.ndarray, state: State) -> complex:
    op = np.asarray(op)
    if isinstance(state, PureState):
        v = state.amplitudes
        if op.shape != (v.size, v.size):
            raise PreconditionError(f"operator shape {op.shape} does not match state dimension {v.size}")
        return complex(np.vdot(v, op @ v))
    if isinstance(state, DensityMatrix):
        rho = state.matrix
        if op.shape != rho.shape:
            raise PreconditionError(f"operator shape {op.shape} does not match density matrix {rho.shape}")
        return complex(np.trace(op @ rho))
    raise PreconditionError(f"unsupported state type {type(state).__name__}")
