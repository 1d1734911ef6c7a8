"""Physical parameters, effective and driven Hamiltonians, spectrum and phase map.

The average photon number n_a enters as a classical number. All energies are
in one arbitrary frequency unit with hbar = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CutoffError, DispersiveRegimeError, PreconditionError
from .numerics import hermitian_eigensystem
from .spin import DickeBasis, op_collective

TIE_TOL = 1e-9


def coupling_W(g0: float, delta_detuning: float, n_atoms: int) -> float:
    """Photon-induced atom-atom coupling W = g0^2 / (N * Delta)."""
    if delta_detuning == 0:
        raise DispersiveRegimeError("detuning Delta = 0: no dispersive regime, W is undefined")
    if n_atoms < 1:
        raise PreconditionError(f"n_atoms must be >= 1, got {n_atoms}")
    return g0 * g0 / (n_atoms * delta_detuning)


@dataclass(frozen=True)
class ModelParams:
    """All physical inputs of one scenario.

    ``omega`` (cavity frequency) only matters for the full Dicke oracle; every
    rotating-frame quantity depends on (W, n_a, Omega, gamma) alone.
    """

    n_atoms: int
    g0: float
    delta_detuning: float
    n_a: float = 0.5
    Omega: float = 0.0
    gamma: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise PreconditionError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        if self.delta_detuning == 0:
            raise DispersiveRegimeError("detuning Delta = 0: no dispersive regime, W is undefined")
        if self.n_a < 0:
            raise PreconditionError(f"average photon number must be >= 0, got {self.n_a}")
        if self.Omega < 0 or self.gamma < 0:
            raise PreconditionError("Omega and gamma must be non-negative")

    @classmethod
    def from_ratio(
        cls,
        n_atoms: int,
        g0: float,
        g0_over_delta: float,
        *,
        delta: float | None = None,
        n_a: float | None = None,
        Omega: float | None = None,
        omega_n_over_w: float | None = None,
        gamma: float = 0.0,
        omega: float = 0.0,
    ) -> "ModelParams":
        """Build from figure-style inputs (g0/Delta, Omega*N as a multiple of |W|)."""
        if g0_over_delta == 0:
            raise DispersiveRegimeError("g0/Delta = 0 gives infinite detuning")
        if (delta is None) == (n_a is None):
            raise PreconditionError("give exactly one of delta and n_a")
        if (Omega is None) == (omega_n_over_w is None):
            raise PreconditionError("give exactly one of Omega and omega_n_over_w")
        big_delta = g0 / g0_over_delta
        na = 0.5 + delta if n_a is None else n_a
        if Omega is None:
            Omega = omega_n_over_w * abs(coupling_W(g0, big_delta, n_atoms)) / n_atoms
        return cls(n_atoms, g0, big_delta, n_a=na, Omega=Omega, gamma=gamma, omega=omega)

    @property
    def W(self) -> float:
        return coupling_W(self.g0, self.delta_detuning, self.n_atoms)

    @property
    def delta(self) -> float:
        return self.n_a - 0.5

    @property
    def omega_A(self) -> float:
        return self.omega + self.delta_detuning

    @property
    def omega_d(self) -> float:
        # drive frequency fixed by the resonance condition omega_A + W - omega_d = 0
        return self.omega_A + self.W

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    @property
    def basis(self) -> DickeBasis:
        return DickeBasis(self.n_atoms)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def _check_basis(params: ModelParams, basis: DickeBasis | None) -> DickeBasis:
    if basis is None:
        return params.basis
    if basis.n_atoms != params.n_atoms:
        raise PreconditionError(f"basis has N = {basis.n_atoms} but params have N = {params.n_atoms}")
    return basis


def level_energy(params: ModelParams, m) -> np.ndarray | float:
    """omega_m = -W[(m - n_a)^2 - n_a^2 - j(j+1)]; accepts scalars or arrays."""
    j = params.j
    na = params.n_a
    return -params.W * ((np.asarray(m, dtype=float) - na) ** 2 - na * na - j * (j + 1))


def ladder_coupling(params: ModelParams, m: float) -> float:
    """Omega_m = Omega sqrt((j - m + 1)(j + m)), the drive element linking m-1 and m."""
    j = params.j
    val = (j - m + 1) * (j + m)
    return params.Omega * math.sqrt(val) if val > 0 else 0.0


def effective_hamiltonian(params: ModelParams, basis: DickeBasis | None = None) -> np.ndarray:
    basis = _check_basis(params, basis)
    return np.diag(level_energy(params, basis.m_values)).astype(complex)


def driven_hamiltonian(params: ModelParams, basis: DickeBasis | None = None) -> np.ndarray:
    """Rotating-frame Hamiltonian at resonant drive: effective part + Omega (J+ + J-)."""
    basis = _check_basis(params, basis)
    h = effective_hamiltonian(params, basis)
    if params.Omega:
        h = h + params.Omega * (op_collective(basis, "J_plus") + op_collective(basis, "J_minus"))
    return h


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    m_values: np.ndarray
    omega_m: np.ndarray
    ground_m: tuple
    crossings: list

    @property
    def is_tie(self) -> bool:
        return len(self.ground_m) > 1


def _nearest_lattice(n_a: float, j: float) -> tuple:
    # nearest m with m = j (mod 1); both neighbours on an exact midpoint
    offset = j - math.floor(j)
    k = (n_a - offset)
    lo = math.floor(k) + offset
    hi = lo + 1
    if abs((n_a - lo) - (hi - n_a)) < 2 * TIE_TOL:
        return (lo, hi)
    return (lo,) if n_a - lo < hi - n_a else (hi,)


def ground_state_rule(params: ModelParams) -> tuple:
    """Ground-state magnetic number(s) from the piecewise photon-number rule.

    Returns a tuple; two entries mean a degenerate crossing (including the
    boundary n_a = j - 1/2 and, for Delta > 0, the n_a = 0 double ground state).
    """
    j = params.j
    na = params.n_a
    if params.delta_detuning > 0:
        return (-j, j) if na < TIE_TOL else (-j,)
    edge = j - 0.5
    if abs(na - edge) < TIE_TOL:
        return (j - 1, j)
    if na > edge:
        return (j,)
    return _nearest_lattice(na, j)


def critical_points(n_atoms: int) -> list:
    """Photon numbers j - n/2 (n odd, n <= 2j - 1) where adjacent levels cross, descending."""
    if n_atoms < 2:
        raise PreconditionError("no level crossing exists for fewer than 2 atoms")
    j = n_atoms / 2
    return [j - n / 2 for n in range(1, int(round(2 * j - 1)) + 1, 2)]


def spectrum(params: ModelParams, basis: DickeBasis | None = None) -> SpectrumResult:
    basis = _check_basis(params, basis)
    m = basis.m_values
    return SpectrumResult(
        m_values=m,
        omega_m=np.asarray(level_energy(params, m), dtype=float),
        ground_m=tuple(float(x) for x in ground_state_rule(params)),
        crossings=critical_points(params.n_atoms) if params.n_atoms >= 2 else [],
    )


# ---------------------------------------------------------------------------
# full Dicke (Tavis-Cummings) oracle


def _fock_ops(cutoff: int):
    n = np.arange(cutoff + 1)
    a = np.diag(np.sqrt(n[1:]), k=1).astype(complex)
    return a, np.diag(n).astype(complex)


def full_dicke_hamiltonian(params: ModelParams, photon_cutoff: int) -> np.ndarray:
    """omega a^dag a + omega_A J_z + (g0/sqrt N)(a^dag J- + a J+) on Fock(0..cutoff) x Dicke.

    Composite index is ``n * (N + 1) + row(m)``.
    """
    if photon_cutoff < 1:
        raise PreconditionError("photon_cutoff must be >= 1")
    basis = params.basis
    a, num = _fock_ops(photon_cutoff)
    jp = op_collective(basis, "J_plus")
    jm = op_collective(basis, "J_minus")
    jz = op_collective(basis, "J_z")
    ia = np.eye(photon_cutoff + 1)
    ib = np.eye(basis.dim)
    g = params.g0 / math.sqrt(params.n_atoms)
    h = params.omega * np.kron(num, ib) + params.omega_A * np.kron(ia, jz)
    h = h + g * (np.kron(a.conj().T, jm) + np.kron(a, jp))
    return h


def excitation_labels(params: ModelParams, photon_cutoff: int, excitations: float) -> list:
    """(composite index, n, m) for every tensor-basis state with n + m = excitations."""
    basis = params.basis
    out = []
    for n in range(photon_cutoff + 1):
        for row, m in enumerate(basis.m_values):
            if abs(n + m - excitations) < 1e-9:
                out.append((n * basis.dim + row, n, float(m)))
    return out


@dataclass(frozen=True, eq=False)
class DispersiveCheck:
    """Dressed (full model) vs effective-model level structure in one excitation sector.

    ``dressed_shift[i]`` is E_i - omega*n_i - (omega_A + W)*m_i for the dressed level
    adiabatically connected to |n_i, m_i>; the effective model predicts
    omega_m evaluated at n_a = n_i.
    """

    excitations: float
    n_photons: np.ndarray
    m_values: np.ndarray
    dressed_shift: np.ndarray
    effective_shift: np.ndarray
    spacing_rel_error: np.ndarray
    top_fock_population: float

    @property
    def max_rel_error(self) -> float:
        return float(np.max(self.spacing_rel_error)) if self.spacing_rel_error.size else 0.0


def dispersive_check(params: ModelParams, photon_cutoff: int, excitations: float,
                     leakage_tol: float = 1e-6) -> DispersiveCheck:
    """Compare full-Dicke dressed levels with the effective model in one excitation sector."""
    labels = excitation_labels(params, photon_cutoff, excitations)
    if len(labels) < 2:
        raise PreconditionError(f"excitation sector {excitations} has fewer than two states")
    idx = [k for k, _, _ in labels]
    h = full_dicke_hamiltonian(params, photon_cutoff)
    block = h[np.ix_(idx, idx)]
    if np.max(np.abs(np.delete(h[idx, :], idx, axis=1))) > 0:
        raise PreconditionError("Hamiltonian does not conserve the excitation number")
    eig = hermitian_eigensystem(block)
    ns = np.array([n for _, n, _ in labels])
    ms = np.array([m for _, _, m in labels])
    top = ns == photon_cutoff
    top_pop = float(np.max(np.sum(np.abs(eig.eigenvectors[top, :]) ** 2, axis=0))) if top.any() else 0.0
    if top_pop > leakage_tol:
        raise CutoffError(
            f"top Fock level n = {photon_cutoff} carries population {top_pop:.2e}; raise photon_cutoff"
        )
    # assign each dressed level to the bare state it overlaps most
    overlap = np.abs(eig.eigenvectors) ** 2
    owner = np.argmax(overlap, axis=1)
    if len(set(owner.tolist())) != len(owner):
        raise PreconditionError("dressed levels cannot be matched to bare states (not dispersive)")
    energies = eig.eigenvalues[owner]
    W = params.W
    dressed = energies - params.omega * ns - (params.omega_A + W) * ms
    effective = np.array([float(level_energy(params.with_(n_a=float(n)), m)) for n, m in zip(ns, ms)])
    order = np.argsort(ms)
    d_sp = np.diff(dressed[order])
    e_sp = np.diff(effective[order])
    rel = np.abs(d_sp - e_sp) / np.abs(e_sp)
    return DispersiveCheck(
        excitations=excitations,
        n_photons=ns[order],
        m_values=ms[order],
        dressed_shift=dressed[order],
        effective_shift=effective[order],
        spacing_rel_error=rel,
        top_fock_population=top_pop,
    )
