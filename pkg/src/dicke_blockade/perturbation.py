"""First-order perturbative g2(tau, 0) around the two near-degenerate pairs.

Low pair: m = 0, 1 (n_a near 1/2, integer j only).
High pair: m = j - 1, j (n_a near j - 1/2).

Each pair is diagonalised in closed form; the remaining drive couplings are
treated to first order in the interaction picture. Every coefficient is a pure
function of (params, tau).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError, NearResonanceError, PreconditionError
from .model import ModelParams, ladder_coupling, level_energy

GAP_TOL = 1e-12
DEFAULT_THRESHOLD = 0.1

_INV_SQRT2 = 1 / math.sqrt(2)


def _require_drive(params: ModelParams):
    if params.Omega <= 0:
        raise PreconditionError(
            "Omega = 0 makes the mixing coefficients singular; use the exact spectrum instead"
        )


def _omega(params, m) -> float:
    return float(level_energy(params, m))


def _eta(xi0, xi1, a0, a1):
    # |upper> = eta1|l0> + eta2|l1>,  |lower> = eta3|l0> + eta4|l1>
    return (
        xi1 * a0 / (xi1 - xi0),
        -xi0 * a1 / (xi1 - xi0),
        a0 / (xi0 - xi1),
        -a1 / (xi0 - xi1),
    )


@dataclass(frozen=True)
class SubspaceDiagLow:
    """Closed-form eigensystem of the m = 0, 1 block.

    |lambda_r> = (xi_r |j,0> + |j,1>) / A_r ; |j,1> = eta1|l0> + eta2|l1>,
    |j,0> = eta3|l0> + eta4|l1>.
    """

    lambda_: tuple
    xi: tuple
    A: tuple
    p: float
    eta: tuple
    v0: float


@dataclass(frozen=True)
class SubspaceDiagHigh:
    """Closed-form eigensystem of the m = j-1, j block plus the rotation constants."""

    lambda_: tuple
    xi: tuple
    A: tuple
    p: float
    eta: tuple
    f: float
    q0: float
    q: float


def diag_subspace_low(params: ModelParams) -> SubspaceDiagLow:
    _require_drive(params)
    j = params.j
    if j != int(j):
        raise PreconditionError(f"the m = 0, 1 pair needs integer j (even N); got N = {params.n_atoms}")
    W, d, Om = params.W, params.delta, params.Omega
    s = math.sqrt(j * (j + 1))
    p = math.sqrt(W * W * d * d + j * Om * Om + j * j * Om * Om)
    lam = tuple(j * W + j * j * W + W * d + (-1) ** (r + 1) * p for r in (0, 1))
    xi = tuple(-(W * d + (-1) ** r * p) / (Om * s) for r in (0, 1))
    A = tuple(math.sqrt(x * x + 1) for x in xi)
    return SubspaceDiagLow(lam, xi, A, p, _eta(xi[0], xi[1], A[0], A[1]), Om * s)


def diag_subspace_high(params: ModelParams) -> SubspaceDiagHigh:
    _require_drive(params)
    j, W, na, Om = params.j, params.W, params.n_a, params.Omega
    pc = math.sqrt((1 - 2 * j + 2 * na) ** 2 * W * W + 8 * j * Om * Om)
    centre = 0.5 * (-1 - 2 * na + 4 * j * (1 + na)) * W
    lam = tuple(centre + 0.5 * (-1) ** (r + 1) * pc for r in (0, 1))
    xi = tuple(((-1 + 2 * j - 2 * na) * W + (-1) ** (r + 1) * pc) / (2 * Om * math.sqrt(2 * j)) for r in (0, 1))
    A = tuple(math.sqrt(x * x + 1) for x in xi)
    eta = _eta(xi[0], xi[1], A[0], A[1])
    e1, e2, e3, e4 = eta
    f = math.sqrt(2) * Om * (2 * j - 1) / (e2 * e3 - e1 * e4)
    q0 = -2 * Om * math.sqrt(2 * j) * (j - 1)
    gap = _omega(params, j - 1) - _omega(params, j)
    q = math.sqrt(gap * gap + 8 * j * Om * Om)
    return SubspaceDiagHigh(lam, xi, A, pc, eta, f, q0, q)


# ---------------------------------------------------------------------------
# validity of first-order treatment


@dataclass(frozen=True)
class ValidityReport:
    subspace: str
    ratios: dict
    threshold: float

    @property
    def failing(self) -> list:
        return [k for k, v in self.ratios.items() if v >= self.threshold]

    @property
    def passed(self) -> bool:
        return not self.failing

    def flag(self) -> str:
        return "pass" if self.passed else "fail:" + ";".join(self.failing)


def _ratio(num: float, gap: float, label: str) -> float:
    if abs(gap) < GAP_TOL:
        raise NearResonanceError(f"gap in {label} is {gap:.3e}: perturbation theory inapplicable")
    return abs(num / gap)


def perturbation_validity(params: ModelParams, subspace: str = "low",
                          threshold: float = DEFAULT_THRESHOLD) -> ValidityReport:
    """Coupling-to-gap ratios that must all be small for the first-order result to hold."""
    basis = params.basis
    j = params.j
    ratios: dict = {}
    if subspace == "low":
        sd = diag_subspace_low(params)
        e1, e2, e3, e4 = sd.eta
        if basis.contains(2):
            om2 = ladder_coupling(params, 2)
            for eta, r in ((e1, 0), (e2, 1)):
                ratios[f"Omega_2*eta_{r + 1}/Delta_2,{r}"] = _ratio(
                    om2 * eta, _omega(params, 2) - sd.lambda_[r], f"Delta_2,{r}")
        om0 = ladder_coupling(params, 0)
        for eta, r, k in ((e3, 0, 3), (e4, 1, 4)):
            ratios[f"Omega_0*eta_{k}/Delta_-1,{r}"] = _ratio(
                om0 * eta, _omega(params, -1) - sd.lambda_[r], f"Delta_-1,{r}")
        skip = (-1, 0, 1)
        m_hi = j - 1
    elif subspace == "high":
        sd = diag_subspace_high(params)
        e3, e4 = sd.eta[2], sd.eta[3]
        om = ladder_coupling(params, j - 1)
        for eta, r, k in ((e3, 0, 3), (e4, 1, 4)):
            ratios[f"Omega_j-1*eta_{k}/Delta_j-2,{r}"] = _ratio(
                om * eta, _omega(params, j - 2) - sd.lambda_[r], f"Delta_j-2,{r}")
        skip = ()
        m_hi = j - 3
    else:
        raise PreconditionError(f"subspace must be 'low' or 'high', got {subspace!r}")
    m = -j
    while m <= m_hi + 1e-9:
        if not any(abs(m - s) < 1e-9 for s in skip):
            ratios[f"Omega_{m + 1:g}/omega_{m + 1:g},{m:g}"] = _ratio(
                ladder_coupling(params, m + 1), _omega(params, m + 1) - _omega(params, m),
                f"omega_{m + 1:g},{m:g}")
        m += 1
    return ValidityReport(subspace, ratios, threshold)


# ---------------------------------------------------------------------------
# coherence kernels


def _O(gap: float, tau: float) -> complex:
    if abs(gap) < GAP_TOL:
        raise NearResonanceError(f"energy gap {gap:.3e} too small for a first-order denominator")
    return (1 - np.exp(1j * gap * tau)) / gap


@dataclass(frozen=True)
class CoherenceKernelLow:
    tau: float
    gaps: dict  # Delta_{m', r} = omega_m' - lambda_r
    O: dict  # O_{m', r}(tau)
    x: tuple
    y: tuple

    @property
    def X(self) -> float:
        return float(sum(self.x))

    @property
    def Y(self) -> float:
        return float(sum(self.y))


@dataclass(frozen=True)
class CoherenceKernelHigh:
    tau: float
    gaps: dict
    O: dict
    a: tuple
    c2: complex
    h1: complex
    h2: complex
    alpha: float
    beta: float
    gamma_coef: float
    x: tuple
    y: tuple


def _low_amplitudes(c0, c1):
    c0, c1 = complex(c0), complex(c1)
    norm = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm - 1) > 1e-10:
        raise PreconditionError(f"|c0|^2 + |c1|^2 = {norm:.12f}, expected 1")
    return c0, c1


def coherence_kernel_low(params: ModelParams, tau: float, c0=_INV_SQRT2, c1=_INV_SQRT2) -> CoherenceKernelLow:
    c0, c1 = _low_amplitudes(c0, c1)
    sd = diag_subspace_low(params)
    j, Om, v0 = params.j, params.Omega, sd.v0
    e1, e2, e3, e4 = sd.eta
    basis = params.basis
    gaps, O = {}, {}
    levels = [-1] + ([2] if basis.contains(2) else [])
    for mp in levels:
        for r in (0, 1):
            gaps[(mp, r)] = _omega(params, mp) - sd.lambda_[r]
            O[(mp, r)] = _O(gaps[(mp, r)], tau)
    O20 = O.get((2, 0), 0j)
    O21 = O.get((2, 1), 0j)
    Om10, Om11 = O[(-1, 0)], O[(-1, 1)]
    den = e2 * e3 - e1 * e4

    x1 = v0 ** 2 * (j - 1) ** 2 * (j + 2) ** 2 * abs(c1) ** 2 * abs(e1 * e3 * O20 + e2 * e4 * O21) ** 2
    x2 = (v0 ** 2 * (j + 1) ** 2 * j ** 2 * abs(c0) ** 2 * (e3 * e4 / den) ** 2
          * abs(np.conj(Om10) - np.conj(Om11)) ** 2)
    x3 = j ** 2 * (j + 1) ** 2 * abs(
        v0 * c0 * (e4 * e1 * np.conj(Om11) - e3 * e2 * np.conj(Om10)) / den + c1) ** 2
    x4 = j * (j + 2) * (j * j - 1) * abs(v0 * c1 * (e3 ** 2 * Om10 + e4 ** 2 * Om11) + c0) ** 2
    if basis.contains(-2) and basis.contains(2):
        w21 = _omega(params, -2) - _omega(params, -1)
        if abs(w21) < GAP_TOL:
            raise NearResonanceError("omega_-2,-1 vanishes")
        x5 = (v0 ** 2 * (j - 1) * (j * j - 4) * (j + 3) * abs(c0) ** 2 / w21 ** 2
              * abs(1 - np.exp(1j * w21 * tau)) ** 2)
    else:
        x5 = 0.0  # prefactor (j - 1)(j^2 - 4) vanishes for j <= 2
    y1 = (j + 1) * j
    # literal prefactor Omega^2 (not v0^2): this form tracks exact dynamics
    y2 = (Om ** 2 * (j - 1) ** 2 * (j + 2) ** 2
          * abs(e1 * (c0 * e3 + c1 * e1) * O20 + e2 * (c0 * e4 + c1 * e2) * O21) ** 2)
    y3 = (v0 ** 2 * (j - 1) * (j + 2)
          * abs(e3 * (c0 * e3 + c1 * e1) * Om10 + e4 * (c0 * e4 + c1 * e2) * Om11) ** 2)
    return CoherenceKernelLow(
        tau=tau, gaps=gaps, O=O,
        x=tuple(float(v) for v in (x1, x2, x3, x4, x5)),
        y=tuple(float(v) for v in (y1, y2, y3)),
    )


def g2_perturbative_low(params: ModelParams, tau: float, c0=_INV_SQRT2, c1=_INV_SQRT2,
                        threshold: float = DEFAULT_THRESHOLD) -> float:
    """g2(tau, 0) ~ X / ((j + 1) j Y) for an initial state c0|j,0> + c1|j,1>."""
    if not -0.5 < params.delta < 0.5:
        raise PreconditionError(f"delta = {params.delta} outside (-1/2, 1/2)")
    report = perturbation_validity(params, "low", threshold)
    if not report.passed:
        warnings.warn(f"first-order validity violated: {report.failing}", stacklevel=2)
    k = coherence_kernel_low(params, tau, c0, c1)
    j = params.j
    if k.Y <= 1e-14:
        raise DegenerateDenominatorError(f"Y = {k.Y:.3e} at tau = {tau}")
    return k.X / ((j + 1) * j * k.Y)


def rotation_coefficients(params: ModelParams, t: float, sd: SubspaceDiagHigh | None = None):
    """alpha(t), beta(t), gamma_coef(t) of the rotated J+J- on the high pair."""
    sd = diag_subspace_high(params) if sd is None else sd
    if sd.q == 0:
        raise DegenerateDenominatorError("q = 0: rotation coefficients are singular")
    j, Om = params.j, params.Omega
    gap = _omega(params, j - 1) - _omega(params, j)
    cq = math.cos(sd.q * t) - 1
    alpha = sd.q0 / sd.q * math.sin(sd.q * t)
    beta = sd.q0 / sd.q ** 2 * gap * cq
    gamma_coef = 2 * sd.q0 / sd.q ** 2 * Om * math.sqrt(2 * j) * cq
    return alpha, beta, gamma_coef


def coherence_kernel_high(params: ModelParams, tau: float) -> CoherenceKernelHigh:
    if params.n_atoms < 4:
        raise PreconditionError("the high-pair kernel needs N >= 4 (level m = j - 3)")
    sd = diag_subspace_high(params)
    j, Om, f = params.j, params.Omega, sd.f
    e1, e2, e3, e4 = sd.eta
    gaps, O = {}, {}
    for r in (0, 1):
        gaps[(j - 2, r)] = _omega(params, j - 2) - sd.lambda_[r]
        O[(j - 2, r)] = _O(gaps[(j - 2, r)], tau)
    O0, O1 = O[(j - 2, 0)], O[(j - 2, 1)]
    h1 = e2 * e3 * O0 - e1 * e4 * O1
    h2 = e3 * (e2 - e4) * O0 - e4 * (e1 - e3) * O1
    w32 = _omega(params, j - 3) - _omega(params, j - 2)
    if abs(w32) < GAP_TOL:
        raise NearResonanceError("omega_j-3,j-2 vanishes")
    a0 = e3 * e4 * f * (np.conj(O0) - np.conj(O1))
    a1 = math.sqrt(j) - f * (e2 * e3 * np.conj(O0) - e1 * e4 * np.conj(O1))
    a2 = math.sqrt(2 * j - 1) * (1 + f * math.sqrt(j) / (2 * j - 1) * h1)
    a3 = Om * math.sqrt(3 * (2 * j - 1) * (2 * j - 2)) * (1 - np.exp(1j * w32 * tau)) / w32
    c2 = f * h2 / math.sqrt(2 * (2 * j - 1))
    alpha, beta, gamma_coef = rotation_coefficients(params, tau, sd)
    a01 = a0 * np.conj(a1)
    x = (
        2 * j * abs(a0) ** 2,
        2 * (2 * j - 1) * abs(a1) ** 2,
        3 * (2 * j - 2) * abs(a2) ** 2,
        4 * (2 * j - 3) * abs(a3) ** 2,
        -2 * alpha * a01.imag,
        2 * beta * a01.real,
        gamma_coef * (abs(a0) ** 2 - abs(a1) ** 2),
    )
    y = (j, 2 * j - 1, 3 * (2 * j - 2) * abs(c2) ** 2, beta)
    return CoherenceKernelHigh(
        tau=tau, gaps=gaps, O=O, a=(complex(a0), complex(a1), complex(a2), complex(a3)),
        c2=complex(c2), h1=complex(h1), h2=complex(h2),
        alpha=alpha, beta=beta, gamma_coef=gamma_coef,
        x=tuple(float(v) for v in x), y=tuple(float(v) for v in y),
    )


def g2_perturbative_high(params: ModelParams, tau: float) -> float:
    """First-order g2(tau, 0) for (|j,j-1> + |j,j>)/sqrt 2.

    Known to deviate strongly from exact dynamics; treat it as qualitative.
    """
    k = coherence_kernel_high(params, tau)
    Y = sum(k.y)
    if Y <= 1e-14:
        raise DegenerateDenominatorError(f"sum of y^c = {Y:.3e} at tau = {tau}")
    return sum(k.x) / ((3 * params.j - 1) * Y)
