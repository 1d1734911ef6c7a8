"""Scenario documents.

A scenario is a flat ``key = value`` document (an optional ``[scenario]``
section header is accepted). Grids are ``start, stop, step`` triples and
method lists are comma separated::

    id = fig5-N2
    n_atoms = 2
    g0 = 100
    g0_over_delta = -0.1
    omega_n_over_w = 0.1
    delta = -0.02
    tau_grid = 0, 30, 0.05
    methods = exact_unitary, perturbative_low
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .errors import ConfigError, DispersiveRegimeError
from .model import ModelParams, coupling_W
from .perturbation import DEFAULT_THRESHOLD

METHOD_ALIASES = {
    "exact": "exact_unitary",
    "exact_unitary": "exact_unitary",
    "pert-low": "perturbative_low",
    "perturbative_low": "perturbative_low",
    "pert-high": "perturbative_high",
    "perturbative_high": "perturbative_high",
    "steady": "lindblad_regression",
    "lindblad_regression": "lindblad_regression",
}

_KNOWN = {
    "id", "n_atoms", "g0", "g0_over_delta", "delta_detuning", "omega_rabi", "omega_n_over_w",
    "delta", "n_a", "gamma", "tau_grid", "delta_grid", "methods", "initial", "output", "seed",
    "omega", "threshold", "photon_cutoff", "excitations",
}


def make_grid(start: float, stop: float, step: float) -> list:
    """Inclusive arithmetic grid start, start+step, ..., <= stop (values rounded to 12 dp)."""
    if not step > 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"grid stop {stop} is below start {start}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def resolve_method(name: str) -> str:
    key = name.strip().lower()
    if key not in METHOD_ALIASES:
        raise ConfigError(f"unknown method {name!r}; choose from {sorted(set(METHOD_ALIASES))}")
    return METHOD_ALIASES[key]


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully resolved scenario: Omega and the photon numbers are materialised."""

    scenario_id: str
    n_atoms: int
    g0: float
    delta_detuning: float
    Omega: float
    gamma: float
    taus: tuple
    deltas: tuple
    methods: tuple
    initial: str = "low"
    output: str | None = None
    seed: int | None = None  # reserved; the core is deterministic
    omega: float = 0.0
    threshold: float = DEFAULT_THRESHOLD
    photon_cutoff: int = 12
    excitations: float = 5.0
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def W(self) -> float:
        return coupling_W(self.g0, self.delta_detuning, self.n_atoms)

    @property
    def g0_over_delta(self) -> float:
        return self.g0 / self.delta_detuning

    def params(self, delta: float | None = None) -> ModelParams:
        d = self.deltas[0] if delta is None else delta
        return ModelParams(self.n_atoms, self.g0, self.delta_detuning, n_a=0.5 + d,
                           Omega=self.Omega, gamma=self.gamma, omega=self.omega)


def _float(raw: dict, key: str) -> float:
    try:
        return float(raw[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: expected a number, got {raw[key]!r}") from exc


def _grid(raw: dict, key: str) -> list:
    parts = [p for p in raw[key].replace(";", ",").split(",") if p.strip()]
    if len(parts) != 3:
        raise ConfigError(f"key {key!r}: expected 'start, stop, step', got {raw[key]!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: non-numeric grid {raw[key]!r}") from exc
    try:
        return make_grid(start, stop, step)
    except ConfigError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def _exactly_one(raw: dict, keys: tuple) -> str:
    present = [k for k in keys if k in raw]
    if len(present) != 1:
        what = "missing" if not present else "contradictory"
        raise ConfigError(f"{what} keys: give exactly one of {', '.join(keys)} (found {present or 'none'})")
    return present[0]


def read_document(text: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    body = text if text.lstrip().startswith("[") else "[scenario]\n" + text
    try:
        cp.read_string(body)
    except configparser.Error as exc:
        raise ConfigError(f"malformed scenario document: {exc}") from exc
    raw: dict = {}
    for section in cp.sections():
        for k, v in cp.items(section):
            if k in raw:
                raise ConfigError(f"key {k!r} given twice")
            raw[k.strip().lower()] = v.strip()
    return raw


def parse_config(text: str) -> ScenarioConfig:
    raw = read_document(text)
    unknown = sorted(set(raw) - _KNOWN)
    if unknown:
        raise ConfigError(f"unknown keys: {unknown}")
    for key in ("n_atoms", "g0"):
        if key not in raw:
            raise ConfigError(f"missing key {key!r}")
    try:
        n_atoms = int(raw["n_atoms"])
    except ValueError as exc:
        raise ConfigError(f"key 'n_atoms': expected an integer, got {raw['n_atoms']!r}") from exc
    if n_atoms < 1:
        raise ConfigError("key 'n_atoms': must be >= 1")
    g0 = _float(raw, "g0")
    dkey = _exactly_one(raw, ("g0_over_delta", "delta_detuning"))
    if dkey == "g0_over_delta":
        ratio = _float(raw, dkey)
        if ratio == 0:
            raise DispersiveRegimeError("g0_over_delta = 0 gives no finite detuning; W undefined")
        big_delta = g0 / ratio
    else:
        big_delta = _float(raw, dkey)
    if big_delta == 0:
        raise DispersiveRegimeError("detuning Delta = 0: no dispersive regime, W undefined")
    W = coupling_W(g0, big_delta, n_atoms)

    okey = _exactly_one(raw, ("omega_rabi", "omega_n_over_w"))
    Omega = _float(raw, okey) if okey == "omega_rabi" else _float(raw, okey) * abs(W) / n_atoms
    if Omega < 0:
        raise ConfigError(f"key {okey!r}: drive must be non-negative")

    pkey = _exactly_one(raw, ("delta", "n_a", "delta_grid"))
    if pkey == "delta":
        deltas = [_float(raw, "delta")]
    elif pkey == "n_a":
        deltas = [_float(raw, "n_a") - 0.5]
    else:
        deltas = _grid(raw, "delta_grid")
    if any(d < -0.5 - 1e-12 for d in deltas):
        raise ConfigError("photon number n_a = 1/2 + delta must be non-negative")

    taus = _grid(raw, "tau_grid") if "tau_grid" in raw else [0.0]
    if any(t < 0 for t in taus):
        raise ConfigError("key 'tau_grid': tau must be non-negative")
    methods = [resolve_method(m) for m in raw.get("methods", "exact_unitary").split(",") if m.strip()]
    if not methods:
        raise ConfigError("key 'methods': empty method list")
    gamma = _float(raw, "gamma") if "gamma" in raw else 0.0
    if gamma < 0:
        raise ConfigError("key 'gamma': must be non-negative")
    return ScenarioConfig(
        scenario_id=raw.get("id", "scenario"),
        n_atoms=n_atoms,
        g0=g0,
        delta_detuning=big_delta,
        Omega=Omega,
        gamma=gamma,
        taus=tuple(taus),
        deltas=tuple(deltas),
        methods=tuple(dict.fromkeys(methods)),
        initial=raw.get("initial", "low"),
        output=raw.get("output"),
        seed=int(raw["seed"]) if "seed" in raw else None,
        omega=_float(raw, "omega") if "omega" in raw else 0.0,
        threshold=_float(raw, "threshold") if "threshold" in raw else DEFAULT_THRESHOLD,
        photon_cutoff=int(raw.get("photon_cutoff", 12)),
        excitations=_float(raw, "excitations") if "excitations" in raw else 5.0,
    )


def load_config(path: str) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
