"""Scenario runner: grid points x methods -> ResultRow, streamed to CSV."""
from __future__ import annotations

import csv
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, astuple, fields
from typing import Callable, Iterable, TextIO

import numpy as np

from .config import ScenarioConfig
from .dynamics import g2_steady_curve, g2_unitary_curve
from .errors import DickeError, PreconditionError
from .model import ModelParams
from .perturbation import g2_perturbative_high, g2_perturbative_low, perturbation_validity
from .spin import PureState, dicke_state, superposition

CSV_VERSION = "# dicke-blockade v1"


def fmt(x) -> str:
    """15 significant digits, '.' separator; empty for None."""
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".15g")
    return str(x)


@dataclass
class ResultRow:
    scenario: str
    n_atoms: int
    g0: float
    delta_detuning: float
    W: float
    n_a: float
    delta: float
    Omega: float
    gamma: float
    tau: float
    method: str
    g2: float | None
    validity: str
    error: str
    wall_time: float

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in fields(cls)]

    def cells(self) -> list:
        return [fmt(v) for v in astuple(self)]


def initial_state(label: str, params: ModelParams) -> PureState:
    """'low', 'high', 'ground', or a comma list of m values (equal weights)."""
    basis = params.basis
    j = basis.j
    key = label.strip().lower()
    if key == "low":
        return superposition(basis, [0, 1])
    if key == "high":
        return superposition(basis, [j - 1, j])
    if key == "ground":
        return dicke_state(basis, -j)
    try:
        ms = [float(s) for s in key.replace(";", ",").split(",") if s.strip()]
    except ValueError as exc:
        raise PreconditionError(f"initial state {label!r} not understood") from exc
    if not ms:
        raise PreconditionError("empty initial state")
    return superposition(basis, ms)


def _err(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def _low_amplitudes(state: PureState):
    basis = state.basis
    amps = state.amplitudes.copy()
    c0, c1 = state.c(0), state.c(1)
    amps[basis.index(0)] = 0
    amps[basis.index(1)] = 0
    if np.max(np.abs(amps)) > 1e-12:
        raise PreconditionError("perturbative_low needs an initial state supported on m in {0, 1}")
    return c0, c1


def _method_values(method: str, params: ModelParams, label: str, taus, threshold: float):
    """Returns (values or per-tau exceptions, validity flag)."""
    taus = list(taus)
    if method == "exact_unitary":
        return [s.value for s in g2_unitary_curve(params, initial_state(label, params), taus)], ""
    if method == "lindblad_regression":
        return [s.value for s in g2_steady_curve(params, taus)], ""
    if method == "perturbative_low":
        c0, c1 = _low_amplitudes(initial_state(label, params))
        flag = perturbation_validity(params, "low", threshold).flag()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return [_guard(g2_perturbative_low, params, t, c0, c1, threshold) for t in taus], flag
    if method == "perturbative_high":
        if label.strip().lower() != "high":
            raise PreconditionError("perturbative_high is defined only for initial = high")
        flag = perturbation_validity(params, "high", threshold).flag()
        return [_guard(g2_perturbative_high, params, t) for t in taus], flag
    raise PreconditionError(f"unknown method {method!r}")


def _guard(fn, *args):
    try:
        return fn(*args)
    except DickeError as exc:
        return exc


def evaluate_point(config: ScenarioConfig, delta: float) -> list:
    """All rows of one delta point, ordered by (tau index, method name)."""
    taus = list(config.taus)
    methods = sorted(config.methods)
    per_method = {}
    for method in methods:
        t0 = time.perf_counter()
        flag = ""
        try:
            params = config.params(delta)
            try:
                values, flag = _method_values(method, params, config.initial, taus, config.threshold)
            except DickeError as exc:
                if len(taus) == 1:
                    raise
                # a curve failure may be local to one tau; retry point by point
                values = []
                for t in taus:
                    try:
                        v, flag = _method_values(method, params, config.initial, [t], config.threshold)
                        values.append(v[0])
                    except DickeError as inner:
                        values.append(inner)
        except DickeError as exc:
            values = [exc] * len(taus)
        per_tau = (time.perf_counter() - t0) / max(len(taus), 1)
        per_method[method] = (values, flag, per_tau)

    W = config.W
    rows = []
    for i, tau in enumerate(taus):
        for method in methods:
            values, flag, wt = per_method[method]
            v = values[i]
            bad = isinstance(v, Exception)
            rows.append(ResultRow(
                scenario=config.scenario_id,
                n_atoms=config.n_atoms,
                g0=config.g0,
                delta_detuning=config.delta_detuning,
                W=W,
                n_a=0.5 + delta,
                delta=delta,
                Omega=config.Omega,
                gamma=config.gamma,
                tau=tau,
                method=method,
                g2=None if bad else float(v),
                validity=flag,
                error=_err(v) if bad else "",
                wall_time=wt,
            ))
    return rows


def run_scenario(config: ScenarioConfig, threads: int = 1,
                 sink: Callable[[ResultRow], None] | None = None) -> list:
    """Evaluate every (delta, tau, method); rows are passed to ``sink`` in final order."""
    out = []
    deltas = list(config.deltas)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for rows in pool.map(lambda d: evaluate_point(config, d), deltas):
            for row in rows:
                if sink is not None:
                    sink(row)
                out.append(row)
    return out


class RowWriter:
    """Streams ResultRows to a text handle with the versioned header."""

    def __init__(self, fh: TextIO):
        self.fh = fh
        self.writer = csv.writer(fh, lineterminator="\n")
        fh.write(CSV_VERSION + "\n")
        self.writer.writerow(ResultRow.columns())

    def __call__(self, row: ResultRow) -> None:
        self.writer.writerow(row.cells())
        self.fh.flush()


def write_table(fh: TextIO, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    """Wide CSV with the version comment; cells formatted with :func:`fmt`."""
    w = csv.writer(fh, lineterminator="\n")
    fh.write(CSV_VERSION + "\n")
    w.writerow(list(header))
    for r in rows:
        w.writerow([fmt(v) for v in r])


def read_table(path: str) -> tuple:
    """(header, rows of strings) of a versioned CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_VERSION:
            raise ValueError(f"{path}: missing version line {CSV_VERSION!r}")
        r = list(csv.reader(fh))
    return r[0], r[1:]
