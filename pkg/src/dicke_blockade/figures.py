"""Parameter grids of the reference figures, written as wide CSV tables.

Every table starts with the version comment and one header line; cells that
failed under the per-row error policy are left empty.
"""
from __future__ import annotations

import os

from .config import ScenarioConfig, make_grid
from .model import coupling_W
from .sweep import run_scenario, write_table

FIGURES = ("fig5", "fig6a", "fig6bcd", "fig7")

FIG5_N = (2, 4, 6, 10)
FIG6A_N = (2, 3, 5, 10)
FIG7_N = (10, 20)
FIG7_G0 = (1000.0, 3000.0)
FIG7_TAU = 3.0
FIG7_HALF_WINDOW = 0.5


def figure_scenario(sid: str, n_atoms: int, *, g0: float = 100.0, g0_over_delta: float = -0.1,
                    omega_n_over_w: float = 0.1, gamma: float = 0.0, deltas=(-0.02,), taus=(0.0,),
                    methods=("exact_unitary",), initial: str = "low") -> ScenarioConfig:
    """Scenario in figure units: detuning from g0/Delta, drive from Omega*N/|W|."""
    big_delta = g0 / g0_over_delta
    W = coupling_W(g0, big_delta, n_atoms)
    return ScenarioConfig(
        scenario_id=sid, n_atoms=n_atoms, g0=g0, delta_detuning=big_delta,
        Omega=omega_n_over_w * abs(W) / n_atoms, gamma=gamma,
        taus=tuple(taus), deltas=tuple(deltas), methods=tuple(methods), initial=initial,
    )


def _pivot(rows, key, methods):
    """{key(row): {method: g2}} keeping first-seen key order."""
    table: dict = {}
    for r in rows:
        table.setdefault(key(r), {})[r.method] = r.g2
    return table


def fig5_scenarios() -> list:
    taus = make_grid(0.0, 30.0, 0.05)
    return [figure_scenario(f"fig5-N{n}", n, taus=taus,
                            methods=("exact_unitary", "perturbative_low")) for n in FIG5_N]


def fig6a_scenarios() -> list:
    deltas = make_grid(-0.5, 3.9, 0.05)
    return [figure_scenario(f"fig6a-N{n}", n, gamma=1.0, deltas=deltas,
                            methods=("lindblad_regression",)) for n in FIG6A_N]


def fig6bcd_scenarios() -> list:
    n = 5
    j = n / 2
    taus = make_grid(0.0, 40.0, 0.05)
    return [figure_scenario(f"fig6{panel}", n, gamma=1.0, deltas=(round(d, 12),), taus=taus,
                            methods=("lindblad_regression",))
            for panel, d in zip("bcd", (-0.5, 0.0, j - 1.1))]


def fig7_delta_grid(n_atoms: int) -> list:
    dc = n_atoms / 2 - 1
    return make_grid(dc - FIG7_HALF_WINDOW, dc + FIG7_HALF_WINDOW, 0.001)


def fig7_scenarios(n_atoms: int) -> list:
    return [figure_scenario(f"fig7-N{n_atoms}-g{int(g0)}", n_atoms, g0=g0, deltas=fig7_delta_grid(n_atoms),
                            taus=(FIG7_TAU,), methods=("exact_unitary", "perturbative_high"),
                            initial="high")
            for g0 in FIG7_G0]


def _write(path: str, header, rows) -> str:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_table(fh, header, rows)
    return path


def reproduce_figure(which: str, out_dir: str, threads: int = 1) -> list:
    """Write the CSV tables of one figure into ``out_dir``; returns their paths."""
    if which not in FIGURES:
        raise ValueError(f"unknown figure {which!r}; choose from {FIGURES}")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if which == "fig5":
        for n, sc in zip(FIG5_N, fig5_scenarios()):
            t = _pivot(run_scenario(sc, threads), lambda r: r.tau, sc.methods)
            rows = [(tau, v.get("exact_unitary"), v.get("perturbative_low")) for tau, v in t.items()]
            paths.append(_write(os.path.join(out_dir, f"fig5_N{n}.csv"),
                                ("tau", "exact_unitary", "perturbative_low"), rows))
    elif which == "fig6a":
        cols = {}
        for n, sc in zip(FIG6A_N, fig6a_scenarios()):
            cols[n] = _pivot(run_scenario(sc, threads), lambda r: r.delta, sc.methods)
        deltas = list(cols[FIG6A_N[0]])
        rows = [(d, *(cols[n][d].get("lindblad_regression") for n in FIG6A_N)) for d in deltas]
        paths.append(_write(os.path.join(out_dir, "fig6a.csv"),
                            ("delta", *(f"g2_N{n}" for n in FIG6A_N)), rows))
    elif which == "fig6bcd":
        for sc in fig6bcd_scenarios():
            t = _pivot(run_scenario(sc, threads), lambda r: r.tau, sc.methods)
            rows = [(tau, v.get("lindblad_regression")) for tau, v in t.items()]
            paths.append(_write(os.path.join(out_dir, f"{sc.scenario_id}.csv"),
                                ("tau", "lindblad_regression"), rows))
    else:
        for n in FIG7_N:
            per_g0 = [_pivot(run_scenario(sc, threads), lambda r: r.delta, sc.methods)
                      for sc in fig7_scenarios(n)]
            deltas = list(per_g0[0])
            rows = []
            for d in deltas:
                rows.append((d, *(t[d].get("exact_unitary") for t in per_g0),
                             *(t[d].get("perturbative_high") for t in per_g0)))
            header = ("delta", *(f"exact_unitary_g0_{int(g)}" for g in FIG7_G0),
                      *(f"perturbative_high_qualitative_g0_{int(g)}" for g in FIG7_G0))
            paths.append(_write(os.path.join(out_dir, f"fig7_N{n}.csv"), header, rows))
    return paths
