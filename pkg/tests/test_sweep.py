import io

import pytest

from dicke_blockade.config import parse_config
from dicke_blockade.model import coupling_W
from dicke_blockade.sweep import CSV_VERSION, ResultRow, RowWriter, fmt, initial_state, run_scenario

from test_config import FIG5


def small(extra="", **repl):
    text = FIG5
    for k, v in repl.items():
        text = "\n".join(line for line in text.splitlines() if line.split("=")[0].strip() != k)
        if v is not None:
            text += f"\n{k} = {v}"
    return parse_config(text + "\n" + extra)


def test_single_point_closed_form():
    rows = run_scenario(small(methods="exact_unitary", tau_grid="0, 0, 1", n_atoms="6"))
    assert len(rows) == 1
    assert rows[0].g2 == pytest.approx(1 - 4 / 48, abs=1e-12)
    assert rows[0].error == ""


def test_fig5_pairs_agree():
    rows = run_scenario(small(tau_grid="0, 30, 0.05"))
    assert len(rows) == 2 * 601
    pairs = list(zip(rows[::2], rows[1::2]))
    for a, b in pairs:
        assert a.tau == b.tau and (a.method, b.method) == ("exact_unitary", "perturbative_low")
        assert abs(a.g2 - b.g2) <= 0.05
        assert b.validity == "pass"


def test_ordering_and_invariants():
    cfg = small(delta_grid="-0.1, 0.1, 0.05", tau_grid="0, 1, 0.5",
                methods="perturbative_low, exact_unitary", delta=None)
    rows = run_scenario(cfg, threads=3)
    keys = [(cfg.deltas.index(r.delta), cfg.taus.index(r.tau), r.method) for r in rows]
    assert keys == sorted(keys) and len(rows) == 5 * 3 * 2
    for r in rows:
        assert abs(r.W - coupling_W(r.g0, r.delta_detuning, r.n_atoms)) < 1e-10


def test_dark_state_rows_carry_errors():
    rows = run_scenario(small(methods="exact_unitary", initial="ground", tau_grid="0, 1, 0.5"))
    assert len(rows) == 3
    assert all(r.g2 is None and r.error.startswith("UndefinedCoherenceError") for r in rows)


def test_method_preconditions_are_per_row():
    rows = run_scenario(small(methods="perturbative_high, lindblad_regression, exact_unitary",
                              tau_grid="0, 0, 1"))
    by = {r.method: r for r in rows}
    assert by["exact_unitary"].g2 == pytest.approx(0.5)
    assert by["perturbative_high"].error and by["lindblad_regression"].error


def test_csv_stream_format():
    buf = io.StringIO()
    run_scenario(small(tau_grid="0, 0.1, 0.05"), sink=RowWriter(buf))
    lines = buf.getvalue().splitlines()
    assert lines[0] == CSV_VERSION
    assert lines[1].split(",") == ResultRow.columns() and lines[1].endswith("wall_time")
    assert len(lines) == 2 + 6
    assert fmt(1 / 3) == "0.333333333333333"
    assert fmt(None) == ""


def test_initial_state_specs():
    p = small().params()
    assert initial_state("low", p).c(0) == pytest.approx(2 ** -0.5)
    assert initial_state("1", p).c(1) == 1
    with pytest.raises(Exception):
        initial_state("banana", p)
