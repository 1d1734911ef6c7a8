"""Command line entry point ``dicke-blockade``."""
from __future__ import annotations

import argparse
import contextlib
import dataclasses
import sys

from . import __version__
from .config import ScenarioConfig, load_config, resolve_method
from .errors import DickeError
from .figures import FIGURES, reproduce_figure
from .model import ModelParams, critical_points, dispersive_check, spectrum
from .sweep import RowWriter, fmt, run_scenario, write_table

ORACLE_DEFAULTS = dict(n_atoms=2, g0=100.0, delta_detuning=-10000.0, omega=10000.0)


@contextlib.contextmanager
def _sink(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _config(args) -> ScenarioConfig:
    if not args.config:
        raise SystemExit(f"{args.command}: --config is required")
    cfg = load_config(args.config)
    if args.threshold is not None:
        cfg = dataclasses.replace(cfg, threshold=args.threshold)
    return cfg


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    rows = []
    for d in cfg.deltas:
        s = spectrum(cfg.params(d))
        for m, w in zip(s.m_values, s.omega_m):
            rows.append((d, 0.5 + d, float(m), float(w), int(any(abs(m - g) < 1e-9 for g in s.ground_m))))
    with _sink(args.out) as fh:
        write_table(fh, ("delta", "n_a", "m", "omega_m", "ground"), rows)
    return 0


def cmd_ground_state(args) -> int:
    cfg = _config(args)
    rows = []
    for d in cfg.deltas:
        g = spectrum(cfg.params(d)).ground_m
        rows.append((d, 0.5 + d, ";".join(fmt(x) for x in g), int(len(g) > 1)))
    with _sink(args.out) as fh:
        write_table(fh, ("delta", "n_a", "ground_m", "tie"), rows)
    return 0


def cmd_critical_points(args) -> int:
    n_atoms = args.n_atoms if args.n_atoms is not None else _config(args).n_atoms
    pts = critical_points(n_atoms)
    with _sink(args.out) as fh:
        write_table(fh, ("n_atoms", "n", "n_a_c"), [(n_atoms, 2 * k + 1, p) for k, p in enumerate(pts)])
    return 0


def _run(cfg: ScenarioConfig, args) -> int:
    out = args.out if args.out is not None else cfg.output
    with _sink(out) as fh:
        run_scenario(cfg, threads=args.threads, sink=RowWriter(fh))
    return 0


def cmd_g2(args) -> int:
    cfg = dataclasses.replace(_config(args), methods=(resolve_method(args.method),))
    return _run(cfg, args)


def cmd_sweep(args) -> int:
    return _run(_config(args), args)


def cmd_reproduce(args) -> int:
    paths = reproduce_figure(args.figure, args.out or "figures", threads=args.threads)
    if args.plot:
        from .plotting import plot_tables

        paths += plot_tables(paths)
    for p in paths:
        print(p)
    return 0


def cmd_validate(args) -> int:
    if args.config:
        cfg = _config(args)
        params = ModelParams(cfg.n_atoms, cfg.g0, cfg.delta_detuning, omega=cfg.omega or 10 * abs(cfg.delta_detuning))
        cutoff, k = cfg.photon_cutoff, cfg.excitations
    else:
        params = ModelParams(**ORACLE_DEFAULTS)
        cutoff, k = 12, 5.0
    chk = dispersive_check(params, cutoff, k)
    rows = []
    for i, (n, m, a, b) in enumerate(zip(chk.n_photons, chk.m_values, chk.dressed_shift, chk.effective_shift)):
        rel = chk.spacing_rel_error[i - 1] if i > 0 else None
        rows.append((int(n), float(m), float(a), float(b), rel))
    with _sink(args.out) as fh:
        write_table(fh, ("n", "m", "dressed_shift", "effective_shift", "spacing_rel_error"), rows)
    ok = chk.max_rel_error < 0.01
    print(f"max spacing relative error {chk.max_rel_error:.3e}: {'ok' if ok else 'FAILED'}", file=sys.stderr)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dicke-blockade", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario document (key = value)")
    common.add_argument("--out", help="output file, or directory for reproduce (default: stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker threads over grid points")
    common.add_argument("--threshold", type=float, default=None, help="perturbation validity threshold")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("spectrum", parents=[common], help="omega_m for every m").set_defaults(fn=cmd_spectrum)
    sub.add_parser("ground-state", parents=[common], help="ground m per delta").set_defaults(fn=cmd_ground_state)
    s = sub.add_parser("critical-points", parents=[common], help="level-crossing photon numbers")
    s.add_argument("--n-atoms", type=int)
    s.set_defaults(fn=cmd_critical_points)
    s = sub.add_parser("g2", parents=[common], help="coherence function with one method")
    s.add_argument("--method", required=True, choices=["exact", "pert-low", "pert-high", "steady"])
    s.set_defaults(fn=cmd_g2)
    sub.add_parser("sweep", parents=[common], help="all methods of a scenario").set_defaults(fn=cmd_sweep)
    s = sub.add_parser("reproduce", parents=[common], help="figure tables")
    s.add_argument("--figure", required=True, choices=FIGURES)
    s.add_argument("--plot", action="store_true", help="also render PNG previews next to the CSVs")
    s.set_defaults(fn=cmd_reproduce)
    s = sub.add_parser("validate", parents=[common], help="dispersive check against the full model")
    s.add_argument("--oracle", required=True, choices=["full-dicke"])
    s.set_defaults(fn=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DickeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
