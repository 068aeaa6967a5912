"""Command-line entry point: config-driven benchmark runs."""

from __future__ import annotations

import argparse
import csv
import sys

from helmres.bench.config import RunConfig, load_config
from helmres.bench import runner


def _common(p: argparse.ArgumentParser, needs_config=True):
    if needs_config:
        p.add_argument("--config", required=False, help="TOML run config")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="seed for randomized probes")
    p.add_argument("--threads", type=int, help="sweep worker threads")
    p.add_argument("--k", type=float, help="wavenumber override")


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.out:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="helmres",
        description="Helmholtz resonance benchmarks: assembly, instrumented "
                    "GMRES, and convergence diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
            ("cavity", "single cavity solve at one wavenumber"),
            ("scatter", "single scattering solve at one wavenumber"),
            ("sweep", "wavenumber sweep per the config's sweep block"),
            ("diagnose", "instrumented solve with HR and bound reports"),
            ("export-matrix", "write the assembled system to disk")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
    p = sub.add_parser("quasimodes", help="candidate quasimode wavenumbers")
    _common(p)
    p.add_argument("--k-max", type=float, default=40.0)

    args = parser.parse_args(argv)
    cfg = _load(args)

    if args.command in ("cavity", "scatter"):
        cfg.benchmark = args.command
        res = runner.run_single(cfg, args.k)
        for row in res["rows"]:
            print(f"k={row['k']:.6f} method={row['method']} "
                  f"iters={row['iterations']} converged={row['converged']} "
                  f"relres={row['relres']:.3e}")
        print(f"summary: {res['summary']}")
    elif args.command == "sweep":
        res = runner.run_sweep(cfg)
        print(f"{len(res['rows'])} rows -> {res['summary']}")
    elif args.command == "diagnose":
        res = runner.run_diagnose(cfg, args.k)
        print(f"hr: {res['hr']}")
        print(f"bounds: {res['bounds']} ({len(res['reports'])} reports, "
              f"all valid)")
    elif args.command == "export-matrix":
        paths = runner.export_matrix(cfg, args.k)
        for name, path in paths.items():
            print(f"{name}: {path}")
    elif args.command == "quasimodes":
        rows = runner.quasimode_table_rows(cfg, k_max=args.k_max)
        w = csv.writer(sys.stdout)
        w.writerow(["case", "n", "m", "k"])
        for r in rows:
            w.writerow([r["case"], r["n"], r["m"], repr(r["k"])])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
