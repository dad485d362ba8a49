"""Command-line front end.

Subcommands: run, kernels, compare, dump-config.
Exit codes: 0 ok, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import default_config_text, load_config
from .errors import ConfigurationError, NumericalFailure, UsageError
from .gpc import GpcBasis, QuadratureRule, ORTHONORMAL, PAPER_UNNORMALIZED
from .kernels import kernel_dump
from .scaling import PhysicalConstants, ScalingOverrides, build_scaling
from .simulate import MomentSet, SimulationConfig, compare_runs, run_simulation

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def _cmd_run(args) -> int:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = SimulationConfig()
    if args.mode is not None:
        cfg = SimulationConfig(**{**cfg.to_dict(), "mode": args.mode})
    if args.final_time is not None:
        cfg = SimulationConfig(**{**cfg.to_dict(), "final_time_ps": args.final_time})
    out = Path(args.out)

    def progress(t, t_final, steps):
        print(f"  t = {t:7.3f} / {t_final} ps  ({steps} steps)", flush=True)

    print(f"running mode={cfg.mode} to {cfg.final_time_ps} ps -> {out}")
    summary = run_simulation(cfg, out, progress=progress)
    print(f"done: {summary['steps']} steps, outputs in {out}")
    return EXIT_OK


def _cmd_kernels(args) -> int:
    basis = GpcBasis(normalization=args.basis)
    scaling = build_scaling(PhysicalConstants(),
                            ScalingOverrides(n_divisor=args.N))
    quad = QuadratureRule.gauss_legendre(args.quad_points)
    payload = kernel_dump(scaling, basis, quad)
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"kernel matrices written to {args.out}")
    else:
        print(text)
    return EXIT_OK


def _load_moments_csv(run_dir: Path) -> MomentSet:
    path = run_dir / "moments.csv"
    if not path.exists():
        raise UsageError(f"missing file: {path}")
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.setdefault(row["time_ps"], []).append(row)
    if not rows:
        raise UsageError(f"no moment rows in {path}")
    last = rows[sorted(rows, key=float)[-1]]
    cols = {name: np.array([float(r[name]) for r in last])
            for name in ("x", "rho", "momentum", "energy", "velocity", "efield")}
    pot_path = run_dir / "potential.csv"
    if not pot_path.exists():
        raise UsageError(f"missing file: {pot_path}")
    xn, pot = [], []
    with open(pot_path, newline="") as fh:
        reader = csv.DictReader(fh)
        stash = {}
        for row in reader:
            stash.setdefault(row["time_ps"], []).append(row)
        last_p = stash[sorted(stash, key=float)[-1]]
        for row in last_p:
            xn.append(float(row["x"]))
            pot.append(float(row["potential"]))
    empty = np.zeros((0, 0, 0))
    return MomentSet(time_ps=float(sorted(rows, key=float)[-1]),
                     x_centers=cols["x"], rho=cols["rho"],
                     momentum=cols["momentum"], energy=cols["energy"],
                     velocity=cols["velocity"], efield=cols["efield"],
                     x_nodes=np.array(xn), potential=np.array(pot),
                     stat_mean=empty, stat_var=empty, stat_std=empty)


def _cmd_compare(args) -> int:
    a = _load_moments_csv(Path(args.run_a))
    b = _load_moments_csv(Path(args.run_b))
    report = compare_runs(a, b, tol=args.tol)
    out_dir = Path(args.out) if args.out else Path(args.run_a)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "compare.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x"] + [f"d_{k}" for k in report.profiles])
        for i, x in enumerate(a.x_centers):
            w.writerow([repr(float(x))] + [repr(float(report.profiles[k][i]))
                                           for k in report.profiles])
    summary = report.to_text(tol=args.tol)
    (out_dir / "compare_summary.txt").write_text(summary)
    print(summary, end="")
    return EXIT_OK


def _cmd_dump_config(args) -> int:
    text = default_config_text()
    if args.out:
        Path(args.out).write_text(text)
        print(f"default config written to {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgdiode",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the diode simulation")
    p_run.add_argument("--config", help="key = value config file")
    p_run.add_argument("--mode", choices=("stochastic_recombination",
                                          "no_recombination",
                                          "split_recombination"))
    p_run.add_argument("--final-time", type=float, dest="final_time",
                       help="override final time in ps")
    p_run.add_argument("--out", default="run_out", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_k = sub.add_parser("kernels", help="dump chaos kernel matrices as JSON")
    p_k.add_argument("--N", type=float, default=30.0, help="random-interval divisor")
    p_k.add_argument("--basis", choices=(PAPER_UNNORMALIZED, ORTHONORMAL),
                     default=PAPER_UNNORMALIZED)
    p_k.add_argument("--quad-points", type=int, default=64)
    p_k.add_argument("--out", help="write JSON here instead of stdout")
    p_k.set_defaults(func=_cmd_kernels)

    p_c = sub.add_parser("compare", help="compare the final moments of two runs")
    p_c.add_argument("run_a")
    p_c.add_argument("run_b")
    p_c.add_argument("--tol", type=float, default=1e-2)
    p_c.add_argument("--out", help="directory for compare.csv (default: run_a)")
    p_c.set_defaults(func=_cmd_compare)

    p_d = sub.add_parser("dump-config", help="print the documented default config")
    p_d.add_argument("--out", help="write to file instead of stdout")
    p_d.set_defaults(func=_cmd_dump_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, UsageError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
