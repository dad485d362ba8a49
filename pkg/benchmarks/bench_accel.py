#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy twins.

Times the four hot sweeps (collision geometry, x/r/mu transport) and a full
Heun step on the default desk grid, under both backends, and checks that
the two paths agree numerically.

Usage:
    python benchmarks/bench_accel.py [--repeats N] [--nx NX]

The backend used by the solver at import time follows SGDIODE_NUMBA
(0 = force numpy); this script always exercises both.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sgdiode import _accel
from sgdiode.grid import DofField, KT
from sgdiode.simulate import Simulation, SimulationConfig


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(nx, repeats):
    sim = Simulation(SimulationConfig(nx=nx))
    state = sim.initial_state()
    rng = np.random.default_rng(0)
    state.field_dofs.data += 0.01 * rng.normal(size=state.field_dofs.data.shape)
    u = state.field_dofs.data[0]
    tb = sim.tables
    grid = sim.grid
    sc = sim.collision.couplings[1]
    ghost = np.ascontiguousarray(u[0, 0] * 0.0)
    efield = rng.normal(size=grid.nx)

    cases = {}
    cases["collision_geom"] = (
        lambda f: f(u[0], u[2], u[3], u[1], grid.dmu, sc.gain_tt, sc.gain_tr,
                    sc.gain_rt, sc.gain_rr, sc.loss_tt, sc.loss_tr,
                    sc.loss_rt, sc.loss_rr),
        _accel.collision_geom_numpy, _accel.collision_geom_numba)
    cases["x_sweep"] = (
        lambda f: f(u, ghost, ghost, ghost, ghost, ghost, ghost, tb.mu_pos,
                    sim.scaling.c_v, tb.i0, tb.i1, tb.i2, tb.p0, tb.p1, tb.p2,
                    np.zeros_like(u)),
        _accel.x_sweep_numpy, _accel.x_sweep_numba)
    cases["r_sweep"] = (
        lambda f: f(u, efield, tb.dx, tb.dr, tb.sqrt_rf, tb.i0, tb.i1,
                    tb.p0, tb.p1, tb.p2, tb.mu_sign, np.zeros_like(u)),
        _accel.r_sweep_numpy, _accel.r_sweep_numba)
    cases["mu_sweep"] = (
        lambda f: f(u, efield, tb.dx, tb.dmu, tb.omf2, tb.j0, tb.j1, tb.j2,
                    tb.q0, tb.q1, np.zeros_like(u)),
        _accel.mu_sweep_numpy, _accel.mu_sweep_numba)

    print(f"{'kernel':<16s} {'numpy (ms)':>12s} {'numba (ms)':>12s} {'speedup':>9s} {'max |diff|':>12s}")
    print("-" * 66)
    for name, (invoke, f_np, f_nb) in cases.items():
        t_np = timeit(lambda: invoke(f_np), repeats) * 1e3
        if f_nb is None:
            print(f"{name:<16s} {t_np:>12.3f} {'n/a':>12s}")
            continue
        invoke(f_nb)  # JIT warmup
        t_nb = timeit(lambda: invoke(f_nb), repeats) * 1e3

        res_np = np.zeros_like(u)
        res_nb = np.zeros_like(u)
        if name == "collision_geom":
            out_np = invoke(f_np)
            out_nb = invoke(f_nb)
            diff = max(float(np.abs(a - b).max()) for a, b in zip(out_np, out_nb))
        else:
            # re-run capturing residuals for the agreement check
            def run(f, res):
                if name == "x_sweep":
                    f(u, ghost, ghost, ghost, ghost, ghost, ghost, tb.mu_pos,
                      sim.scaling.c_v, tb.i0, tb.i1, tb.i2, tb.p0, tb.p1,
                      tb.p2, res)
                elif name == "r_sweep":
                    f(u, efield, tb.dx, tb.dr, tb.sqrt_rf, tb.i0, tb.i1,
                      tb.p0, tb.p1, tb.p2, tb.mu_sign, res)
                else:
                    f(u, efield, tb.dx, tb.dmu, tb.omf2, tb.j0, tb.j1, tb.j2,
                      tb.q0, tb.q1, res)
            run(f_np, res_np)
            run(f_nb, res_nb)
            diff = float(np.abs(res_np - res_nb).max())
        print(f"{name:<16s} {t_np:>12.3f} {t_nb:>12.3f} {t_np / t_nb:>8.2f}x {diff:>12.2e}")


def bench_full_step(nx, repeats):
    import importlib
    import os
    import subprocess
    import sys

    print()
    print(f"full Heun step, default desk grid (nx={nx}):")
    code = (
        "import time, numpy as np\n"
        "from sgdiode.simulate import Simulation, SimulationConfig\n"
        f"sim = Simulation(SimulationConfig(nx={nx}))\n"
        "state = sim.initial_state()\n"
        "state = sim.step(state, sim.admissible_dt(state))\n"
        "t0 = time.perf_counter()\n"
        f"n = {repeats}\n"
        "for _ in range(n):\n"
        "    state = sim.step(state, sim.admissible_dt(state))\n"
        "per = (time.perf_counter() - t0) / n\n"
        "print(f'  {per * 1e3:.2f} ms/step')\n"
    )
    for flag, label in (("1", "numba"), ("0", "numpy")):
        env = dict(os.environ, SGDIODE_NUMBA=flag)
        print(f"  backend {label}:", end="", flush=True)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main():
    parser = argparse.ArgumentParser(description="sgdiode kernel benchmark")
    parser.add_argument("--repeats", type=int, default=30)
    parser.add_argument("--nx", type=int, default=50)
    args = parser.parse_args()
    if not _accel.HAS_NUMBA:
        print("numba not importable: timing the numpy path only")
    bench_kernels(args.nx, args.repeats)
    bench_full_step(args.nx, max(args.repeats // 3, 5))


if __name__ == "__main__":
    main()
