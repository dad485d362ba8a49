"""Synthetic run directories written in the solver's documented formats."""

import csv
import json

import numpy as np
import pytest

NX, NR, NMU = 6, 4, 2
RMAX = 12.0


def write_run_dir(root, alpha1_zero=False, momentum_shift=0.0, bias=0.5,
                  seed=0):
    rng = np.random.default_rng(seed)
    root.mkdir(parents=True, exist_ok=True)
    x_edges = np.linspace(0.0, 1.0, NX + 1)
    r_edges = np.linspace(0.0, RMAX, NR + 1)
    mu_edges = np.linspace(-1.0, 1.0, NMU + 1)
    xc = 0.5 * (x_edges[:-1] + x_edges[1:])
    rc = 0.5 * (r_edges[:-1] + r_edges[1:])
    mc = 0.5 * (mu_edges[:-1] + mu_edges[1:])

    times = [0.0, 10.0]
    with open(root / "moments.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time_ps", "x", "rho", "momentum", "energy", "velocity",
                    "efield"])
        for t in times:
            for i, x in enumerate(xc):
                mom = 1e-4 * (1.0 + momentum_shift) * (1.0 + 0.01 * np.sin(2 * np.pi * x))
                w.writerow([f"{t:.6f}", repr(float(x)), repr(float(2.0 + x)),
                            repr(float(mom)), repr(1.5),
                            repr(float(mom / (2 + x))), repr(-0.5)])
    with open(root / "potential.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time_ps", "x", "potential"])
        for t in times:
            for xn in x_edges:
                w.writerow([f"{t:.6f}", repr(float(xn)), repr(float(bias * xn))])

    alpha0 = np.exp(-rc)[None, :, None] * (1.0 + 0.1 * mc)[None, None, :] \
        * (1.0 + xc)[:, None, None]
    alpha1 = np.zeros_like(alpha0) if alpha1_zero else 0.01 * rng.random(
        (NX, NR, NMU)) * alpha0
    var = 1.0 * alpha1**2
    with open(root / "stats.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time_ps", "x", "r", "mu", "mean", "var", "std"])
        for i in range(NX):
            for k in range(NR):
                for m in range(NMU):
                    w.writerow([f"{times[-1]:.6f}", repr(float(xc[i])),
                                repr(float(rc[k])), repr(float(mc[m])),
                                repr(float(alpha0[i, k, m])),
                                repr(float(var[i, k, m])),
                                repr(float(np.sqrt(var[i, k, m])))])

    snap_dir = root / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    header = {"time_ps": times[-1], "components": 2,
              "x_edges": x_edges.tolist(), "r_edges": r_edges.tolist(),
              "mu_edges": mu_edges.tolist(), "mode": "synthetic"}
    (snap_dir / "snap_0001.json").write_text(json.dumps(header))
    with open(snap_dir / "snap_0001.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["component", "i", "k", "m", "T", "X", "R", "M"])
        for c, block in ((0, alpha0), (1, alpha1)):
            for i in range(NX):
                for k in range(NR):
                    for m in range(NMU):
                        w.writerow([c, i, k, m, repr(float(block[i, k, m])),
                                    "0.0", "0.0", "0.0"])

    manifest = {"config": {"mode": "synthetic", "bias_volts": bias},
                "final_time_ps": times[-1],
                "grid": {"nx": NX, "nr": NR, "nmu": NMU},
                "outputs": {}}
    (root / "manifest.json").write_text(json.dumps(manifest))
    return root


@pytest.fixture
def run_dir(tmp_path):
    return write_run_dir(tmp_path / "run")


@pytest.fixture
def norecomb_run_dir(tmp_path):
    return write_run_dir(tmp_path / "run_norecomb", alpha1_zero=True)
