"""Twin-path agreement: the numba kernels must reproduce the numpy kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from sgdiode import _accel

needs_numba = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba unavailable")


def random_inputs(seed=0, nx=5, nr=9, nmu=4):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(4, nx, nr, nmu))
    dmu = rng.uniform(0.3, 0.6, nmu)
    gain = [rng.normal(size=(nr, nr)) for _ in range(4)]
    loss = [rng.normal(size=nr) for _ in range(4)]
    return u, dmu, gain, loss


@needs_numba
def test_collision_geom_twins_agree():
    u, dmu, gain, loss = random_inputs(1)
    args = (u[0], u[2], u[3], u[1], dmu, *gain, *loss)
    out_np = _accel.collision_geom_numpy(*args)
    out_nb = _accel.collision_geom_numba(*args)
    for a, b in zip(out_np, out_nb):
        assert np.abs(a - b).max() <= 1e-13 * max(1.0, np.abs(a).max())


@needs_numba
def test_x_sweep_twins_agree():
    rng = np.random.default_rng(2)
    u, dmu, _, _ = random_inputs(2)
    nx, nr, nmu = u.shape[1:]
    ghosts = [rng.normal(size=(nr, nmu)) for _ in range(6)]
    mu_pos = np.array([False, False, True, True])
    i0, i1, i2 = (rng.uniform(0.5, 2.0, nr) for _ in range(3))
    p0, p1, p2 = (rng.normal(size=nmu) for _ in range(3))
    res_np = np.zeros_like(u)
    res_nb = np.zeros_like(u)
    t_np = _accel.x_sweep_numpy(u, *ghosts, mu_pos, 0.7, i0, i1, i2,
                                p0, p1, p2, res_np)
    t_nb = _accel.x_sweep_numba(u, *ghosts, mu_pos, 0.7, i0, i1, i2,
                                p0, p1, p2, res_nb)
    assert np.abs(res_np - res_nb).max() <= 1e-13 * np.abs(res_np).max()
    assert t_np == pytest.approx(t_nb, rel=1e-13, abs=1e-13)


@needs_numba
def test_r_sweep_twins_agree():
    rng = np.random.default_rng(3)
    u, dmu, _, _ = random_inputs(3)
    nx, nr, nmu = u.shape[1:]
    f_e = rng.normal(size=nx)
    dx = rng.uniform(0.1, 0.2, nx)
    dr = rng.uniform(0.5, 1.5, nr)
    sqrt_rf = np.sqrt(np.linspace(0.0, 12.0, nr + 1))
    i0, i1 = (rng.uniform(0.5, 2.0, nr) for _ in range(2))
    p0, p1, p2 = (rng.normal(size=nmu) for _ in range(3))
    mu_sign = np.array([-1.0, -1.0, 1.0, 1.0])
    res_np = np.zeros_like(u)
    res_nb = np.zeros_like(u)
    t_np = _accel.r_sweep_numpy(u, f_e, dx, dr, sqrt_rf, i0, i1, p0, p1, p2,
                                mu_sign, res_np)
    t_nb = _accel.r_sweep_numba(u, f_e, dx, dr, sqrt_rf, i0, i1, p0, p1, p2,
                                mu_sign, res_nb)
    assert np.abs(res_np - res_nb).max() <= 1e-13 * np.abs(res_np).max()
    assert t_np == pytest.approx(t_nb, rel=1e-12, abs=1e-13)


@needs_numba
def test_mu_sweep_twins_agree():
    rng = np.random.default_rng(4)
    u, dmu, _, _ = random_inputs(4)
    nx, nr, nmu = u.shape[1:]
    h_e = rng.normal(size=nx)
    dx = rng.uniform(0.1, 0.2, nx)
    omf2 = 1.0 - np.linspace(-1, 1, nmu + 1) ** 2
    j0, j1, j2 = (rng.uniform(0.5, 2.0, nr) for _ in range(3))
    q0, q1 = (rng.normal(size=nmu) for _ in range(2))
    res_np = np.zeros_like(u)
    res_nb = np.zeros_like(u)
    _accel.mu_sweep_numpy(u, h_e, dx, dmu, omf2, j0, j1, j2, q0, q1, res_np)
    _accel.mu_sweep_numba(u, h_e, dx, dmu, omf2, j0, j1, j2, q0, q1, res_nb)
    assert np.abs(res_np - res_nb).max() <= 1e-13 * np.abs(res_np).max()


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, SGDIODE_NUMBA="0")
    code = "from sgdiode import _accel; print(_accel.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_full_step_agrees_across_backends():
    # one Heun step of the biased diode, both backends, 1e-12 agreement
    code = """
import numpy as np
from sgdiode.simulate import Simulation, SimulationConfig
cfg = SimulationConfig(nx=10, nmu=4, r_cells_per_shell=1, r_max_target=15.0)
sim = Simulation(cfg)
state = sim.initial_state()
state = sim.step(state, 1e-3)
np.save("{out}", state.field_dofs.data)
"""
    import tempfile
    from pathlib import Path
    results = []
    with tempfile.TemporaryDirectory() as td:
        for flag in ("1", "0"):
            out = Path(td) / f"state_{flag}.npy"
            env = dict(os.environ, SGDIODE_NUMBA=flag)
            subprocess.run([sys.executable, "-c", code.format(out=out)],
                           env=env, check=True, cwd=td)
            results.append(np.load(out))
    a, b = results
    assert np.abs(a - b).max() <= 1e-12 * max(1.0, np.abs(a).max())
