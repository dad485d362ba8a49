"""Acceptance suite: every primary criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line
per criterion.  The expensive diode runs (both collision modes, 10 ps,
default desk grid) execute once per session and are shared.
"""

import csv
import json
import math

import numpy as np
import pytest

from sgdiode.collision import MODE_NO_RECOMB, MODE_STOCHASTIC
from sgdiode.gpc import GpcBasis, QuadratureRule, ORTHONORMAL, PAPER_UNNORMALIZED
from sgdiode.grid import DofField, read_snapshot, KT
from sgdiode.kernels import (build_kernel_matrices, compute_c_minus,
                             compute_c_minus_analytic,
                             eval_phonon_energy_b_distderiv,
                             eval_phonon_energy_b_full, split_recombination)
from sgdiode.poisson import DeviceProfile, solve_poisson
from sgdiode.scaling import build_scaling
from sgdiode.simulate import Simulation, SimulationConfig, run_simulation
from tests.test_transport import advection_errors

CTX = build_scaling()
QUAD = QuadratureRule.gauss_legendre(64)
BASIS_P = GpcBasis(normalization=PAPER_UNNORMALIZED)
BASIS_O = GpcBasis(normalization=ORTHONORMAL)


def report(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
    assert ok, f"{name}: {detail}"


# -- criterion 1: kernel constants ------------------------------------------

def test_criterion_1_kernel_constants():
    errs = (abs(CTX.A - 2.4372169626), abs(CTX.B - 0.08124056542),
            abs(CTX.n_q - 0.09577484271))
    report("1 kernel constants A,B,n_q to 1e-9", all(e < 1e-9 for e in errs),
           f"errors {errs[0]:.2e}, {errs[1]:.2e}, {errs[2]:.2e}")


# -- criterion 2: C- matrix by two routes ------------------------------------

def test_criterion_2_c_minus_two_routes():
    ref = np.array([[0.0959125, -0.00284506], [-0.00284506, 0.03200755]])
    cm = compute_c_minus(CTX, BASIS_P, QUAD)
    ca = compute_c_minus_analytic(CTX)
    err_ref = float(np.abs(cm - ref).max())
    err_routes = float(np.abs(cm - ca).max())
    report("2 C- matrix, quadrature vs reference (5e-6) and analytic route (1e-8)",
           err_ref < 5e-6 and err_routes < 1e-8,
           f"vs reference {err_ref:.2e}, route agreement {err_routes:.2e}")


# -- criterion 3: recombination split ----------------------------------------

def test_criterion_3_recombination_split():
    ref = np.array([[0.00013765729, -0.00284506], [-0.00284506, -0.06376729271]])
    km = build_kernel_matrices(CTX, BASIS_P, QUAD)
    err_split = float(np.abs(split_recombination(km) - ref).max())
    err_plus = float(np.abs(km.c_plus - km.c_minus - np.eye(2)).max())
    report("3 recombination split (5e-6) and C+ = C- + I (1e-14)",
           err_split < 5e-6 and err_plus < 1e-14,
           f"split {err_split:.2e}, C+ identity {err_plus:.2e}")


# -- criterion 4: conservation suite ------------------------------------------

def test_criterion_4a_collision_mass_conservation():
    sim = Simulation(SimulationConfig())
    rng = np.random.default_rng(0)
    fld = DofField.zeros(sim.grid)
    fld.data[:] = rng.normal(size=fld.data.shape)
    rate = sim.collision.apply(fld)
    vol = sim.grid.cell_volume()
    worst = 0.0
    for c in range(2):
        dm = abs(float(np.sum(rate[c, KT] * vol)))
        scale = float(np.sum(np.abs(fld.data[c, KT]) * vol))
        worst = max(worst, dm / scale)
    report("4a collision mass conservation <= 1e-11 relative", worst <= 1e-11,
           f"worst component {worst:.2e}")


def test_criterion_4b_equilibrium_fixed_point():
    cfg = SimulationConfig(mode=MODE_NO_RECOMB, bias_volts=0.0,
                           n_plus_per_m3=5e23, n_channel_per_m3=5e23)
    sim = Simulation(cfg)
    state = sim.initial_state()
    ref = state.field_dofs.data.copy()
    scale = float(np.abs(ref[0, KT]).max())
    for _ in range(100):
        state = sim.step(state, sim.admissible_dt(state))
    drift = float(np.abs(state.field_dofs.data - ref).max()) / scale
    report("4b zero-bias equilibrium fixed point, 100 steps, 1e-8 relative",
           drift <= 1e-8, f"drift {drift:.2e}")


def test_criterion_4c_mass_accounted_by_boundary_flux():
    sim = Simulation(SimulationConfig())
    state = sim.initial_state()
    mass_scale = abs(state.field_dofs.component_mass(0))
    worst = 0.0
    for _ in range(50):
        state = sim.step(state, sim.admissible_dt(state))
        worst = max(worst, state.last_mass_error / mass_scale)
    report("4c per-step mass drift accounted by boundary flux to 1e-10",
           worst <= 1e-10, f"worst accounting error {worst:.2e}")


# -- criterion 5: Poisson ------------------------------------------------------

def test_criterion_5_poisson():
    sim = Simulation(SimulationConfig())
    grid = sim.grid
    prof = DeviceProfile.diode(grid, CTX, bias=0.5)
    fp = solve_poisson(prof.doping.copy(), np.zeros(grid.nx), prof, CTX, grid)
    err_lin = float(np.abs(fp.v_nodes - 0.5 * grid.x_edges).max())
    ok_lap = (fp.v_nodes[0] == 0.0 and abs(fp.v_nodes[-1] - 0.5) < 1e-12
              and err_lin < 1e-12)

    # manufactured sine source, exact-on-P1 oracle (independent integration)
    prof_u = DeviceProfile.uniform(grid, CTX, 5e23, bias=0.3)
    eps_r = CTX.constants.relative_permittivity
    amp = 1.0 / CTX.c_P
    xc, dx = grid.x_centers, grid.dx
    rho_t = prof_u.doping + amp * np.sin(2 * np.pi * xc)
    rho_x = amp * np.cos(2 * np.pi * xc) * 2 * np.pi * dx / 2.0
    fp2 = solve_poisson(rho_t, rho_x, prof_u, CTX, grid)
    s_t = CTX.c_P * (rho_t - prof_u.doping) / eps_r
    s_x = CTX.c_P * rho_x / eps_r
    vprime_left = np.concatenate([[0.0], np.cumsum(s_t * dx)])[:-1]
    gn = np.array([-1.0, 1.0]) / math.sqrt(3.0)
    cell_int = np.zeros(grid.nx)
    for a in gn:
        cell_int += (dx / 2.0) * (vprime_left + (dx / 2.0)
                                  * (s_t * (a + 1.0) + s_x * (a * a - 1.0) / 2.0))
    v_unfixed = np.concatenate([[0.0], np.cumsum(cell_int)])
    v_oracle = v_unfixed + (prof_u.bias - v_unfixed[-1]) * grid.x_edges
    err_manu = float(np.abs(fp2.v_nodes - v_oracle).max())
    report("5 Poisson: Laplace 1e-12, manufactured source 1e-10",
           ok_lap and err_manu < 1e-10,
           f"Laplace {err_lin:.2e}, manufactured {err_manu:.2e}")


# -- criterion 6: transport convergence order ---------------------------------

def test_criterion_6_transport_order():
    errs = advection_errors([(16, 16, 4), (32, 32, 8), (64, 64, 16)])
    order = math.log2(errs[1] / errs[2])
    report("6 transport L2 convergence order >= 1.8", order >= 1.8,
           f"observed order {order:.3f}")


# -- criteria 7 and 8: full diode runs ----------------------------------------

@pytest.fixture(scope="module")
def diode_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("diode_runs")
    out = {}
    for mode in (MODE_STOCHASTIC, MODE_NO_RECOMB):
        cfg = SimulationConfig(mode=mode, n_outputs=6)
        out[mode] = {
            "dir": root / mode,
            "summary": run_simulation(cfg, root / mode),
        }
    return out


def _final_moments(run):
    return run["summary"]["final_moments"]


def test_criterion_7_no_recombination_benchmark(diode_runs):
    run = diode_runs[MODE_NO_RECOMB]
    state = run["summary"]["state"]
    alpha1_final = float(np.abs(state.field_dofs.data[1]).max())
    snaps = sorted((run["dir"] / "snapshots").glob("snap_*.csv"))
    alpha1_snaps = 0.0
    for snap in snaps:
        fld, _ = read_snapshot(snap, snap.with_suffix(".json"))
        alpha1_snaps = max(alpha1_snaps, float(np.abs(fld.data[1]).max()))
    with open(run["dir"] / "stats.csv", newline="") as fh:
        var_max = max(abs(float(row["var"])) for row in csv.DictReader(fh))
    ok = alpha1_final == 0.0 and alpha1_snaps == 0.0 and var_max == 0.0
    report("7 no-recombination: alpha_1 identically zero, Var[f] output zero",
           ok, f"alpha1 final {alpha1_final}, snapshots {alpha1_snaps}, var {var_max}")


def test_criterion_8a_steady_current_flat(diode_runs):
    m = _final_moments(diode_runs[MODE_STOCHASTIC]).momentum
    dev = float(np.max(np.abs(m - m.mean())) / abs(m.mean()))
    report("8a steady current spatially flat within 5%", dev <= 0.05,
           f"max deviation {dev:.3%}")


def test_criterion_8b_density_energy_agree(diode_runs):
    a = _final_moments(diode_runs[MODE_STOCHASTIC])
    b = _final_moments(diode_runs[MODE_NO_RECOMB])
    rho_diff = float(np.mean(np.abs(a.rho - b.rho)) / np.mean(np.abs(a.rho)))
    e_diff = float(np.mean(np.abs(a.energy - b.energy)) / np.mean(np.abs(a.energy)))
    report("8b density and energy of the two runs agree within 1e-2",
           rho_diff <= 1e-2 and e_diff <= 1e-2,
           f"density {rho_diff:.2e}, energy {e_diff:.2e}")


def test_criterion_8c_momentum_difference_bracket(diode_runs):
    # Stated bracket [1e-3, 1e-1].  With the standard silicon coupling set
    # the converged value sits near 5.6e-4 (see decisions ledger): the
    # difference is real, nonzero, and orders of magnitude below the mean,
    # but below the bracket's lower edge.  The criterion is asserted as
    # written rather than tuned.
    a = _final_moments(diode_runs[MODE_STOCHASTIC])
    b = _final_moments(diode_runs[MODE_NO_RECOMB])
    diff = float(np.mean(np.abs(a.momentum - b.momentum)))
    ratio = diff / float(np.mean(np.abs(a.momentum)))
    report("8c momentum difference ratio inside [1e-3, 1e-1]",
           1e-3 <= ratio <= 1e-1,
           f"nonzero={diff > 0.0}, ratio {ratio:.3e}")


# -- criterion 9: phonon-energy kernel evaluators ------------------------------

def test_criterion_9_phonon_energy_evaluators():
    gate = eval_phonon_energy_b_full(1.0, CTX, BASIS_P)
    gates_zero = bool(np.all(gate.b_matrix == 0.0))

    up = eval_phonon_energy_b_full(-CTX.A, CTX, BASIS_P)
    dn = eval_phonon_energy_b_full(CTX.A, CTX, BASIS_P)
    e_up = abs(up.b_matrix[0, 0] - 0.5 / (1.0 - math.exp(-CTX.A)))
    e_dn = abs(dn.b_matrix[0, 0] - 0.5 / math.expm1(CTX.A))
    shells_ok = e_up < 1e-6 and e_dn < 1e-6

    h = 1.0 / CTX.N
    sample = eval_phonon_energy_b_distderiv(0.5, CTX, BASIS_P, half_width=h)
    z = np.linspace(-h, h, 1_000_001)
    oracle = float(np.trapezoid((z / h) * z / (2.0 * h), z))
    coeff = -CTX.n_q * (1.0 + CTX.n_q)
    shell = {s.gap: s for s in sample.delta_shells}[CTX.A]
    e_dd = abs(shell.matrix[0, 1] - coeff * oracle)
    report("9 phonon-energy kernels: gates zero, shell values 1e-6, "
           "delta weights 1e-10",
           gates_zero and shells_ok and e_dd < 1e-10,
           f"shell errs {e_up:.2e}/{e_dn:.2e}, delta weight err {e_dd:.2e}")
