"""Time integration of the coupled system and moment extraction.

One residual evaluation is: contact ghosts -> charge density -> Poisson
solve -> transport coefficients -> transport + collision rates (the dynamic
Gummel-style sweep).  Heun's RK2 repeats it per stage; the time step obeys
the advective CFL bound.  Moments, chaos statistics and snapshots are
written to a run directory with a checksummed manifest.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time as _time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .collision import CollisionOperator, MODES, MODE_STOCHASTIC
from .errors import ConfigurationError, NumericalFailure, UsageError
from .gpc import GpcBasis, QuadratureRule, ORTHONORMAL
from .grid import (DofField, PhaseGrid, CellQuadrature, aligned_r_edges,
                   l2_project, write_snapshot, KT, KR, KM)
from .kernels import build_kernel_matrices
from .poisson import DeviceProfile, FieldProfile, compute_density, solve_poisson
from .scaling import (PhysicalConstants, ScalingContext, ScalingOverrides,
                      build_scaling, emit_audit, ELECTRON_MASS)
from .transport import (BoundarySpec, apply_boundary, apply_transport,
                        build_tables, cfl_dt)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SimulationConfig:
    mode: str = MODE_STOCHASTIC
    final_time_ps: float = 10.0
    cfl: float = 0.3
    nx: int = 50
    nmu: int = 12
    r_cells_per_shell: int = 2
    r_max_target: float = 36.0
    bias_volts: float = 0.5
    n_outputs: int = 11
    write_snapshots: bool = True
    n_plus_per_m3: float = 5.0e23
    n_channel_per_m3: float = 2.0e21
    channel_start: float = 0.3
    channel_end: float = 0.7
    quad_points: int = 64
    n_divisor: float = 30.0
    lattice_temperature: float = 300.0
    phonon_energy_ev: float = 0.063
    effective_mass_ratio: float = 0.32
    beta_sig_figs: int = 8

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.final_time_ps > 0.0:
            raise ConfigurationError("final_time_ps must be > 0")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigurationError("cfl must lie in (0, 1)")
        if self.n_outputs < 2:
            raise ConfigurationError("n_outputs must be >= 2")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class MomentSet:
    """Per-x moments, field/potential, and pointwise chaos statistics."""

    time_ps: float
    x_centers: np.ndarray
    rho: np.ndarray
    momentum: np.ndarray
    energy: np.ndarray
    velocity: np.ndarray
    efield: np.ndarray
    x_nodes: np.ndarray
    potential: np.ndarray
    stat_mean: np.ndarray       # (nx, nr, nmu) cell means of component 0
    stat_var: np.ndarray        # (nx, nr, nmu)
    stat_std: np.ndarray
    zero_density_cells: int = 0


@dataclass
class SimState:
    field_dofs: DofField
    time_ps: float = 0.0
    steps: int = 0
    poisson: FieldProfile | None = None
    last_mass_error: float = 0.0
    last_boundary_flux: float = 0.0


def initial_condition(grid: PhaseGrid, profile: DeviceProfile,
                      scaling: ScalingContext,
                      quad: CellQuadrature | None = None) -> DofField:
    """Charge-neutral Maxwellian start: component 0 = C(x) N_D e^{-r} sqrt(r)/2.

    The per-cell constant is fixed from the discrete density of the
    projected Maxwellian shape, so rho(0, x) - N_D(x) vanishes to rounding.
    Component 1 starts identically zero.
    """
    fld = DofField.zeros(grid)
    shape = l2_project(lambda x, r, mu: np.exp(-r) * np.sqrt(r) / 2.0, grid, quad)
    w = grid.dr[:, None] * grid.dmu[None, :]
    base_density = TWO_PI * float(np.sum(shape[KT, 0] * w))
    scale = profile.doping / base_density          # (nx,)
    fld.data[0] = shape * scale[None, :, None, None]
    return fld


class Simulation:
    """Wires grid, scaling, kernels and operators for one configuration."""

    def __init__(self, config: SimulationConfig):
        self.config = config
        constants = PhysicalConstants(
            lattice_temperature=config.lattice_temperature,
            phonon_energy_ev=config.phonon_energy_ev,
            effective_mass=config.effective_mass_ratio * ELECTRON_MASS)
        overrides = ScalingOverrides(n_divisor=config.n_divisor,
                                     r_max=config.r_max_target,
                                     beta_sig_figs=config.beta_sig_figs)
        self.scaling = build_scaling(constants, overrides)
        r_edges = aligned_r_edges(self.scaling.A, config.r_cells_per_shell,
                                  config.r_max_target)
        self.grid = PhaseGrid(x_edges=np.linspace(0.0, 1.0, config.nx + 1),
                              r_edges=r_edges,
                              mu_edges=np.linspace(-1.0, 1.0, config.nmu + 1))
        self.basis = GpcBasis(normalization=ORTHONORMAL)
        self.quad = QuadratureRule.gauss_legendre(config.quad_points)
        self.kernels = build_kernel_matrices(self.scaling, self.basis, self.quad)
        self.profile = DeviceProfile.diode(
            self.grid, self.scaling, bias=config.bias_volts,
            n_plus=config.n_plus_per_m3, n_channel=config.n_channel_per_m3,
            channel=(config.channel_start, config.channel_end))
        self.tables = build_tables(self.grid)
        self.collision = CollisionOperator(self.grid, self.scaling,
                                           self.kernels, mode=config.mode)
        self.boundary = BoundarySpec(left_density=float(self.profile.doping[0]),
                                     right_density=float(self.profile.doping[-1]))

    def initial_state(self) -> SimState:
        fld = initial_condition(self.grid, self.profile, self.scaling)
        state = SimState(field_dofs=fld)
        rho_t, rho_x = compute_density(fld, self.grid)
        state.poisson = solve_poisson(rho_t, rho_x, self.profile, self.scaling, self.grid)
        return state

    def residual(self, fld: DofField) -> tuple[np.ndarray, float, FieldProfile]:
        """One Gummel sweep: ghosts, density, Poisson, transport + collisions."""
        ghosts = apply_boundary(fld, self.boundary, self.grid)
        rho_t, rho_x = compute_density(fld, self.grid)
        fp = solve_poisson(rho_t, rho_x, self.profile, self.scaling, self.grid)
        rate = np.zeros_like(fld.data)
        _, bflux = apply_transport(fld, fp.e_cell, ghosts, self.grid,
                                   self.scaling, self.tables, out=rate)
        self.collision.apply(fld, out=rate)
        return rate, bflux, fp

    def admissible_dt(self, state: SimState) -> float:
        efield = state.poisson.e_cell if state.poisson is not None else np.zeros(self.grid.nx)
        return cfl_dt(self.grid, self.scaling, efield, self.config.cfl)

    def step(self, state: SimState, dt: float) -> SimState:
        """Heun RK2 step; raises NumericalFailure on non-finite state."""
        u0 = state.field_dofs.data
        rate0, bflux0, fp0 = self.residual(state.field_dofs)
        mid = DofField(grid=self.grid, data=u0 + dt * rate0)
        rate1, bflux1, _ = self.residual(mid)
        new = u0 + (0.5 * dt) * (rate0 + rate1)
        if not np.isfinite(new).all():
            raise NumericalFailure(
                f"non-finite state after step {state.steps} at t = {state.time_ps} ps")
        vol = self.grid.cell_volume()
        dmass = float(np.sum((new[0, KT] - u0[0, KT]) * vol))
        net_bdry = 0.5 * dt * (bflux0 + bflux1)
        out = SimState(field_dofs=DofField(grid=self.grid, data=new),
                       time_ps=state.time_ps + dt, steps=state.steps + 1,
                       poisson=fp0,
                       last_mass_error=abs(dmass - net_bdry),
                       last_boundary_flux=net_bdry)
        rho_t, rho_x = compute_density(out.field_dofs, self.grid)
        out.poisson = solve_poisson(rho_t, rho_x, self.profile, self.scaling, self.grid)
        return out

    def extract_moments(self, state: SimState) -> MomentSet:
        return extract_moments(state.field_dofs, state.poisson, self.grid,
                               self.basis, state.time_ps)


def extract_moments(fld: DofField, fp: FieldProfile, grid: PhaseGrid,
                    basis: GpcBasis, time_ps: float) -> MomentSet:
    """Density, momentum, energy, velocity plus pointwise chaos statistics.

    Moments use the mean chaos component; velocity and energy are reported
    as 0 where the density vanishes (flagged in zero_density_cells).
    Units: density in k_scale^3, velocity in sqrt(2 K_B T_L / m*), energy
    per particle in K_B T_L.
    """
    re = grid.r_edges
    a, b = re[:-1], re[1:]
    c = 0.5 * (a + b)
    hw = 0.5 * (b - a)
    i0 = (b**1.5 - a**1.5) * (2.0 / 3.0)
    i1 = ((b**2.5 - a**2.5) * (2.0 / 5.0) - c * i0) / hw
    e0 = (b**2 - a**2) / 2.0
    e1 = ((b**3 - a**3) / 3.0 - c * e0) / hw
    me = grid.mu_edges
    p0 = (me[1:]**2 - me[:-1]**2) / 2.0
    p1 = ((me[1:]**3 - me[:-1]**3) / 3.0 - grid.mu_centers * p0) / (grid.dmu / 2.0)

    t = fld.data[0, KT]
    r_ = fld.data[0, KR]
    m_ = fld.data[0, KM]
    dmu = grid.dmu
    rho = TWO_PI * np.einsum("ikm,k,m->i", t, grid.dr, dmu)
    mom = TWO_PI * (np.einsum("ikm,k,m->i", t, i0, p0)
                    + np.einsum("ikm,k,m->i", r_, i1, p0)
                    + np.einsum("ikm,k,m->i", m_, i0, p1))
    edens = TWO_PI * (np.einsum("ikm,k,m->i", t, e0, dmu)
                      + np.einsum("ikm,k,m->i", r_, e1, dmu))

    tiny = np.max(np.abs(rho)) * 1e-14 + 1e-300
    ok = np.abs(rho) > tiny
    velocity = np.where(ok, mom / np.where(ok, rho, 1.0), 0.0)
    energy = np.where(ok, edens / np.where(ok, rho, 1.0), 0.0)

    mean = fld.data[0, KT].copy()
    gram11 = basis.gram[1, 1]
    var = fld.data[1, KT] ** 2 * gram11
    return MomentSet(time_ps=time_ps, x_centers=grid.x_centers, rho=rho,
                     momentum=mom, energy=energy, velocity=velocity,
                     efield=fp.e_cell.copy(), x_nodes=grid.x_edges.copy(),
                     potential=fp.v_nodes.copy(), stat_mean=mean,
                     stat_var=var, stat_std=np.sqrt(var),
                     zero_density_cells=int(np.sum(~ok)))


@dataclass
class ComparisonReport:
    """Relative-difference summary between two matched-grid moment sets."""

    rel_diff: dict[str, float]
    profiles: dict[str, np.ndarray]
    momentum_diff_to_mean: float
    flagged: tuple[str, ...]

    def to_text(self, tol: float = 1e-2) -> str:
        lines = ["moment comparison (L1 relative differences)"]
        for name, val in self.rel_diff.items():
            mark = " *" if name in self.flagged else ""
            lines.append(f"  {name:10s} {val:.6e}{mark}")
        lines.append(f"  momentum difference / mean momentum = {self.momentum_diff_to_mean:.6e}")
        lines.append(f"  (* = above tolerance {tol})")
        return "\n".join(lines) + "\n"


def compare_runs(a: MomentSet, b: MomentSet, tol: float = 1e-2) -> ComparisonReport:
    if a.x_centers.shape != b.x_centers.shape or not np.allclose(a.x_centers, b.x_centers):
        raise UsageError("moment sets live on different grids")
    rel = {}
    profiles = {}
    for name in ("rho", "momentum", "energy", "velocity", "efield"):
        va, vb = getattr(a, name), getattr(b, name)
        scale = float(np.mean(np.abs(va)))
        profiles[name] = va - vb
        rel[name] = float(np.mean(np.abs(va - vb)) / scale) if scale > 0.0 else 0.0
    scale_m = float(np.mean(np.abs(a.momentum)))
    mom_ratio = (float(np.mean(np.abs(a.momentum - b.momentum)) / scale_m)
                 if scale_m > 0.0 else 0.0)
    flagged = tuple(name for name, val in rel.items() if val > tol)
    return ComparisonReport(rel_diff=rel, profiles=profiles,
                            momentum_diff_to_mean=mom_ratio, flagged=flagged)


# ---------------------------------------------------------------------------
# run directory output
# ---------------------------------------------------------------------------

def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_moment_rows(writer, ms: MomentSet) -> None:
    for i in range(ms.x_centers.size):
        writer.writerow([f"{ms.time_ps:.6f}", repr(float(ms.x_centers[i])),
                         repr(float(ms.rho[i])), repr(float(ms.momentum[i])),
                         repr(float(ms.energy[i])), repr(float(ms.velocity[i])),
                         repr(float(ms.efield[i]))])


def run_simulation(config: SimulationConfig, out_dir, progress=None) -> dict:
    """Run to final_time_ps, writing moments/snapshots/manifest into out_dir.

    Returns a summary dict with the manifest contents and the final moments.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snap_dir = out / "snapshots"
    if config.write_snapshots:
        snap_dir.mkdir(exist_ok=True)

    timings = {}
    t0 = _time.perf_counter()
    sim = Simulation(config)
    state = sim.initial_state()
    timings["setup_s"] = _time.perf_counter() - t0

    emit_audit(sim.scaling, out / "scaling_audit.txt")

    output_times = np.linspace(0.0, config.final_time_ps, config.n_outputs)
    moments_path = out / "moments.csv"
    potential_path = out / "potential.csv"
    mom_fh = open(moments_path, "w", newline="")
    pot_fh = open(potential_path, "w", newline="")
    mom_writer = csv.writer(mom_fh)
    pot_writer = csv.writer(pot_fh)
    mom_writer.writerow(["time_ps", "x", "rho", "momentum", "energy",
                         "velocity", "efield"])
    pot_writer.writerow(["time_ps", "x", "potential"])

    def emit(ms: MomentSet, index: int):
        _write_moment_rows(mom_writer, ms)
        for j in range(ms.x_nodes.size):
            pot_writer.writerow([f"{ms.time_ps:.6f}", repr(float(ms.x_nodes[j])),
                                 repr(float(ms.potential[j]))])
        if config.write_snapshots:
            write_snapshot(state.field_dofs, snap_dir / f"snap_{index:04d}.csv",
                           snap_dir / f"snap_{index:04d}.json", ms.time_ps,
                           extra={"mode": config.mode})

    t0 = _time.perf_counter()
    ms = sim.extract_moments(state)
    emit(ms, 0)
    max_mass_err = 0.0
    next_out = 1
    try:
        while state.time_ps < config.final_time_ps - 1e-12:
            dt = sim.admissible_dt(state)
            dt = min(dt, float(output_times[next_out]) - state.time_ps)
            state = sim.step(state, dt)
            max_mass_err = max(max_mass_err, state.last_mass_error)
            if state.time_ps >= output_times[next_out] - 1e-12:
                ms = sim.extract_moments(state)
                emit(ms, next_out)
                if progress is not None:
                    progress(state.time_ps, config.final_time_ps, state.steps)
                next_out = min(next_out + 1, output_times.size - 1)
    except NumericalFailure:
        write_snapshot(state.field_dofs, out / "diagnostic_snapshot.csv",
                       out / "diagnostic_snapshot.json", state.time_ps,
                       extra={"mode": config.mode, "failed": True})
        mom_fh.close()
        pot_fh.close()
        raise
    timings["evolve_s"] = _time.perf_counter() - t0
    mom_fh.close()
    pot_fh.close()

    final = sim.extract_moments(state)
    stats_path = out / "stats.csv"
    with open(stats_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time_ps", "x", "r", "mu", "mean", "var", "std"])
        xc, rc, mc = sim.grid.x_centers, sim.grid.r_centers, sim.grid.mu_centers
        for i in range(sim.grid.nx):
            for k in range(sim.grid.nr):
                for m in range(sim.grid.nmu):
                    w.writerow([f"{final.time_ps:.6f}", repr(float(xc[i])),
                                repr(float(rc[k])), repr(float(mc[m])),
                                repr(float(final.stat_mean[i, k, m])),
                                repr(float(final.stat_var[i, k, m])),
                                repr(float(final.stat_std[i, k, m]))])

    files = [moments_path, potential_path, stats_path, out / "scaling_audit.txt"]
    if config.write_snapshots:
        files.extend(sorted(snap_dir.iterdir()))
    manifest = {
        "version": __version__,
        "config": config.to_dict(),
        "grid": {"nx": sim.grid.nx, "nr": sim.grid.nr, "nmu": sim.grid.nmu,
                 "r_max": sim.grid.r_max},
        "steps": state.steps,
        "final_time_ps": state.time_ps,
        "max_mass_accounting_error": max_mass_err,
        "scaling_audit_sha256": _sha256(out / "scaling_audit.txt"),
        "timings": timings,
        "outputs": {str(p.relative_to(out)): _sha256(p) for p in files},
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1)
    manifest["final_moments"] = final
    manifest["simulation"] = sim
    manifest["state"] = state
    return manifest
