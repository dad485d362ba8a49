"""DG weak-form transport in (x, r, mu) with upwind fluxes.

Under azimuthal symmetry the advection coefficients reduce to

    a1 = c_v sqrt(r) mu                      (x, group velocity)
    a4 = -2 c_E sqrt(r) mu E_x               (r, field heating)
    a5 = -c_E (1 - mu^2) E_x / sqrt(r)       (mu, field rotation)

All cell and face integrals against the P1 basis are polynomial times
sqrt(r)^(+-1) and are precomputed in closed form, so volume/face
cancellations (free-streaming of a constant, analytic-zero faces at r = 0
and mu = +-1) hold exactly.  The general-phi coefficients a2, a3, a6 are
provided pointwise for completeness but are compiled out of the run path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import ConfigurationError, NumericalFailure
from .grid import DofField, PhaseGrid, KT, KX, KR, KM
from .scaling import ScalingContext

TWO_PI = 2.0 * math.pi


# -- pointwise coefficients (general phi; run path uses the symmetric subset)

def a1_coeff(r, mu, scaling):
    return scaling.c_v * np.sqrt(r) * mu


def a2_coeff(r, mu, phi, scaling):
    return scaling.c_v * np.sqrt(r) * np.sqrt(1.0 - mu**2) * np.cos(phi)


def a3_coeff(r, mu, phi, scaling):
    return scaling.c_v * np.sqrt(r) * np.sqrt(1.0 - mu**2) * np.sin(phi)


def a4_coeff(r, mu, phi, e_vec, scaling):
    e_r = (mu * e_vec[0] + np.sqrt(1.0 - mu**2) * np.cos(phi) * e_vec[1]
           + np.sqrt(1.0 - mu**2) * np.sin(phi) * e_vec[2])
    return -2.0 * scaling.c_E * np.sqrt(r) * e_r


def a5_coeff(r, mu, phi, e_vec, scaling):
    e_mu = (np.sqrt(1.0 - mu**2) * e_vec[0] - mu * np.cos(phi) * e_vec[1]
            - mu * np.sin(phi) * e_vec[2])
    return -scaling.c_E * (np.sqrt(1.0 - mu**2) / np.sqrt(r)) * e_mu


def a6_coeff(r, mu, phi, e_vec, scaling):
    e_phi = -np.sin(phi) * e_vec[1] + np.cos(phi) * e_vec[2]
    return -scaling.c_E * e_phi / (np.sqrt(r) * np.sqrt(1.0 - mu**2))


@dataclass(frozen=True)
class BoundarySpec:
    """Contact densities for the charge-neutral inflow rescaling.

    periodic_x is a test-only mode that wraps the x traces instead.
    """

    left_density: float
    right_density: float
    periodic_x: bool = False


@dataclass(frozen=True)
class TransportTables:
    """Exact per-cell moments of the advection weights against P1 factors."""

    dx: np.ndarray = field(repr=False)
    dr: np.ndarray = field(repr=False)
    dmu: np.ndarray = field(repr=False)
    i0: np.ndarray = field(repr=False)   # int sqrt(r) {1, xi, xi^2} dr
    i1: np.ndarray = field(repr=False)
    i2: np.ndarray = field(repr=False)
    j0: np.ndarray = field(repr=False)   # int r^(-1/2) {1, xi, xi^2} dr
    j1: np.ndarray = field(repr=False)
    j2: np.ndarray = field(repr=False)
    p0: np.ndarray = field(repr=False)   # int mu {1, xi, xi^2} dmu
    p1: np.ndarray = field(repr=False)
    p2: np.ndarray = field(repr=False)
    q0: np.ndarray = field(repr=False)   # int (1-mu^2) {1, xi} dmu
    q1: np.ndarray = field(repr=False)
    sqrt_rf: np.ndarray = field(repr=False)
    omf2: np.ndarray = field(repr=False)  # 1 - mu_face^2
    mu_pos: np.ndarray = field(repr=False)
    mu_sign: np.ndarray = field(repr=False)
    volume: np.ndarray = field(repr=False)


def build_tables(grid: PhaseGrid) -> TransportTables:
    if grid.nmu % 2 != 0:
        raise ConfigurationError("nmu must be even so no mu cell straddles 0")
    re = grid.r_edges
    a, b = re[:-1], re[1:]
    c = 0.5 * (a + b)
    hw = 0.5 * (b - a)

    s32 = (b**1.5 - a**1.5) * (2.0 / 3.0)
    s52 = (b**2.5 - a**2.5) * (2.0 / 5.0)
    s72 = (b**3.5 - a**3.5) * (2.0 / 7.0)
    i0 = s32
    i1 = (s52 - c * s32) / hw
    i2 = (s72 - 2.0 * c * s52 + c**2 * s32) / hw**2

    sm12 = 2.0 * (np.sqrt(b) - np.sqrt(a))
    j0 = sm12
    j1 = (s32 - c * sm12) / hw
    j2 = (s52 - 2.0 * c * s32 + c**2 * sm12) / hw**2

    me = grid.mu_edges
    al, be = me[:-1], me[1:]
    g = 0.5 * (al + be)
    h = 0.5 * (be - al)
    m1 = (be**2 - al**2) / 2.0
    m2 = (be**3 - al**3) / 3.0
    m3 = (be**4 - al**4) / 4.0
    p0 = m1
    p1 = (m2 - g * m1) / h
    p2 = (m3 - 2.0 * g * m2 + g**2 * m1) / h**2
    q0 = (be - al) - m2
    q1 = ((m1 - m3) - g * q0) / h

    return TransportTables(
        dx=grid.dx, dr=grid.dr, dmu=grid.dmu,
        i0=i0, i1=i1, i2=i2, j0=j0, j1=j1, j2=j2,
        p0=p0, p1=p1, p2=p2, q0=q0, q1=q1,
        sqrt_rf=np.sqrt(re), omf2=1.0 - me**2,
        mu_pos=grid.mu_centers > 0.0,
        mu_sign=np.sign(grid.mu_centers),
        volume=grid.cell_volume())


@dataclass
class GhostSlabs:
    """Inflow traces outside the x faces, per component: (ncomp, nr, nmu)."""

    left_t: np.ndarray
    left_r: np.ndarray
    left_m: np.ndarray
    right_t: np.ndarray
    right_r: np.ndarray
    right_m: np.ndarray
    left_trace_density: float
    right_trace_density: float


def trace_density(t_slab: np.ndarray, grid: PhaseGrid) -> float:
    """Density of a (nr, nmu) trace slab: 2pi sum T dr dmu."""
    return float(TWO_PI * np.sum(t_slab * grid.dr[:, None] * grid.dmu[None, :]))


def apply_boundary(fld: DofField, spec: BoundarySpec, grid: PhaseGrid) -> GhostSlabs:
    """Ghost pdf slabs: interior boundary trace rescaled to the contact density.

    Both chaos components are rescaled by the mean-component factor, so a
    field with zero fluctuation keeps it identically zero at the contacts.
    """
    d = fld.data
    lt = d[:, KT, 0] - d[:, KX, 0]           # trace at x = 0^+
    lr = d[:, KR, 0].copy()
    lm = d[:, KM, 0].copy()
    rt = d[:, KT, -1] + d[:, KX, -1]         # trace at x = 1^-
    rr = d[:, KR, -1].copy()
    rm = d[:, KM, -1].copy()

    if spec.periodic_x:
        return GhostSlabs(left_t=rt, left_r=rr, left_m=rm,
                          right_t=lt, right_r=lr, right_m=lm,
                          left_trace_density=trace_density(rt[0], grid),
                          right_trace_density=trace_density(lt[0], grid))

    rho_l = trace_density(lt[0], grid)
    rho_r = trace_density(rt[0], grid)
    if not (rho_l > 0.0 and rho_r > 0.0):
        raise NumericalFailure(
            f"contact trace density must stay positive (left {rho_l}, right {rho_r})")
    scale_l = spec.left_density / rho_l
    scale_r = spec.right_density / rho_r
    return GhostSlabs(left_t=lt * scale_l, left_r=lr * scale_l, left_m=lm * scale_l,
                      right_t=rt * scale_r, right_r=rr * scale_r, right_m=rm * scale_r,
                      left_trace_density=rho_l, right_trace_density=rho_r)


def apply_transport(fld: DofField, efield: np.ndarray, ghosts: GhostSlabs,
                    grid: PhaseGrid, scaling: ScalingContext,
                    tables: TransportTables, out: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Accumulate the transport rate of change; returns (rate, boundary inflow).

    efield is the per-x-cell field value (dimensionless).  Both chaos
    components are advected identically.
    """
    tb = tables
    data = fld.data
    if out is None:
        out = np.zeros_like(data)
    f_e = -2.0 * scaling.c_E * efield
    h_e = -scaling.c_E * efield
    tally = 0.0
    for c in range(fld.ncomp):
        res = np.zeros_like(data[c])
        tally_c = _accel.x_sweep(
            data[c], ghosts.left_t[c], ghosts.left_r[c], ghosts.left_m[c],
            ghosts.right_t[c], ghosts.right_r[c], ghosts.right_m[c],
            tb.mu_pos, scaling.c_v, tb.i0, tb.i1, tb.i2, tb.p0, tb.p1, tb.p2, res)
        tally_c += _accel.r_sweep(
            data[c], f_e, tb.dx, tb.dr, tb.sqrt_rf, tb.i0, tb.i1,
            tb.p0, tb.p1, tb.p2, tb.mu_sign, res)
        tally_c += _accel.mu_sweep(
            data[c], h_e, tb.dx, tb.dmu, tb.omf2, tb.j0, tb.j1, tb.j2,
            tb.q0, tb.q1, res)
        vol = tb.volume
        out[c, KT] += res[0] / vol
        out[c, KX] += 3.0 * res[1] / vol
        out[c, KR] += 3.0 * res[2] / vol
        out[c, KM] += 3.0 * res[3] / vol
        if c == 0:
            tally = tally_c
    return out, tally


def cfl_dt(grid: PhaseGrid, scaling: ScalingContext, efield: np.ndarray,
           cfl: float) -> float:
    """Admissible time step: cfl * min over cells and directions of width/speed."""
    sqrt_rmax = math.sqrt(grid.r_max)
    emax = float(np.max(np.abs(efield))) if efield.size else 0.0
    dt = float(np.min(grid.dx)) / (scaling.c_v * sqrt_rmax)
    if emax > 0.0:
        a4max = 2.0 * scaling.c_E * emax * sqrt_rmax
        dt = min(dt, float(np.min(grid.dr)) / a4max)
        # effective 1/sqrt(r) speed: cell average, finite down to r = 0
        j0 = 2.0 * (np.sqrt(grid.r_edges[1:]) - np.sqrt(grid.r_edges[:-1]))
        a5max = scaling.c_E * emax * float(np.max(j0 / grid.dr))
        dt = min(dt, float(np.min(grid.dmu)) / a5max)
    return cfl * dt
