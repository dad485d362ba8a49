"""Charge density, 1D Poisson solve and the self-consistent field.

The dimensionless problem is  eps_r V'' = c_P (rho - N_D)  on x in [0,1]
with V(0) = 0, V(1) = V_bias and E = -V'.  With P1 density data the double
integral is evaluated in closed form: E is piecewise quadratic and V
piecewise cubic, both exact for the stored representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid import DofField, PhaseGrid, KT, KX
from .scaling import ScalingContext

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DeviceProfile:
    """Doping profile (dimensionless, per cell) and applied bias."""

    doping: np.ndarray = field(repr=False)   # (nx,) dimensionless N_D per cell
    bias: float = 0.5                        # dimensionless potential at x = 1
    n_plus: float = 5.0e23                   # 1/m^3, contact doping
    n_channel: float = 2.0e21                # 1/m^3, channel doping
    channel: tuple[float, float] = (0.3, 0.7)

    def __post_init__(self):
        if np.any(self.doping <= 0.0):
            raise ConfigurationError("doping must be strictly positive")

    @classmethod
    def diode(cls, grid: PhaseGrid, scaling: ScalingContext, bias: float = 0.5,
              n_plus: float = 5.0e23, n_channel: float = 2.0e21,
              channel: tuple[float, float] = (0.3, 0.7)) -> "DeviceProfile":
        """n+ / n / n+ profile, cell-averaged (exact on junction-aligned grids)."""
        lo, hi = channel
        if not 0.0 < lo < hi < 1.0:
            raise ConfigurationError("channel must be strictly inside (0, 1)")
        scale = scaling.doping_scale
        xl, xr = grid.x_edges[:-1], grid.x_edges[1:]
        frac = (np.minimum(xr, hi) - np.maximum(xl, lo)).clip(0.0) / (xr - xl)
        # snap float noise so junction-aligned grids get exactly sharp steps
        frac = np.where(frac > 1.0 - 1e-12, 1.0, np.where(frac < 1e-12, 0.0, frac))
        doping = (n_plus * (1.0 - frac) + n_channel * frac) / scale
        return cls(doping=doping, bias=bias, n_plus=n_plus,
                   n_channel=n_channel, channel=channel)

    @classmethod
    def uniform(cls, grid: PhaseGrid, scaling: ScalingContext, density: float,
                bias: float = 0.0) -> "DeviceProfile":
        doping = np.full(grid.nx, density / scaling.doping_scale)
        return cls(doping=doping, bias=bias, n_plus=density, n_channel=density,
                   channel=(0.3, 0.7))


@dataclass(frozen=True)
class FieldProfile:
    """Potential at nodes, field as per-cell quadratics, density echo."""

    v_nodes: np.ndarray = field(repr=False)
    e_quad: np.ndarray = field(repr=False)      # (nx, 3): E = e0 + e1 xi + e2 xi^2
    rho_t: np.ndarray = field(repr=False)
    rho_x: np.ndarray = field(repr=False)
    source_t: np.ndarray = field(repr=False)    # s = c_P (rho - N_D) / eps_r, P1
    source_x: np.ndarray = field(repr=False)

    @property
    def e_cell(self) -> np.ndarray:
        """Exact cell averages of E, the values the force terms use."""
        return self.e_quad[:, 0] + self.e_quad[:, 2] / 3.0

    def e_at(self, grid: PhaseGrid, x: float) -> float:
        i = grid.locate(grid.x_edges, x)
        xi = grid.scaled_coord(grid.x_edges, i, x)
        e0, e1, e2 = self.e_quad[i]
        return float(e0 + e1 * xi + e2 * xi * xi)

    def residual(self, grid: PhaseGrid) -> np.ndarray:
        """eps_r V'' - c_P (rho - N_D) at cell midpoints, already normalized:
        V'' + s with V' = -E, evaluated exactly on the stored quadratics."""
        dvpp = -self.e_quad[:, 1] * 2.0 / grid.dx   # V'' = -E' at xi = 0
        return dvpp - self.source_t


def compute_density(fld: DofField, grid: PhaseGrid) -> tuple[np.ndarray, np.ndarray]:
    """P1-in-x charge density of the mean chaos component.

    rho(x) = 2pi sum_{k,m} [T + X xi_x] dr dmu; the azimuthal 2pi of the
    k-space volume element is folded in here.
    """
    w = grid.dr[None, :, None] * grid.dmu[None, None, :]
    rho_t = TWO_PI * np.sum(fld.data[0, KT] * w, axis=(1, 2))
    rho_x = TWO_PI * np.sum(fld.data[0, KX] * w, axis=(1, 2))
    return rho_t, rho_x


def solve_poisson(rho_t: np.ndarray, rho_x: np.ndarray, profile: DeviceProfile,
                  scaling: ScalingContext, grid: PhaseGrid) -> FieldProfile:
    """Closed-form integral solve of the 1D dimensionless Poisson equation."""
    eps_r = scaling.constants.relative_permittivity
    s_t = scaling.c_P * (rho_t - profile.doping) / eps_r
    s_x = scaling.c_P * rho_x / eps_r
    dx = grid.dx

    # E with the integration constant set to zero: E~(x) = -int_0^x s
    cum = np.concatenate([[0.0], np.cumsum(s_t * dx)])
    e0 = -(cum[:-1] + 0.5 * dx * s_t - 0.25 * dx * s_x)
    e1 = -0.5 * dx * s_t
    e2 = -0.25 * dx * s_x
    # V(1) = -int_0^1 E = bias fixes the constant
    int_e = float(np.sum(dx * (e0 + e2 / 3.0)))
    c1 = -profile.bias - int_e
    e0 = e0 + c1

    v_nodes = np.concatenate([[0.0], -np.cumsum(dx * (e0 + e2 / 3.0))])
    equad = np.stack([e0, e1, e2], axis=1)
    return FieldProfile(v_nodes=v_nodes, e_quad=equad, rho_t=rho_t,
                        rho_x=rho_x, source_t=s_t, source_x=s_x)
