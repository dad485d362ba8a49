"""Cartesian (x, r, mu) phase-space grid, P1 DOF storage and projection.

The grid is rectangular with x in [0,1], r in [0, r_max], mu in [-1,1].
Each cell carries the four P1 coefficients (T, X, R, M) of

    Phi = T + X xi_x + R xi_r + M xi_mu,   xi_d = (d - d_center)/(width/2),

per chaos component, stored struct-of-arrays as data[comp, kind, i, k, m]
so sweeps touch contiguous blocks per coefficient kind.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

# coefficient kind indices
KT, KX, KR, KM = 0, 1, 2, 3
KIND_NAMES = ("T", "X", "R", "M")
NCOMP = 2


def aligned_r_edges(shell: float, cells_per_shell: int, r_max_target: float) -> np.ndarray:
    """Uniform r-edges with spacing shell/cells_per_shell covering r_max_target.

    Commensurate spacing puts every inelastic partner point r +- shell on the
    quadrature node lattice, which is what makes the discrete collision
    operator conserve mass and preserve the projected equilibrium exactly.
    """
    if cells_per_shell < 1:
        raise ConfigurationError("cells_per_shell must be >= 1")
    dr = shell / cells_per_shell
    nr = max(int(math.ceil(r_max_target / dr - 1e-12)), cells_per_shell + 1)
    return np.linspace(0.0, nr * dr, nr + 1)


@dataclass(frozen=True)
class PhaseGrid:
    x_edges: np.ndarray = field(repr=False)
    r_edges: np.ndarray = field(repr=False)
    mu_edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name, edges, lo, hi in (("x", self.x_edges, 0.0, 1.0),
                                    ("mu", self.mu_edges, -1.0, 1.0)):
            if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
                raise ConfigurationError(f"{name}_edges must be strictly increasing")
            if edges[0] != lo or edges[-1] != hi:
                raise ConfigurationError(f"{name}_edges must span [{lo}, {hi}] exactly")
        r = self.r_edges
        if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0.0) or r[0] != 0.0:
            raise ConfigurationError("r_edges must be strictly increasing from 0")

    @classmethod
    def uniform(cls, nx: int, nr: int, nmu: int, r_max: float) -> "PhaseGrid":
        return cls(x_edges=np.linspace(0.0, 1.0, nx + 1),
                   r_edges=np.linspace(0.0, r_max, nr + 1),
                   mu_edges=np.linspace(-1.0, 1.0, nmu + 1))

    @property
    def nx(self) -> int:
        return self.x_edges.size - 1

    @property
    def nr(self) -> int:
        return self.r_edges.size - 1

    @property
    def nmu(self) -> int:
        return self.mu_edges.size - 1

    @property
    def r_max(self) -> float:
        return float(self.r_edges[-1])

    @property
    def dx(self) -> np.ndarray:
        return np.diff(self.x_edges)

    @property
    def dr(self) -> np.ndarray:
        return np.diff(self.r_edges)

    @property
    def dmu(self) -> np.ndarray:
        return np.diff(self.mu_edges)

    @property
    def x_centers(self) -> np.ndarray:
        return 0.5 * (self.x_edges[:-1] + self.x_edges[1:])

    @property
    def r_centers(self) -> np.ndarray:
        return 0.5 * (self.r_edges[:-1] + self.r_edges[1:])

    @property
    def mu_centers(self) -> np.ndarray:
        return 0.5 * (self.mu_edges[:-1] + self.mu_edges[1:])

    def cell_volume(self) -> np.ndarray:
        """dx*dr*dmu as an (nx, nr, nmu) array."""
        return (self.dx[:, None, None] * self.dr[None, :, None]
                * self.dmu[None, None, :])

    def locate(self, edges: np.ndarray, value: float) -> int:
        if value < edges[0] or value > edges[-1]:
            raise DomainError(f"coordinate {value} outside [{edges[0]}, {edges[-1]}]")
        idx = int(np.searchsorted(edges, value, side="right") - 1)
        return min(max(idx, 0), edges.size - 2)

    def scaled_coord(self, edges: np.ndarray, idx: int, value: float) -> float:
        lo, hi = edges[idx], edges[idx + 1]
        return (2.0 * value - lo - hi) / (hi - lo)


@dataclass(frozen=True)
class CellQuadrature:
    """Tensor-product Gauss nodes/weights on the reference cell [-1,1]^3."""

    points: int = 2

    @property
    def nodes(self) -> np.ndarray:
        return np.polynomial.legendre.leggauss(self.points)[0]

    @property
    def weights(self) -> np.ndarray:
        return np.polynomial.legendre.leggauss(self.points)[1]


@dataclass
class DofField:
    """Per-cell P1 coefficients for each chaos component."""

    grid: PhaseGrid
    data: np.ndarray  # (ncomp, 4, nx, nr, nmu)

    @classmethod
    def zeros(cls, grid: PhaseGrid, ncomp: int = NCOMP) -> "DofField":
        return cls(grid=grid,
                   data=np.zeros((ncomp, 4, grid.nx, grid.nr, grid.nmu)))

    @property
    def ncomp(self) -> int:
        return self.data.shape[0]

    def copy(self) -> "DofField":
        return DofField(grid=self.grid, data=self.data.copy())

    def coeff(self, comp: int, kind: int) -> np.ndarray:
        return self.data[comp, kind]

    def evaluate(self, comp: int, x: float, r: float, mu: float) -> float:
        """P1 value at an interior point (cell-wise, discontinuous at faces)."""
        g = self.grid
        i = g.locate(g.x_edges, x)
        k = g.locate(g.r_edges, r)
        m = g.locate(g.mu_edges, mu)
        xx = g.scaled_coord(g.x_edges, i, x)
        xr = g.scaled_coord(g.r_edges, k, r)
        xm = g.scaled_coord(g.mu_edges, m, mu)
        c = self.data[comp, :, i, k, m]
        return float(c[KT] + c[KX] * xx + c[KR] * xr + c[KM] * xm)

    def component_mass(self, comp: int) -> float:
        """Integral of the component over the phase box (T is the cell mean)."""
        return float(np.sum(self.data[comp, KT] * self.grid.cell_volume()))


def l2_project(func, grid: PhaseGrid, quad: CellQuadrature | None = None) -> np.ndarray:
    """Cell-wise L2 projection of func(x, r, mu) onto P1.

    Returns a (4, nx, nr, nmu) coefficient block.  The P1 basis is orthogonal
    on the reference cell, so the projection is diagonal: T is the cell mean
    and each slope is 3x the correlation with its scaled coordinate.  With
    the default 2-point Gauss rule this projection interpolates func at the
    tensor Gauss nodes, which the collision assembly relies on.
    """
    quad = quad or CellQuadrature()
    gn, gw = quad.nodes, quad.weights
    q = quad.points

    def nodes_for(edges):
        centers = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * np.diff(edges)
        return centers[:, None] + half[:, None] * gn[None, :]

    xn = nodes_for(grid.x_edges)      # (nx, q)
    rn = nodes_for(grid.r_edges)
    mn = nodes_for(grid.mu_edges)

    xv = xn[:, :, None, None, None, None]
    rv = rn[None, None, :, :, None, None]
    mv = mn[None, None, None, None, :, :]
    vals = func(np.broadcast_to(xv, (grid.nx, q, grid.nr, q, grid.nmu, q)),
                np.broadcast_to(rv, (grid.nx, q, grid.nr, q, grid.nmu, q)),
                np.broadcast_to(mv, (grid.nx, q, grid.nr, q, grid.nmu, q)))
    vals = np.asarray(vals, dtype=float)

    wq = gw / 2.0                      # reference weights normalized to mean
    out = np.empty((4, grid.nx, grid.nr, grid.nmu))
    out[KT] = np.einsum("a,b,c,xaybzc->xyz", wq, wq, wq, vals)
    out[KX] = 3.0 * np.einsum("a,b,c,xaybzc->xyz", wq * gn, wq, wq, vals)
    out[KR] = 3.0 * np.einsum("a,b,c,xaybzc->xyz", wq, wq * gn, wq, vals)
    out[KM] = 3.0 * np.einsum("a,b,c,xaybzc->xyz", wq, wq, wq * gn, vals)
    return out


# ---------------------------------------------------------------------------
# Snapshot format: CSV of (component, i, k, m, T, X, R, M) plus a JSON header
# describing the cell edges.
# ---------------------------------------------------------------------------

def write_snapshot(field: DofField, csv_path, json_path, time_ps: float,
                   extra: dict | None = None) -> None:
    header = {
        "time_ps": time_ps,
        "components": field.ncomp,
        "x_edges": field.grid.x_edges.tolist(),
        "r_edges": field.grid.r_edges.tolist(),
        "mu_edges": field.grid.mu_edges.tolist(),
    }
    if extra:
        header.update(extra)
    with open(json_path, "w") as fh:
        json.dump(header, fh, indent=1)
    g = field.grid
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "i", "k", "m", "T", "X", "R", "M"])
        for c in range(field.ncomp):
            for i in range(g.nx):
                for k in range(g.nr):
                    for m in range(g.nmu):
                        t, x, r, mm = field.data[c, :, i, k, m]
                        writer.writerow([c, i, k, m,
                                         repr(float(t)), repr(float(x)),
                                         repr(float(r)), repr(float(mm))])


def read_snapshot(csv_path, json_path) -> tuple[DofField, dict]:
    with open(json_path) as fh:
        header = json.load(fh)
    grid = PhaseGrid(x_edges=np.asarray(header["x_edges"], dtype=float),
                     r_edges=np.asarray(header["r_edges"], dtype=float),
                     mu_edges=np.asarray(header["mu_edges"], dtype=float))
    field = DofField.zeros(grid, ncomp=int(header["components"]))
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            c, i, k, m = (int(v) for v in row[:4])
            field.data[c, :, i, k, m] = [float(v) for v in row[4:8]]
    return field, header
