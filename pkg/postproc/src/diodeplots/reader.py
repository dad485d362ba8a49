"""Read-only access to a solver run directory.

File formats (the solver's external interface):

* ``manifest.json``   -- config echo, grid sizes, output checksums
* ``moments.csv``     -- time_ps, x, rho, momentum, energy, velocity, efield
* ``potential.csv``   -- time_ps, x, potential (per x-node)
* ``stats.csv``       -- time_ps, x, r, mu, mean, var, std (final time)
* ``snapshots/snap_NNNN.csv`` + ``.json`` -- P1 coefficients
  (component, i, k, m, T, X, R, M) with cell edges in the JSON header
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class RunDirError(RuntimeError):
    """A run directory is missing a file or a column."""


MOMENT_COLUMNS = ("rho", "momentum", "energy", "velocity", "efield")


@dataclass(frozen=True)
class Snapshot:
    time_ps: float
    x_edges: np.ndarray = field(repr=False)
    r_edges: np.ndarray = field(repr=False)
    mu_edges: np.ndarray = field(repr=False)
    data: np.ndarray = field(repr=False)     # (ncomp, 4, nx, nr, nmu)

    @property
    def x_width(self) -> np.ndarray:
        return np.diff(self.x_edges)

    def cell_means(self, component: int) -> np.ndarray:
        """The T coefficient block: per-cell averages, shape (nx, nr, nmu)."""
        return self.data[component, 0]


@dataclass(frozen=True)
class StatsBlock:
    x: np.ndarray
    r: np.ndarray
    mu: np.ndarray
    mean: np.ndarray      # (nx, nr, nmu)
    var: np.ndarray
    std: np.ndarray


@dataclass
class RunDir:
    root: Path
    manifest: dict

    @classmethod
    def open(cls, path) -> "RunDir":
        root = Path(path)
        man = root / "manifest.json"
        if not man.exists():
            raise RunDirError(f"missing file: {man}")
        return cls(root=root, manifest=json.loads(man.read_text()))

    def _require(self, name: str) -> Path:
        p = self.root / name
        if not p.exists():
            raise RunDirError(f"missing file: {p}")
        return p

    def moment_table(self) -> dict[float, dict[str, np.ndarray]]:
        """Per output time: x plus each moment column as arrays."""
        path = self._require("moments.csv")
        out: dict[float, dict[str, list]] = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            cols = reader.fieldnames or []
            for need in ("time_ps", "x") + MOMENT_COLUMNS:
                if need not in cols:
                    raise RunDirError(f"{path}: missing column {need!r}")
            for row in reader:
                t = float(row["time_ps"])
                bucket = out.setdefault(t, {k: [] for k in ("x",) + MOMENT_COLUMNS})
                bucket["x"].append(float(row["x"]))
                for k in MOMENT_COLUMNS:
                    bucket[k].append(float(row[k]))
        return {t: {k: np.asarray(v) for k, v in block.items()}
                for t, block in out.items()}

    def final_moments(self) -> tuple[float, dict[str, np.ndarray]]:
        table = self.moment_table()
        t = max(table)
        return t, table[t]

    def potential_table(self) -> dict[float, tuple[np.ndarray, np.ndarray]]:
        path = self._require("potential.csv")
        out: dict[float, list] = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            cols = reader.fieldnames or []
            for need in ("time_ps", "x", "potential"):
                if need not in cols:
                    raise RunDirError(f"{path}: missing column {need!r}")
            for row in reader:
                out.setdefault(float(row["time_ps"]), []).append(
                    (float(row["x"]), float(row["potential"])))
        return {t: (np.array([p[0] for p in rows]), np.array([p[1] for p in rows]))
                for t, rows in out.items()}

    def stats(self) -> StatsBlock:
        path = self._require("stats.csv")
        xs, rs, ms, rows = [], [], [], []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            cols = reader.fieldnames or []
            for need in ("x", "r", "mu", "mean", "var", "std"):
                if need not in cols:
                    raise RunDirError(f"{path}: missing column {need!r}")
            for row in reader:
                xs.append(float(row["x"]))
                rs.append(float(row["r"]))
                ms.append(float(row["mu"]))
                rows.append((float(row["mean"]), float(row["var"]), float(row["std"])))
        x = np.unique(xs)
        r = np.unique(rs)
        mu = np.unique(ms)
        shape = (x.size, r.size, mu.size)
        if len(rows) != int(np.prod(shape)):
            raise RunDirError(f"{path}: expected a full (x, r, mu) grid")
        arr = np.asarray(rows).reshape(*shape, 3)
        # rows are written x-major, r, then mu; unique() sorting matches
        return StatsBlock(x=x, r=r, mu=mu, mean=arr[..., 0], var=arr[..., 1],
                          std=arr[..., 2])

    def snapshot_paths(self) -> list[Path]:
        snap_dir = self.root / "snapshots"
        if not snap_dir.is_dir():
            raise RunDirError(f"missing directory: {snap_dir}")
        return sorted(snap_dir.glob("snap_*.csv"))

    def load_snapshot(self, csv_path: Path | None = None) -> Snapshot:
        """Load a snapshot (default: the last one)."""
        if csv_path is None:
            paths = self.snapshot_paths()
            if not paths:
                raise RunDirError(f"no snapshots under {self.root}")
            csv_path = paths[-1]
        header_path = csv_path.with_suffix(".json")
        if not header_path.exists():
            raise RunDirError(f"missing file: {header_path}")
        header = json.loads(header_path.read_text())
        x_edges = np.asarray(header["x_edges"], dtype=float)
        r_edges = np.asarray(header["r_edges"], dtype=float)
        mu_edges = np.asarray(header["mu_edges"], dtype=float)
        ncomp = int(header["components"])
        data = np.zeros((ncomp, 4, x_edges.size - 1, r_edges.size - 1,
                         mu_edges.size - 1))
        with open(csv_path, newline="") as fh:
            reader = csv.DictReader(fh)
            cols = reader.fieldnames or []
            for need in ("component", "i", "k", "m", "T", "X", "R", "M"):
                if need not in cols:
                    raise RunDirError(f"{csv_path}: missing column {need!r}")
            for row in reader:
                c, i, k, m = (int(row[n]) for n in ("component", "i", "k", "m"))
                data[c, :, i, k, m] = [float(row[n]) for n in ("T", "X", "R", "M")]
        return Snapshot(time_ps=float(header["time_ps"]), x_edges=x_edges,
                        r_edges=r_edges, mu_edges=mu_edges, data=data)
