"""Figure rendering from run directories.

Three figure kinds:

* ``moment_curve``      -- one moment (or the potential) against position
* ``phase_colormap``    -- a phase-space quantity on the (r, mu) plane,
                           either at one x slice or integrated over x
* ``comparison_curve``  -- the same moment from two runs overlaid

The ``neg_log`` transform renders -log10 of strictly positive data; values
at or below zero are floored at machine epsilon and counted, so an
identically zero field renders as a flat map with every cell floored.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "diodeplots"   # deterministic SVG ids
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .reader import MOMENT_COLUMNS, RunDir, RunDirError  # noqa: E402

MOMENT_LABELS = {
    "rho": "density [k_scale^3]",
    "momentum": "momentum (current) [k_scale^3 v_th]",
    "energy": "energy per particle [K_B T_L]",
    "velocity": "mean velocity [v_th]",
    "efield": "E field [V/um]",
    "potential": "potential [V]",
}
PHASE_SOURCES = ("alpha0", "alpha1", "var", "std")
IDENTITY = "identity"
NEG_LOG = "neg_log"
_EPS = np.finfo(float).eps

# deterministic image output: strip volatile metadata
_PNG_META = {"Software": "diodeplots"}
_SVG_META = {"Date": None, "Creator": "diodeplots"}


@dataclass(frozen=True)
class FigureSpec:
    kind: str                       # moment_curve | phase_colormap | comparison_curve
    source: str                     # moment column, "potential", or phase source
    out: str                        # image path (.png or .svg)
    transform: str = IDENTITY       # identity | neg_log
    x_slice: float | None = None    # phase maps: slice location (None = middle)
    x_integrated: bool = False      # phase maps: integrate over x instead
    colormap: str = "viridis"

    def __post_init__(self):
        if self.kind not in ("moment_curve", "phase_colormap", "comparison_curve"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if self.transform not in (IDENTITY, NEG_LOG):
            raise ValueError(f"unknown transform {self.transform!r}")


@dataclass
class RenderResult:
    path: Path
    floored_count: int = 0
    data_min: float = 0.0
    data_max: float = 0.0


def _save(fig, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    meta = _SVG_META if out.suffix == ".svg" else _PNG_META
    fig.savefig(out, dpi=150, metadata=meta)
    plt.close(fig)


def _apply_transform(values: np.ndarray, transform: str) -> tuple[np.ndarray, int]:
    if transform == IDENTITY:
        return values, 0
    floored = int(np.sum(values <= 0.0))
    safe = np.where(values > 0.0, values, _EPS)
    return -np.log10(safe), floored


def _moment_series(run: RunDir, source: str):
    if source == "potential":
        t = max(run.potential_table())
        x, v = run.potential_table()[t]
        return x, v, t
    if source not in MOMENT_COLUMNS:
        raise RunDirError(f"unknown moment column {source!r}; "
                          f"expected one of {MOMENT_COLUMNS + ('potential',)}")
    t, block = run.final_moments()
    return block["x"], block[source], t


def render_moment_curve(run: RunDir, spec: FigureSpec) -> RenderResult:
    x, values, t = _moment_series(run, spec.source)
    values, floored = _apply_transform(values, spec.transform)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(x, values, "-", lw=1.5)
    ax.set_xlabel("x [device lengths]")
    label = MOMENT_LABELS.get(spec.source, spec.source)
    ax.set_ylabel(label if spec.transform == IDENTITY else f"-log10 {label}")
    ax.set_title(f"{spec.source} at t = {t:g} ps")
    ax.grid(alpha=0.3)
    out = Path(spec.out)
    _save(fig, out)
    return RenderResult(path=out, floored_count=floored,
                        data_min=float(np.min(values)),
                        data_max=float(np.max(values)))


def _phase_field(run: RunDir, source: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    """Returns (field(nx, nr, nmu), x_widths, r_edges, mu_edges, time)."""
    if source in ("alpha0", "alpha1"):
        snap = run.load_snapshot()
        comp = 0 if source == "alpha0" else 1
        if comp >= snap.data.shape[0]:
            raise RunDirError(f"snapshot has no component {comp}")
        return (snap.cell_means(comp), snap.x_width, snap.r_edges,
                snap.mu_edges, snap.time_ps)
    if source in ("var", "std"):
        st = run.stats()
        vals = st.var if source == "var" else st.std
        # stats carry cell centers; reconstruct uniform edges for plotting
        def edges(c):
            if c.size == 1:
                return np.array([c[0] - 0.5, c[0] + 0.5])
            h = np.diff(c).mean()
            return np.concatenate([[c[0] - h / 2], c + h / 2])
        t = float(run.manifest.get("final_time_ps", 0.0))
        return (vals, np.full(st.x.size, 1.0 / st.x.size), edges(st.r),
                edges(st.mu), t)
    raise RunDirError(f"unknown phase source {source!r}; expected one of {PHASE_SOURCES}")


def render_phase_colormap(run: RunDir, spec: FigureSpec) -> RenderResult:
    field, xw, r_edges, mu_edges, t = _phase_field(run, spec.source)
    if spec.x_integrated:
        plane = np.einsum("ikm,i->km", field, xw)
        conv = "x-integrated"
    else:
        target = 0.5 if spec.x_slice is None else spec.x_slice
        xc = np.cumsum(xw) - 0.5 * xw
        i = int(np.argmin(np.abs(xc - target)))
        plane = field[i]
        conv = f"x slice at {xc[i]:.3f}"
    plane_t, floored = _apply_transform(plane, spec.transform)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    mesh = ax.pcolormesh(r_edges, mu_edges, plane_t.T, cmap=spec.colormap,
                         shading="flat")
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel("r [K_B T_L]")
    ax.set_ylabel("mu")
    prefix = "-log10 " if spec.transform == NEG_LOG else ""
    ax.set_title(f"{prefix}{spec.source} on (r, mu), {conv}, t = {t:g} ps")
    out = Path(spec.out)
    _save(fig, out)
    return RenderResult(path=out, floored_count=floored,
                        data_min=float(np.min(plane)),
                        data_max=float(np.max(plane)))


def render_comparison_curve(run_a: RunDir, run_b: RunDir,
                            spec: FigureSpec) -> RenderResult:
    xa, va, ta = _moment_series(run_a, spec.source)
    xb, vb, _ = _moment_series(run_b, spec.source)
    if xa.shape != xb.shape or not np.allclose(xa, xb):
        raise RunDirError("comparison requires matching x grids")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(xa, va, "-", lw=1.5, label="run A")
    ax.plot(xb, vb, "--", lw=1.5, label="run B")
    ax.set_xlabel("x [device lengths]")
    ax.set_ylabel(MOMENT_LABELS.get(spec.source, spec.source))
    scale = float(np.mean(np.abs(va)))
    sep = float(np.mean(np.abs(va - vb)) / scale) if scale > 0 else 0.0
    ax.set_title(f"{spec.source} at t = {ta:g} ps; |A-B|/mean = {sep:.2e}")
    ax.legend()
    ax.grid(alpha=0.3)
    out = Path(spec.out)
    _save(fig, out)
    return RenderResult(path=out, data_min=sep, data_max=sep)


def render(run_dir, spec: FigureSpec, run_dir_b=None) -> RenderResult:
    """Render one figure from a run directory (two for comparisons)."""
    run = RunDir.open(run_dir)
    if spec.kind == "moment_curve":
        return render_moment_curve(run, spec)
    if spec.kind == "phase_colormap":
        return render_phase_colormap(run, spec)
    if run_dir_b is None:
        raise RunDirError("comparison_curve needs a second run directory")
    return render_comparison_curve(run, RunDir.open(run_dir_b), spec)


def standard_figure_set(out_dir) -> list[FigureSpec]:
    """The full default set: six moment curves plus both phase-map conventions."""
    out = Path(out_dir)
    specs = [FigureSpec(kind="moment_curve", source=m,
                        out=str(out / f"moment_{m}.png"))
             for m in MOMENT_COLUMNS + ("potential",)]
    for source, transform in (("alpha0", NEG_LOG), ("alpha1", NEG_LOG),
                              ("var", IDENTITY), ("std", IDENTITY)):
        specs.append(FigureSpec(kind="phase_colormap", source=source,
                                transform=transform,
                                out=str(out / f"phase_{source}_slice.png")))
        specs.append(FigureSpec(kind="phase_colormap", source=source,
                                transform=transform, x_integrated=True,
                                out=str(out / f"phase_{source}_integrated.png")))
    return specs


def render_standard_set(run_dir, out_dir) -> list[RenderResult]:
    return [render(run_dir, spec) for spec in standard_figure_set(out_dir)]
