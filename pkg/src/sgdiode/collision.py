"""Discrete two-component collision operator on the (x, r, mu) grid.

The energy shells couple r-cells at offsets {-A, 0, +A}.  Discretization:
every r-cell carries Gauss nodes r_q (shared with the P1 projection rule);
for each node whose partner point p = r_q + l*A lies inside [0, r_max] one
coupling entry is created.  The entry adds

    gain at the node's cell:    w_q (sqrt(r_q)/2) W_l  G(p)
    loss at the partner's cell: w_q  sqrt(r_q)     W_l  Phi(p, mu)-moments

where G is the mu-integrated line density.  Gain and loss of an entry move
exactly the same mass, so conservation per chaos component holds to
rounding for any field and any grid.  On shell-aligned grids (r spacing
commensurate with A) the partner points coincide with native nodes, and the
2-point-projected Maxwellian e^{-r} sqrt(r)/2 is annihilated node-by-node
in the deterministic weight set.

Partner points outside the domain are gated off on both sides (cutoff
boundary: the pdf is machine zero beyond r_max, nothing exists below 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import ConfigurationError
from .gpc import ORTHONORMAL
from .grid import DofField, PhaseGrid, CellQuadrature, KT, KX, KR, KM
from .kernels import KernelMatrices
from .scaling import ScalingContext

MODE_STOCHASTIC = "stochastic_recombination"
MODE_NO_RECOMB = "no_recombination"
MODE_SPLIT = "split_recombination"
MODES = (MODE_STOCHASTIC, MODE_NO_RECOMB, MODE_SPLIT)


@dataclass(frozen=True)
class ShellCoupling:
    """Geometry of one energy shell: coupling entries plus dense forms.

    Entry arrays are what the scatter/gather kernels consume; the dense
    (nr x nr) gain matrices and per-cell loss coefficients are the
    precontracted equivalents used by the vectorized path.
    """

    shell: int                      # l in {-1, 0, +1}; offset = l * A
    offset: float
    tgt: np.ndarray = field(repr=False)      # cell receiving gain
    src: np.ndarray = field(repr=False)      # cell holding the partner point
    xi_tgt: np.ndarray = field(repr=False)   # node coordinate in tgt cell
    xi_src: np.ndarray = field(repr=False)   # partner coordinate in src cell
    w_gain: np.ndarray = field(repr=False)   # w_q sqrt(r_q) / (2 dr)
    gain_tt: np.ndarray = field(repr=False)  # (nr, nr) dense gain operators
    gain_tr: np.ndarray = field(repr=False)
    gain_rt: np.ndarray = field(repr=False)
    gain_rr: np.ndarray = field(repr=False)
    loss_tt: np.ndarray = field(repr=False)  # (nr,) loss coefficients
    loss_tr: np.ndarray = field(repr=False)
    loss_rt: np.ndarray = field(repr=False)
    loss_rr: np.ndarray = field(repr=False)


def build_shell_couplings(grid: PhaseGrid, scaling: ScalingContext,
                          quad: CellQuadrature | None = None) -> tuple[ShellCoupling, ...]:
    """Locate shell partners for every Gauss node and precontract weights."""
    if grid.r_max <= scaling.A:
        raise ConfigurationError(
            f"r_max = {grid.r_max} must exceed the phonon shell A = {scaling.A}")
    quad = quad or CellQuadrature()
    gn, gw = quad.nodes, quad.weights
    nr = grid.nr
    dr = grid.dr
    centers = grid.r_centers
    r_max = grid.r_max

    couplings = []
    for shell in (-1, 0, 1):
        offset = shell * scaling.A
        tgt, src, xi_t, xi_s, wq, rq = [], [], [], [], [], []
        for k in range(nr):
            for g in range(gn.size):
                r_node = centers[k] + 0.5 * dr[k] * gn[g]
                p = r_node + offset
                if p < 0.0 or p > r_max:
                    continue
                kp = min(int(np.searchsorted(grid.r_edges, p, side="right") - 1), nr - 1)
                tgt.append(k)
                src.append(kp)
                xi_t.append(gn[g])
                xi_s.append((2.0 * p - grid.r_edges[kp] - grid.r_edges[kp + 1]) / dr[kp])
                wq.append(0.5 * dr[k] * gw[g])
                rq.append(r_node)
        tgt = np.asarray(tgt, dtype=np.int64)
        src = np.asarray(src, dtype=np.int64)
        xi_t = np.asarray(xi_t)
        xi_s = np.asarray(xi_s)
        wq = np.asarray(wq)
        sq = np.sqrt(np.asarray(rq))

        w_gain = wq * sq / (2.0 * dr[tgt]) if tgt.size else np.zeros(0)
        w_loss = wq * sq / dr[src] if src.size else np.zeros(0)

        gain_tt = np.zeros((nr, nr))
        gain_tr = np.zeros((nr, nr))
        gain_rt = np.zeros((nr, nr))
        gain_rr = np.zeros((nr, nr))
        loss_tt = np.zeros(nr)
        loss_tr = np.zeros(nr)
        loss_rt = np.zeros(nr)
        loss_rr = np.zeros(nr)
        for e in range(tgt.size):
            k, kp = tgt[e], src[e]
            gain_tt[k, kp] += w_gain[e]
            gain_tr[k, kp] += w_gain[e] * xi_s[e]
            gain_rt[k, kp] += 3.0 * w_gain[e] * xi_t[e]
            gain_rr[k, kp] += 3.0 * w_gain[e] * xi_t[e] * xi_s[e]
            loss_tt[kp] += w_loss[e]
            loss_tr[kp] += w_loss[e] * xi_s[e]
            loss_rt[kp] += 3.0 * w_loss[e] * xi_s[e]
            loss_rr[kp] += 3.0 * w_loss[e] * xi_s[e] ** 2
        couplings.append(ShellCoupling(
            shell=shell, offset=offset, tgt=tgt, src=src, xi_tgt=xi_t,
            xi_src=xi_s, w_gain=w_gain, gain_tt=gain_tt, gain_tr=gain_tr,
            gain_rt=gain_rt, gain_rr=gain_rr, loss_tt=loss_tt,
            loss_tr=loss_tr, loss_rt=loss_rt, loss_rr=loss_rr))
    return tuple(couplings)


def shell_weights(kernels: KernelMatrices, scaling: ScalingContext,
                  mode: str) -> dict[int, np.ndarray]:
    """2x2 chaos weight matrix per shell for the requested operator mode.

    The operator form assumes the orthonormal chaos basis (Gram = identity),
    where the elastic weight reduces to K0 I and the split and full forms
    are algebraically identical.
    """
    if mode not in MODES:
        raise ConfigurationError(f"unknown collision mode {mode!r}; expected one of {MODES}")
    if kernels.normalization != ORTHONORMAL:
        raise ConfigurationError("the collision operator runs in the orthonormal chaos basis")
    eye = np.eye(2)
    k_opt, k0 = kernels.k_optical, kernels.k0_acoustic
    n_q = kernels.n_q
    if mode == MODE_NO_RECOMB:
        w_plus = k_opt * (n_q + 1.0) * eye
        w_minus = k_opt * n_q * eye
    elif mode == MODE_SPLIT:
        recomb = kernels.recomb_split
        w_plus = k_opt * ((n_q + 1.0) * eye + recomb)
        w_minus = k_opt * (n_q * eye + recomb)
    else:
        w_plus = k_opt * kernels.c_plus
        w_minus = k_opt * kernels.c_minus
    return {0: k0 * eye, 1: w_plus, -1: w_minus}


class CollisionOperator:
    """Applies the assembled shell couplings with a weight set per mode."""

    def __init__(self, grid: PhaseGrid, scaling: ScalingContext,
                 kernels: KernelMatrices, mode: str = MODE_STOCHASTIC,
                 quad: CellQuadrature | None = None,
                 couplings: tuple[ShellCoupling, ...] | None = None):
        self.grid = grid
        self.scaling = scaling
        self.mode = mode
        self.couplings = couplings if couplings is not None else build_shell_couplings(
            grid, scaling, quad)
        self.weights = shell_weights(kernels, scaling, mode)

    def apply(self, fld: DofField, out: np.ndarray | None = None) -> np.ndarray:
        """Accumulate dPhi/dt from collisions into out (same shape as field data)."""
        data = fld.data
        ncomp = data.shape[0]
        if out is None:
            out = np.zeros_like(data)
        dmu = self.grid.dmu
        for sc in self.couplings:
            w = self.weights[sc.shell]
            # geometric op per source component, then chaos-combine
            for cs in range(ncomp):
                gt, gr, gx, lt, lr, lm, lx = _accel.collision_geom(
                    data[cs, KT], data[cs, KR], data[cs, KM], data[cs, KX],
                    dmu, sc.gain_tt, sc.gain_tr, sc.gain_rt, sc.gain_rr,
                    sc.loss_tt, sc.loss_tr, sc.loss_rt, sc.loss_rr)
                for ct in range(ncomp):
                    wct = w[ct, cs]
                    if wct == 0.0:
                        continue
                    out[ct, KT] += wct * (gt[:, :, None] - lt)
                    out[ct, KR] += wct * (gr[:, :, None] - lr)
                    out[ct, KM] -= wct * lm
                    out[ct, KX] += wct * (gx[:, :, None] - lx)
        return out
