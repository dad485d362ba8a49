"""Hot numeric kernels: numba @njit implementations with pure-numpy twins.

The solver spends its time in four sweeps: the collision geometric operator
and the three directional transport sweeps.  Each exists twice with
identical arithmetic -- a vectorized numpy version and a loop-fused numba
version.  Selection happens once at import:

    SGDIODE_NUMBA=0   force the numpy path
    (default)         numba when importable, numpy otherwise

Both paths are deterministic (serial); benchmarks/bench_accel.py compares
them and checks agreement.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("SGDIODE_NUMBA", "1") != "0"


# ---------------------------------------------------------------------------
# collision geometric operator
# ---------------------------------------------------------------------------

def collision_geom_numpy(u_t, u_r, u_m, u_x, dmu,
                         gain_tt, gain_tr, gain_rt, gain_rr,
                         loss_tt, loss_tr, loss_rt, loss_rr):
    """One shell's geometry applied to one component's slabs.

    Returns (gt, gr, gx) of shape (nx, nr) -- the mu-isotropic gains -- and
    (lt, lr, lm, lx) of shape (nx, nr, nmu) -- the local losses.
    """
    d_t = u_t @ dmu            # (nx, nr): mu-integrated line density
    d_r = u_r @ dmu
    d_x = u_x @ dmu
    gt = d_t @ gain_tt.T + d_r @ gain_tr.T
    gr = d_t @ gain_rt.T + d_r @ gain_rr.T
    gx = d_x @ gain_tt.T
    lt = loss_tt[None, :, None] * u_t + loss_tr[None, :, None] * u_r
    lr = loss_rt[None, :, None] * u_t + loss_rr[None, :, None] * u_r
    lm = loss_tt[None, :, None] * u_m
    lx = loss_tt[None, :, None] * u_x
    return gt, gr, gx, lt, lr, lm, lx


if HAS_NUMBA:
    @numba.njit(cache=True)
    def _collision_geom_nb(u_t, u_r, u_m, u_x, dmu,
                           gain_tt, gain_tr, gain_rt, gain_rr,
                           loss_tt, loss_tr, loss_rt, loss_rr):
        nx, nr, nmu = u_t.shape
        d_t = np.zeros((nx, nr))
        d_r = np.zeros((nx, nr))
        d_x = np.zeros((nx, nr))
        for i in range(nx):
            for k in range(nr):
                st = sr = sx = 0.0
                for m in range(nmu):
                    st += u_t[i, k, m] * dmu[m]
                    sr += u_r[i, k, m] * dmu[m]
                    sx += u_x[i, k, m] * dmu[m]
                d_t[i, k] = st
                d_r[i, k] = sr
                d_x[i, k] = sx
        gt = np.zeros((nx, nr))
        gr = np.zeros((nx, nr))
        gx = np.zeros((nx, nr))
        for i in range(nx):
            for k in range(nr):
                at = ar = ax = 0.0
                for kp in range(nr):
                    at += gain_tt[k, kp] * d_t[i, kp] + gain_tr[k, kp] * d_r[i, kp]
                    ar += gain_rt[k, kp] * d_t[i, kp] + gain_rr[k, kp] * d_r[i, kp]
                    ax += gain_tt[k, kp] * d_x[i, kp]
                gt[i, k] = at
                gr[i, k] = ar
                gx[i, k] = ax
        lt = np.empty((nx, nr, nmu))
        lr = np.empty((nx, nr, nmu))
        lm = np.empty((nx, nr, nmu))
        lx = np.empty((nx, nr, nmu))
        for i in range(nx):
            for k in range(nr):
                ctt, ctr = loss_tt[k], loss_tr[k]
                crt, crr = loss_rt[k], loss_rr[k]
                for m in range(nmu):
                    lt[i, k, m] = ctt * u_t[i, k, m] + ctr * u_r[i, k, m]
                    lr[i, k, m] = crt * u_t[i, k, m] + crr * u_r[i, k, m]
                    lm[i, k, m] = ctt * u_m[i, k, m]
                    lx[i, k, m] = ctt * u_x[i, k, m]
        return gt, gr, gx, lt, lr, lm, lx

    def collision_geom_numba(*args):
        return _collision_geom_nb(*args)
else:  # pragma: no cover
    collision_geom_numba = None


# ---------------------------------------------------------------------------
# x transport sweep: a1 = c_v sqrt(r) mu
# ---------------------------------------------------------------------------

def x_sweep_numpy(u, gl_t, gl_r, gl_m, gr_t, gr_r, gr_m, mu_pos,
                  c_v, i0, i1, i2, p0, p1, p2, res):
    """Upwind x-advection: volume term plus face fluxes, exact moments.

    Adds the weak-form integrals into res (4, nx, nr, nmu) and returns the
    net boundary mass inflow through the x faces.
    """
    t, x, r, m = u[0], u[1], u[2], u[3]
    from_left_t = np.concatenate([gl_t[None], t + x], axis=0)
    from_left_r = np.concatenate([gl_r[None], r], axis=0)
    from_left_m = np.concatenate([gl_m[None], m], axis=0)
    from_right_t = np.concatenate([t - x, gr_t[None]], axis=0)
    from_right_r = np.concatenate([r, gr_r[None]], axis=0)
    from_right_m = np.concatenate([m, gr_m[None]], axis=0)
    pos = mu_pos[None, None, :]
    t_tr = np.where(pos, from_left_t, from_right_t)
    r_tr = np.where(pos, from_left_r, from_right_r)
    m_tr = np.where(pos, from_left_m, from_right_m)

    i0p0 = i0[:, None] * p0[None, :]
    i1p0 = i1[:, None] * p0[None, :]
    i0p1 = i0[:, None] * p1[None, :]
    i2p0 = i2[:, None] * p0[None, :]
    i1p1 = i1[:, None] * p1[None, :]
    i0p2 = i0[:, None] * p2[None, :]

    fa = c_v * (t_tr * i0p0 + r_tr * i1p0 + m_tr * i0p1)
    fr = c_v * (t_tr * i1p0 + r_tr * i2p0 + m_tr * i1p1)
    fm = c_v * (t_tr * i0p1 + r_tr * i1p1 + m_tr * i0p2)

    res[0] -= np.diff(fa, axis=0)
    res[1] += 2.0 * c_v * (t * i0p0 + r * i1p0 + m * i0p1) - (fa[1:] + fa[:-1])
    res[2] -= np.diff(fr, axis=0)
    res[3] -= np.diff(fm, axis=0)
    return float(fa[0].sum() - fa[-1].sum())


if HAS_NUMBA:
    @numba.njit(cache=True)
    def _x_sweep_nb(t, x, r, m, gl_t, gl_r, gl_m, gr_t, gr_r, gr_m, mu_pos,
                    c_v, i0, i1, i2, p0, p1, p2, res):
        nx, nr, nmu = t.shape
        tally = 0.0
        for k in range(nr):
            for mm in range(nmu):
                a0 = i0[k] * p0[mm]
                a1 = i1[k] * p0[mm]
                a2 = i0[k] * p1[mm]
                b2 = i2[k] * p0[mm]
                b3 = i1[k] * p1[mm]
                b4 = i0[k] * p2[mm]
                fa_prev = 0.0
                fr_prev = 0.0
                fm_prev = 0.0
                for f in range(nx + 1):
                    if mu_pos[mm]:
                        if f == 0:
                            tt, tr, tm = gl_t[k, mm], gl_r[k, mm], gl_m[k, mm]
                        else:
                            tt = t[f - 1, k, mm] + x[f - 1, k, mm]
                            tr = r[f - 1, k, mm]
                            tm = m[f - 1, k, mm]
                    else:
                        if f == nx:
                            tt, tr, tm = gr_t[k, mm], gr_r[k, mm], gr_m[k, mm]
                        else:
                            tt = t[f, k, mm] - x[f, k, mm]
                            tr = r[f, k, mm]
                            tm = m[f, k, mm]
                    fa = c_v * (tt * a0 + tr * a1 + tm * a2)
                    fr = c_v * (tt * a1 + tr * b2 + tm * b3)
                    fm = c_v * (tt * a2 + tr * b3 + tm * b4)
                    if f == 0:
                        tally += fa
                    elif f == nx:
                        tally -= fa
                    if f > 0:
                        i = f - 1
                        res[0, i, k, mm] -= fa - fa_prev
                        res[1, i, k, mm] += 2.0 * c_v * (
                            t[i, k, mm] * a0 + r[i, k, mm] * a1
                            + m[i, k, mm] * a2) - (fa + fa_prev)
                        res[2, i, k, mm] -= fr - fr_prev
                        res[3, i, k, mm] -= fm - fm_prev
                    fa_prev, fr_prev, fm_prev = fa, fr, fm
        return tally

    def x_sweep_numba(u, gl_t, gl_r, gl_m, gr_t, gr_r, gr_m, mu_pos,
                      c_v, i0, i1, i2, p0, p1, p2, res):
        return _x_sweep_nb(u[0], u[1], u[2], u[3], gl_t, gl_r, gl_m,
                           gr_t, gr_r, gr_m, mu_pos, c_v, i0, i1, i2,
                           p0, p1, p2, res)
else:  # pragma: no cover
    x_sweep_numba = None


# ---------------------------------------------------------------------------
# r transport sweep: a4 = f_E(x) sqrt(r) mu, cutoff ghost 0 at r_max
# ---------------------------------------------------------------------------

def r_sweep_numpy(u, f_e, dx, dr, sqrt_rf, i0, i1, p0, p1, p2, mu_sign, res):
    t, x, r, m = u[0], u[1], u[2], u[3]
    nx, nr, nmu = t.shape
    zpad = np.zeros((nx, 1, nmu))
    below_t = np.concatenate([zpad, t + r], axis=1)     # face g uses cell g-1
    below_x = np.concatenate([zpad, x], axis=1)
    below_m = np.concatenate([zpad, m], axis=1)
    above_t = np.concatenate([t - r, zpad], axis=1)     # face g uses cell g; top ghost 0
    above_x = np.concatenate([x, zpad], axis=1)
    above_m = np.concatenate([m, zpad], axis=1)
    up = (f_e[:, None, None] * mu_sign[None, None, :]) > 0.0
    t_tr = np.where(up, below_t, above_t)
    x_tr = np.where(up, below_x, above_x)
    m_tr = np.where(up, below_m, above_m)

    pref = f_e[:, None, None] * sqrt_rf[None, :, None] * dx[:, None, None]
    ga = pref * (t_tr * p0[None, None, :] + m_tr * p1[None, None, :])
    gx = (pref / 3.0) * x_tr * p0[None, None, :]
    gm = pref * (t_tr * p1[None, None, :] + m_tr * p2[None, None, :])

    i0p0 = i0[:, None] * p0[None, :]
    i1p0 = i1[:, None] * p0[None, :]
    i0p1 = i0[:, None] * p1[None, :]
    vr = (2.0 / dr[None, :, None]) * (f_e * dx)[:, None, None] * (
        t * i0p0 + r * i1p0 + m * i0p1)

    res[0] -= np.diff(ga, axis=1)
    res[1] -= np.diff(gx, axis=1)
    res[2] += vr - (ga[:, 1:] + ga[:, :-1])
    res[3] -= np.diff(gm, axis=1)
    return float(-ga[:, nr].sum())


if HAS_NUMBA:
    @numba.njit(cache=True)
    def _r_sweep_nb(t, x, r, m, f_e, dx, dr, sqrt_rf, i0, i1,
                    p0, p1, p2, mu_sign, res):
        nx, nr, nmu = t.shape
        tally = 0.0
        for i in range(nx):
            fe = f_e[i]
            pref0 = fe * dx[i]
            for mm in range(nmu):
                up = fe * mu_sign[mm] > 0.0
                ga_prev = 0.0
                gx_prev = 0.0
                gm_prev = 0.0
                for g in range(nr + 1):
                    tt = tx = tm = 0.0
                    if up:
                        if g > 0:
                            tt = t[i, g - 1, mm] + r[i, g - 1, mm]
                            tx = x[i, g - 1, mm]
                            tm = m[i, g - 1, mm]
                    else:
                        if g < nr:
                            tt = t[i, g, mm] - r[i, g, mm]
                            tx = x[i, g, mm]
                            tm = m[i, g, mm]
                    pref = pref0 * sqrt_rf[g]
                    ga = pref * (tt * p0[mm] + tm * p1[mm])
                    gx = (pref / 3.0) * tx * p0[mm]
                    gm = pref * (tt * p1[mm] + tm * p2[mm])
                    if g == nr:
                        tally -= ga
                    if g > 0:
                        k = g - 1
                        res[0, i, k, mm] -= ga - ga_prev
                        res[1, i, k, mm] -= gx - gx_prev
                        res[2, i, k, mm] += (2.0 / dr[k]) * pref0 * (
                            t[i, k, mm] * i0[k] * p0[mm]
                            + r[i, k, mm] * i1[k] * p0[mm]
                            + m[i, k, mm] * i0[k] * p1[mm]) - (ga + ga_prev)
                        res[3, i, k, mm] -= gm - gm_prev
                    ga_prev, gx_prev, gm_prev = ga, gx, gm
        return tally

    def r_sweep_numba(u, f_e, dx, dr, sqrt_rf, i0, i1, p0, p1, p2, mu_sign, res):
        return _r_sweep_nb(u[0], u[1], u[2], u[3], f_e, dx, dr, sqrt_rf,
                           i0, i1, p0, p1, p2, mu_sign, res)
else:  # pragma: no cover
    r_sweep_numba = None


# ---------------------------------------------------------------------------
# mu transport sweep: a5 = h_E(x) (1 - mu^2) / sqrt(r), poles analytic zero
# ---------------------------------------------------------------------------

def mu_sweep_numpy(u, h_e, dx, dmu, omf2, j0, j1, j2, q0, q1, res):
    t, x, r, m = u[0], u[1], u[2], u[3]
    nx, nr, nmu = t.shape
    zpad = np.zeros((nx, nr, 1))
    below_t = np.concatenate([zpad, t + m], axis=2)
    below_x = np.concatenate([zpad, x], axis=2)
    below_r = np.concatenate([zpad, r], axis=2)
    above_t = np.concatenate([t - m, zpad], axis=2)
    above_x = np.concatenate([x, zpad], axis=2)
    above_r = np.concatenate([r, zpad], axis=2)
    up = (h_e > 0.0)[:, None, None]
    t_tr = np.where(up, below_t, above_t)
    x_tr = np.where(up, below_x, above_x)
    r_tr = np.where(up, below_r, above_r)

    pref = h_e[:, None, None] * dx[:, None, None] * omf2[None, None, :]
    ha = pref * (t_tr * j0[None, :, None] + r_tr * j1[None, :, None])
    hx = (pref / 3.0) * x_tr * j0[None, :, None]
    hr = pref * (t_tr * j1[None, :, None] + r_tr * j2[None, :, None])

    j0q0 = j0[:, None] * q0[None, :]
    j1q0 = j1[:, None] * q0[None, :]
    j0q1 = j0[:, None] * q1[None, :]
    vm = (2.0 / dmu[None, None, :]) * (h_e * dx)[:, None, None] * (
        t * j0q0 + r * j1q0 + m * j0q1)

    res[0] -= np.diff(ha, axis=2)
    res[1] -= np.diff(hx, axis=2)
    res[2] -= np.diff(hr, axis=2)
    res[3] += vm - (ha[:, :, 1:] + ha[:, :, :-1])
    return 0.0


if HAS_NUMBA:
    @numba.njit(cache=True)
    def _mu_sweep_nb(t, x, r, m, h_e, dx, dmu, omf2, j0, j1, j2, q0, q1, res):
        nx, nr, nmu = t.shape
        for i in range(nx):
            he = h_e[i]
            pref0 = he * dx[i]
            up = he > 0.0
            for k in range(nr):
                ha_prev = 0.0
                hx_prev = 0.0
                hr_prev = 0.0
                for h in range(nmu + 1):
                    tt = tx = tr = 0.0
                    if up:
                        if h > 0:
                            tt = t[i, k, h - 1] + m[i, k, h - 1]
                            tx = x[i, k, h - 1]
                            tr = r[i, k, h - 1]
                    else:
                        if h < nmu:
                            tt = t[i, k, h] - m[i, k, h]
                            tx = x[i, k, h]
                            tr = r[i, k, h]
                    pref = pref0 * omf2[h]
                    ha = pref * (tt * j0[k] + tr * j1[k])
                    hx = (pref / 3.0) * tx * j0[k]
                    hr = pref * (tt * j1[k] + tr * j2[k])
                    if h > 0:
                        mm = h - 1
                        res[0, i, k, mm] -= ha - ha_prev
                        res[1, i, k, mm] -= hx - hx_prev
                        res[2, i, k, mm] -= hr - hr_prev
                        res[3, i, k, mm] += (2.0 / dmu[mm]) * pref0 * (
                            t[i, k, mm] * j0[k] * q0[mm]
                            + r[i, k, mm] * j1[k] * q0[mm]
                            + m[i, k, mm] * j0[k] * q1[mm]) - (ha + ha_prev)
                    ha_prev, hx_prev, hr_prev = ha, hx, hr
        return 0.0

    def mu_sweep_numba(u, h_e, dx, dmu, omf2, j0, j1, j2, q0, q1, res):
        return _mu_sweep_nb(u[0], u[1], u[2], u[3], h_e, dx, dmu, omf2,
                            j0, j1, j2, q0, q1, res)
else:  # pragma: no cover
    mu_sweep_numba = None


if USE_NUMBA:
    collision_geom = collision_geom_numba
    x_sweep = x_sweep_numba
    r_sweep = r_sweep_numba
    mu_sweep = mu_sweep_numba
    BACKEND = "numba"
else:
    collision_geom = collision_geom_numpy
    x_sweep = x_sweep_numpy
    r_sweep = r_sweep_numpy
    mu_sweep = mu_sweep_numpy
    BACKEND = "numpy"
