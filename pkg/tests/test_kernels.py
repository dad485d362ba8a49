import math

import numpy as np
import pytest

from sgdiode.errors import DomainError
from sgdiode.gpc import GpcBasis, QuadratureRule, ORTHONORMAL, PAPER_UNNORMALIZED
from sgdiode.kernels import (KernelMatrices, build_kernel_matrices,
                             compute_c_minus, compute_c_minus_analytic,
                             eval_phonon_energy_b_distderiv,
                             eval_phonon_energy_b_full, kernel_dump,
                             split_recombination)
from sgdiode.scaling import ScalingOverrides, build_scaling

QUAD = QuadratureRule.gauss_legendre(64)
BASIS_P = GpcBasis(normalization=PAPER_UNNORMALIZED)
BASIS_O = GpcBasis(normalization=ORTHONORMAL)
CTX = build_scaling()

C_MINUS_REF = np.array([[0.0959125, -0.00284506], [-0.00284506, 0.03200755]])
SPLIT_REF = np.array([[0.00013765729, -0.00284506], [-0.00284506, -0.06376729271]])


def test_c_minus_matches_reference_matrix():
    cm = compute_c_minus(CTX, BASIS_P, QUAD)
    assert np.abs(cm - C_MINUS_REF).max() < 5e-6


def test_two_routes_agree_default():
    cm = compute_c_minus(CTX, BASIS_P, QUAD)
    ca = compute_c_minus_analytic(CTX)
    assert np.abs(cm - ca).max() < 1e-8


def test_two_routes_agree_random_parameters():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = float(rng.uniform(5.0, 100.0))
        ctx = build_scaling(overrides=ScalingOverrides(n_divisor=n))
        cm = compute_c_minus(ctx, BASIS_P, QUAD)
        ca = compute_c_minus_analytic(ctx)
        assert np.abs(cm - ca).max() < 1e-8


def test_analytic_diagonal_entry_prehalving():
    # (1/2) [log(1 - e^{A+Bx})/B - x] at +-1 equals half of 0.191825
    from sgdiode.polylog import bose_antideriv_0
    val = 0.5 * (bose_antideriv_0(CTX.A, CTX.B, 1.0)
                 - bose_antideriv_0(CTX.A, CTX.B, -1.0))
    assert val == pytest.approx(0.0959125, abs=5e-6)


def test_c00_against_trapezoid_oracle():
    w = np.linspace(-1.0, 1.0, 1_000_001)
    vals = 0.5 / np.expm1(CTX.A * (1.0 + w / CTX.N))
    oracle = float(np.trapezoid(vals, w))
    cm = compute_c_minus(CTX, BASIS_P, QUAD)
    assert cm[0, 0] == pytest.approx(oracle, abs=1e-9)


def test_large_n_limit_is_nq_times_gram():
    ctx = build_scaling(overrides=ScalingOverrides(n_divisor=1e9))
    for basis in (BASIS_P, BASIS_O):
        cm = compute_c_minus(ctx, basis, QUAD)
        assert np.abs(cm - ctx.n_q * basis.gram).max() < 1e-8


def test_c_minus_monotone_approach_in_n():
    devs = []
    for n in (30.0, 300.0, 3000.0):
        ctx = build_scaling(overrides=ScalingOverrides(n_divisor=n))
        cm = compute_c_minus(ctx, BASIS_O, QUAD)
        devs.append(np.abs(cm - ctx.n_q * np.eye(2)).max())
    assert devs[0] > devs[1] > devs[2]
    # off-diagonal scales like 1/N: two decades in N give ~100x shrinkage
    ctx30 = build_scaling(overrides=ScalingOverrides(n_divisor=30.0))
    ctx3000 = build_scaling(overrides=ScalingOverrides(n_divisor=3000.0))
    off30 = abs(compute_c_minus(ctx30, BASIS_P, QUAD)[0, 1])
    off3000 = abs(compute_c_minus(ctx3000, BASIS_P, QUAD)[0, 1])
    assert off30 / off3000 == pytest.approx(100.0, rel=0.05)


def test_cauchy_schwarz_bound():
    # Cauchy-Schwarz in L2(n_q pi): |C01| <= sqrt(C00 C11).  (The version
    # normalized by Gram ratios alone fails: n_q(w) is convex in w, so its
    # w^2-weighted average exceeds its plain average.)
    for basis in (BASIS_P, BASIS_O):
        cm = compute_c_minus(CTX, basis, QUAD)
        assert abs(cm[0, 1]) <= math.sqrt(cm[0, 0] * cm[1, 1]) * (1.0 + 1e-12)
        assert cm[0, 0] > 0.0 and cm[1, 1] > 0.0


def test_kernel_matrix_invariants():
    km = build_kernel_matrices(CTX, BASIS_P, QUAD)
    assert np.abs(km.c_plus - km.c_minus - np.eye(2)).max() < 1e-14
    assert np.abs(km.c_minus - km.c_minus.T).max() < 1e-14
    assert np.abs(km.recomb_split - (km.c_plus - (km.n_q + 1.0) * np.eye(2))).max() < 1e-14


def test_recombination_split_reference():
    km = build_kernel_matrices(CTX, BASIS_P, QUAD)
    assert np.abs(split_recombination(km) - SPLIT_REF).max() < 5e-6


def test_recombination_split_trace_identity():
    cm = compute_c_minus(CTX, BASIS_P, QUAD)
    km = build_kernel_matrices(CTX, BASIS_P, QUAD)
    trace = float(np.trace(split_recombination(km)))
    assert trace == pytest.approx(cm[0, 0] + cm[1, 1] - 2.0 * CTX.n_q, abs=1e-14)


def test_zero_uncertainty_split_is_zero():
    km = KernelMatrices(c_minus=CTX.n_q * np.eye(2),
                        c_plus=CTX.n_q * np.eye(2) + np.eye(2),
                        recomb_split=np.zeros((2, 2)), gram=np.eye(2),
                        n_q=CTX.n_q, k_optical=1.0, k0_acoustic=1.0,
                        normalization=ORTHONORMAL)
    assert np.abs(split_recombination(km)).max() == 0.0


def test_small_n_rejected():
    import dataclasses
    bad = dataclasses.replace(CTX, N=0.5)
    with pytest.raises(DomainError):
        compute_c_minus(bad, BASIS_P, QUAD)


# --- random phonon energy evaluators -------------------------------------

def test_full_kernel_gates_closed():
    # |gap| far from both shells: every contribution vanishes identically
    for gap in (0.0, 1.0, -0.5, CTX.A / 2.0):
        sample = eval_phonon_energy_b_full(gap, CTX, BASIS_P)
        assert np.all(sample.b_matrix == 0.0)
        assert sample.elastic_identity


def test_full_kernel_shell_values():
    # partner one shell above (gap = -A): emission-type factor at z = 0
    up = eval_phonon_energy_b_full(-CTX.A, CTX, BASIS_P)
    expect_up = 0.5 / (1.0 - math.exp(-CTX.A))
    assert up.b_matrix[0, 0] == pytest.approx(expect_up, abs=1e-6)
    assert expect_up == pytest.approx(0.5479, abs=1e-4)
    # partner one shell below (gap = +A): occupation factor n_q / 2
    dn = eval_phonon_energy_b_full(CTX.A, CTX, BASIS_P)
    expect_dn = 0.5 / math.expm1(CTX.A)
    assert dn.b_matrix[0, 0] == pytest.approx(expect_dn, abs=1e-6)
    assert expect_dn == pytest.approx(0.04788742, abs=1e-6)
    # at z = 0 the fluctuation rows vanish for the (1, w) pair
    assert abs(up.b_matrix[0, 1]) < 1e-15
    assert abs(dn.b_matrix[1, 1]) < 1e-15


def test_full_kernel_continuous_inside_gate():
    h = 1.0 / CTX.N
    eps = 1e-7
    for base in (-CTX.A + 0.3 * h, CTX.A - 0.2 * h):
        s0 = eval_phonon_energy_b_full(base, CTX, BASIS_P).b_matrix
        s1 = eval_phonon_energy_b_full(base + eps, CTX, BASIS_P).b_matrix
        assert np.abs(s1 - s0).max() < 1e-5


def test_full_kernel_symmetric():
    h = 1.0 / CTX.N
    for gap in (-CTX.A + 0.4 * h, CTX.A - 0.6 * h):
        b = eval_phonon_energy_b_full(gap, CTX, BASIS_P).b_matrix
        assert np.abs(b - b.T).max() < 1e-15


def test_distderiv_delta_shell_weight_against_quadrature():
    h = 0.05
    sample = eval_phonon_energy_b_distderiv(0.3, CTX, BASIS_P, half_width=h)
    shells = {s.gap: s for s in sample.delta_shells}
    # oracle: int Psi_0 Psi_1 pi(z) z dz with pi = 1/(2h) on [-h, h]
    z = np.linspace(-h, h, 2_000_001)
    oracle = float(np.trapezoid((z / h) * z / (2.0 * h), z))
    assert oracle == pytest.approx(h / 3.0, abs=1e-12)
    coeff = -CTX.n_q * (CTX.n_q + 1.0)
    for gap in (-CTX.A, CTX.A):
        assert shells[gap].matrix[0, 1] == pytest.approx(coeff * oracle, abs=1e-10)
        assert shells[gap].matrix[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert shells[gap].matrix[1, 1] == pytest.approx(0.0, abs=1e-12)
    assert shells[-CTX.A].identity_weight == pytest.approx(1.0 + CTX.n_q, abs=1e-12)
    assert shells[CTX.A].identity_weight == pytest.approx(CTX.n_q, abs=1e-12)
    assert shells[0.0].identity_weight == 1.0


def test_distderiv_boundary_term_diagonal():
    # interior z0: d/dz[pi z] = pi = 1/(2h); entry (0,0) = -(coeff)/(2h)
    h = 1.0 / CTX.N
    z0 = 0.4 * h
    gap = -(z0 + CTX.A)        # puts the emission-branch root at z0
    sample = eval_phonon_energy_b_distderiv(gap, CTX, BASIS_P, half_width=h)
    assert sample.b_matrix[0, 0] == pytest.approx(-(1.0 + CTX.n_q) / (2.0 * h), rel=1e-12)
    # symbolic oracle for the off-diagonal: d/dz[w pi z] = z / h^2 at z0
    assert sample.b_matrix[0, 1] == pytest.approx(-(1.0 + CTX.n_q) * z0 / h**2, rel=1e-12)


def test_distderiv_gates_closed_zero_sample():
    sample = eval_phonon_energy_b_distderiv(1.0, CTX, BASIS_P)
    assert np.all(sample.b_matrix == 0.0)
    assert len(sample.delta_shells) == 3


def test_kernel_dump_contains_reference_entry():
    payload = kernel_dump(CTX, BASIS_P, QUAD)
    assert abs(payload["c_minus"][0][0] - 0.0959125) < 5e-6
    assert abs(payload["n_q"] - 0.09577484271) < 1e-9
    assert "c_minus_analytic" in payload
