"""Chaos-projected electron-phonon collision kernels.

Random lattice temperature: the 2x2 matrices C-, C+ = I + C- weight the
inelastic energy shells of the two-component collision operator, and
C- - n_q I is the recombination correction that survives after splitting
off the deterministic single-band operator.

Random phonon energy: pointwise evaluators for the kernel matrix B as a
function of the energy gap eps - eps', in the exact (characteristic
function) form and in the first-order distributional-derivative form.
These are property-tested surfaces only; they are not wired into the time
stepper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .gpc import GpcBasis, QuadratureRule, PAPER_UNNORMALIZED
from .polylog import bose_antideriv_0, bose_antideriv_1, bose_antideriv_2
from .scaling import ScalingContext


@dataclass(frozen=True)
class KernelMatrices:
    """Shell weight matrices for the random-temperature collision operator."""

    c_minus: np.ndarray = field(repr=False)
    c_plus: np.ndarray = field(repr=False)
    recomb_split: np.ndarray = field(repr=False)
    gram: np.ndarray = field(repr=False)
    n_q: float
    k_optical: float      # dimensionless optical rate constant
    k0_acoustic: float    # dimensionless acoustic rate constant
    normalization: str


def compute_c_minus(scaling: ScalingContext, basis: GpcBasis,
                    quad: QuadratureRule) -> np.ndarray:
    """Quadrature route: C-_{ij} = (1/2) int Psi_i Psi_j / (e^{A(1+w/N)} - 1) dw."""
    if not scaling.N > 1.0:
        raise DomainError("N must exceed 1: the randomized inverse temperature would hit zero")
    if not scaling.A > 0.0:
        raise DomainError("A must be positive")
    w = quad.nodes
    bose = 1.0 / np.expm1(scaling.A * (1.0 + w / scaling.N))
    out = np.empty((basis.order, basis.order))
    for i in range(basis.order):
        for j in range(i, basis.order):
            out[i, j] = out[j, i] = quad.integrate_density(
                basis.eval(i, w) * basis.eval(j, w) * bose)
    return out


def compute_c_minus_analytic(scaling: ScalingContext) -> np.ndarray:
    """Closed-form route via the Bose antiderivatives, paper_unnormalized basis.

    Entry (i, j) integrates the monomial w^{i+j}, so the three distinct
    values come from the antiderivatives of {1, x, x^2} / (e^{A+Bx} - 1)
    evaluated at x = +-1 (real parts; imaginary parts of the individual log
    and polylog terms cancel in the definite difference).
    """
    a, b = scaling.A, scaling.B
    m0 = 0.5 * (bose_antideriv_0(a, b, 1.0) - bose_antideriv_0(a, b, -1.0))
    m1 = 0.5 * (bose_antideriv_1(a, b, 1.0) - bose_antideriv_1(a, b, -1.0))
    m2 = 0.5 * (bose_antideriv_2(a, b, 1.0) - bose_antideriv_2(a, b, -1.0))
    return np.array([[m0, m1], [m1, m2]])


def build_kernel_matrices(scaling: ScalingContext, basis: GpcBasis,
                          quad: QuadratureRule) -> KernelMatrices:
    """Assemble C-, C+ = C- + I and the recombination split for one basis."""
    c_minus = compute_c_minus(scaling, basis, quad)
    eye = np.eye(basis.order)
    return KernelMatrices(
        c_minus=c_minus,
        c_plus=c_minus + eye,
        recomb_split=c_minus - scaling.n_q * eye,
        gram=basis.gram,
        n_q=scaling.n_q,
        k_optical=scaling.k_opt_hat,
        k0_acoustic=scaling.k_ac_hat,
        normalization=basis.normalization,
    )


def split_recombination(kernels: KernelMatrices) -> np.ndarray:
    """C- - n_q I, the temperature-uncertainty correction matrix."""
    return kernels.c_minus - kernels.n_q * np.eye(kernels.c_minus.shape[0])


# ---------------------------------------------------------------------------
# Random phonon energy: pointwise kernel evaluators.
#
# Energies are dimensionless (units of K_B T_L, so beta_hat = 1) and the
# random shift z lives on [-half_width, half_width] with the affine map
# w = z / half_width onto the reference interval.
# ---------------------------------------------------------------------------

DISTRIBUTIONAL_DERIVATIVE = "distributional_derivative"
CHARACTERISTIC_FUNCTION = "characteristic_function"


@dataclass(frozen=True)
class ShellDelta:
    """A Dirac shell at a fixed energy gap, kept symbolic.

    identity_weight multiplies the identity matrix (the caller attaches the
    K or K0 rate constant); matrix is an extra chaos-coupling weight or None.
    """

    gap: float
    identity_weight: float
    matrix: np.ndarray | None = None


@dataclass(frozen=True)
class PhononEnergyKernelSample:
    """Pointwise value of the random-phonon-energy kernel matrix.

    b_matrix holds the smooth (in gap) part; delta_shells the symbolic Dirac
    contributions; elastic_identity flags the K0 delta(eps - eps') term that
    multiplies the identity and is discretized by the caller.
    """

    gap: float
    variant: str
    b_matrix: np.ndarray = field(repr=False)
    delta_shells: tuple[ShellDelta, ...] = ()
    elastic_identity: bool = True


def _basis_outer(basis: GpcBasis, w: float) -> np.ndarray:
    vals = np.array([float(basis.eval(i, w)) for i in range(basis.order)])
    return np.outer(vals, vals)


def eval_phonon_energy_b_full(gap: float, scaling: ScalingContext,
                              basis: GpcBasis, quad: QuadratureRule | None = None,
                              half_width: float | None = None) -> PhononEnergyKernelSample:
    """Exact kernel matrix at energy gap g = eps - eps' (no z-derivative approximation).

    The two inelastic Dirac deltas pin the random shift to z = -(g + A) for
    the 1/(1 - e^{-(A+z)}) branch and z = g - A for the 1/(e^{A+z} - 1)
    branch; each branch contributes Psi_i Psi_j (1/2) x (Bose factor) when
    its z lands inside the support window and exactly zero otherwise.
    The reference density 1/2 (w units) is used, matching the w-normalized
    characteristic-function formulas.

    ``quad`` is accepted for signature symmetry with the projected-kernel
    builders but is not needed: the deltas remove the z-integral.
    """
    del quad
    if not math.isfinite(gap):
        raise DomainError("gap must be finite")
    h = (1.0 / scaling.N) if half_width is None else float(half_width)
    if not h > 0.0:
        raise DomainError("support half-width must be positive")
    a = scaling.A
    out = np.zeros((basis.order, basis.order))

    z_emit = -(gap + a)          # root of delta(eps - eps' + A + z)
    if abs(z_emit) <= h:
        u = a + z_emit
        out += _basis_outer(basis, z_emit / h) * 0.5 / (1.0 - math.exp(-u))

    z_abs = gap - a              # root of delta(eps - eps' - A - z)
    if abs(z_abs) <= h:
        u = a + z_abs
        out += _basis_outer(basis, z_abs / h) * 0.5 / math.expm1(u)

    return PhononEnergyKernelSample(gap=gap, variant=CHARACTERISTIC_FUNCTION,
                                    b_matrix=out, delta_shells=(),
                                    elastic_identity=True)


def _deriv_psi_pi_z(basis: GpcBasis, z: float, h: float) -> np.ndarray:
    """d/dz [Psi_i(w(z)) Psi_j(w(z)) pi(z) z] with uniform pi(z) = 1/(2h), w = z/h."""
    n1 = basis.scale1
    d00 = 1.0 / (2.0 * h)
    d01 = n1 * z / h**2
    d11 = n1**2 * 1.5 * z**2 / h**3
    return np.array([[d00, d01], [d01, d11]])


def eval_phonon_energy_b_distderiv(gap: float, scaling: ScalingContext,
                                   basis: GpcBasis,
                                   half_width: float | None = None) -> PhononEnergyKernelSample:
    """First-order-in-z kernel matrix built from the distributional derivative.

    Smooth part: the transferred-derivative boundary terms
    -(1 + n_q) d/dz[Psi_i Psi_j pi z] at z = -(gap + A) and
    -n_q d/dz[Psi_i Psi_j pi z] at z = +(gap - A), each gated by the support
    window (z-units density pi = 1/(2h)).

    Dirac shells: the zeroth-order weights (n_q + 1), n_q, and the elastic
    flag at gaps -A, +A, 0, plus the first-order matrix
    -n_q (n_q + 1) int Psi_i Psi_j pi z dz attached to both +-A shells.
    """
    if not math.isfinite(gap):
        raise DomainError("gap must be finite")
    h = (1.0 / scaling.N) if half_width is None else float(half_width)
    if not h > 0.0:
        raise DomainError("support half-width must be positive")
    a, n_q = scaling.A, scaling.n_q

    out = np.zeros((basis.order, basis.order))
    z1 = -(gap + a)
    if abs(z1) <= h:
        out -= (1.0 + n_q) * _deriv_psi_pi_z(basis, z1, h)
    z2 = gap - a
    if abs(z2) <= h:
        out -= n_q * _deriv_psi_pi_z(basis, z2, h)

    # int Psi_i Psi_j pi(z) z dz over [-h, h]: only the (0,1) entry survives
    zmat = np.zeros((basis.order, basis.order))
    zmat[0, 1] = zmat[1, 0] = basis.scale1 * h / 3.0
    shell_first_order = -n_q * (1.0 + n_q) * zmat

    shells = (
        ShellDelta(gap=-a, identity_weight=1.0 + n_q, matrix=shell_first_order),
        ShellDelta(gap=+a, identity_weight=n_q, matrix=shell_first_order),
        ShellDelta(gap=0.0, identity_weight=1.0, matrix=None),  # K0 elastic flag
    )
    return PhononEnergyKernelSample(gap=gap, variant=DISTRIBUTIONAL_DERIVATIVE,
                                    b_matrix=out, delta_shells=shells,
                                    elastic_identity=True)


def kernel_dump(scaling: ScalingContext, basis: GpcBasis,
                quad: QuadratureRule) -> dict:
    """JSON-ready snapshot of the kernel matrices and constants."""
    km = build_kernel_matrices(scaling, basis, quad)
    analytic = compute_c_minus_analytic(scaling) if basis.normalization == PAPER_UNNORMALIZED else None
    out = {
        "A": scaling.A,
        "B": scaling.B,
        "N": scaling.N,
        "n_q": scaling.n_q,
        "k_optical_dimensionless": km.k_optical,
        "k0_acoustic_dimensionless": km.k0_acoustic,
        "basis": basis.normalization,
        "c_minus": km.c_minus.tolist(),
        "c_plus": km.c_plus.tolist(),
        "recombination_split": km.recomb_split.tolist(),
        "gram": km.gram.tolist(),
    }
    if analytic is not None:
        out["c_minus_analytic"] = analytic.tolist()
    return out
