"""Scalar random variable, polynomial chaos basis and projection quadrature.

The random input is uniform on the reference interval [-1, 1] (density 1/2),
reached from the physical variable by the affine map w = N z / beta.  Two
basis normalizations are supported for the degree-1 Legendre pair:

* ``paper_unnormalized``: (1, w), Gram diag(1, 1/3) -- the convention the
  reference kernel matrices are printed in;
* ``orthonormal``: (1, sqrt(3) w), Gram = identity -- the convention under
  which variance is the plain sum of squared fluctuation coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

PAPER_UNNORMALIZED = "paper_unnormalized"
ORTHONORMAL = "orthonormal"


@dataclass(frozen=True)
class RandomModel:
    """Uniform random variable on [-1,1] with its physical affine map."""

    beta: float
    n_divisor: float
    kind: str = "uniform_on_pm1"

    def w_from_z(self, z):
        """Map physical z in [-beta/N, beta/N] to reference w in [-1,1]."""
        return np.asarray(z) * (self.n_divisor / self.beta)

    def z_from_w(self, w):
        return np.asarray(w) * (self.beta / self.n_divisor)

    def density(self, w):
        w = np.asarray(w, dtype=float)
        return np.where(np.abs(w) <= 1.0, 0.5, 0.0)


@dataclass(frozen=True)
class GpcBasis:
    """Degree-1 Legendre chaos pair with a selectable normalization."""

    normalization: str = ORTHONORMAL
    order: int = 2

    def __post_init__(self):
        if self.normalization not in (PAPER_UNNORMALIZED, ORTHONORMAL):
            raise ConfigurationError(f"unknown basis normalization {self.normalization!r}")
        if self.order != 2:
            raise ConfigurationError("only the 2-term chaos basis is supported")

    @property
    def scale1(self) -> float:
        """Coefficient of w in the fluctuation function Psi_1."""
        return math.sqrt(3.0) if self.normalization == ORTHONORMAL else 1.0

    def eval(self, index: int, w):
        w = np.asarray(w, dtype=float)
        if index == 0:
            return np.ones_like(w)
        if index == 1:
            return self.scale1 * w
        raise DomainError(f"basis index {index} out of range for order {self.order}")

    @property
    def gram(self) -> np.ndarray:
        """<Psi_i Psi_j pi> on [-1,1]; exact closed form."""
        second = self.scale1**2 / 3.0
        return np.array([[1.0, 0.0], [0.0, second]])


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights on [-1,1] (weights sum to 2; density applied separately)."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def gauss_legendre(cls, n: int = 64) -> "QuadratureRule":
        if n < 1:
            raise ConfigurationError("quadrature order must be >= 1")
        nodes, weights = np.polynomial.legendre.leggauss(n)
        return cls(nodes=nodes, weights=weights)

    def integrate_density(self, values: np.ndarray) -> float:
        """Integral against the uniform density 1/2 of values at the nodes."""
        return float(np.dot(self.weights, values) * 0.5)


def project(f, basis: GpcBasis, quad: QuadratureRule) -> np.ndarray:
    """Best-approximation coefficients of f in span{Psi} under L2(pi).

    Returns gram^-1 <f Psi_i pi>, so reconstruct(project(f)) is the L2(pi)
    orthogonal projection of f.
    """
    w = quad.nodes
    fv = np.asarray([f(wi) for wi in w], dtype=float)
    moments = np.array([quad.integrate_density(fv * basis.eval(i, w))
                        for i in range(basis.order)])
    return np.linalg.solve(basis.gram, moments)


def reconstruct(coeffs: np.ndarray, basis: GpcBasis, w):
    coeffs = np.asarray(coeffs, dtype=float)
    return sum(coeffs[i] * basis.eval(i, w) for i in range(basis.order))


def statistics(coeffs, basis: GpcBasis) -> tuple[float, float, float]:
    """(mean, variance, stddev) of the chaos expansion with given coefficients.

    mean = alpha_0; variance = sum_{k>=1} alpha_k^2 <Psi_k^2 pi>, which
    reduces to alpha_1^2 in the orthonormal convention.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != basis.order:
        raise DomainError(f"expected {basis.order} coefficients, got {coeffs.shape[-1]}")
    gram_diag = np.diag(basis.gram)
    mean = float(coeffs[0])
    var = float(np.sum(coeffs[1:] ** 2 * gram_diag[1:]))
    return mean, var, math.sqrt(var)
