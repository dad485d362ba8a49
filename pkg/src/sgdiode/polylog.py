"""Real dilogarithm / trilogarithm and Bose-integral antiderivatives.

The closed-form antiderivatives of x^n / (exp(A + Bx) - 1) involve log and
Li_2/Li_3 at arguments e^{A+Bx} > 1, where the individual terms are complex
but the imaginary parts cancel in any definite evaluation.  Everything here
works with the real parts directly, using the inversion identities

    Re Li2(y) = pi^2/3 - ln(y)^2/2 - Li2(1/y)          (y > 1)
    Re Li3(y) = Li3(1/y) - ln(y)^3/6 + pi^2 ln(y)/3    (y > 1)
    Re log(1 - y) = log(y - 1)                          (y > 1)

so only Li_s on (0, 1] is ever evaluated numerically.
"""

from __future__ import annotations

import math

from .errors import DomainError

_PI2_6 = math.pi**2 / 6.0
_ZETA3 = 1.2020569031595942854  # zeta(3)

_SERIES_TOL = 1e-17
_SERIES_MAX_TERMS = 200_000


def _series_polylog(s: int, x: float) -> float:
    """Direct series sum_{k>=1} x^k / k^s for |x| <= 1."""
    total = 0.0
    term = x
    k = 1
    while abs(term) > _SERIES_TOL * max(1.0, abs(total)):
        total += term / k**s if s != 2 else term / (k * k)
        k += 1
        term *= x
        if k > _SERIES_MAX_TERMS:
            break
    return total


def dilog(x: float) -> float:
    """Li2(x) for x <= 1 (real branch)."""
    if x > 1.0:
        raise DomainError("dilog: argument must be <= 1; use re_dilog for the real part beyond")
    if x == 1.0:
        return _PI2_6
    if x == 0.0:
        return 0.0
    if x < -1.0:
        # Li2(x) = -Li2(1/x) - pi^2/6 - ln(-x)^2 / 2  for x < -1
        return -dilog(1.0 / x) - _PI2_6 - 0.5 * math.log(-x) ** 2
    if x <= -0.5:
        # duplication formula avoids the slowly alternating series near -1
        return 0.5 * dilog(x * x) - dilog(-x)
    if x > 0.5:
        # Euler reflection keeps the series argument small
        return _PI2_6 - math.log(x) * math.log1p(-x) - _series_polylog(2, 1.0 - x)
    return _series_polylog(2, x)


def trilog(x: float) -> float:
    """Li3(x) for x <= 1 (real branch)."""
    if x > 1.0:
        raise DomainError("trilog: argument must be <= 1; use re_trilog for the real part beyond")
    if x == 1.0:
        return _ZETA3
    if x == 0.0:
        return 0.0
    if x < -1.0:
        # Li3(x) = Li3(1/x) - ln(-x)^3/6 - pi^2 ln(-x)/6  for x < -1
        lg = math.log(-x)
        return trilog(1.0 / x) - lg**3 / 6.0 - _PI2_6 * lg
    if x <= -0.5:
        return 0.25 * trilog(x * x) - trilog(-x)
    if x > 0.5:
        # Landen-type identity:
        # Li3(x) = zeta(3) + ln(x)^3/6 + pi^2 ln(x)/6 - ln(x)^2 ln(1-x)/2
        #          - Li3(1-x) - Li3(1 - 1/x)
        lx = math.log(x)
        l1x = math.log1p(-x)
        return (_ZETA3 + lx**3 / 6.0 + _PI2_6 * lx - 0.5 * lx**2 * l1x
                - _series_polylog(3, 1.0 - x) - trilog(1.0 - 1.0 / x))
    return _series_polylog(3, x)


def re_dilog(y: float) -> float:
    """Real part of Li2(y) for any y > 0."""
    if y <= 1.0:
        return dilog(y)
    lg = math.log(y)
    return 2.0 * _PI2_6 - 0.5 * lg * lg - dilog(1.0 / y)


def re_trilog(y: float) -> float:
    """Real part of Li3(y) for any y > 0."""
    if y <= 1.0:
        return trilog(y)
    lg = math.log(y)
    return trilog(1.0 / y) - lg**3 / 6.0 + 2.0 * _PI2_6 * lg


def re_log1m_exp(u: float) -> float:
    """Real part of log(1 - e^u)."""
    if u <= 0.0:
        return math.log1p(-math.exp(u)) if u < 0.0 else -math.inf
    return math.log(math.expm1(u))


def bose_antideriv_0(a: float, b: float, x: float) -> float:
    """Antiderivative of 1/(exp(a+bx)-1):  log(1-e^{a+bx})/b - x  (real part)."""
    u = a + b * x
    return re_log1m_exp(u) / b - x


def bose_antideriv_1(a: float, b: float, x: float) -> float:
    """Antiderivative of x/(exp(a+bx)-1):
    Li2(e^{a+bx})/b^2 + x log(1-e^{a+bx})/b - x^2/2  (real part)."""
    u = a + b * x
    return re_dilog(math.exp(u)) / b**2 + x * re_log1m_exp(u) / b - 0.5 * x * x


def bose_antideriv_2(a: float, b: float, x: float) -> float:
    """Antiderivative of x^2/(exp(a+bx)-1):
    -2 Li3(e^{a+bx})/b^3 + 2x Li2(e^{a+bx})/b^2 + x^2 log(1-e^{a+bx})/b - x^3/3."""
    u = a + b * x
    ev = math.exp(u)
    return (-2.0 * re_trilog(ev) / b**3 + 2.0 * x * re_dilog(ev) / b**2
            + x * x * re_log1m_exp(u) / b - x**3 / 3.0)
