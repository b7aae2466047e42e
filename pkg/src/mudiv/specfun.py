"""
Special functions used by the BER closed forms.

Every function accepts a scalar or an array and returns the same shape
(scalars come back as Python floats). Gamma-family ratios are evaluated in
log space so that ``B(K, 1 + g*Omega)`` stays finite for ``K`` up to 1e3 and
``Omega`` up to 1e4.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

__all__ = [
    "DomainError",
    "log_gamma",
    "digamma",
    "log_beta",
    "beta_fn",
    "lower_inc_gamma",
    "q_function",
    "q_function_craig",
]


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _out(values, scalar):
    return float(values) if scalar else values


def _positive(name, x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} requires strictly positive arguments")
    return arr


def log_gamma(x):
    """Natural log of the complete gamma function for ``x > 0``."""
    arr = _positive("log_gamma", x)
    return _out(special.gammaln(arr), arr.ndim == 0)


def digamma(x):
    """psi(x) = d/dx ln Gamma(x) for ``x > 0``."""
    arr = _positive("digamma", x)
    return _out(special.psi(arr), arr.ndim == 0)


def log_beta(x, y):
    """ln B(x, y) for positive (not necessarily integer) x and y."""
    ax = _positive("log_beta", x)
    ay = _positive("log_beta", y)
    res = special.betaln(ax, ay)
    return _out(res, np.ndim(res) == 0)


def beta_fn(x, y):
    """Beta function B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y).

    Evaluated as ``exp(log_beta(x, y))``, so arguments up to 1e6 do not
    overflow; the result may underflow to 0 when it is below ~1e-308.
    """
    return _out(np.exp(log_beta(x, y)), np.ndim(x) == 0 and np.ndim(y) == 0)


def lower_inc_gamma(a, b):
    """Lower incomplete gamma function gamma(a, b) = int_0^b t^(a-1) e^-t dt.

    Parameters
    ----------
    a : float or array_like
        Shape, ``a > 0``.
    b : float or array_like
        Upper limit, ``b >= 0``.
    """
    aa = _positive("lower_inc_gamma", a)
    bb = np.asarray(b, dtype=float)
    if np.any(~(bb >= 0)):
        raise DomainError("lower_inc_gamma requires b >= 0")
    # regularized P(a, b) times Gamma(a); series / continued fraction inside
    res = special.gammainc(aa, bb) * special.gamma(aa)
    return _out(res, np.ndim(res) == 0)


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0, 1) > x), via erfc."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError("q_function requires x >= 0")
    return _out(0.5 * special.erfc(arr / math.sqrt(2.0)), arr.ndim == 0)


def q_function_craig(x: float) -> float:
    """Craig's single-integral form of Q(x), kept only for cross-checks.

    Q(x) = (1/pi) int_0^{pi/2} exp(-x^2 / (2 sin^2 theta)) d theta
    """
    if not x >= 0:
        raise DomainError("q_function_craig requires x >= 0")
    if x == 0:
        return 0.5
    xsq = x * x

    def integrand(theta):
        s = math.sin(theta)
        if s == 0.0:
            return 0.0
        return math.exp(-xsq / (2.0 * s * s))

    val, _ = integrate.quad(integrand, 0.0, math.pi / 2, epsabs=1e-15, epsrel=1e-12, limit=200)
    return val / math.pi
