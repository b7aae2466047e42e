"""
BER measures for K-user greedy access (K-GA) over Rayleigh fading.

The scheduled SNR under K-GA is the maximum of K i.i.d. exponential (or,
with diversity order D, Gamma(D)) variables with mean ``Omega``. Averaging
the Gray-coded square M-QAM AWGN BER over that order statistic gives

* ``exact_ber``   - Craig-form average, one theta-integral of B(K, 1 + g Omega)
* ``ub_ber``      - the integrand replaced by its value at theta = pi/2
* ``approx_ber``  - 0.2 * K * B(K, 1 + g_a Omega), from Pr_b ~ 0.2 exp(-g_a rho)

Each estimator also has a ``log_*`` form. The solvers compare log-BERs,
since at large ``K`` and SNR the BER itself underflows.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from .specfun import DomainError, log_beta, q_function

__all__ = [
    "QuadratureError",
    "Modulation",
    "BerKind",
    "UbConvention",
    "BerEstimator",
    "awgn_ber",
    "kga_snr_pdf",
    "exact_ber",
    "log_exact_ber",
    "ub_ber",
    "log_ub_ber",
    "approx_ber",
    "log_approx_ber",
    "multi_antenna_approx_ber",
    "log_multi_antenna_approx_ber",
    "system_ber",
    "log_system_ber",
]

THETA_EPS = 1e-12
EXACT_RTOL = 1e-10
MULTI_ANTENNA_RTOL = 1e-8


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


def _gray_qam_terms(M: int) -> tuple[tuple[float, float], ...]:
    # Cho & Yoon exact bit error probability for Gray-coded square M-QAM,
    # collected per Q((2i+1) sqrt(3 rho / (M-1))) argument.
    side = math.isqrt(M)
    if side * side != M or side < 2 or side & (side - 1):
        raise ValueError(f"M={M} is not a square QAM size (4, 16, 64, ...)")
    nbits = side.bit_length() - 1
    weights: dict[int, Fraction] = {}
    for k in range(1, nbits + 1):
        step = 2 ** (k - 1)
        for i in range((side - side // 2**k)):
            q = (i * step) // side
            w = (-1) ** q * (step - ((2 * i * step + side) // (2 * side)))
            weights[i] = weights.get(i, Fraction(0)) + Fraction(2 * w, side * nbits)
    return tuple(
        (float(w), float(Fraction(3 * (2 * i + 1) ** 2, M - 1)))
        for i, w in sorted(weights.items())
        if w != 0
    )


@dataclass(frozen=True)
class Modulation:
    """Gray-coded square M-QAM with its AWGN BER expansion.

    ``terms`` holds the pairs (C_i, c_i) of
    ``Pr_b(M, rho) = sum_i C_i Q(sqrt(c_i rho))``.
    """

    M: int
    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.terms) < 1:
            raise ValueError("modulation needs at least one (C, c) term")
        if any(c <= 0 for _, c in self.terms):
            raise ValueError("all argument scales c_i must be positive")
        if abs(sum(C for C, _ in self.terms) - 1.0) > 1e-12:
            raise ValueError("weights C_i must sum to one")

    @classmethod
    def qam(cls, M: int) -> "Modulation":
        return cls(M, _gray_qam_terms(M))

    @property
    def g_a(self) -> float:
        """Exponent of the 0.2 exp(-g_a rho) BER approximation."""
        return 1.5 / (self.M - 1)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.M))

    @property
    def weights(self) -> np.ndarray:
        return np.array([C for C, _ in self.terms])

    @property
    def scales(self) -> np.ndarray:
        return np.array([c for _, c in self.terms])


class BerKind(str, enum.Enum):
    EXACT = "exact"
    UPPER_BOUND = "ub"
    APPROXIMATE = "approx"


class UbConvention(str, enum.Enum):
    PI_INVERSE = "pi"
    STRICT_HALF = "strict"


@dataclass(frozen=True)
class BerEstimator:
    """Which system-BER formula to evaluate, plus the diversity order ``D``."""

    kind: BerKind = BerKind.APPROXIMATE
    diversity: int = 1
    ub_convention: UbConvention = UbConvention.PI_INVERSE

    def __post_init__(self):
        object.__setattr__(self, "kind", BerKind(self.kind))
        object.__setattr__(self, "ub_convention", UbConvention(self.ub_convention))
        if int(self.diversity) != self.diversity or self.diversity < 1:
            raise ValueError("diversity order D must be a positive integer")
        if self.diversity > 1 and self.kind is not BerKind.APPROXIMATE:
            raise ValueError("exact and upper-bound BER are only defined for D = 1")


def _check_omega(omega):
    arr = np.asarray(omega, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("average SNR Omega must be positive")
    return arr


def _check_k(K, integer=True):
    arr = np.asarray(K, dtype=float)
    if np.any(~(arr >= 1)):
        raise DomainError("number of active users K must be >= 1")
    if integer and np.any(arr != np.round(arr)):
        raise DomainError("K must be an integer for this estimator")
    return arr


def awgn_ber(mod: Modulation, rho):
    """Gray M-QAM bit error probability at SNR ``rho`` (linear) over AWGN."""
    r = np.asarray(rho, dtype=float)
    if np.any(~(r >= 0)):
        raise DomainError("rho must be nonnegative")
    out = sum(C * q_function(np.sqrt(c * r)) for C, c in mod.terms)
    return float(out) if r.ndim == 0 else out


def kga_snr_pdf(K: int, omega: float, y, D: int = 1):
    """Density of the scheduled SNR max_k rho_k under K-GA.

    For ``D = 1`` each rho_k is exponential with mean ``omega``; for ``D > 1``
    rho_k / omega is Gamma(D, 1) (chi-squared with 2D degrees of freedom,
    halved).
    """
    _check_k(K)
    _check_omega(omega)
    yy = np.asarray(y, dtype=float)
    if np.any(~(yy >= 0)):
        raise DomainError("y must be nonnegative")
    x = yy / omega
    if D == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            cdf = -np.expm1(-x)
            pdf = K * np.exp(-x) / omega * np.where(K == 1, 1.0, cdf ** (K - 1))
    else:
        base = np.exp((D - 1) * np.log(np.where(x > 0, x, 1.0)) - x - special.gammaln(D))
        base = np.where(x > 0, base, 1.0 if D == 1 else 0.0)
        pdf = K * base / omega * special.gammainc(D, x) ** (K - 1)
    return float(pdf) if yy.ndim == 0 else pdf


def _theta_integral(K: float, scale: float, omega: float):
    """Return (log of max integrand, normalized integral) for one QAM term.

    Integrates B(K, 1 + c Omega / (2 sin^2 theta)) over [eps, pi/2] after
    dividing by its maximum at theta = pi/2, so the quadrature never sees an
    underflowed integrand.
    """
    peak = log_beta(K, 1.0 + 0.5 * scale * omega)

    def integrand(theta):
        s2 = math.sin(theta) ** 2
        return math.exp(special.betaln(K, 1.0 + scale * omega / (2.0 * s2)) - peak)

    res = integrate.quad(
        integrand, THETA_EPS, math.pi / 2, epsabs=0.0, epsrel=EXACT_RTOL,
        limit=400, full_output=True,
    )
    if len(res) > 3:
        raise QuadratureError(f"theta quadrature failed for K={K}, Omega={omega}: {res[3]}")
    return peak, res[0]


def log_exact_ber(mod: Modulation, K: int, omega: float) -> float:
    """Natural log of the exact K-GA BER (Craig-form beta integral)."""
    _check_k(K)
    _check_omega(omega)
    if np.ndim(K) or np.ndim(omega):
        raise TypeError("log_exact_ber is scalar-only; use np.vectorize or a loop")
    parts = [(C, *_theta_integral(float(K), c, float(omega))) for C, c in mod.terms]
    top = max(p for _, p, _ in parts)
    total = sum(C * math.exp(p - top) * v for C, p, v in parts)
    if total <= 0:
        raise QuadratureError("cancellation in the M-QAM term sum")
    return math.log(K / math.pi) + top + math.log(total)


def exact_ber(mod: Modulation, K: int, omega: float) -> float:
    """Exact average BER of K-GA, adaptive quadrature to 1e-10 relative."""
    return math.exp(log_exact_ber(mod, K, omega))


def log_ub_ber(mod: Modulation, K, omega, convention=UbConvention.PI_INVERSE):
    kk = _check_k(K)
    om = _check_omega(omega)
    lead = math.log(1 / math.pi) if UbConvention(convention) is UbConvention.PI_INVERSE else math.log(0.5)
    lb = np.array([log_beta(kk, 1.0 + 0.5 * c * om) for _, c in mod.terms])
    weights = mod.weights.reshape((-1,) + (1,) * lb[0].ndim)
    top = lb.max(axis=0)
    total = np.sum(weights * np.exp(lb - top), axis=0)
    res = lead + np.log(kk) + top + np.log(total)
    return float(res) if np.ndim(res) == 0 else res


def ub_ber(mod: Modulation, K, omega, convention=UbConvention.PI_INVERSE):
    """Chernoff-type bound: theta-integrand replaced by its theta = pi/2 value.

    ``convention='pi'`` uses a 1/pi prefactor (the default);
    ``'strict'`` uses 1/2, which is what bounding the integrand by its
    maximum over [0, pi/2] actually gives and which is a true upper bound.
    """
    res = np.exp(log_ub_ber(mod, K, omega, convention))
    return float(res) if np.ndim(res) == 0 else res


def log_approx_ber(mod: Modulation, K, omega):
    kk = _check_k(K, integer=False)
    om = _check_omega(omega)
    res = math.log(0.2) + np.log(kk) + log_beta(kk, 1.0 + mod.g_a * om)
    return float(res) if np.ndim(res) == 0 else res


def approx_ber(mod: Modulation, K, omega):
    """0.2 * K * B(K, 1 + g_a Omega); ``K`` may be real-valued."""
    res = np.exp(log_approx_ber(mod, K, omega))
    return float(res) if np.ndim(res) == 0 else res


def _t_max(K: int, D: int) -> float:
    return max(50.0, 20.0 * D + 10.0 * math.log(K + 1.0))


def log_multi_antenna_approx_ber(mod: Modulation, K: int, omega: float, D: int) -> float:
    """Log of the approximate BER with chi-squared(2D) per-user SNR."""
    _check_k(K)
    _check_omega(omega)
    if int(D) != D or D < 1:
        raise DomainError("D must be a positive integer")
    K, D = int(K), int(D)
    rate = 1.0 + mod.g_a * float(omega)
    lg_d = special.gammaln(D)

    def log_f(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            val = (D - 1) * np.log(t) - rate * t - lg_d
            if K > 1:
                val = val + (K - 1) * np.log(special.gammainc(D, t))
        return val

    t_max = _t_max(K, D)
    grid = np.geomspace(1e-8, t_max, 4001)
    lg = log_f(grid)
    j = int(np.argmax(lg))
    top, t_peak = float(lg[j]), float(grid[j])
    breaks = sorted({t_peak, min(t_peak * 4, t_max / 2), t_peak / 4})
    res = integrate.quad(
        lambda t: math.exp(float(log_f(t)) - top) if t > 0 else 0.0,
        0.0, t_max, points=breaks, epsabs=0.0, epsrel=MULTI_ANTENNA_RTOL * 1e-2,
        limit=400, full_output=True,
    )
    val, err = res[:2]
    if len(res) > 3 and err > MULTI_ANTENNA_RTOL * abs(val):
        raise QuadratureError(f"t quadrature failed for K={K}, Omega={omega}, D={D}: {res[3]}")
    return math.log(0.2 * K) + top + math.log(val)


def multi_antenna_approx_ber(mod: Modulation, K: int, omega: float, D: int) -> float:
    """0.2 K int_0^inf t^(D-1) e^{-(1+g_a Omega) t} gamma(D,t)^(K-1) / Gamma(D)^K dt."""
    return math.exp(log_multi_antenna_approx_ber(mod, K, omega, D))


def log_system_ber(estimator: BerEstimator, mod: Modulation, K, omega):
    """Dispatch to the log-BER formula selected by ``estimator``.

    ``K`` and ``omega`` broadcast against each other; exact and multi-antenna
    estimators loop in Python.
    """
    kind = estimator.kind
    if kind is BerKind.APPROXIMATE and estimator.diversity == 1:
        return log_approx_ber(mod, K, omega)
    if kind is BerKind.UPPER_BOUND:
        return log_ub_ber(mod, K, omega, estimator.ub_convention)
    kk, om = np.broadcast_arrays(np.asarray(K, dtype=float), np.asarray(omega, dtype=float))
    if kind is BerKind.EXACT:
        fn = lambda k, o: log_exact_ber(mod, int(k), float(o))
    else:
        fn = lambda k, o: log_multi_antenna_approx_ber(mod, int(k), float(o), estimator.diversity)
    out = np.array([fn(k, o) for k, o in zip(kk.ravel(), om.ravel())]).reshape(kk.shape)
    return float(out) if out.ndim == 0 else out


def system_ber(estimator: BerEstimator, mod: Modulation, K, omega):
    res = np.exp(log_system_ber(estimator, mod, K, omega))
    return float(res) if np.ndim(res) == 0 else res
