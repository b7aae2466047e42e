"""
Large-K and high-SNR behaviour of the approximate K-GA BER.

Both regimes come from x^y B(x, y) -> Gamma(y) as x -> inf, applied to
B(K, 1 + g_a Omega) with either K or g_a Omega playing the role of x.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .ber import BerEstimator, Modulation, approx_ber
from .energy import SystemConfig, lambda_of_k
from .optimize import solve_kb_min_ber
from .specfun import DomainError, log_beta, log_gamma

__all__ = [
    "Regime",
    "ScalingReport",
    "beta_limit_ratio",
    "ber_large_k",
    "ber_high_snr",
    "log_ber_large_k",
    "log_ber_high_snr",
    "k_lower_bound_large_k",
    "k_lower_bound_high_snr",
    "energy_constrained_scaling",
    "kb_snr_sweep",
]


class Regime(str, enum.Enum):
    LARGE_K = "large_k"
    HIGH_SNR = "high_snr"


@dataclass(frozen=True)
class ScalingReport:
    regime: Regime
    predicted: float
    measured: float

    @property
    def rel_err(self) -> float:
        return abs(self.measured - self.predicted) / abs(self.predicted)


def beta_limit_ratio(x, y):
    """x^y B(x, y) / Gamma(y), which tends to 1 as x grows."""
    if np.any(np.asarray(x) <= 0) or np.any(np.asarray(y) <= 0):
        raise DomainError("beta_limit_ratio needs x, y > 0")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    # x^y / (x)_y avoids the cancellation in y log x + log B(x, y) - log Gamma(y)
    with np.errstate(over="ignore", under="ignore"):
        direct = np.exp(y * np.log(x) - np.log(special.poch(x, y)))
    fallback = np.exp(y * np.log(x) + log_beta(x, y) - log_gamma(y))
    res = np.where(np.isfinite(direct) & (direct > 0), direct, fallback)
    return float(res) if np.ndim(res) == 0 else res


def log_ber_large_k(mod: Modulation, K, omega):
    f = mod.g_a * np.asarray(omega, dtype=float)
    res = math.log(0.2) + log_gamma(1.0 + f) - f * np.log(K)
    return float(res) if np.ndim(res) == 0 else res


def ber_large_k(mod: Modulation, K, omega):
    """0.2 Gamma(1 + g_a Omega) K^(-g_a Omega)."""
    res = np.exp(log_ber_large_k(mod, K, omega))
    return float(res) if np.ndim(res) == 0 else res


def log_ber_high_snr(mod: Modulation, K, omega):
    kk = np.asarray(K, dtype=float)
    res = math.log(0.2) + log_gamma(kk + 1.0) - kk * np.log(mod.g_a * np.asarray(omega, dtype=float))
    return float(res) if np.ndim(res) == 0 else res


def ber_high_snr(mod: Modulation, K, omega):
    """0.2 g_a^-K Gamma(K + 1) Omega^-K: diversity order K."""
    res = np.exp(log_ber_high_snr(mod, K, omega))
    return float(res) if np.ndim(res) == 0 else res


def _check_target(ber_target):
    if not 0 < ber_target < 0.5:
        raise DomainError("ber_target must lie in (0, 0.5)")


def k_lower_bound_large_k(mod: Modulation, omega: float, ber_target: float) -> float:
    """K at which the large-K law reaches ``ber_target``."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    _check_target(ber_target)
    f = mod.g_a * omega
    return math.exp((math.log(0.2) + log_gamma(1.0 + f) - math.log(ber_target)) / f)


def k_lower_bound_high_snr(mod: Modulation, omega: float, ber_target: float) -> float:
    """log(1/BER_t) / log(g_a Omega); requires g_a Omega > 1."""
    _check_target(ber_target)
    f = mod.g_a * omega
    if not f > 1:
        raise DomainError("high-SNR bound needs g_a * Omega > 1")
    return math.log(1.0 / ber_target) / math.log(f)


def energy_constrained_scaling(
    cfg: SystemConfig, mod: Modulation, K: int
) -> tuple[ScalingReport, ScalingReport]:
    """Compare both asymptotic laws with the approximate BER at lambda(K).

    The laws are the large-K and high-SNR forms with the SNR multiplied by
    the power gain G_p = (Kbar - K)/alpha + 1 (with c folded into lambda).
    """
    snr = cfg.omega * lambda_of_k(cfg, K)
    measured = approx_ber(mod, K, snr)
    return (
        ScalingReport(Regime.LARGE_K, ber_large_k(mod, K, snr), measured),
        ScalingReport(Regime.HIGH_SNR, ber_high_snr(mod, K, snr), measured),
    )


def kb_snr_sweep(cfg: SystemConfig, mod: Modulation, snr_db, estimator: BerEstimator | None = None):
    """Optimal K under the energy constraint for each normalized SNR in dB."""
    out = []
    for s in np.atleast_1d(snr_db):
        c = SystemConfig.from_snr_db(
            cfg.kbar, float(s), omega=cfg.omega, alpha=cfg.alpha, c_norm=cfg.c_norm,
            n_slots=cfg.n_slots, ts=cfg.ts, candidates=cfg.candidates,
        )
        out.append(solve_kb_min_ber(c, mod, estimator).k_star)
    return np.array(out)
