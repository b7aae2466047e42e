"""
Choosing the number of active users K.

``solve_kb_min_ber``
    Minimize system BER with the total energy fixed; every user not
    scheduled frees E_f for data, so Omega(K) = omega * lambda(K).
``solve_kdt_min_energy`` / ``solve_kds_min_energy``
    Minimize total energy at fixed SNR subject to BER <= target. BER falls
    and energy grows monotonically in K, so the answer is the smallest
    feasible K. Delay-tolerant systems defer (K* = 0) when even the largest
    candidate misses the target; delay-sensitive ones fall back to it.

With the approximate BER, d/dK ln Pr_b has the closed digamma form computed
by ``eta``; its sign change brackets the optimum and a bisection over the
candidate list finds it without evaluating the BER at every K.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ber import BerEstimator, BerKind, Modulation, log_system_ber
from .energy import (
    EnergyBreakdown,
    SystemConfig,
    energy_fixed_total,
    lambda_of_k,
    power_gain,
    total_energy_fixed_ber,
)
from .specfun import DomainError, digamma

__all__ = [
    "EtaContext",
    "OptimizationOutcome",
    "eta",
    "log_ber_energy_constrained",
    "log_ber_fixed_power",
    "solve_kb_min_ber",
    "solve_kdt_min_energy",
    "solve_kds_min_energy",
    "SCAN_LIMIT",
]

# candidate sets up to this size are scanned exhaustively when eta does not apply
SCAN_LIMIT = 512


@dataclass(frozen=True)
class EtaContext:
    """f(K) = g_a * omega * lambda(K) and its derivative in K."""

    f: Callable
    f_prime: Callable
    source: str

    @classmethod
    def energy_constrained(cls, cfg: SystemConfig, mod: Modulation) -> "EtaContext":
        scale = mod.g_a * cfg.omega
        slope = -scale * cfg.c_norm * cfg.lambda_ga / cfg.alpha
        return cls(
            f=lambda K: scale * lambda_of_k(cfg, K),
            f_prime=lambda K: slope + 0.0 * np.asarray(K, dtype=float),
            source="energy_constrained",
        )

    @classmethod
    def fixed_power(cls, mod: Modulation, omega: float, lam: float) -> "EtaContext":
        value = mod.g_a * omega * lam
        return cls(
            f=lambda K: value + 0.0 * np.asarray(K, dtype=float),
            f_prime=lambda K: 0.0 * np.asarray(K, dtype=float),
            source="fixed_power",
        )


def eta(ctx: EtaContext, K):
    """Derivative of ln(0.2 K B(K, 1 + f(K))) with respect to real K."""
    kk = np.asarray(K, dtype=float)
    if np.any(kk < 1):
        raise DomainError("eta needs K >= 1")
    f = np.asarray(ctx.f(kk), dtype=float)
    fp = np.asarray(ctx.f_prime(kk), dtype=float)
    if np.any(kk + 1 + f <= 0) or np.any(1 + f <= 0):
        raise DomainError("K + 1 + f(K) must be positive")
    res = 1.0 / kk + digamma(kk) - (1.0 + fp) * digamma(kk + 1.0 + f) + fp * digamma(1.0 + f)
    return float(res) if np.ndim(res) == 0 else res


@dataclass(frozen=True)
class OptimizationOutcome:
    """Result of one K selection.

    ``k_star == 0`` encodes a delay-tolerant outage; ``achieved_ber`` and
    ``log_ber`` are then NaN and ``energy`` is None. ``gain_vs_ga_db`` is the
    data-power gain G_p for the BER problem and the total-energy saving for
    the energy problems, both relative to generic GA.
    """

    k_star: int
    achieved_ber: float
    log_ber: float
    energy: EnergyBreakdown | None
    gain_vs_ga_db: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "k_star": self.k_star,
            "achieved_ber": self.achieved_ber,
            "log_ber": self.log_ber,
            "energy": None if self.energy is None else self.energy.to_dict(),
            "gain_vs_ga_db": self.gain_vs_ga_db,
            "feasible": self.feasible,
        }


def log_ber_energy_constrained(cfg: SystemConfig, mod: Modulation, estimator: BerEstimator, K):
    """ln Pr_b at K when the total energy is held at its generic-GA value."""
    return log_system_ber(estimator, mod, K, cfg.omega * lambda_of_k(cfg, K))


def log_ber_fixed_power(cfg: SystemConfig, mod: Modulation, estimator: BerEstimator, K, snr=None):
    """ln Pr_b at K with the SNR held at ``snr`` (default omega * lambda_ga)."""
    snr = cfg.snr_ga if snr is None else snr
    return log_system_ber(estimator, mod, K, snr)


def _sign(x: float) -> int:
    return 1 if x >= 0 else -1


def _bracket_by_eta(cands: tuple[int, ...], eta_of: Callable[[int], float]) -> tuple[int, int] | int:
    """Integer projection of the stationary point of a unimodal log-BER.

    Returns a single candidate when a boundary rule fires, otherwise the
    adjacent index pair (lo, lo + 1) with eta(lo) < 0 <= eta(lo + 1).
    """
    if _sign(eta_of(cands[-1])) == -1:
        return len(cands) - 1
    if _sign(eta_of(cands[0])) == 1:
        return 0
    lo, hi = 0, len(cands) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _sign(eta_of(cands[mid])) == -1:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _golden_index_search(n: int, value: Callable[[int], float]) -> int:
    """Minimizer of a unimodal sequence value(0..n-1) by golden-section steps."""
    cache: dict[int, float] = {}

    def v(i):
        if i not in cache:
            cache[i] = value(i)
        return cache[i]

    invphi = (math.sqrt(5) - 1) / 2
    lo, hi = 0, n - 1
    while hi - lo > 8:
        a = hi - int(round(invphi * (hi - lo)))
        b = lo + int(round(invphi * (hi - lo)))
        if a >= b:
            b = a + 1
        if v(a) <= v(b):
            hi = b
        else:
            lo = a
    return min(range(lo, hi + 1), key=lambda i: (v(i), i))


def _outcome_kb(cfg, K, lb) -> OptimizationOutcome:
    return OptimizationOutcome(
        k_star=int(K),
        achieved_ber=math.exp(lb),
        log_ber=float(lb),
        energy=energy_fixed_total(cfg, K),
        gain_vs_ga_db=10 * math.log10(power_gain(cfg, K)),
        feasible=True,
    )


def solve_kb_min_ber(
    cfg: SystemConfig, mod: Modulation, estimator: BerEstimator | None = None
) -> OptimizationOutcome:
    """K minimizing the system BER under the fixed-total-energy constraint.

    For the single-antenna approximate BER this follows the sign rule on
    ``eta``: all-users if eta(Kmax) < 0, one user if eta(Kmin) >= 0, otherwise
    bisection to the sign change and the better of the two neighbours (ties
    go to the smaller K). Other estimators have no closed-form derivative and
    are scanned exhaustively up to ``SCAN_LIMIT`` candidates, golden-section
    searched beyond that.
    """
    estimator = estimator or BerEstimator()
    cands = cfg.candidates
    lb_of = lambda K: float(log_ber_energy_constrained(cfg, mod, estimator, K))

    if estimator.kind is BerKind.APPROXIMATE and estimator.diversity == 1:
        ctx = EtaContext.energy_constrained(cfg, mod)
        found = _bracket_by_eta(cands, lambda K: eta(ctx, K))
        if isinstance(found, int):
            K = cands[found]
            return _outcome_kb(cfg, K, lb_of(K))
        k_lo, k_hi = cands[found[0]], cands[found[1]]
        lb_lo, lb_hi = lb_of(k_lo), lb_of(k_hi)
        if lb_hi < lb_lo:
            return _outcome_kb(cfg, k_hi, lb_hi)
        return _outcome_kb(cfg, k_lo, lb_lo)

    if len(cands) <= SCAN_LIMIT:
        lbs = np.asarray(log_ber_energy_constrained(cfg, mod, estimator, np.array(cands)))
        i = int(np.argmin(lbs))
        return _outcome_kb(cfg, cands[i], float(lbs[i]))
    i = _golden_index_search(len(cands), lambda j: lb_of(cands[j]))
    return _outcome_kb(cfg, cands[i], lb_of(cands[i]))


def _smallest_feasible(cfg, mod, estimator, log_target, snr):
    """Index of the smallest candidate meeting the target, or None."""
    cands = cfg.candidates
    cache: dict[int, float] = {}

    def lb(i):
        if i not in cache:
            cache[i] = float(log_ber_fixed_power(cfg, mod, estimator, cands[i], snr))
        return cache[i]

    if lb(len(cands) - 1) > log_target:
        return None, lb
    # BER decreases in K: bisect for the first index with lb <= target
    idx = bisect.bisect_left(range(len(cands)), True, key=lambda i: lb(i) <= log_target)
    return idx, lb


def _outcome_energy(cfg, K, lb, feasible) -> OptimizationOutcome:
    energy = total_energy_fixed_ber(cfg, K)
    return OptimizationOutcome(
        k_star=int(K),
        achieved_ber=math.exp(lb),
        log_ber=float(lb),
        energy=energy,
        gain_vs_ga_db=10 * math.log10(cfg.total_energy_ga / energy.etotal),
        feasible=feasible,
    )


def _check_target(ber_target):
    if not 0 < ber_target < 0.5:
        raise ValueError("ber_target must lie in (0, 0.5)")
    return math.log(ber_target)


def solve_kdt_min_energy(
    cfg: SystemConfig,
    mod: Modulation,
    estimator: BerEstimator | None,
    ber_target: float,
    snr: float | None = None,
) -> OptimizationOutcome:
    """Smallest K meeting ``ber_target`` at fixed SNR; K* = 0 if none does."""
    estimator = estimator or BerEstimator()
    idx, lb = _smallest_feasible(cfg, mod, estimator, _check_target(ber_target), snr)
    if idx is None:
        return OptimizationOutcome(0, math.nan, math.nan, None, math.nan, False)
    return _outcome_energy(cfg, cfg.candidates[idx], lb(idx), True)


def solve_kds_min_energy(
    cfg: SystemConfig,
    mod: Modulation,
    estimator: BerEstimator | None,
    ber_target: float,
    snr: float | None = None,
) -> OptimizationOutcome:
    """As ``solve_kdt_min_energy`` but transmits with all candidates when infeasible."""
    estimator = estimator or BerEstimator()
    idx, lb = _smallest_feasible(cfg, mod, estimator, _check_target(ber_target), snr)
    if idx is None:
        last = len(cfg.candidates) - 1
        return _outcome_energy(cfg, cfg.candidates[last], lb(last), False)
    return _outcome_energy(cfg, cfg.candidates[idx], lb(idx), True)
