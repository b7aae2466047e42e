"""
Scheduling/data energy accounting for K-GA over ``N`` slots.

Each of the ``K`` active users spends ``E_f / N`` per slot reporting its
channel; the scheduled user additionally spends ``lambda_k * T_s`` on data.
With ``alpha = E_d^GA / E_f`` the two budgets trade off as

    K E_f + E_d(K) = Kbar E_f + E_d^GA                  (fixed total energy)
    E_T(K) = (K / alpha + 1) E_d^GA                     (fixed data energy)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SystemConfig",
    "EnergyBreakdown",
    "transmit_power",
    "power_gain",
    "data_energy_of_k",
    "lambda_of_k",
    "lambda_of_k_from_pt",
    "total_energy_fixed_ber",
    "energy_ratio_fixed_ber",
    "energy_fixed_total",
    "per_slot_energy",
    "binomial_access_spread",
    "db_to_linear",
    "linear_to_db",
]


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """Static parameters of a K-GA uplink.

    Attributes
    ----------
    kbar : int
        Total number of users.
    alpha : float
        E_d^GA / E_f, generic-GA data energy over per-user scheduling energy.
    omega : float
        Desired average receive power per unit transmit power.
    lambda_ga : float
        Generic-GA average transmit power E_d^GA / (N T_s).
    c_norm : float, optional
        Kbar * (sum_k sigma_k^-2)^-1 / omega. Defaults to 1, or is derived
        from ``sigma_sq`` when that is given.
    n_slots : int
        Number of slots N the energy budget covers.
    ts : float
        Symbol duration in seconds.
    sigma_sq : tuple of float, optional
        Per-user channel variances; all ones when omitted.
    candidates : tuple of int, optional
        Admissible active-user counts, any subset of 1..kbar. Defaults to
        the full range.
    """

    kbar: int
    alpha: float = 1.0
    omega: float = 1.0
    lambda_ga: float = 1.0
    c_norm: float | None = None
    n_slots: int = 10_000
    ts: float = 1.0
    sigma_sq: tuple[float, ...] | None = None
    candidates: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        if int(self.kbar) != self.kbar or self.kbar < 1:
            raise ValueError("kbar must be a positive integer")
        for name in ("alpha", "omega", "lambda_ga", "ts"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if int(self.n_slots) != self.n_slots or self.n_slots < 1:
            raise ValueError("n_slots must be a positive integer")

        if self.sigma_sq is not None:
            sig = tuple(float(s) for s in self.sigma_sq)
            if len(sig) != self.kbar or any(not s > 0 for s in sig):
                raise ValueError("sigma_sq needs kbar positive entries")
            object.__setattr__(self, "sigma_sq", sig)
            c = self.kbar / sum(1.0 / s for s in sig) / self.omega
            if self.c_norm is not None and abs(self.c_norm - c) > 1e-12 * c:
                raise ValueError(f"c_norm={self.c_norm} inconsistent with sigma_sq (expected {c})")
            object.__setattr__(self, "c_norm", c)
        elif self.c_norm is None:
            object.__setattr__(self, "c_norm", 1.0)
        elif not self.c_norm > 0:
            raise ValueError("c_norm must be positive")

        if self.candidates is None:
            cands = tuple(range(1, self.kbar + 1))
        else:
            cands = tuple(sorted({int(k) for k in self.candidates}))
            if not cands or cands[0] < 1 or cands[-1] > self.kbar:
                raise ValueError("candidate set must be a non-empty subset of 1..kbar")
        object.__setattr__(self, "candidates", cands)

    @classmethod
    def from_snr_db(cls, kbar: int, snr_db: float, **kwargs) -> "SystemConfig":
        """Config whose normalized SNR omega * lambda_ga equals ``snr_db``."""
        omega = kwargs.pop("omega", 1.0)
        return cls(kbar=kbar, omega=omega, lambda_ga=float(db_to_linear(snr_db)) / omega, **kwargs)

    @property
    def snr_ga(self) -> float:
        """Omega_N = omega * lambda_ga."""
        return self.omega * self.lambda_ga

    @property
    def sigma_sq_array(self) -> np.ndarray:
        if self.sigma_sq is None:
            return np.ones(self.kbar)
        return np.asarray(self.sigma_sq)

    @property
    def ed_ga(self) -> float:
        """Generic-GA data energy over the N slots."""
        return self.lambda_ga * self.n_slots * self.ts

    @property
    def ef(self) -> float:
        """Per-user scheduling energy over the N slots."""
        return self.ed_ga / self.alpha

    @property
    def total_energy_ga(self) -> float:
        return (self.kbar / self.alpha + 1.0) * self.ed_ga

    @property
    def total_power_ga(self) -> float:
        """P_T of the generic GA scheme, E_T^GA / (N T_s)."""
        return (self.kbar / self.alpha + 1.0) * self.lambda_ga

    @property
    def slots_per_user(self) -> float:
        return self.n_slots / self.kbar

    @property
    def energy_model_valid(self) -> bool:
        """True when N / Kbar > 100, i.e. access counts concentrate to 10%."""
        return self.slots_per_user > 100


@dataclass(frozen=True)
class EnergyBreakdown:
    K: int
    ef: float
    ed: float
    etotal: float
    pt: float

    def __post_init__(self):
        if min(self.ef, self.ed, self.etotal, self.pt) < 0:
            raise ValueError("energies must be nonnegative")

    @classmethod
    def build(cls, K: int, ef: float, ed: float, n_slots: int, ts: float) -> "EnergyBreakdown":
        etotal = K * ef + ed
        return cls(K=K, ef=ef, ed=ed, etotal=etotal, pt=etotal / (n_slots * ts))

    def to_dict(self) -> dict:
        return {"K": self.K, "ef": self.ef, "ed": self.ed, "etotal": self.etotal, "pt": self.pt}


def _check_K(cfg: SystemConfig, K):
    arr = np.asarray(K, dtype=float)
    if np.any((arr < 1) | (arr > cfg.kbar)):
        raise ValueError(f"K must lie in [1, {cfg.kbar}]")
    return arr


def transmit_power(cfg: SystemConfig, k: int, lam: float) -> float:
    """Power-controlled transmit power of user ``k`` (1-based)."""
    if not 1 <= k <= cfg.kbar:
        raise IndexError(f"user index {k} outside 1..{cfg.kbar}")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return cfg.omega / cfg.sigma_sq_array[k - 1] * lam


def power_gain(cfg: SystemConfig, K):
    """G_p = (Kbar - K) / alpha + 1."""
    kk = _check_K(cfg, K)
    res = (cfg.kbar - kk) / cfg.alpha + 1.0
    return float(res) if res.ndim == 0 else res


def data_energy_of_k(cfg: SystemConfig, K, ed_ga: float | None = None):
    """Data energy left for K active users under the fixed-total constraint."""
    ed_ga = cfg.ed_ga if ed_ga is None else ed_ga
    return power_gain(cfg, K) * ed_ga


def lambda_of_k(cfg: SystemConfig, K):
    """Average transmit power lambda(K) = G_p(K) * c * lambda_ga."""
    return power_gain(cfg, K) * cfg.c_norm * cfg.lambda_ga


def lambda_of_k_from_pt(cfg: SystemConfig, K):
    """Same quantity written as c * (P_T - K lambda_ga / alpha)."""
    kk = _check_K(cfg, K)
    res = cfg.c_norm * (cfg.total_power_ga - kk * cfg.lambda_ga / cfg.alpha)
    return float(res) if res.ndim == 0 else res


def total_energy_fixed_ber(cfg: SystemConfig, K: int, ed_ga: float | None = None) -> EnergyBreakdown:
    """Energy of K-GA when the data energy stays at its generic-GA level."""
    _check_K(cfg, K)
    ed_ga = cfg.ed_ga if ed_ga is None else ed_ga
    return EnergyBreakdown.build(int(K), ed_ga / cfg.alpha, ed_ga, cfg.n_slots, cfg.ts)


def energy_ratio_fixed_ber(cfg: SystemConfig, K):
    """E_T^{K-GA} / E_T^GA = (K/alpha + 1) / (Kbar/alpha + 1)."""
    kk = _check_K(cfg, K)
    res = (kk / cfg.alpha + 1.0) / (cfg.kbar / cfg.alpha + 1.0)
    return float(res) if res.ndim == 0 else res


def energy_fixed_total(cfg: SystemConfig, K: int, ed_ga: float | None = None) -> EnergyBreakdown:
    """Energy of K-GA when the saved scheduling energy goes to data."""
    ed_ga = cfg.ed_ga if ed_ga is None else ed_ga
    return EnergyBreakdown.build(
        int(K), ed_ga / cfg.alpha, data_energy_of_k(cfg, K, ed_ga), cfg.n_slots, cfg.ts
    )


def per_slot_energy(
    cfg: SystemConfig,
    k: int,
    is_scheduled: bool,
    lam: float,
    scheduling_energy: float | None = None,
) -> float:
    """Energy spent by user ``k`` in one slot.

    ``scheduling_energy`` is the per-slot pilot cost E_s = E_f / N; it is the
    same for all users and defaults to the value implied by ``cfg``.
    """
    es = cfg.ef / cfg.n_slots if scheduling_energy is None else scheduling_energy
    if not is_scheduled:
        if not 1 <= k <= cfg.kbar:
            raise IndexError(f"user index {k} outside 1..{cfg.kbar}")
        return es
    return es + transmit_power(cfg, k, lam) * cfg.ts


def binomial_access_spread(n_slots: int, kbar: int) -> tuple[float, float]:
    """Mean and standard deviation of one user's access count over N slots."""
    p = 1.0 / kbar
    return n_slots * p, math.sqrt(n_slots * p * (1 - p))
