"""
Slot-level Monte Carlo of K-GA uplink scheduling.

Every slot draws a uniformly random subset of K active users, Rayleigh
channels h_k ~ CN(0, sigma_k^2), applies average power control
lambda_k = omega * lambda / sigma_k^2, schedules the user with the largest
receive SNR |h_k|^2 lambda_k, and sends Gray-coded QAM symbols at that SNR
through unit-variance AWGN with hard-decision demapping.

Randomness is split into fixed-size chunks of slots, each with its own child
of ``numpy.random.SeedSequence(seed)``. The chunk layout depends only on the
run parameters, so threaded and serial runs give bit-identical reports.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ber import Modulation
from .energy import EnergyBreakdown, SystemConfig

__all__ = [
    "ChannelModel",
    "GrayQamMapper",
    "SimulationReport",
    "generate_channels",
    "schedule_slot",
    "run_monte_carlo",
    "predicted_energy",
    "simulate_awgn_ber",
    "sample_scheduled_snr",
]

_CHUNK_BITS = 1 << 18


@dataclass(frozen=True)
class ChannelModel:
    """Log-normal shadowing of per-user channel variances.

    With ``domain='db'`` the shadowing gain in dB is Normal(mean, std^2);
    with ``domain='linear'`` the variance itself is log-normal with the given
    linear mean and standard deviation. ``per_user_variance`` bypasses both.
    """

    shadow_mean_db: float = 1.0
    shadow_std_db: float = 5.0
    pathloss_db: float = 0.0
    per_user_variance: tuple[float, ...] | None = None
    domain: str = "db"

    def __post_init__(self):
        if self.shadow_std_db < 0:
            raise ValueError("shadowing standard deviation must be nonnegative")
        if self.domain not in ("db", "linear"):
            raise ValueError("domain must be 'db' or 'linear'")


def generate_channels(model: ChannelModel, kbar: int, seed: int | None = 0) -> np.ndarray:
    """Per-user channel variances sigma_k^2, deterministic given ``seed``."""
    if kbar < 1:
        raise ValueError("kbar must be >= 1")
    if model.per_user_variance is not None:
        sig = np.asarray(model.per_user_variance, dtype=float)
        if sig.shape != (kbar,):
            raise ValueError("per_user_variance must have kbar entries")
        return sig.copy()
    rng = np.random.default_rng(seed)
    loss = 10.0 ** (-model.pathloss_db / 10.0)
    if model.domain == "db":
        gains_db = rng.normal(model.shadow_mean_db, model.shadow_std_db, kbar)
        return 10.0 ** (gains_db / 10.0) * loss
    mean, std = model.shadow_mean_db, model.shadow_std_db
    if mean <= 0:
        raise ValueError("linear-domain shadowing needs a positive mean")
    s2 = math.log1p((std / mean) ** 2)
    return rng.lognormal(math.log(mean) - s2 / 2, math.sqrt(s2), kbar) * loss


class GrayQamMapper:
    """Square M-QAM with independent binary-reflected Gray labels per axis.

    A symbol carries log2(M) bits; the first half select the in-phase level
    and the second half the quadrature level. Average symbol energy is 1.
    """

    def __init__(self, M: int):
        side = math.isqrt(M)
        if side * side != M or side < 2 or side & (side - 1):
            raise ValueError(f"M={M} is not a square QAM size")
        self.M = M
        self.side = side
        self.axis_bits = side.bit_length() - 1
        self.bit_width = 2 * self.axis_bits
        self.scale = math.sqrt(3.0 / (2.0 * (M - 1)))
        idx = np.arange(side)
        self.gray = idx ^ (idx >> 1)
        self.gray_inverse = np.argsort(self.gray)
        self._weights = 1 << np.arange(self.axis_bits - 1, -1, -1)

    def _axis_levels(self, bits):
        label = bits @ self._weights
        idx = self.gray_inverse[label]
        return (2 * idx - (self.side - 1)) * self.scale

    def _axis_bits(self, x):
        idx = np.clip(np.rint((x / self.scale + self.side - 1) / 2), 0, self.side - 1).astype(np.int64)
        label = self.gray[idx]
        return (label[..., None] >> np.arange(self.axis_bits - 1, -1, -1)) & 1

    def modulate(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        m = self.axis_bits
        return self._axis_levels(bits[..., :m]) + 1j * self._axis_levels(bits[..., m:])

    def demodulate(self, symbols: np.ndarray) -> np.ndarray:
        symbols = np.asarray(symbols)
        return np.concatenate([self._axis_bits(symbols.real), self._axis_bits(symbols.imag)], axis=-1)

    @property
    def constellation(self) -> np.ndarray:
        labels = np.arange(self.M)
        bits = (labels[:, None] >> np.arange(self.bit_width - 1, -1, -1)) & 1
        return self.modulate(bits)


@dataclass
class SimulationReport:
    empirical_ber: float
    std_err: float
    access_counts: np.ndarray
    energy: EnergyBreakdown
    slots: int
    seed: int
    bit_errors: int = 0
    total_bits: int = 0
    scheduled_snr: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "empirical_ber": self.empirical_ber,
            "std_err": self.std_err,
            "access_counts": [int(c) for c in self.access_counts],
            "energy": self.energy.to_dict(),
            "slots": self.slots,
            "seed": self.seed,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def schedule_slot(active, channel_draws, omega: float) -> int:
    """Index of the active user with the largest rho_k = |h_k|^2 omega.

    ``channel_draws`` are the power-controlled (unit-variance) gains of the
    users listed in ``active``; ties go to the lowest user index.
    """
    active = np.asarray(active)
    if active.size < 1:
        raise ValueError("need at least one active user")
    rho = np.abs(np.asarray(channel_draws)) ** 2 * omega
    order = np.lexsort((active, -rho))
    return int(active[order[0]])


def _draw_active(rng, n: int, kbar: int, K: int) -> np.ndarray:
    if K == kbar:
        return np.broadcast_to(np.arange(kbar), (n, kbar)).copy()
    keys = rng.random((n, kbar))
    return np.sort(np.argpartition(keys, K - 1, axis=1)[:, :K], axis=1)


def _cn(rng, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)


def _run_chunk(args):
    seed_seq, n, kbar, K, sigma_sq, lam_scale, spslot, mapper, keep = args
    rng = np.random.default_rng(seed_seq)
    rows = np.arange(n)
    active = _draw_active(rng, n, kbar, K)
    sig = sigma_sq[active]
    h = _cn(rng, (n, K)) * np.sqrt(sig)
    lam_k = lam_scale / sig
    rho = np.abs(h) ** 2 * lam_k
    j = np.argmax(rho, axis=1)
    sched = active[rows, j]
    rho_s = rho[rows, j]

    bits = rng.integers(0, 2, size=(n, spslot, mapper.bit_width))
    amp = np.sqrt(rho_s)[:, None]
    rx = amp * mapper.modulate(bits) + _cn(rng, (n, spslot))
    errors = int(np.count_nonzero(mapper.demodulate(rx / amp) != bits))
    return (
        errors,
        np.bincount(sched, minlength=kbar),
        float(lam_k[rows, j].sum()),
        rho_s if keep else None,
    )


def run_monte_carlo(
    cfg: SystemConfig,
    mod: Modulation,
    model: ChannelModel | None,
    K: int,
    lam: float,
    slots: int,
    symbols_per_slot: int = 100,
    seed: int = 0,
    workers: int = 1,
    keep_snr: bool = False,
) -> SimulationReport:
    """Simulate ``slots`` K-GA slots at pre-control transmit power ``lam``.

    Channel variances come from ``cfg.sigma_sq`` when set, otherwise from
    ``model`` (all ones if ``model`` is None). The standard error is the
    binomial one over all transmitted bits, which treats bits as independent;
    with many symbols per slot it understates the spread caused by the shared
    per-slot fading.
    """
    if not 1 <= K <= cfg.kbar:
        raise ValueError(f"K must lie in [1, {cfg.kbar}]")
    if slots < 1 or symbols_per_slot < 1:
        raise ValueError("slots and symbols_per_slot must be >= 1")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    seed = int(seed) & (2**64 - 1)
    if cfg.sigma_sq is not None:
        sigma_sq = cfg.sigma_sq_array
    elif model is not None:
        sigma_sq = generate_channels(model, cfg.kbar, seed)
    else:
        sigma_sq = np.ones(cfg.kbar)

    mapper = GrayQamMapper(mod.M)
    chunk = max(1, min(slots, _CHUNK_BITS // max(symbols_per_slot * mapper.bit_width, cfg.kbar)))
    sizes = [chunk] * (slots // chunk) + ([slots % chunk] if slots % chunk else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [
        (ss, n, cfg.kbar, K, sigma_sq, cfg.omega * lam, symbols_per_slot, mapper, keep_snr)
        for ss, n in zip(children, sizes)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]

    errors = sum(r[0] for r in results)
    counts = np.sum([r[1] for r in results], axis=0)
    data_power = sum(r[2] for r in results)
    total_bits = slots * symbols_per_slot * mapper.bit_width
    p = errors / total_bits
    es = cfg.ef / cfg.n_slots
    energy = EnergyBreakdown.build(K, es * slots, data_power * cfg.ts, slots, cfg.ts)
    return SimulationReport(
        empirical_ber=p,
        std_err=math.sqrt(p * (1 - p) / total_bits),
        access_counts=counts,
        energy=energy,
        slots=slots,
        seed=seed,
        bit_errors=errors,
        total_bits=total_bits,
        scheduled_snr=np.concatenate([r[3] for r in results]) if keep_snr else None,
    )


def predicted_energy(cfg: SystemConfig, sigma_sq, K: int, lam: float, slots: int) -> float:
    """N-slot total energy N (sum_k lambda_k T_s) / Kbar + K E_f for N = ``slots``."""
    lam_k = cfg.omega * lam / np.asarray(sigma_sq, dtype=float)
    es = cfg.ef / cfg.n_slots
    return slots * lam_k.mean() * cfg.ts + K * es * slots


def simulate_awgn_ber(mod: Modulation, rho: float, n_symbols: int, seed: int = 0) -> tuple[float, float]:
    """Empirical Gray-QAM BER over AWGN alone; returns (ber, standard error)."""
    mapper = GrayQamMapper(mod.M)
    rng = np.random.default_rng(seed)
    errors = 0
    done = 0
    step = max(1, _CHUNK_BITS // mapper.bit_width)
    while done < n_symbols:
        n = min(step, n_symbols - done)
        bits = rng.integers(0, 2, size=(n, mapper.bit_width))
        amp = math.sqrt(rho)
        rx = amp * mapper.modulate(bits) + _cn(rng, n)
        errors += int(np.count_nonzero(mapper.demodulate(rx / amp) != bits))
        done += n
    total = n_symbols * mapper.bit_width
    p = errors / total
    return p, math.sqrt(p * (1 - p) / total)


def sample_scheduled_snr(K: int, omega: float, n: int, seed: int = 0, D: int = 1) -> np.ndarray:
    """Draws of max over K users of omega * Gamma(D, 1) (exponential for D = 1)."""
    rng = np.random.default_rng(seed)
    return omega * rng.gamma(D, 1.0, size=(n, K)).max(axis=1)
