"""
Parameter sweeps over the closed forms, returned as flat tables.

Each preset is a function returning a list of row dicts; ``run_experiment``
dispatches on an ``ExperimentSpec`` and writes CSV or JSON. SNR and power
arguments are in dB here and converted once.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ber import (
    BerEstimator,
    BerKind,
    Modulation,
    exact_ber,
    log_approx_ber,
    log_multi_antenna_approx_ber,
    ub_ber,
    approx_ber,
)
from .energy import SystemConfig, db_to_linear, energy_ratio_fixed_ber, linear_to_db
from .optimize import (
    EtaContext,
    eta,
    log_ber_energy_constrained,
    solve_kb_min_ber,
    solve_kdt_min_energy,
    solve_kds_min_energy,
)
from .sim import ChannelModel, generate_channels

__all__ = [
    "PRESETS",
    "ExperimentSpec",
    "SpecError",
    "run_experiment",
    "write_table",
    "format_table",
    "ber_curves",
    "eta_curve",
    "opt_k_vs_pt",
    "ber_vs_pt",
    "dt_ds_sweep",
    "multi_antenna_sweep",
    "crossing_db",
    "power_gain_at_ber",
    "crossover_pt_db",
    "kbar_grid",
]


class SpecError(ValueError):
    """Invalid experiment specification; the message names the field."""


def kbar_grid(lo: int = 1, hi: int = 2000, n: int = 80) -> list[int]:
    return sorted({int(round(k)) for k in np.geomspace(lo, hi, n)})


def ber_curves(k_values=(1, 10, 50), m=4, snr_db=tuple(range(0, 31)), ub_convention="pi"):
    """BER of exact, upper-bound and approximate forms versus Omega (K = Kbar)."""
    mod = Modulation.qam(m)
    rows = []
    for k in k_values:
        for s in snr_db:
            om = float(db_to_linear(s))
            rows.append({
                "snr_db": s, "k": k,
                "ber_exact": exact_ber(mod, k, om),
                "ber_ub": ub_ber(mod, k, om, ub_convention),
                "ber_approx": approx_ber(mod, k, om),
            })
    return rows


def eta_curve(kbar=100, m=4, alpha=1.0, snr_db=4.0):
    """eta(K) on 1..Kbar under the total-energy constraint."""
    mod = Modulation.qam(m)
    cfg = SystemConfig.from_snr_db(kbar, snr_db, alpha=alpha)
    ks = np.arange(1, kbar + 1)
    et = eta(EtaContext.energy_constrained(cfg, mod), ks)
    lb = log_ber_energy_constrained(cfg, mod, BerEstimator(), ks)
    return [
        {"k": int(k), "eta": float(e), "log10_ber_approx": float(b / math.log(10))}
        for k, e, b in zip(ks, et, lb)
    ]


def _pt_db(cfg: SystemConfig) -> float:
    return float(linear_to_db(cfg.total_power_ga))


def opt_k_vs_pt(alphas=(2.0,), snr_db=(5.0, 10.0), kbars=None, m=4, estimator="approx"):
    """Optimal K versus total power P_T; P_T grows through Kbar or Omega_N.

    One of ``kbars`` and ``snr_db`` is swept for each value of the other.
    """
    mod = Modulation.qam(m)
    est = BerEstimator(BerKind(estimator))
    kbars = kbar_grid() if kbars is None else kbars
    rows = []
    for a in alphas:
        for s in snr_db:
            for kb in kbars:
                cfg = SystemConfig.from_snr_db(int(kb), float(s), alpha=a)
                out = solve_kb_min_ber(cfg, mod, est)
                rows.append({
                    "alpha": a, "snr_db": s, "kbar": int(kb), "pt_db": _pt_db(cfg),
                    "k_star": out.k_star, "log10_ber": out.log_ber / math.log(10),
                })
    return rows


def ber_vs_pt(alphas=(2.0,), snr_db=(5.0,), kbars=None, ms=(4, 64)):
    """BER at the optimal K and with all users active (generic GA) versus P_T."""
    kbars = kbar_grid() if kbars is None else kbars
    rows = []
    for m in ms:
        mod = Modulation.qam(m)
        for a in alphas:
            for s in snr_db:
                for kb in kbars:
                    cfg = SystemConfig.from_snr_db(int(kb), float(s), alpha=a)
                    out = solve_kb_min_ber(cfg, mod)
                    lb_ga = float(log_approx_ber(mod, cfg.kbar, cfg.snr_ga * cfg.c_norm))
                    rows.append({
                        "alpha": a, "m": m, "snr_db": s, "kbar": int(kb), "pt_db": _pt_db(cfg),
                        "k_star": out.k_star,
                        "log10_ber_opt": out.log_ber / math.log(10),
                        "log10_ber_ga": lb_ga / math.log(10),
                    })
    return rows


def dt_ds_sweep(
    kbar=100, alpha=1.0, ber_target=1e-3, lambda_db=tuple(range(0, 21)), m=4,
    draws=2000, shadow_mean_db=1.0, shadow_std_db=5.0, seed=0, estimator="approx",
):
    """Delay-tolerant and delay-sensitive K averaged over channel-mean draws.

    Each draw gives a channel mean omega; the SNR is omega * lambda. DT
    averages run over draws where the target is reachable (the rest defer),
    DS averages over all draws. Powers are normalized by generic GA.
    """
    mod = Modulation.qam(m)
    est = BerEstimator(BerKind(estimator))
    omegas = generate_channels(ChannelModel(shadow_mean_db, shadow_std_db), draws, seed)
    rows = []
    for ldb in lambda_db:
        lam = float(db_to_linear(ldb))
        k_dt, ber_dt, pt_dt, k_ds, ber_ds, pt_ds, ber_ga = [], [], [], [], [], [], []
        for w in omegas:
            cfg = SystemConfig(kbar=kbar, alpha=alpha, omega=float(w), lambda_ga=lam)
            dt = solve_kdt_min_energy(cfg, mod, est, ber_target)
            ds = solve_kds_min_energy(cfg, mod, est, ber_target)
            if dt.feasible:
                k_dt.append(dt.k_star)
                ber_dt.append(dt.achieved_ber)
                pt_dt.append(energy_ratio_fixed_ber(cfg, dt.k_star))
            k_ds.append(ds.k_star)
            ber_ds.append(ds.achieved_ber)
            pt_ds.append(energy_ratio_fixed_ber(cfg, ds.k_star))
            ber_ga.append(math.exp(float(log_approx_ber(mod, kbar, cfg.snr_ga))))
        mean = lambda v: float(np.mean(v)) if v else math.nan
        rows.append({
            "lambda_db": ldb,
            "k_dt": mean(k_dt), "k_ds": mean(k_ds),
            "avg_ber_dt": mean(ber_dt), "avg_ber_ds": mean(ber_ds),
            "norm_pt_dt": mean(pt_dt), "norm_pt_ds": mean(pt_ds),
            "outage_dt": 1.0 - len(k_dt) / len(omegas),
            "avg_ber_ga": mean(ber_ga),
        })
    return rows


def multi_antenna_sweep(kbar=5, snr_db=5.0, alpha=1.0, m=4, d_values=(1, 2, 3, 4, 5, 6)):
    """Optimal K and its BER versus diversity order D, against generic GA."""
    mod = Modulation.qam(m)
    cfg = SystemConfig.from_snr_db(kbar, snr_db, alpha=alpha)
    rows = []
    for d in d_values:
        out = solve_kb_min_ber(cfg, mod, BerEstimator(BerKind.APPROXIMATE, diversity=int(d)))
        lb_ga = log_multi_antenna_approx_ber(mod, kbar, cfg.snr_ga * cfg.c_norm, int(d))
        rows.append({
            "d": int(d), "k_star": out.k_star,
            "ber_opt": out.achieved_ber, "ber_ga": math.exp(lb_ga),
        })
    return rows


def crossing_db(x_db, log_ber, target: float) -> float:
    """First x where a decreasing log10-BER curve drops to ``target``, interpolated linearly."""
    x = np.asarray(x_db, dtype=float)
    y = np.asarray(log_ber, dtype=float)
    lt = math.log10(target)
    below = np.nonzero(y <= lt)[0]
    if below.size == 0 or below[0] == 0:
        return math.nan
    i = below[0]
    return float(x[i - 1] + (lt - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]))


def power_gain_at_ber(pt_db, log_ber_opt, log_ber_ga, target: float) -> float:
    """Horizontal distance in dB between the generic-GA and optimal-K BER curves."""
    return crossing_db(pt_db, log_ber_ga, target) - crossing_db(pt_db, log_ber_opt, target)


def crossover_pt_db(pt_db, k_star, kbar) -> float:
    """Smallest P_T at which the optimal K falls below Kbar (NaN if never)."""
    below = [p for p, k, kb in zip(pt_db, k_star, np.broadcast_to(kbar, np.shape(pt_db))) if k < kb]
    return float(min(below)) if below else math.nan


@dataclass
class ExperimentSpec:
    name: str
    preset: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    seed: int = 0
    fmt: str = "csv"


def _opt_k_kbar_sweep(**kw):
    kw.setdefault("alphas", (2.0,))
    kw.setdefault("snr_db", (5.0, 10.0))
    return opt_k_vs_pt(**kw)


def _opt_k_snr_sweep(**kw):
    kw.setdefault("alphas", (7.8125, 31.25))
    kw.setdefault("kbars", (50,))
    kw.setdefault("snr_db", tuple(float(s) for s in np.arange(0.0, 40.5, 0.5)))
    return opt_k_vs_pt(**kw)


def _ber_kbar_sweep(**kw):
    kw.setdefault("alphas", (2.0,))
    kw.setdefault("snr_db", (5.0,))
    kw.setdefault("ms", (4, 64))
    return ber_vs_pt(**kw)


def _ber_snr_sweep(**kw):
    kw.setdefault("alphas", (7.8125, 31.25))
    kw.setdefault("kbars", (50,))
    kw.setdefault("ms", (4,))
    kw.setdefault("snr_db", tuple(float(s) for s in np.arange(0.0, 40.5, 0.5)))
    return ber_vs_pt(**kw)


def _custom(function: str, **kw):
    """Any base sweep by name with caller-supplied parameters."""
    base = {
        "ber_curves": ber_curves, "eta_curve": eta_curve, "opt_k_vs_pt": opt_k_vs_pt,
        "ber_vs_pt": ber_vs_pt, "dt_ds_sweep": dt_ds_sweep, "multi_antenna_sweep": multi_antenna_sweep,
    }
    if function not in base:
        raise SpecError(f"function: unknown sweep {function!r}; choose from {sorted(base)}")
    return base[function](**kw)


# each callable's defaults are the reference operating point of its preset
PRESETS = {
    "BerCurves": ber_curves,
    "EtaCurve": eta_curve,
    "OptKvsPt": _opt_k_kbar_sweep,
    "OptKvsPtExample2": _opt_k_snr_sweep,
    "BerVsPt": _ber_kbar_sweep,
    "BerVsPtExample2": _ber_snr_sweep,
    "DtDsSweep": dt_ds_sweep,
    "MultiAntenna": multi_antenna_sweep,
    "Custom": _custom,
}


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    """Evaluate a preset over its grid and write the table if ``spec.out`` is set."""
    if spec.preset not in PRESETS:
        raise SpecError(f"preset: unknown preset {spec.preset!r}; choose from {sorted(PRESETS)}")
    if spec.fmt not in ("csv", "json"):
        raise SpecError(f"format: expected 'csv' or 'json', got {spec.fmt!r}")
    params = dict(spec.params)
    for key, val in params.items():
        if isinstance(val, (list, tuple)) and len(val) == 0:
            raise SpecError(f"{key}: parameter grid is empty")
    if spec.preset == "DtDsSweep" or params.get("function") == "dt_ds_sweep":
        params.setdefault("seed", spec.seed)
    try:
        rows = PRESETS[spec.preset](**params)
    except TypeError as exc:
        raise SpecError(f"params: {exc}") from exc
    if spec.out is not None:
        write_table(rows, spec.out, spec.fmt)
    return rows


def _plain(v):
    return v.item() if isinstance(v, np.generic) else v


def _fmt(v):
    v = _plain(v)
    return repr(v) if isinstance(v, float) else str(v)


def write_table(rows: list[dict], path, fmt: str = "csv") -> None:
    text = format_table(rows, fmt)
    Path(path).write_text(text)


def format_table(rows: list[dict], fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([{k: _plain(v) for k, v in r.items()} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for r in rows:
            writer.writerow([_fmt(r[h]) for h in header])
    return buf.getvalue()
