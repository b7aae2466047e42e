"""
Command line front end: ``mudiv <subcommand> [options]``.

Numeric options take a single value, a comma list ``1,10,50`` or an
inclusive range ``lo:hi:step``. SNR and power values are in dB.
A ``--config`` file holds ``key = value`` lines with the same names as the
long options (dashes or underscores); options given on the command line win.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .ber import BerEstimator, BerKind, Modulation
from .energy import SystemConfig
from .experiments import ExperimentSpec, SpecError, format_table, run_experiment
from .optimize import solve_kb_min_ber, solve_kdt_min_energy, solve_kds_min_energy
from .validate import run_report

SWEEP_PRESETS = ("OptKvsPt", "OptKvsPtExample2", "BerVsPt", "BerVsPtExample2")
OVERRIDES = ("kbar", "alpha", "m", "snr_db", "ber_target", "estimator", "d", "seed", "out", "format", "preset")


def parse_values(text: str) -> list[float]:
    text = str(text).strip()
    if ":" in text:
        lo, hi, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError(f"range step must be positive: {text}")
        n = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + i * step, 12) for i in range(n)]
    return [float(t) for t in text.split(",") if t.strip()]


def read_config(path: str) -> dict[str, str]:
    conf = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SpecError(f"{path}:{n}: expected 'key = value'")
            key, val = (t.strip() for t in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OVERRIDES:
                raise SpecError(f"{path}:{n}: unknown key {key!r}")
            conf[key] = val
    return conf


def _merged(args) -> dict:
    opts = read_config(args.config) if args.config else {}
    for key in OVERRIDES:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


def _ints(v):
    return [int(x) for x in parse_values(v)]


def _one(v, cast=float):
    vals = parse_values(v)
    if len(vals) != 1:
        raise SpecError(f"expected a single value, got {v!r}")
    return cast(vals[0])


def _params(preset: str, o: dict) -> dict:
    p = {}
    has = o.__contains__
    if preset == "BerCurves":
        if has("kbar"): p["k_values"] = _ints(o["kbar"])
        if has("m"): p["m"] = _one(o["m"], int)
        if has("snr_db"): p["snr_db"] = parse_values(o["snr_db"])
    elif preset == "EtaCurve":
        if has("kbar"): p["kbar"] = _one(o["kbar"], int)
        if has("m"): p["m"] = _one(o["m"], int)
        if has("alpha"): p["alpha"] = _one(o["alpha"])
        if has("snr_db"): p["snr_db"] = _one(o["snr_db"])
    elif preset in SWEEP_PRESETS:
        if has("kbar"): p["kbars"] = _ints(o["kbar"])
        if has("alpha"): p["alphas"] = parse_values(o["alpha"])
        if has("snr_db"): p["snr_db"] = parse_values(o["snr_db"])
        if preset.startswith("OptKvsPt"):
            if has("m"): p["m"] = _one(o["m"], int)
            if has("estimator"): p["estimator"] = o["estimator"]
        elif has("m"):
            p["ms"] = _ints(o["m"])
    elif preset == "DtDsSweep":
        if has("kbar"): p["kbar"] = _one(o["kbar"], int)
        if has("alpha"): p["alpha"] = _one(o["alpha"])
        if has("m"): p["m"] = _one(o["m"], int)
        if has("ber_target"): p["ber_target"] = _one(o["ber_target"])
        if has("snr_db"): p["lambda_db"] = parse_values(o["snr_db"])
        if has("estimator"): p["estimator"] = o["estimator"]
    elif preset == "MultiAntenna":
        if has("kbar"): p["kbar"] = _one(o["kbar"], int)
        if has("alpha"): p["alpha"] = _one(o["alpha"])
        if has("m"): p["m"] = _one(o["m"], int)
        if has("snr_db"): p["snr_db"] = _one(o["snr_db"])
        if has("d"): p["d_values"] = _ints(o["d"])
    return p


def _run_preset(default: str, args) -> int:
    o = _merged(args)
    preset = o.get("preset", default)
    if default in SWEEP_PRESETS and preset not in SWEEP_PRESETS:
        raise SpecError(f"preset: sweep-pt accepts {SWEEP_PRESETS}, got {preset!r}")
    if default not in SWEEP_PRESETS and preset != default:
        raise SpecError(f"preset: this subcommand runs {default!r}, got {preset!r}")
    fmt = o.get("format", "csv")
    spec = ExperimentSpec(
        name=preset, preset=preset, params=_params(preset, o),
        out=o.get("out"), seed=int(o.get("seed", 0)), fmt=fmt,
    )
    rows = run_experiment(spec)
    if spec.out is None:
        sys.stdout.write(format_table(rows, fmt))
    return 0


def _optimize(args) -> int:
    o = _merged(args)
    kbar = _one(o.get("kbar", "100"), int)
    cfg = SystemConfig.from_snr_db(kbar, _one(o.get("snr_db", "4")), alpha=_one(o.get("alpha", "1")))
    mod = Modulation.qam(_one(o.get("m", "4"), int))
    est = BerEstimator(BerKind(o.get("estimator", "approx")), diversity=_one(o.get("d", "1"), int))
    result = {"kbar": kbar, "kb": solve_kb_min_ber(cfg, mod, est).to_dict()}
    if "ber_target" in o:
        t = _one(o["ber_target"])
        result["kdt"] = solve_kdt_min_energy(cfg, mod, est, t).to_dict()
        result["kds"] = solve_kds_min_energy(cfg, mod, est, t).to_dict()
    text = json.dumps(result, indent=1) + "\n"
    if "out" in o:
        with open(o["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _validate(args) -> int:
    ok = run_report(args.level, seed=args.seed or 0, approx_scale=args.perturb_approx)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line options override it")
    common.add_argument("--preset")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--kbar")
    common.add_argument("--alpha")
    common.add_argument("--m")
    common.add_argument("--snr-db", dest="snr_db", help="SNR in dB (lambda in dB for dt-ds)")
    common.add_argument("--ber-target", dest="ber_target")
    common.add_argument("--estimator", choices=("exact", "ub", "approx"))
    common.add_argument("--d", help="receive antennas (diversity order)")

    parser = argparse.ArgumentParser(prog="mudiv", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, preset, text in (
        ("ber-curve", "BerCurves", "exact, upper-bound and approximate BER versus SNR"),
        ("eta", "EtaCurve", "eta(K) and BER(K) under the total-energy constraint"),
        ("sweep-pt", "OptKvsPt", "optimal K or BER versus total power"),
        ("dt-ds", "DtDsSweep", "delay-tolerant / delay-sensitive energy minimization"),
        ("multi-antenna", "MultiAntenna", "optimal K versus receive diversity"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.set_defaults(func=lambda a, _p=preset: _run_preset(_p, a))
    p = sub.add_parser("optimize-k", parents=[common], help="solve for K* at one operating point")
    p.set_defaults(func=_optimize)
    p = sub.add_parser("validate", help="run the oracle suite; nonzero exit on failure")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb-approx", dest="perturb_approx", type=float, default=1.0,
                   help="scale applied to the approximate BER (negative control)")
    p.set_defaults(func=_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
