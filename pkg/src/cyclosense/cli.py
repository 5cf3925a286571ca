"""Batch command-line front end.

Experiments are described by a JSON plan file; flags exist only as overrides
(`--set key=value` with dotted keys into the plan document). Every
plan-driven command writes the fully resolved plan.json next to its outputs
for provenance, and rerunning a command with the same plan produces
byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numeric or convergence
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .gev import DegenerateDataError, fit_gev_mle, threshold_for_pf
from .harness import (
    STREAM_EXPORT_NOISE,
    STREAM_EXPORT_SIGNAL,
    ExperimentPlan,
    NOISE_VARIANCE,
    collect_noise_profile,
    derived_seed,
    fit_and_histogram,
    run_roc,
)
from .scd import AlphaProfile, estimate_scd, segment_windows
from .siggen import NoiseSpec, generate_am, generate_awgn, mix_at_snr

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _parse_override(text: str) -> tuple[list[str], object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ValueError(f"override {text!r} is not of the form key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings such as taper names
    return key.split("."), value


def _apply_overrides(plan_dict: dict, overrides: list[str]) -> dict:
    for text in overrides:
        path, value = _parse_override(text)
        node = plan_dict
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                raise ValueError(f"override path {'.'.join(path)!r} does not exist in the plan")
            node = node[part]
        if path[-1] not in node:
            raise ValueError(f"override key {'.'.join(path)!r} does not exist in the plan")
        node[path[-1]] = value
    return plan_dict


def _load_plan(args: argparse.Namespace) -> ExperimentPlan:
    raw = json.loads(Path(args.plan).read_text(encoding="utf-8"))
    raw = _apply_overrides(raw, args.set or [])
    return io.plan_from_dict(raw)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_gen(args: argparse.Namespace) -> int:
    plan = _load_plan(args)
    out = _out_dir(args)
    seed = derived_seed(plan.master_seed, STREAM_EXPORT_SIGNAL)
    buffer = generate_am(plan.signal_spec, seed)
    io.write_signal(out / "signal", buffer, plan.signal_spec, seed)
    io.write_plan_json(out / "plan.json", plan)
    return EXIT_OK


def _cmd_scd(args: argparse.Namespace) -> int:
    plan = _load_plan(args)
    out = _out_dir(args)
    signal = generate_am(plan.signal_spec, derived_seed(plan.master_seed, STREAM_EXPORT_SIGNAL))
    noise = generate_awgn(
        plan.signal_spec.duration_samples,
        NoiseSpec(NOISE_VARIANCE, derived_seed(plan.master_seed, STREAM_EXPORT_NOISE)),
        plan.signal_spec.sample_rate_hz,
    )
    mixed = mix_at_snr(signal, noise, plan.snr_db_list[0])
    window = segment_windows(mixed, plan.scd_cfg.window_length_k)[0]
    matrix = estimate_scd(window, plan.scd_cfg)
    io.write_scd_matrix(out / "scd", matrix, plan.scd_cfg)
    io.write_plan_json(out / "plan.json", plan)
    return EXIT_OK


def _cmd_collect(args: argparse.Namespace) -> int:
    plan = _load_plan(args)
    out = _out_dir(args)
    samples = collect_noise_profile(plan, jobs=args.jobs)
    alpha_hz = plan.alpha0_bin * plan.signal_spec.sample_rate_hz / plan.scd_cfg.window_length_k
    profiles = [
        AlphaProfile(
            alphas_hz=np.array([alpha_hz]),
            alpha_bins=(plan.alpha0_bin,),
            maxima=np.array([value]),
            window_index=index,
        )
        for index, value in enumerate(samples)
    ]
    io.write_profile_csv(out / "profile.csv", profiles)
    io.write_plan_json(out / "plan.json", plan)
    return EXIT_OK


def _cmd_fit(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    samples = io.read_profile_samples(args.samples)
    report = fit_gev_mle(samples)
    histogram = fit_and_histogram(samples, bins=args.bins, fit=report)
    io.write_fit_json(out / "fit.json", report)
    io.write_histogram_csv(out / "histogram.csv", histogram)
    if args.plan is not None:
        io.write_plan_json(out / "plan.json", io.read_plan_json(args.plan))
    if not report.converged:
        print("error: fit did not converge within the iteration budget", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_threshold(args: argparse.Namespace) -> int:
    report = io.read_fit_json(args.fit)
    print(f"{threshold_for_pf(args.pf, report.params):.9g}")
    return EXIT_OK


def _cmd_roc(args: argparse.Namespace) -> int:
    plan = _load_plan(args)
    out = _out_dir(args)
    samples = collect_noise_profile(plan, jobs=args.jobs)
    report = fit_gev_mle(samples)
    if not report.converged:
        print("error: noise-model fit did not converge", file=sys.stderr)
        return EXIT_NUMERIC
    histogram = fit_and_histogram(samples, fit=report)
    curves = run_roc(plan, jobs=args.jobs, noise_fit=report)
    thresholds = [threshold_for_pf(pf, report.params) for pf in plan.pf_grid]
    for theoretical, empirical in curves:
        io.write_roc_csv(
            out / f"roc_{theoretical.snr_db:g}.csv",
            pf_grid=plan.pf_grid,
            thresholds=thresholds,
            pf_empirical=[pf for pf, _ in empirical.points],
            pd_theoretical=[pd for _, pd in theoretical.points],
            pd_empirical=[pd for _, pd in empirical.points],
            trials=plan.signal_windows_m,
        )
    io.write_fit_json(out / "fit.json", report)
    io.write_histogram_csv(out / "histogram.csv", histogram)
    io.write_plan_json(out / "plan.json", plan)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclosense",
        description="Cyclic-domain spectrum sensing experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_plan_command(name: str, help_text: str):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--plan", required=True, help="path to a JSON experiment plan")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override a plan entry, e.g. scd.smoothing_length=301")
        cmd.add_argument("--jobs", type=int, default=1, help="worker process count")
        return cmd

    add_plan_command("gen", "write the AM test signal and its sidecar").set_defaults(func=_cmd_gen)
    add_plan_command("scd", "write the SCD matrix of one mixed window").set_defaults(func=_cmd_scd)
    add_plan_command("collect", "write the noise alpha-profile sample CSV").set_defaults(func=_cmd_collect)
    add_plan_command("roc", "write ROC curves, fit, and histogram").set_defaults(func=_cmd_roc)

    fit = sub.add_parser("fit", help="fit the noise model to collected samples")
    fit.add_argument("--samples", required=True, help="profile CSV from the collect command")
    fit.add_argument("--out", default=".", help="output directory")
    fit.add_argument("--bins", type=int, default=None, help="histogram bin count")
    fit.add_argument("--plan", default=None, help="optional plan to copy alongside outputs")
    fit.set_defaults(func=_cmd_fit)

    thr = sub.add_parser("threshold", help="print the threshold for a preset pf")
    thr.add_argument("--pf", type=float, required=True, help="preset false-alarm probability")
    thr.add_argument("--fit", required=True, help="fit.json from the fit command")
    thr.set_defaults(func=_cmd_threshold)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegenerateDataError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
