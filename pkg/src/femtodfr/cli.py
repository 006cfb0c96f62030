"""Command line front end: ``run``, ``sweep`` and ``linkbudget``.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import propagation as prop
from .allocation import write_allocations_csv
from .config import ConfigError, load_config, manifest, parse_float_list, parse_int_list
from .scenario import (
    RESULT_COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentConfig,
    ExperimentResult,
    apply_scheme,
    generate_deployment,
    run_experiment,
    trial_seeds,
)

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3
OUTPUT_DIR_ENV = "FEMTODFR_OUTPUT_DIR"
SWEEP_KEYS = ("n_interfering_femtos", "s_th_dbm", "guard_width_hz")


class UsageError(Exception):
    pass


def write_results_csv(path, result: ExperimentResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        w.writerows(result.iter_rows())


def write_summary_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def write_manifest(path, m: dict) -> None:
    Path(path).write_text(json.dumps(m, indent=2, sort_keys=True) + "\n")


def write_first_trial_allocations(out_dir: Path, config: ExperimentConfig) -> None:
    """Allocation tables of trial 0 for every scheme and density."""
    alloc_dir = out_dir / "allocations"
    alloc_dir.mkdir(exist_ok=True)
    plan = config.plan()
    seed = trial_seeds(config.replace(trials=1))[0]
    for n in config.n_interfering_femtos:
        world = generate_deployment(config, np.random.default_rng(seed), n)
        for s in config.schemes:
            write_allocations_csv(alloc_dir / f"{s.value}_n{n}.csv",
                                  apply_scheme(world, s, plan, config), plan)


def _write_run(out_dir: Path, config: ExperimentConfig, result: ExperimentResult) -> list[dict]:
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = result.summary()
    write_results_csv(out_dir / "results.csv", result)
    write_summary_csv(out_dir / "summary.csv", summary)
    write_first_trial_allocations(out_dir, config)
    return summary


def _resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed).validate()
    if getattr(args, "trials", None) is not None:
        config = config.replace(trials=args.trials).validate()
    return config


def _output_dir(args) -> Path:
    return Path(args.output or os.environ.get(OUTPUT_DIR_ENV, "results"))


def cmd_run(args) -> int:
    config = _resolve_config(args)
    out_dir = _output_dir(args)
    result = run_experiment(config)
    _write_run(out_dir, config, result)
    write_manifest(out_dir / "manifest.json", manifest(config, args.config, out_dir))
    print(f"wrote {len(result)} rows to {out_dir / 'results.csv'}")
    return EXIT_OK


def _sweep_values(key: str, text: str):
    if key == "n_interfering_femtos":
        return parse_int_list(text)
    return parse_float_list(text)


def cmd_sweep(args) -> int:
    if args.key not in SWEEP_KEYS:
        raise UsageError(f"sweep key must be one of {SWEEP_KEYS}, got {args.key!r}")
    try:
        values = _sweep_values(args.key, args.values)
    except ValueError as exc:
        raise UsageError(f"bad --values: {exc}") from None
    if not values:
        raise UsageError("no sweep values given")
    config = _resolve_config(args)
    out_dir = _output_dir(args)
    series: dict[tuple, list] = {}
    for v in values:
        change = (v,) if args.key == "n_interfering_femtos" else v
        try:
            cfg = config.replace(**{args.key: change}).validate()
        except ValueError as exc:
            raise ConfigError(f"{args.config}:1: sweep value {v!r}: {exc}") from None
        result = run_experiment(cfg)
        summary = _write_run(out_dir / f"{args.key}={v}", cfg, result)
        for row in summary:
            series.setdefault((row["scheme"], row["user_class"], row["metric"]), []).append(
                (v, row["mean"], row["ci95"]))
    plot_dir = out_dir / "plot"
    plot_dir.mkdir(parents=True, exist_ok=True)
    for (scheme, cls, metric), pts in sorted(series.items()):
        with open(plot_dir / f"{scheme}.{cls}.{metric}.dat", "w") as fh:
            fh.write(f"# {args.key} mean ci95\n")
            for x, mean, ci in sorted(pts):
                fh.write(f"{x!r} {mean!r} {ci!r}\n")
    extra = {"sweep": {"key": args.key, "values": list(values)}}
    write_manifest(out_dir / "manifest.json",
                   manifest(config, args.config, out_dir, "sweep", extra))
    print(f"wrote {len(values)} sweep blocks to {out_dir}")
    return EXIT_OK


def cmd_linkbudget(args) -> int:
    if args.distance_m is None or not args.distance_m > 0:
        raise UsageError("--distance-m must be > 0")
    if args.frequency_mhz <= 0:
        raise UsageError("--frequency-mhz must be > 0")
    if args.tier == "femto":
        for flag in ("bs_height_m", "mobile_height_m", "constant_mode"):
            if getattr(args, flag) is not None:
                raise UsageError(f"--{flag.replace('_', '-')} only applies to --tier macro")
        if args.decay_index is not None and args.decay_index <= 0:
            raise UsageError("--decay-index must be > 0")
        tx = 0.01 if args.tx_power_w is None else args.tx_power_w
        loss = prop.femto_path_loss(prop.FemtoLinkParams(
            args.frequency_mhz, args.distance_m,
            30.0 if args.decay_index is None else args.decay_index))
    else:
        if args.decay_index is not None:
            raise UsageError("--decay-index only applies to --tier femto")
        tx = 1500.0 if args.tx_power_w is None else args.tx_power_w
        try:
            params = prop.MacroLinkParams(
                args.frequency_mhz, 50.0 if args.bs_height_m is None else args.bs_height_m,
                1.5 if args.mobile_height_m is None else args.mobile_height_m,
                args.distance_m / 1000.0, args.shadowing_db)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        loss = prop.hata_path_loss(params, args.constant_mode or prop.PAPER)
    if tx <= 0:
        raise UsageError("--tx-power-w must be > 0")
    p_w = prop.received_power(tx, loss)
    print(f"{'tier':<16}{args.tier}")
    print(f"{'path_loss_db':<16}{loss:.4f}")
    print(f"{'rx_power_dbm':<16}{float(prop.watts_to_dbm(p_w)):.4f}")
    print(f"{'rx_power_w':<16}{p_w:.6e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="femtodfr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="experiment .ini file or a manifest.json from a prior run")
        sp.add_argument("-o", "--output", help=f"output directory (default ${OUTPUT_DIR_ENV} "
                                               "or ./results)")
        sp.add_argument("--seed", type=int, help="override the master seed")
        sp.add_argument("--trials", type=int, help="override the trial count")

    run = sub.add_parser("run", help="run the configured experiment")
    common(run)
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="repeat the experiment over values of one key")
    common(sw)
    sw.add_argument("key", help=f"one of {', '.join(SWEEP_KEYS)}")
    sw.add_argument("values", help="comma list or inclusive range start:stop:step")
    sw.set_defaults(func=cmd_sweep)

    lb = sub.add_parser("linkbudget", help="one-shot path loss and received power")
    lb.add_argument("--tier", choices=("macro", "femto"), required=True)
    lb.add_argument("--distance-m", type=float, required=True)
    lb.add_argument("--frequency-mhz", type=float, default=900.0)
    lb.add_argument("--tx-power-w", type=float)
    lb.add_argument("--bs-height-m", type=float)
    lb.add_argument("--mobile-height-m", type=float)
    lb.add_argument("--constant-mode", choices=prop.CONSTANT_MODES)
    lb.add_argument("--shadowing-db", type=float, default=0.0)
    lb.add_argument("--decay-index", type=float)
    lb.set_defaults(func=cmd_linkbudget)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"femtodfr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"femtodfr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
