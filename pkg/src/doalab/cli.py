"""Command line front end: ``doalab sweep`` and ``doalab demo``.

Exit codes: 0 on success, 1 on configuration errors, 2 on I/O errors.

BLAS thread-count environment variables are pinned to 1 (unless the user
already set them) before numpy loads, so each trial is internally
single-threaded and timing columns are stable; use DOALAB_THREADS to control
trial-level parallelism instead.
"""

from __future__ import annotations

import os

for _var in (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
):
    os.environ.setdefault(_var, "1")

import argparse
import sys
from dataclasses import replace


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as config errors."""

    def error(self, message):
        from doalab.config import ConfigError

        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="doalab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a Monte Carlo sweep and write CSV")
    sweep.add_argument("--config", required=True, help="sweep configuration file")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--seed", type=int, default=None, help="override the base seed")
    sweep.add_argument(
        "--trials", type=int, default=None, help="override the trial count"
    )
    sweep.add_argument(
        "--serial",
        action="store_true",
        help="run trials in-process (clean timing, no worker pool)",
    )
    sweep.add_argument(
        "--evaluator",
        choices=("fft", "direct"),
        default=None,
        help="override the grid evaluator",
    )
    sweep.add_argument(
        "--evd-per-iter",
        action="store_true",
        help="emulate per-iteration eigendecomposition cost in the "
        "iterative-MUSIC methods",
    )

    sub.add_parser("demo", help="pretty-print one trial of every method")
    return parser


def _cmd_sweep(args) -> None:
    from doalab.bench import emit_csv, run_sweep
    from doalab.config import parse_config

    spec = parse_config(args.config)
    if args.seed is not None:
        spec = replace(spec, base=replace(spec.base, seed=args.seed))
    if args.trials is not None:
        spec = replace(spec, trials=args.trials)
    if args.evaluator is not None:
        spec = replace(spec, evaluator=args.evaluator)
    table = run_sweep(spec, serial=args.serial, evd_per_iter=args.evd_per_iter)
    emit_csv(table, args.out)
    print(
        f"wrote {len(table)} rows ({spec.parameter} x {len(spec.methods)} methods, "
        f"{spec.trials} trials each) to {args.out}"
    )


def _cmd_demo() -> None:
    from doalab.bench import run_trial
    from doalab.methods import METHOD_IDS
    from doalab.scenario import ScenarioConfig

    cfg = ScenarioConfig(seed=2024)
    result = run_trial(cfg, 0, METHOD_IDS)
    truth = ", ".join(f"{u:+.4f}" for u in sorted(result.truth.doas))
    print(f"scenario: {cfg.targets} targets, {cfg.antennas} antennas, "
          f"{cfg.subcarriers} subcarriers x {cfg.symbols} symbols, "
          f"{cfg.snr_db:g} dB SNR, seed {cfg.seed}")
    print(f"true angles (sin domain): {truth}")
    print(f"scene diagnostics: steering diagonality {result.t_metric:.3f}, "
          f"signal diagonality {result.s_metric:.3f}")
    print()
    header = f"{'method':<14} {'J':>6} {'hit':>5} {'fa':>5} {'ms':>8}  estimates"
    print(header)
    print("-" * len(header))
    for method in METHOD_IDS:
        out = result.outcomes[method]
        if out.error:
            print(f"{method:<14} failed: {out.error}")
            continue
        est = ", ".join(f"{u:+.4f}" for u in sorted(out.estimates))
        print(
            f"{method:<14} {out.youden_j:>6.3f} {out.hit_rate:>5.2f} "
            f"{out.fa_rate:>5.2f} {1e3 * out.seconds:>8.2f}  {est}"
        )


def main(argv=None) -> int:
    from doalab.config import ConfigError

    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "sweep":
            _cmd_sweep(args)
        else:
            _cmd_demo()
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
