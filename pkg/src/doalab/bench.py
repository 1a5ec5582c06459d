"""Seeded Monte Carlo benchmark harness with CSV output.

A sweep runs a grid of (sweep value x trial) scenarios.  Within a trial
every method sees the identical observation and — when their order criteria
match — the identical estimated target count, so metric differences are
attributable to the estimators alone.  Only the estimate call itself is
timed; synthesis, order selection, and scoring stay outside the clock.

Per-trial randomness comes from independent streams derived from the base
seed and the trial index, so metric columns are bit-reproducible for a given
spec and adding trials never perturbs earlier ones.
"""

from __future__ import annotations

import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from multiprocessing import get_context
from time import perf_counter

import numpy as np

from doalab.fastgrid import make_grid
from doalab.linalg import covariance_sqrt, hermitian_evd
from doalab.methods import METHOD_IDS, estimate_method
from doalab.metrics import (
    associate,
    detection_metrics,
    diagnostics,
    rmse_common_hits,
)
from doalab.order import aic_rank, hybrid_order
from doalab.scenario import GroundTruth, ScenarioConfig, draw_targets, synthesize_observation, trial_rng
from doalab.subspace import sample_covariance

SWEEP_PARAMETERS = ("snr_db", "targets", "subcarriers", "antennas")
ORDER_CRITERIA = ("true-k", "rank-aic", "hybrid")
EVALUATORS = ("fft", "direct")

# CSV column order; one row per (sweep value, method).
RESULT_FIELDS = (
    "sweep_param",
    "sweep_value",
    "method",
    "criterion",
    "evaluator",
    "trials",
    "youden_j",
    "hit_rate",
    "fa_rate",
    "rmse",
    "rmse_coverage",
    "mean_time_ms",
    "t_metric",
    "s_metric",
    "mean_k_hat",
    "seed",
)

# Fraction of per-method trial failures at one sweep point that triggers a
# sweep warning.
FAILURE_WARN_FRACTION = 0.05


@dataclass(frozen=True)
class SweepSpec:
    """One benchmark campaign.

    Attributes:
        parameter: Scenario field being swept.
        values: Values the parameter takes.
        methods: Method ids to compare.
        base: Scenario configuration the sweep perturbs.
        trials: Monte Carlo trials per sweep value.
        order_criterion: How each method obtains its target count: a single
            token applied to all methods, or one token per method.
            "true-k" uses the configured count (order selection off),
            "rank-aic" the eigenvalue criterion, "hybrid" the greedy
            extension of it.
        evaluator: Grid evaluator for every method.
    """

    parameter: str
    values: tuple
    methods: tuple
    base: ScenarioConfig
    trials: int = 500
    order_criterion: str | tuple = "true-k"
    evaluator: str = "fft"

    @property
    def criteria(self) -> tuple:
        """Per-method order criterion, aligned with ``methods``."""
        oc = self.order_criterion
        if isinstance(oc, str):
            return (oc,) * len(self.methods)
        return tuple(oc)

    def validate(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter: {self.parameter!r}")
        if not self.values:
            raise ValueError("values must be non-empty")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("method ids must be unique")
        for m in self.methods:
            if m not in METHOD_IDS:
                raise ValueError(f"unknown method id: {m!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        crits = self.criteria
        if len(crits) != len(self.methods):
            raise ValueError("order_criterion must be one token or one per method")
        for c in crits:
            if c not in ORDER_CRITERIA:
                raise ValueError(f"unknown order criterion: {c!r}")
        if self.evaluator not in EVALUATORS:
            raise ValueError(f"unknown evaluator: {self.evaluator!r}")
        self.base.validate()


@dataclass(frozen=True)
class MethodOutcome:
    """One method's result on one trial."""

    method: str
    k_hat: int
    seconds: float
    estimates: np.ndarray
    hit_rate: float
    fa_rate: float
    youden_j: float
    rmse: float | None
    error: str | None = None


@dataclass(frozen=True)
class TrialResult:
    """All per-method outcomes and scene diagnostics for one trial."""

    trial_index: int
    truth: GroundTruth
    outcomes: dict
    t_metric: float
    s_metric: float


@dataclass(frozen=True)
class ResultRow:
    """Aggregated metrics for one (sweep value, method) cell."""

    sweep_param: str
    sweep_value: float
    method: str
    criterion: str
    evaluator: str
    trials: int
    youden_j: float
    hit_rate: float
    fa_rate: float
    rmse: float
    rmse_coverage: float
    mean_time_ms: float
    t_metric: float
    s_metric: float
    mean_k_hat: float
    seed: int


class ResultTable(list):
    """List of ResultRow plus any sweep-level warnings."""

    def __init__(self, rows=(), warnings=()):
        super().__init__(rows)
        self.warnings = list(warnings)


def run_trial(
    cfg: ScenarioConfig,
    trial_index: int,
    methods: tuple,
    criteria: tuple | None = None,
    evaluator: str = "fft",
    evd_per_iter: bool = False,
) -> TrialResult:
    """Synthesize one scenario and score every method on it.

    The observation, the search grid, and each order criterion's estimated
    target count are computed once and shared across methods.  A method
    failure is captured in its outcome rather than raised, so one bad trial
    never aborts a sweep.

    Args:
        cfg: Scenario configuration (its seed plus ``trial_index`` fix the
            random stream).
        trial_index: Trial number within the sweep.
        methods: Method ids to run.
        criteria: Per-method order criterion (default: true-k for all).
        evaluator: "fft" or "direct".
        evd_per_iter: Per-iteration eigendecomposition cost emulation for
            the iterative-MUSIC methods.
    """
    if criteria is None:
        criteria = ("true-k",) * len(methods)
    rng = trial_rng(cfg.seed, trial_index)
    truth = draw_targets(cfg, rng)
    obs = synthesize_observation(truth, cfg, rng)
    R = sample_covariance(obs.Y)
    grid = make_grid(cfg.grid_points, cfg.antennas, cfg.element_phase_factor)
    M, L = cfg.antennas, cfg.snapshots

    k_by_criterion = {}
    if "true-k" in criteria:
        k_by_criterion["true-k"] = cfg.targets
    if "rank-aic" in criteria or "hybrid" in criteria:
        evd = hermitian_evd(R)
        base = aic_rank(evd.eigenvalues, L)
        k_by_criterion["rank-aic"] = base.k_hat
        if "hybrid" in criteria:
            hyb = hybrid_order(
                None,
                covariance_sqrt(evd),
                grid,
                M - 1,
                base,
                ols_variant="ols",
                evaluator=evaluator,
                snapshots=L,
            )
            k_by_criterion["hybrid"] = hyb.k_hat

    raw = {}
    for method, crit in zip(methods, criteria):
        k_hat = k_by_criterion[crit]
        start = perf_counter()
        try:
            est = estimate_method(method, R, k_hat, grid, evaluator, evd_per_iter)
            seconds = perf_counter() - start
            error = None
        except Exception as exc:  # per-trial failures are data, not crashes
            est = np.empty(0, dtype=float)
            seconds = math.nan
            error = f"{type(exc).__name__}: {exc}"
        raw[method] = (k_hat, seconds, est, error, associate(truth.doas, est))

    assocs = {m: r[4] for m, r in raw.items()}
    rmse = rmse_common_hits(assocs, truth.doas, M)
    outcomes = {}
    for method, (k_hat, seconds, est, error, assoc) in raw.items():
        det = detection_metrics(assoc, cfg.targets, M)
        outcomes[method] = MethodOutcome(
            method=method,
            k_hat=k_hat,
            seconds=seconds,
            estimates=est,
            hit_rate=det.hit_rate,
            fa_rate=det.fa_rate,
            youden_j=det.youden_j,
            rmse=rmse[method],
            error=error,
        )
    diag = diagnostics(
        truth, obs.coeffs, M, cfg.symbols, cfg.subcarriers, cfg.element_phase_factor
    )
    return TrialResult(
        trial_index=trial_index,
        truth=truth,
        outcomes=outcomes,
        t_metric=diag.t_metric,
        s_metric=diag.s_metric,
    )


def _apply_sweep_value(base: ScenarioConfig, parameter: str, value) -> ScenarioConfig:
    if parameter == "snr_db":
        return replace(base, snr_db=float(value))
    return replace(base, **{parameter: int(value)})


def _trial_task(args):
    cfg, trial_index, methods, criteria, evaluator, evd_per_iter = args
    return run_trial(cfg, trial_index, methods, criteria, evaluator, evd_per_iter)


def trimmed_mean(values, trim_fraction: float = 0.05) -> float:
    """Mean after dropping the top and bottom ``trim_fraction`` of values."""
    xs = np.sort(np.asarray(values, dtype=float))
    drop = int(len(xs) * trim_fraction)
    kept = xs[drop : len(xs) - drop] if drop else xs
    return float(np.mean(kept)) if kept.size else math.nan


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("DOALAB_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"DOALAB_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def run_sweep(
    spec: SweepSpec,
    serial: bool = False,
    workers: int | None = None,
    evd_per_iter: bool = False,
) -> ResultTable:
    """Run a full sweep and aggregate per-(value, method) rows.

    Trials run across a process pool (worker count from ``workers``, the
    DOALAB_THREADS environment variable, or the CPU count; ``serial=True``
    keeps everything in-process for clean timing).  Metric columns depend
    only on the spec and seed; timing columns depend on the machine.

    Per-method trial failures are excluded from that method's aggregates; a
    sweep point where more than 5% of a method's trials failed is reported
    in the table's ``warnings`` and on stderr.
    """
    spec.validate()
    criteria = spec.criteria
    tasks = []
    for value in spec.values:
        cfg_v = _apply_sweep_value(spec.base, spec.parameter, value)
        cfg_v.validate()
        for t in range(spec.trials):
            tasks.append((cfg_v, t, tuple(spec.methods), criteria, spec.evaluator, evd_per_iter))

    if serial or _worker_count(workers) == 1 or len(tasks) == 1:
        results = [_trial_task(task) for task in tasks]
    else:
        n_workers = min(_worker_count(workers), len(tasks))
        chunk = max(1, len(tasks) // (n_workers * 4))
        with ProcessPoolExecutor(
            max_workers=n_workers, mp_context=get_context("spawn")
        ) as pool:
            results = list(pool.map(_trial_task, tasks, chunksize=chunk))

    rows, warnings = [], []
    crit_by_method = dict(zip(spec.methods, criteria))
    for vi, value in enumerate(spec.values):
        trials = results[vi * spec.trials : (vi + 1) * spec.trials]
        t_metric = float(np.mean([tr.t_metric for tr in trials]))
        s_metric = float(np.mean([tr.s_metric for tr in trials]))
        for method in spec.methods:
            outs = [tr.outcomes[method] for tr in trials]
            ok = [o for o in outs if o.error is None]
            failures = len(outs) - len(ok)
            if failures > FAILURE_WARN_FRACTION * len(outs):
                msg = (
                    f"{method} at {spec.parameter}={value}: "
                    f"{failures}/{len(outs)} trials failed"
                )
                warnings.append(msg)
                print(f"warning: {msg}", file=sys.stderr)
            defined = [o.rmse for o in ok if o.rmse is not None]
            rows.append(
                ResultRow(
                    sweep_param=spec.parameter,
                    sweep_value=float(value),
                    method=method,
                    criterion=crit_by_method[method],
                    evaluator=spec.evaluator,
                    trials=spec.trials,
                    youden_j=_mean(o.youden_j for o in ok),
                    hit_rate=_mean(o.hit_rate for o in ok),
                    fa_rate=_mean(o.fa_rate for o in ok),
                    rmse=float(np.mean(defined)) if defined else math.nan,
                    rmse_coverage=len(defined) / spec.trials,
                    mean_time_ms=1e3 * trimmed_mean([o.seconds for o in ok])
                    if ok
                    else math.nan,
                    t_metric=t_metric,
                    s_metric=s_metric,
                    mean_k_hat=_mean(o.k_hat for o in ok),
                    seed=spec.base.seed,
                )
            )
    rows.sort(key=lambda r: (r.sweep_value, r.method))
    return ResultTable(rows, warnings)


def _mean(values) -> float:
    xs = list(values)
    return float(np.mean(xs)) if xs else math.nan


def _format_field(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".9g")


def emit_csv(table, path: str) -> None:
    """Write result rows as UTF-8 CSV, floats at 9 significant digits.

    Rows are (re)ordered by sweep value then method id so output is
    deterministic regardless of how the table was assembled.

    Raises:
        OSError: If the path cannot be written (message carries the path).
    """
    rows = sorted(table, key=lambda r: (r.sweep_value, r.method))
    if not rows:
        raise ValueError("refusing to write an empty result table")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_FIELDS)
        for row in rows:
            writer.writerow(
                [_format_field(getattr(row, name)) for name in RESULT_FIELDS]
            )


def load_results(path: str) -> ResultTable:
    """Parse a CSV written by :func:`emit_csv` back into ResultRows."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RESULT_FIELDS:
            raise ValueError(f"unexpected CSV header in {path}")
        rows = []
        for record in reader:
            data = dict(zip(RESULT_FIELDS, record))
            rows.append(
                ResultRow(
                    sweep_param=data["sweep_param"],
                    sweep_value=float(data["sweep_value"]),
                    method=data["method"],
                    criterion=data["criterion"],
                    evaluator=data["evaluator"],
                    trials=int(data["trials"]),
                    youden_j=float(data["youden_j"]),
                    hit_rate=float(data["hit_rate"]),
                    fa_rate=float(data["fa_rate"]),
                    rmse=float(data["rmse"]),
                    rmse_coverage=float(data["rmse_coverage"]),
                    mean_time_ms=float(data["mean_time_ms"]),
                    t_metric=float(data["t_metric"]),
                    s_metric=float(data["s_metric"]),
                    mean_k_hat=float(data["mean_k_hat"]),
                    seed=int(data["seed"]),
                )
            )
    return ResultTable(rows)
