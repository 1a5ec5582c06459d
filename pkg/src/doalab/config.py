"""Plain-text configuration files for the benchmark CLI.

Two INI-style sections mirror the library's configuration objects field for
field: ``[scenario]`` for the scene being simulated and ``[sweep]`` for the
campaign.  Unknown sections or keys are hard errors — a typo should never
silently benchmark the wrong thing.

Example::

    [scenario]
    targets = 8
    antennas = 16
    subcarriers = 512
    symbols = 10
    snr_db = 40
    seed = 1

    [sweep]
    parameter = snr_db
    values = 0, 10, 20, 30, 40
    trials = 200
    methods = music-signal, omp, ols, omp-imusic, ols-imusic
    order_criterion = true-k
    evaluator = fft
"""

from __future__ import annotations

import configparser
import math
import os

from doalab.bench import EVALUATORS, ORDER_CRITERIA, SWEEP_PARAMETERS, SweepSpec
from doalab.methods import METHOD_IDS
from doalab.scenario import ScenarioConfig


class ConfigError(Exception):
    """A configuration file or option the benchmark cannot accept."""


_SCENARIO_INT = ("targets", "antennas", "subcarriers", "symbols", "grid_points", "seed")
_SCENARIO_FLOAT = (
    "snr_db",
    "carrier_freq_hz",
    "subcarrier_spacing_hz",
    "max_range_m",
    "element_phase_factor",
)
_SCENARIO_KEYS = set(_SCENARIO_INT) | set(_SCENARIO_FLOAT)
_SWEEP_KEYS = {"parameter", "values", "trials", "methods", "order_criterion", "evaluator"}
_INT_PARAMETERS = ("targets", "subcarriers", "antennas")


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None
    if math.isnan(value):
        raise ConfigError(f"[{section}] {key}: nan is not a valid value")
    return value


def _split_list(raw: str) -> list:
    items = [item.strip() for item in raw.split(",")]
    return [item for item in items if item]


def parse_config(path: str) -> SweepSpec:
    """Parse a sweep configuration file into a validated SweepSpec.

    Raises:
        ConfigError: On unreadable files, unknown sections/keys, malformed
            values, or any structural invariant breach.
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from None

    unknown_sections = set(parser.sections()) - {"scenario", "sweep"}
    if unknown_sections:
        raise ConfigError(f"unknown config section(s): {sorted(unknown_sections)}")
    if "sweep" not in parser.sections():
        raise ConfigError("missing required [sweep] section")

    scenario_kwargs = {}
    if parser.has_section("scenario"):
        for key, raw in parser.items("scenario"):
            if key not in _SCENARIO_KEYS:
                raise ConfigError(f"unknown [scenario] key: {key!r}")
            if key in _SCENARIO_INT:
                scenario_kwargs[key] = _parse_int("scenario", key, raw)
            elif key == "snr_db" and raw.strip().lower() in ("inf", "+inf", "infinity"):
                scenario_kwargs[key] = math.inf
            else:
                scenario_kwargs[key] = _parse_float("scenario", key, raw)
    base = ScenarioConfig(**scenario_kwargs)
    try:
        base.validate()
    except ValueError as exc:
        raise ConfigError(f"[scenario]: {exc}") from None
    n = base.grid_points
    if n & (n - 1):
        raise ConfigError(f"[scenario] grid_points must be a power of two, got {n}")

    sweep_raw = dict(parser.items("sweep"))
    unknown = set(sweep_raw) - _SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown [sweep] key(s): {sorted(unknown)}")
    for required in ("parameter", "values", "methods"):
        if required not in sweep_raw:
            raise ConfigError(f"missing required [sweep] key: {required!r}")

    parameter = sweep_raw["parameter"].strip()
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(
            f"[sweep] parameter must be one of {SWEEP_PARAMETERS}, got {parameter!r}"
        )

    values = []
    for item in _split_list(sweep_raw["values"]):
        if parameter == "snr_db":
            if item.lower() in ("inf", "+inf", "infinity"):
                values.append(math.inf)
            else:
                values.append(_parse_float("sweep", "values", item))
        else:
            values.append(_parse_int("sweep", "values", item))
    if not values:
        raise ConfigError("[sweep] values must be non-empty")

    methods = tuple(_split_list(sweep_raw["methods"]))
    for m in methods:
        if m not in METHOD_IDS:
            raise ConfigError(f"[sweep] unknown method id: {m!r}")

    trials = _parse_int("sweep", "trials", sweep_raw["trials"]) if "trials" in sweep_raw else 500

    order_criterion: str | tuple = "true-k"
    if "order_criterion" in sweep_raw:
        tokens = _split_list(sweep_raw["order_criterion"])
        for token in tokens:
            if token not in ORDER_CRITERIA:
                raise ConfigError(
                    f"[sweep] order_criterion must be from {ORDER_CRITERIA}, got {token!r}"
                )
        if len(tokens) == 1:
            order_criterion = tokens[0]
        else:
            order_criterion = tuple(tokens)

    evaluator = sweep_raw.get("evaluator", "fft").strip()
    if evaluator not in EVALUATORS:
        raise ConfigError(f"[sweep] evaluator must be one of {EVALUATORS}, got {evaluator!r}")

    spec = SweepSpec(
        parameter=parameter,
        values=tuple(values),
        methods=methods,
        base=base,
        trials=trials,
        order_criterion=order_criterion,
        evaluator=evaluator,
    )
    try:
        spec.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return spec
