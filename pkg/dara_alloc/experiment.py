"""Scenario harness: builds allocation blocks from experiment configs, runs the
policies on them and collects one result row per (scenario, policy, repetition).
"""
import dataclasses
import logging
import time
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from dara_alloc import errors, utils
from dara_alloc.metrics import UtilityReport, unreachable_sensors, utility
from dara_alloc.model import Allocation, RabConfig, RateVector, SensorSpec, validate_rab
from dara_alloc.policies import (DaraParams, dara_allocate, decomposition_allocate,
                                 optimal_exhaustive, r_round_robin, rd_round_robin, round_robin)
from dara_alloc.rate_alloc import Objective, target_rates
from dara_alloc.weights import exponential_profile, load_histogram, profile_from_histogram

log = logging.getLogger(__name__)

POLICIES = ("dara", "decomposition", "rr", "rrr", "rdrr", "optimal")
AXES = ("N", "delta", "T")
CONFIG_KEYS = ("scenario", "N", "T", "profiles", "objective", "dara", "h", "qbar", "alpha",
               "seed", "policies", "budget")
CSV_COLUMNS = ("scenario", "policy", "N", "T", "delta", "seed", "sensor", "r_target",
               "r_achieved", "Q", "W", "gap", "gap_bound")
SUMMARY_COLUMNS = ("scenario", "policy", "N", "T", "repetitions", "W_mean", "W_min",
                   "W_normalized")
MIN_H = 1e-6
# floor for R-Round-robin shares of sensors with a zero target
_MIN_SHARE = 1e-12


@dataclass(frozen=True)
class HDistribution:
    """MAC frames per slot: a constant or a normal draw per sensor"""
    kind: str = "constant"
    value: float = 1.0
    mean: float = 0.0
    stddev: float = 0.0

    def draw(self, rng: np.random.Generator, N: int) -> np.ndarray:
        if self.kind == "constant":
            return np.full(N, float(self.value))
        return rng.normal(self.mean, self.stddev, size=N)

    @classmethod
    def from_value(cls, value) -> 'HDistribution':
        if isinstance(value, (int, float)):
            return cls(kind="constant", value=float(value))
        if not isinstance(value, dict):
            raise errors.ConfigError(f"h must be a number or a mapping, got {value!r}")
        kind = value.get("kind", "constant")
        if kind == "constant":
            return cls(kind=kind, value=float(value.get("value", 1.0)))
        if kind == "normal":
            try:
                return cls(kind=kind, mean=float(value["mean"]), stddev=float(value["stddev"]))
            except KeyError as err:
                raise errors.ConfigError(f"normal h distribution needs {err}") from err
        raise errors.ConfigError(f"unknown h distribution '{kind}'")


@dataclass(frozen=True)
class ProfileSpec:
    """Where one sensor's weight profile comes from"""
    delta: Optional[float] = None
    histogram: Optional[str] = None
    delta_range: Optional[Tuple[float, float]] = None

    def build(self, T: int):
        if self.histogram is not None:
            return profile_from_histogram(load_histogram(self.histogram, T))
        return exponential_profile(self.delta, T)

    @classmethod
    def from_value(cls, value, base_dir: Path = None) -> 'ProfileSpec':
        if isinstance(value, (int, float)):
            return cls(delta=float(value))
        if not isinstance(value, dict) or len(value) != 1:
            raise errors.ConfigError(f"profile must be one of delta/histogram/delta_range: {value!r}")
        key, item = next(iter(value.items()))
        if key == "delta":
            return cls(delta=float(item))
        if key == "histogram":
            path = Path(item)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return cls(histogram=str(path))
        if key == "delta_range":
            low, high = item
            return cls(delta_range=(float(low), float(high)))
        raise errors.ConfigError(f"unknown profile source '{key}'")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    N: int
    T: int
    seed: int
    profiles: Tuple[ProfileSpec, ...]
    objective: Objective = Objective.MAX_MIN
    dara: DaraParams = DaraParams()
    h: HDistribution = HDistribution()
    qbar: float = 1.0
    alpha: Optional[Tuple[float, ...]] = None
    policies: Tuple[str, ...] = ("dara", "rr", "rrr", "rdrr")
    budget: Optional[float] = None

    def validate(self):
        if self.N < 1 or self.T < 1:
            raise errors.ConfigError(f"N and T must be positive, got N={self.N} T={self.T}")
        if self.seed is None or not 0 <= self.seed < 2 ** 64:
            raise errors.ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.alpha is not None and len(self.alpha) != self.N:
            raise errors.ConfigError(f"alpha has {len(self.alpha)} entries for N={self.N}")
        for policy in self.policies:
            if policy not in POLICIES:
                raise errors.UnknownPolicy(policy)
        self.profile_specs()

    def profile_specs(self) -> Tuple[ProfileSpec, ...]:
        """One spec per sensor; a single spec or a delta range is spread over all N"""
        if len(self.profiles) == 1:
            spec = self.profiles[0]
            if spec.delta_range is not None:
                low, high = spec.delta_range
                deltas = np.linspace(low, high, self.N) if self.N > 1 else [low]
                return tuple(ProfileSpec(delta=float(delta)) for delta in deltas)
            return (spec,) * self.N
        if len(self.profiles) != self.N:
            raise errors.ConfigError(f"{len(self.profiles)} profiles for N={self.N}")
        if any(spec.delta_range is not None for spec in self.profiles):
            raise errors.ConfigError("delta_range must be the only profile entry")
        return tuple(self.profiles)

    def replace(self, **changes) -> 'ExperimentConfig':
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, document: Dict[str, Any], base_dir: Path = None) -> 'ExperimentConfig':
        """Build a config from a mapping keyed by the field names"""
        unknown = set(document) - set(CONFIG_KEYS)
        if unknown:
            raise errors.ConfigError(f"unknown config keys {sorted(unknown)}")
        missing = {"scenario", "N", "T", "profiles", "seed"} - set(document)
        if missing:
            raise errors.ConfigError(f"missing config keys {sorted(missing)}")
        profiles = document["profiles"]
        if not isinstance(profiles, list):
            profiles = [profiles]
        alpha = document.get("alpha", "uniform")
        try:
            config = cls(
                scenario=str(document["scenario"]),
                N=int(document["N"]),
                T=int(document["T"]),
                seed=int(document["seed"]),
                profiles=tuple(ProfileSpec.from_value(item, base_dir) for item in profiles),
                objective=Objective(document.get("objective", Objective.MAX_MIN.value)),
                dara=DaraParams(**(document.get("dara") or {})),
                h=HDistribution.from_value(document.get("h", 1.0)),
                qbar=float(document.get("qbar", 1.0)),
                alpha=None if alpha == "uniform" else tuple(float(a) for a in alpha),
                policies=tuple(document.get("policies", cls.policies)),
                budget=None if document.get("budget") is None else float(document["budget"]),
            )
        except (TypeError, ValueError) as err:
            raise errors.ConfigError(f"invalid config value: {err}") from err
        config.validate()
        return config

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'ExperimentConfig':
        path = Path(path)
        log.info("[SCENARIO] Loading config %s", path)
        return cls.from_dict(utils.read_yaml(path), base_dir=path.parent)


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    policy: str
    N: int
    T: int
    deltas: Tuple[Optional[float], ...]
    seed: int
    repetition: int
    rates: Tuple[float, ...]
    utilities: Tuple[float, ...]
    objective_value: float
    target: Tuple[float, ...]
    gap: Tuple[float, ...]
    gap_bound: Optional[float]
    allocation: Allocation
    wall_time: float = 0.0
    cell: int = 0

    def csv_rows(self) -> List[list]:
        """One CSV line per sensor in CSV_COLUMNS order"""
        return [
            [self.scenario, self.policy, self.N, self.T, self.deltas[n], self.seed, n + 1,
             self.target[n], self.rates[n], self.utilities[n], self.objective_value,
             self.gap[n], self.gap_bound]
            for n in range(self.N)
        ]


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    policy: str
    N: int
    T: int
    repetitions: int
    mean_objective: float
    min_objective: float
    normalized_objective: Optional[float] = None

    def csv_row(self) -> list:
        return [self.scenario, self.policy, self.N, self.T, self.repetitions,
                self.mean_objective, self.min_objective, self.normalized_objective]


def build_rab(config: ExperimentConfig, seed: int) -> RabConfig:
    """Resource allocation block of the scenario, h drawn with the given seed"""
    rng = np.random.default_rng(seed)
    h = config.h.draw(rng, config.N)
    if np.any(h < MIN_H):
        log.warning("[SCENARIO] %s: clamping h draws %s to %s",
                    config.scenario, h[h < MIN_H], MIN_H)
        h = np.maximum(h, MIN_H)
    alpha = config.alpha or (1.0 / config.N,) * config.N
    sensors = [
        SensorSpec(id=n + 1, alpha=float(alpha[n]), qbar=config.qbar, h=float(h[n]),
                   profile=spec.build(config.T))
        for n, spec in enumerate(config.profile_specs())
    ]
    rab = RabConfig(T=config.T, sensors=sensors)
    validate_rab(rab)
    return rab


def allocate(policy: str, rab: RabConfig, target: RateVector,
             objective: Objective = Objective.MAX_MIN,
             params: DaraParams = DaraParams()) -> Allocation:
    """Run one named policy on the block"""
    if policy == "dara":
        return dara_allocate(rab, target, params).allocation
    if policy == "decomposition":
        delta = rab.common_delta
        if delta is None:
            raise errors.ConfigError("decomposition needs one exponential profile for all sensors")
        return decomposition_allocate(delta, rab.N, rab.T, target).allocation
    if policy == "rr":
        return round_robin(rab)
    if policy == "rrr":
        shares = target.as_array()
        return r_round_robin(rab, np.maximum(shares, _MIN_SHARE * max(shares.max(), 1.0)))
    if policy == "rdrr":
        return rd_round_robin(rab)
    if policy == "optimal":
        return optimal_exhaustive(rab, objective)[0]
    raise errors.UnknownPolicy(policy)


def _row(config: ExperimentConfig, rab: RabConfig, policy: str, seed: int, repetition: int,
         target: RateVector, alloc: Allocation, report: UtilityReport, elapsed: float,
         cell: int) -> ResultRow:
    return ResultRow(
        scenario=config.scenario,
        policy=policy,
        N=rab.N,
        T=rab.T,
        deltas=tuple(sensor.profile.delta for sensor in rab.ordered),
        seed=seed,
        repetition=repetition,
        rates=report.per_sensor_rate.r,
        utilities=report.per_sensor_utility,
        objective_value=report.objective_value,
        target=target.r,
        gap=report.gap_to_target,
        gap_bound=report.gap_bound,
        allocation=alloc,
        wall_time=elapsed,
        cell=cell,
    )


def run_scenario(config: ExperimentConfig, repetition: int = 0, cell: int = 0) -> List[ResultRow]:
    """Run every requested policy on the scenario
    Args:
        config: Experiment configuration
        repetition: Repetition index mixed into the seed
        cell: Position of the scenario inside a sweep, used for ordering
    Returns(List[ResultRow]): One row per policy, sorted by policy name
    """
    config.validate()
    seed = utils.derive_seed(config.seed, repetition)
    rab = build_rab(config, seed)
    target = target_rates(rab, config.objective, config.budget)
    rows = []
    for policy in sorted(set(config.policies)):
        start = time.perf_counter()
        alloc = allocate(policy, rab, target, config.objective, config.dara)
        elapsed = time.perf_counter() - start
        report = utility(rab, alloc, config.objective, target)
        if policy in ("dara", "decomposition"):
            unreachable_sensors(report)
        log.info("[SCENARIO] %s rep=%s %s: W=%s in %.4fs",
                 config.scenario, repetition, policy, report.objective_value, elapsed)
        rows.append(_row(config, rab, policy, seed, repetition, target, alloc, report,
                         elapsed, cell))
    return rows


def _run_cell(task) -> List[ResultRow]:
    config, repetition, cell = task
    return run_scenario(config, repetition=repetition, cell=cell)


def _axis_config(base: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    label = f"{base.scenario}[{axis}={value}]"
    if axis == "N":
        return base.replace(scenario=label, N=int(value))
    if axis == "T":
        return base.replace(scenario=label, T=int(value))
    if isinstance(value, (list, tuple)):
        low, high = value
        label = f"{base.scenario}[{axis}={low}..{high}]"
        return base.replace(scenario=label, profiles=(ProfileSpec(delta_range=(low, high)),))
    return base.replace(scenario=label, profiles=(ProfileSpec(delta=float(value)),))


def sweep(base: ExperimentConfig, axis: str, values: Sequence, repetitions: int = 1,
          workers: int = 1) -> List[ResultRow]:
    """Run the base scenario for every axis value and repetition

    Cells are independent and run on `workers` processes; rows come back in
    sweep order, then policy, then repetition, whatever the execution order.
    A delta value may be a [low, high] pair for equally spaced discount factors.
    """
    if axis not in AXES:
        raise errors.ConfigError(f"unknown sweep axis '{axis}', expected one of {AXES}")
    if repetitions < 1:
        raise errors.ConfigError(f"repetitions must be positive, got {repetitions}")
    tasks = [(_axis_config(base, axis, value), repetition, cell)
             for cell, value in enumerate(values)
             for repetition in range(repetitions)]
    for config, _, _ in tasks:
        config.validate()
    log.info("[SWEEP] %s over %s=%s, %s repetitions, %s cells",
             base.scenario, axis, list(values), repetitions, len(tasks))
    if workers > 1:
        with Pool(workers) as pool:
            results = pool.map(_run_cell, tasks)
    else:
        results = [_run_cell(task) for task in tasks]
    rows = [row for result in results for row in result]
    return sorted(rows, key=lambda row: (row.cell, row.scenario, row.policy, row.repetition))


def summarize(rows: Sequence[ResultRow]) -> List[SummaryRow]:
    """Mean and min objective over repetitions per (scenario, policy)"""
    groups: Dict[tuple, List[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.cell, row.scenario, row.policy), []).append(row)
    summary = []
    for (_, scenario, policy), group in groups.items():
        values = np.array([row.objective_value for row in group])
        summary.append(SummaryRow(scenario=scenario, policy=policy, N=group[0].N,
                                  T=group[0].T, repetitions=len(group),
                                  mean_objective=float(values.mean()),
                                  min_objective=float(values.min())))
    return summary


def normalize_objective(summary: Sequence[SummaryRow]) -> List[SummaryRow]:
    """Display normalisation: each policy's mean objective over its maximum"""
    peaks: Dict[str, float] = {}
    for row in summary:
        peaks[row.policy] = max(peaks.get(row.policy, 0.0), row.mean_objective)
    return [
        dataclasses.replace(row, normalized_objective=(
            row.mean_objective / peaks[row.policy] if peaks[row.policy] > 0 else None))
        for row in summary
    ]


def write_rows(rows: Sequence[ResultRow], stream: TextIO):
    utils.write_csv(stream, CSV_COLUMNS, (line for row in rows for line in row.csv_rows()))


def write_summary(summary: Sequence[SummaryRow], stream: TextIO):
    utils.write_csv(stream, SUMMARY_COLUMNS, (row.csv_row() for row in summary))
