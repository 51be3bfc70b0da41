import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from dara_alloc import errors, utils
from dara_alloc.model import TOLERANCE, Allocation, RabConfig, RateVector, rates_of_allocation
from dara_alloc.rate_alloc import Objective, objective_value

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UtilityReport:
    """Utilities of one allocation

    gap_to_target[n] is (achieved - target) / sum_t w[n, t]; gap_bound is
    delta^T when all sensors share one exponential profile.
    """
    per_sensor_utility: Tuple[float, ...]
    objective_value: float
    per_sensor_rate: RateVector
    objective: Objective = Objective.MAX_MIN
    gap_to_target: Optional[Tuple[float, ...]] = None
    gap_bound: Optional[float] = None


def utility(config: RabConfig, alloc: Allocation, objective: Objective = Objective.MAX_MIN,
            target: RateVector = None) -> UtilityReport:
    """Utilities Q_n = qbar_n h_n r_n and the objective W of an allocation
    Args:
        config: Resource allocation block
        alloc: Allocation to evaluate
        objective: min_n alpha_n Q_n or sum_n alpha_n Q_n
        target: Step-one target, enables the per-sensor gap
    Returns(UtilityReport):
    """
    rates = rates_of_allocation(config, alloc)
    scale = np.array([sensor.qbar * sensor.h for sensor in config.ordered])
    utilities = scale * rates.as_array()
    gap = None
    if target is not None:
        if target.N != config.N:
            raise errors.TargetDimensionMismatch(config.N, target.N)
        totals = config.weights.sum(axis=1)
        gap = tuple(float(g) for g in (rates.as_array() - target.as_array()) / totals)
    delta = config.common_delta
    bound = gap_bound(delta, config.T) if delta is not None else None
    return UtilityReport(
        per_sensor_utility=tuple(float(q) for q in utilities),
        objective_value=objective_value(config, rates, objective),
        per_sensor_rate=rates,
        objective=objective,
        gap_to_target=gap,
        gap_bound=bound,
    )


def normalized_rates(delta: float, T: Optional[int],
                     r: Union[RateVector, Sequence[float]]) -> RateVector:
    """v = r / sum_{t<=T} delta^(t-1); T=None is the infinite horizon"""
    rates = r.as_array() if isinstance(r, RateVector) else np.asarray(r, dtype=float)
    total = utils.geometric_sum(delta, T)
    return RateVector(r=tuple(rates), v=tuple(rates / total))


def gap_bound(delta: float, T: int) -> float:
    """Worst distance between finite and infinite horizon normalised rates"""
    if not 0 <= delta < 1:
        raise errors.DeltaOutOfRange(delta)
    return float(delta) ** T


def unreachable_sensors(report: UtilityReport, bound: float = None) -> List[int]:
    """Sensors whose normalised shortfall exceeds the bound (report's by default)"""
    if report.gap_to_target is None:
        return []
    if bound is None:
        bound = report.gap_bound or 0.0
    missed = [sensor for sensor, gap in enumerate(report.gap_to_target, start=1)
              if gap < -(bound + TOLERANCE)]
    if missed:
        log.warning("[METRICS] Sensors %s miss their target by more than %s", missed, bound)
    return missed
