"""First step of the allocation: the target weighted sum rate vector"""
import logging
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from dara_alloc import errors, utils
from dara_alloc.model import TOLERANCE, RabConfig, RateVector

log = logging.getLogger(__name__)

# slack when comparing a discount factor against 1 - 1/N computed elsewhere
THRESHOLD_SLACK = 1e-12


class Objective(Enum):
    MAX_MIN = "maxmin"
    WEIGHTED_SUM = "weightedsum"


def achievable_budget(config: RabConfig) -> Tuple[float, float]:
    """Bounds on the total weighted sum rate of any allocation
    Returns(Tuple[float, float]): (sum over t of min_n w[n, t], sum over t of max_n w[n, t])
    """
    weights = config.weights
    return float(weights.min(axis=0).sum()), float(weights.max(axis=0).sum())


def feasibility_threshold(N: int) -> float:
    """Smallest common discount factor for which every rate vector on the
    infinite-horizon budget simplex is achievable"""
    return 1.0 - 1.0 / N


def _check_budget(budget: float):
    if not budget > 0:
        raise errors.InvalidBudget(budget)


def _target(config: RabConfig, rates: np.ndarray) -> RateVector:
    return RateVector.of(rates, totals=config.weights.sum(axis=1))


def maxmin_rates(config: RabConfig, budget: float) -> RateVector:
    """Rates maximising min_n alpha_n qbar_n h_n r_n subject to sum(r) = budget

    The optimum equalises the weighted utilities:
    r_n = budget / sum_i(c_n / c_i) with c_n = alpha_n qbar_n h_n.
    """
    _check_budget(budget)
    coefficients = config.coefficients
    zero = np.flatnonzero(coefficients <= 0)
    if zero.size:
        raise errors.ZeroUtilityCoefficient(config.ordered[int(zero[0])].id)
    rates = budget / (coefficients * np.sum(1.0 / coefficients))
    log.debug("[RATE] Max-min target %s for budget %s", rates, budget)
    return _target(config, rates)


def weightedsum_rates(config: RabConfig, budget: float) -> RateVector:
    """Rates maximising sum_n alpha_n qbar_n h_n r_n subject to sum(r) = budget

    The whole budget goes to the largest coefficient, split equally between
    exact ties.
    """
    _check_budget(budget)
    coefficients = config.coefficients
    winners = coefficients == coefficients.max()
    rates = np.where(winners, budget / np.count_nonzero(winners), 0.0)
    log.debug("[RATE] Weighted-sum target %s for budget %s", rates, budget)
    return _target(config, rates)


def target_rates(config: RabConfig, objective: Objective,
                 budget: Optional[float] = None) -> RateVector:
    """Step-one target for the objective, on budget Rmin unless overridden"""
    lower, upper = achievable_budget(config)
    if budget is None:
        budget = lower
    elif not lower - TOLERANCE <= budget <= upper + TOLERANCE:
        log.warning("[RATE] Budget %s outside the achievable range [%s, %s]",
                    budget, lower, upper)
    if objective is Objective.MAX_MIN:
        return maxmin_rates(config, budget)
    return weightedsum_rates(config, budget)


def weighted_utilities(config: RabConfig,
                       rates: Union[RateVector, Sequence[float]]) -> np.ndarray:
    """alpha_n qbar_n h_n r_n for every sensor"""
    r = rates.as_array() if isinstance(rates, RateVector) else np.asarray(rates, dtype=float)
    if len(r) != config.N:
        raise errors.TargetDimensionMismatch(config.N, len(r))
    return config.coefficients * r


def objective_value(config: RabConfig, rates: Union[RateVector, Sequence[float]],
                    objective: Objective) -> float:
    """W of the rate vector: min or sum of alpha_n qbar_n h_n r_n"""
    weighted = weighted_utilities(config, rates)
    if objective is Objective.MAX_MIN:
        return float(weighted.min())
    return float(weighted.sum())


def check_infinite_horizon_feasible(delta: float, N: int,
                                    r: Union[RateVector, Sequence[float]]) -> bool:
    """Whether r is achievable with N identical exponential profiles over an
    infinite horizon: sum(r) = 1 / (1 - delta), r >= 0 and delta >= 1 - 1/N
    """
    rates = r.as_array() if isinstance(r, RateVector) else np.asarray(r, dtype=float)
    if len(rates) != N or not 0 <= delta < 1:
        return False
    if delta < feasibility_threshold(N) - THRESHOLD_SLACK:
        return False
    if np.any(rates < 0):
        return False
    return bool(abs(rates.sum() - utils.geometric_sum(delta, None)) <= TOLERANCE)
