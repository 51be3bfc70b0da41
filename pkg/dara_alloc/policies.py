"""Second step of the allocation: turning rates into a slot assignment.

Holds the delay-aware index policy, the exact continuation-rate decomposition
for identical exponential profiles, the stationary round-robin baselines and
the exhaustive optimal search used as an oracle on small instances.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Tuple

import numpy as np

from dara_alloc import errors, utils
from dara_alloc.model import TOLERANCE, Allocation, RabConfig, RateVector
from dara_alloc.rate_alloc import THRESHOLD_SLACK, Objective, feasibility_threshold

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 10 ** 7
# allocations scored per vectorised batch of the exhaustive search
_BATCH = 1 << 16
_DELTA_DENOMINATOR = 10 ** 9


@dataclass(frozen=True)
class DaraParams:
    """Exponents of the residual, slot weight and remaining weight factors"""
    mu: float = 1.0
    nu: float = 1.0
    gamma: float = 1.0
    tail_floor: float = 1e-12

    def __post_init__(self):
        if not self.tail_floor > 0:
            raise errors.ValidationError(f"tail_floor must be positive, got {self.tail_floor}")


@dataclass(frozen=True, eq=False)
class PolicyTrace:
    """Allocation plus the per-slot state it was derived from

    residuals[t] and indices[t] hold the values seen before slot t + 1 was
    assigned; final_residuals is the state after the last slot.
    """
    allocation: Allocation
    residuals: np.ndarray
    indices: np.ndarray
    final_residuals: np.ndarray

    def __post_init__(self):
        for name in ("residuals", "indices", "final_residuals"):
            values = np.array(getattr(self, name), dtype=float)
            values.setflags(write=False)
            object.__setattr__(self, name, values)


def _check_target(config: RabConfig, target: RateVector):
    if target.N != config.N:
        raise errors.TargetDimensionMismatch(config.N, target.N)


def dara_allocate(config: RabConfig, target: RateVector, params: DaraParams = DaraParams(),
                  prefix: Sequence[int] = ()) -> PolicyTrace:
    """Delay-aware index allocation
    Args:
        config: Resource allocation block
        target: Target weighted sum rates, the initial residuals
        params: Index exponents
        prefix: Sensor ids pinned to the leading slots; the index takes over
            from the residuals they leave behind
    Returns(PolicyTrace): Allocation with residual and index snapshots

    Slot t goes to the largest f_n^mu * w[n,t]^nu * tail[n,t]^-gamma where f_n
    is the remaining distance to the target (clamped at 0) and tail the
    weight left after t. The winner's residual drops by its slot weight.
    When every index is 0 the largest raw residual wins. Ties go to the
    lowest sensor id.
    """
    _check_target(config, target)
    T, N = config.T, config.N
    if len(prefix) > T:
        raise errors.LengthMismatch(T, len(prefix), what="pinned prefix")
    weights = config.weights
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        benefit = weights ** params.nu
        urgency = np.maximum(config.tails, params.tail_floor) ** -params.gamma

    residual = target.as_array().copy()
    slots = np.empty(T, dtype=int)
    residuals = np.empty((T, N))
    indices = np.empty((T, N))
    for t in range(T):
        residuals[t] = residual
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            index = np.maximum(residual, 0.0) ** params.mu * benefit[:, t] * urgency[:, t]
        index[np.isnan(index)] = 0.0
        indices[t] = index
        if t < len(prefix):
            if not 1 <= prefix[t] <= N:
                raise errors.UnknownSensor(t + 1, prefix[t])
            winner = prefix[t] - 1
        elif index.max() > 0:
            winner = int(np.argmax(index))
        else:
            winner = int(np.argmax(residual))
        slots[t] = winner + 1
        residual[winner] -= weights[winner, t]
        log.debug("[DARA] slot %s -> sensor %s", t + 1, winner + 1)

    allocation = Allocation(slots)
    log.info("[DARA] N=%s T=%s slot counts %s, final residuals %s",
             N, T, allocation.counts(N), residual)
    return PolicyTrace(allocation, residuals, indices, residual)


def _exact_delta(delta: float, N: int) -> Fraction:
    exact = Fraction(delta).limit_denominator(_DELTA_DENOMINATOR)
    if exact >= 1:
        exact = Fraction(delta)
    # float 1 - 1/N may round just below the exact threshold
    return max(exact, Fraction(N - 1, N))


def decomposition_allocate(delta: float, N: int, T: int, target: RateVector) -> PolicyTrace:
    """Allocation by decomposing continuation rates of identical exponential profiles

    The target, rescaled onto sum(r) = 1 / (1 - delta), is the continuation
    rate vector g at slot 1. Each slot goes to the largest g_n (lowest id on
    ties), then the winner's g becomes (g - 1) / delta and every other
    g / delta. The recursion runs on exact rationals: in floating point each
    step scales the rounding error by 1 / delta.
    """
    if not 0 <= delta < 1:
        raise errors.DeltaOutOfRange(delta)
    threshold = feasibility_threshold(N)
    if delta < threshold - THRESHOLD_SLACK:
        raise errors.InfeasibleDelta(delta, threshold)
    rates = target.as_array()
    if len(rates) != N:
        raise errors.TargetDimensionMismatch(N, len(rates))
    budget = utils.geometric_sum(delta, None)
    total = float(rates.sum())
    if np.any(rates < -TOLERANCE):
        raise errors.InfeasibleTarget(total, budget, message=f"negative target rate in {rates}")
    if abs(total - budget) > delta ** T * budget + TOLERANCE or total <= 0:
        raise errors.InfeasibleTarget(total, budget)

    exact_delta = _exact_delta(delta, N)
    exact_rates = [Fraction(max(float(rate), 0.0)) for rate in rates]
    scale = 1 / ((1 - exact_delta) * sum(exact_rates))
    continuation = [rate * scale for rate in exact_rates]

    slots = np.empty(T, dtype=int)
    residuals = np.empty((T, N))
    for t in range(T):
        residuals[t] = [float(value) for value in continuation]
        winner = max(range(N), key=lambda n: (continuation[n], -n))
        slots[t] = winner + 1
        if exact_delta == 0:
            continuation = [Fraction(0)] * N
        else:
            continuation = [(value - 1 if n == winner else value) / exact_delta
                            for n, value in enumerate(continuation)]
        log.debug("[DECOMP] slot %s -> sensor %s", t + 1, winner + 1)

    allocation = Allocation(slots)
    final = [float(value) for value in continuation]
    log.info("[DECOMP] delta=%s N=%s T=%s slot counts %s", delta, N, T, allocation.counts(N))
    return PolicyTrace(allocation, residuals, residuals, final)


def round_robin(config: RabConfig) -> Allocation:
    return Allocation((t % config.N) + 1 for t in range(config.T))


def _exact_share(share: float) -> Fraction:
    exact = Fraction(share)
    snapped = exact.limit_denominator(_DELTA_DENOMINATOR)
    # snap only when the float is that fraction up to rounding
    if abs(snapped - exact) <= TOLERANCE * 1e-3 * exact:
        return snapped
    return exact


def r_round_robin(config: RabConfig, shares: Sequence[float]) -> Allocation:
    """Smooth weighted round-robin with slot counts proportional to the shares

    Every slot each sensor earns its share in credit, the richest sensor
    (lowest id on ties) wins and pays the sum of all shares. This is the
    normalised credit scheme scaled by the share total. Credits are exact
    rationals and shares that are floats of small fractions (7/3, 2/3) are
    snapped back to them, so equal credits really tie.
    """
    shares = np.asarray(shares, dtype=float)
    if len(shares) != config.N:
        raise errors.LengthMismatch(config.N, len(shares), what="shares")
    non_positive = np.flatnonzero(~(shares > 0))
    if non_positive.size:
        sensor = int(non_positive[0])
        raise errors.NonPositiveShare(sensor + 1, float(shares[sensor]))
    exact = [_exact_share(float(share)) for share in shares]
    total = sum(exact)
    credit = [Fraction(0)] * config.N
    slots = []
    for _ in range(config.T):
        credit = [c + s for c, s in zip(credit, exact)]
        # max() keeps the first maximum
        winner = max(range(config.N), key=credit.__getitem__)
        credit[winner] -= total
        slots.append(winner + 1)
    allocation = Allocation(slots)
    log.debug("[RR] shares %s -> slot counts %s", shares, allocation.counts(config.N))
    return allocation


def rate_delay_shares(config: RabConfig) -> np.ndarray:
    """Rate proxy qbar*h times delay sensitivity T / sum(w), normalised

    Faster decaying profiles have a smaller total weight and so a larger share.
    """
    rate = np.array([sensor.qbar * sensor.h for sensor in config.ordered])
    urgency = config.T / config.weights.sum(axis=1)
    shares = rate * urgency
    return shares / shares.sum()


def rd_round_robin(config: RabConfig,
                   heuristic: Callable[[RabConfig], np.ndarray] = rate_delay_shares) -> Allocation:
    return r_round_robin(config, heuristic(config))


def _batch_length(N: int, T: int) -> int:
    length = 0
    while length < T and N ** (length + 1) <= _BATCH:
        length += 1
    return length


def _scores(weighted: np.ndarray, objective: Objective) -> np.ndarray:
    if objective is Objective.MAX_MIN:
        return weighted.min(axis=1)
    return weighted.sum(axis=1)


def optimal_exhaustive(config: RabConfig, objective: Objective,
                       limit: int = EXHAUSTIVE_LIMIT) -> Tuple[Allocation, float]:
    """Best allocation among all N^T, lexicographically smallest on ties

    The trailing slots are scored in vectorised batches of every suffix while
    the leading slots are enumerated by base-N counting.
    """
    N, T = config.N, config.T
    count = N ** T
    if count > limit:
        raise errors.InstanceTooLarge(count, limit)
    weights = config.weights
    coefficients = config.coefficients

    suffix_length = _batch_length(N, T) if N > 1 else T
    prefix_length = T - suffix_length
    powers = N ** np.arange(suffix_length - 1, -1, -1)
    suffixes = (np.arange(N ** suffix_length)[:, None] // powers) % N
    suffix_slots = np.arange(prefix_length, T)
    gains = weights[suffixes, suffix_slots]
    suffix_rates = np.stack([np.where(suffixes == n, gains, 0.0).sum(axis=1)
                             for n in range(N)], axis=1)

    best_value = -math.inf
    best = None
    digits = [0] * prefix_length
    visited = 0
    while True:
        prefix_rates = np.zeros(N)
        for t, sensor in enumerate(digits):
            prefix_rates[sensor] += weights[sensor, t]
        scores = _scores((prefix_rates + suffix_rates) * coefficients, objective)
        candidate = int(np.argmax(scores))
        if scores[candidate] > best_value:
            best_value = float(scores[candidate])
            best = list(digits) + suffixes[candidate].tolist()
        visited += len(scores)

        position = prefix_length - 1
        while position >= 0 and digits[position] == N - 1:
            digits[position] = 0
            position -= 1
        if position < 0:
            break
        digits[position] += 1

    allocation = Allocation(sensor + 1 for sensor in best)
    log.info("[ORACLE] N=%s T=%s searched %s allocations, best W=%s",
             N, T, visited, best_value)
    return allocation, best_value
