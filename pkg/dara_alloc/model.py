"""Domain types shared by every part of the allocator and their validation"""
import functools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Tuple

import numpy as np

from dara_alloc import errors

log = logging.getLogger(__name__)

TOLERANCE = 1e-9


class ProfileKind(Enum):
    EXPONENTIAL = "exponential"
    EMPIRICAL = "empirical"


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WeightProfile:
    """Per-slot valuation of one sensor over a resource allocation block

    Weights are stored explicitly even for exponential profiles; `delta`
    is kept only for the analytic paths that need it.
    """
    weights: np.ndarray
    kind: ProfileKind = ProfileKind.EMPIRICAL
    delta: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen_array(self.weights))

    @property
    def T(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def is_exponential(self) -> bool:
        return self.kind is ProfileKind.EXPONENTIAL

    def tail(self) -> np.ndarray:
        """Sum of the weights strictly after each slot"""
        reversed_cumsum = np.cumsum(self.weights[::-1])[::-1]
        return np.append(reversed_cumsum[1:], 0.0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WeightProfile) and
            self.kind == other.kind and
            self.delta == other.delta and
            np.array_equal(self.weights, other.weights)
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.delta, self.weights.tobytes()))

    def __repr__(self) -> str:
        if self.is_exponential:
            return f"WeightProfile(exponential delta={self.delta}, T={self.T})"
        return f"WeightProfile(empirical, T={self.T})"


@dataclass(frozen=True)
class SensorSpec:
    id: int
    alpha: float
    qbar: float
    h: float
    profile: WeightProfile

    @property
    def coefficient(self) -> float:
        """Objective weight times utility per unit of weighted sum rate"""
        return self.alpha * self.qbar * self.h


@dataclass(frozen=True, eq=False)
class RabConfig:
    """Resource allocation block: T slots shared by a roster of sensors"""
    T: int
    sensors: Tuple[SensorSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "sensors", tuple(self.sensors))

    @property
    def N(self) -> int:
        return len(self.sensors)

    @functools.cached_property
    def ordered(self) -> Tuple[SensorSpec, ...]:
        """Sensors sorted by id, row n-1 of every array belongs to sensor n"""
        return tuple(sorted(self.sensors, key=lambda sensor: sensor.id))

    @functools.cached_property
    def weights(self) -> np.ndarray:
        """N x T weight matrix"""
        return _frozen_array([sensor.profile.weights for sensor in self.ordered])

    @functools.cached_property
    def tails(self) -> np.ndarray:
        """N x T matrix of the weight remaining strictly after each slot"""
        return _frozen_array([sensor.profile.tail() for sensor in self.ordered])

    @functools.cached_property
    def coefficients(self) -> np.ndarray:
        return _frozen_array([sensor.coefficient for sensor in self.ordered])

    @property
    def common_delta(self) -> Optional[float]:
        """Shared discount factor when every profile is the same exponential"""
        deltas = {sensor.profile.delta for sensor in self.sensors
                  if sensor.profile.is_exponential}
        exponential = all(sensor.profile.is_exponential for sensor in self.sensors)
        if exponential and len(deltas) == 1:
            return deltas.pop()
        return None


@dataclass(frozen=True)
class Allocation:
    slots: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(int(slot) for slot in self.slots))

    @property
    def T(self) -> int:
        return len(self.slots)

    def counts(self, N: int) -> Tuple[int, ...]:
        """Number of slots held by each sensor id 1..N"""
        return tuple(int(c) for c in np.bincount(np.asarray(self.slots) - 1, minlength=N))

    def __iter__(self):
        return iter(self.slots)

    def __len__(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class RateVector:
    """Weighted sum rates r and the matching normalised rates v"""
    r: Tuple[float, ...]
    v: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))

    @property
    def N(self) -> int:
        return len(self.r)

    @property
    def total(self) -> float:
        return float(np.sum(self.r))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.r, dtype=float)

    @classmethod
    def of(cls, r: Iterable[float], totals: Iterable[float] = None) -> 'RateVector':
        """Build a rate vector, normalising by the per-sensor weight totals when given"""
        r = np.asarray(list(r), dtype=float)
        if totals is None:
            return cls(r=tuple(r))
        return cls(r=tuple(r), v=tuple(r / np.asarray(list(totals), dtype=float)))


def validate_profile(profile: WeightProfile, T: int = None, sensor: int = None):
    """Check the weight profile invariants
    Args:
        profile: Profile to check
        T: Expected length, if known
        sensor: Sensor id used in error messages
    """
    weights = profile.weights
    if len(weights) < 1:
        raise errors.LengthMismatch(T or 1, 0, what="weight profile")
    if T is not None and len(weights) != T:
        raise errors.LengthMismatch(T, len(weights), what=f"profile of sensor {sensor}")
    if profile.is_exponential and not 0 <= (profile.delta or 0.0) < 1:
        raise errors.DeltaOutOfRange(profile.delta)
    if abs(weights[0] - 1.0) > TOLERANCE:
        raise errors.BadNormalization(float(weights[0]), sensor=sensor)
    outside = np.flatnonzero((weights < -TOLERANCE) | (weights > 1 + TOLERANCE))
    if outside.size:
        slot = int(outside[0])
        raise errors.WeightOutOfRange(slot + 1, float(weights[slot]), sensor=sensor)
    rising = np.flatnonzero(np.diff(weights) > TOLERANCE)
    if rising.size:
        slot = int(rising[0])
        raise errors.NonMonotoneWeights(slot + 1, float(weights[slot]),
                                        float(weights[slot + 1]), sensor=sensor)


def validate_rab(config: RabConfig):
    """Check every RabConfig invariant, raising the first violation found"""
    if config.T < 1:
        raise errors.LengthMismatch(1, config.T, what="resource allocation block")
    if config.N < 1:
        raise errors.InvalidSensorIds(())
    ids = sorted(sensor.id for sensor in config.sensors)
    if ids != list(range(1, config.N + 1)):
        raise errors.InvalidSensorIds([sensor.id for sensor in config.sensors])
    for sensor in config.ordered:
        if not 0 <= sensor.alpha <= 1:
            raise errors.InvalidSensor(sensor.id, "alpha", sensor.alpha)
        if not sensor.qbar > 0:
            raise errors.InvalidSensor(sensor.id, "qbar", sensor.qbar)
        if not sensor.h > 0:
            raise errors.InvalidSensor(sensor.id, "h", sensor.h)
        validate_profile(sensor.profile, T=config.T, sensor=sensor.id)
    alpha_total = sum(sensor.alpha for sensor in config.sensors)
    if abs(alpha_total - 1.0) > TOLERANCE:
        raise errors.AlphaSumMismatch(alpha_total)
    log.debug("[RAB] Valid configuration N=%s T=%s", config.N, config.T)


def validate_allocation(config: RabConfig, alloc: Allocation):
    if alloc.T != config.T:
        raise errors.LengthMismatch(config.T, alloc.T, what="allocation")
    for slot, sensor in enumerate(alloc.slots, start=1):
        if not 1 <= sensor <= config.N:
            raise errors.UnknownSensor(slot, sensor)


def rates_of_allocation(config: RabConfig, alloc: Allocation) -> RateVector:
    """Weighted sum rate of every sensor under the allocation
    Args:
        config: Resource allocation block
        alloc: Slot to sensor assignment
    Returns(RateVector): r[n] = sum of w[n, t] over the slots t held by n,
        v[n] = r[n] divided by the sensor's total weight
    """
    validate_allocation(config, alloc)
    index = np.asarray(alloc.slots, dtype=int) - 1
    gained = config.weights[index, np.arange(config.T)]
    rates = np.bincount(index, weights=gained, minlength=config.N)
    return RateVector.of(rates, totals=config.weights.sum(axis=1))
