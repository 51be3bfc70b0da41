"""Construction of weight profiles: exponential discounting, deadline survival
profiles built from per-slot deadline histograms, and exponential fitting.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from dara_alloc import errors, utils
from dara_alloc.model import ProfileKind, WeightProfile

log = logging.getLogger(__name__)

MAX_FITTED_DELTA = 1 - 1e-12


@dataclass(frozen=True, eq=False)
class DeadlineHistogram:
    """Bytes of bitstream whose transmission deadline falls in each slot"""
    bytes_by_deadline: np.ndarray

    def __post_init__(self):
        values = np.array(self.bytes_by_deadline, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "bytes_by_deadline", values)

    @property
    def T(self) -> int:
        return len(self.bytes_by_deadline)

    def validate(self):
        values = self.bytes_by_deadline
        if values.size == 0:
            raise errors.EmptyHistogram("deadline histogram has no slots")
        negative = np.flatnonzero(values < 0)
        if negative.size:
            slot = int(negative[0]) + 1
            raise errors.ValidationError(f"negative byte count {values[slot - 1]} at slot {slot}")
        if not np.any(values > 0):
            raise errors.EmptyHistogram()


def exponential_profile(delta: float, T: int) -> WeightProfile:
    """Profile with w[t] = delta^(t-1)
    Args:
        delta: Discount factor in [0, 1)
        T: Slots per resource allocation block
    Returns(WeightProfile): Exponential profile tagged with delta
    """
    if not 0 <= delta < 1:
        raise errors.DeltaOutOfRange(delta)
    if T < 1:
        raise errors.LengthMismatch(1, T, what="resource allocation block")
    weights = float(delta) ** np.arange(T, dtype=float)
    return WeightProfile(weights, kind=ProfileKind.EXPONENTIAL, delta=float(delta))


def truncate_histogram(bytes_by_deadline: Sequence[float], T: int) -> DeadlineHistogram:
    """Fit a histogram to T slots; deadlines beyond the block count in the last slot"""
    values = np.asarray(bytes_by_deadline, dtype=float)
    if len(values) <= T:
        return DeadlineHistogram(np.pad(values, (0, T - len(values))))
    folded = values[:T].copy()
    folded[-1] += values[T:].sum()
    return DeadlineHistogram(folded)


def profile_from_histogram(hist: DeadlineHistogram) -> WeightProfile:
    """Normalised survival function of the deadline histogram

    w[t] = S(t) / S(1) with S(t) the bytes due at slot t or later.
    """
    hist.validate()
    survival = np.cumsum(hist.bytes_by_deadline[::-1])[::-1]
    return WeightProfile(survival / survival[0], kind=ProfileKind.EMPIRICAL)


def load_histogram(path: Union[str, Path], T: int = None) -> DeadlineHistogram:
    """Read a `slot,bytes` CSV with contiguous slots starting at 1"""
    rows = utils.read_csv(path)
    if not rows or set(rows[0].keys()) != {"slot", "bytes"}:
        raise errors.ValidationError(f"{path}: expected header 'slot,bytes'")
    try:
        slots = [int(row["slot"]) for row in rows]
        values = [float(row["bytes"]) for row in rows]
    except (TypeError, ValueError) as err:
        raise errors.ValidationError(f"{path}: {err}") from err
    if slots != list(range(1, len(slots) + 1)):
        raise errors.ValidationError(f"{path}: slots must be contiguous from 1")
    log.debug("[WEIGHTS] Loaded histogram with %s slots from %s", len(values), path)
    if T is None:
        return DeadlineHistogram(values)
    return truncate_histogram(values, T)


def fit_exponential(profile: WeightProfile) -> float:
    """Discount factor of the exponential closest to the profile in log space

    Minimises sum((log w[t] - (t-1) log delta)^2) over the strictly
    positive weights.
    """
    weights = profile.weights
    positive = np.flatnonzero(weights > 0)
    if positive.size < 2:
        if profile.is_exponential:
            return float(profile.delta)
        raise errors.DegenerateProfile(int(positive.size))
    exponents = positive.astype(float)
    slope = float(np.dot(exponents, np.log(weights[positive])) / np.dot(exponents, exponents))
    delta = float(np.clip(np.exp(slope), 0.0, MAX_FITTED_DELTA))
    log.debug("[WEIGHTS] Fitted delta=%s on %s points", delta, positive.size)
    return delta
