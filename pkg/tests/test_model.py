import numpy as np
import pytest

from dara_alloc import errors
from dara_alloc.model import (Allocation, ProfileKind, RabConfig, RateVector, SensorSpec,
                              WeightProfile, rates_of_allocation, validate_allocation,
                              validate_profile, validate_rab)
from dara_alloc.weights import exponential_profile
from tests.builders import make_rab, random_rab, relabel


@pytest.mark.smoke
def test_valid_rab(rab_quarter):
    validate_rab(rab_quarter)
    assert rab_quarter.N == 2
    assert rab_quarter.weights.shape == (2, 3)


@pytest.mark.smoke
def test_non_monotone_weights():
    with pytest.raises(errors.NonMonotoneWeights) as err:
        validate_rab(make_rab([[1, 0.5, 0.6], [1, 0.5, 0.25]]))
    assert err.value.slot == 2
    assert err.value.sensor == 1


def test_alpha_sum_mismatch():
    with pytest.raises(errors.AlphaSumMismatch) as err:
        validate_rab(make_rab([[1, 0.5], [1, 0.5]], alpha=[0.6, 0.6]))
    assert err.value.total == pytest.approx(1.2)


def test_bad_normalization():
    with pytest.raises(errors.BadNormalization):
        validate_profile(WeightProfile([0.9, 0.5]))


def test_weight_out_of_range():
    with pytest.raises(errors.WeightOutOfRange) as err:
        validate_profile(WeightProfile([1, 0.5, -0.1]))
    assert err.value.slot == 3


def test_profile_length_mismatch():
    rab = RabConfig(T=3, sensors=[
        SensorSpec(id=1, alpha=1.0, qbar=1.0, h=1.0, profile=WeightProfile([1, 0.5]))])
    with pytest.raises(errors.LengthMismatch):
        validate_rab(rab)


def test_invalid_sensor_ids():
    profile = WeightProfile([1, 0.5])
    rab = RabConfig(T=2, sensors=[
        SensorSpec(id=1, alpha=0.5, qbar=1.0, h=1.0, profile=profile),
        SensorSpec(id=3, alpha=0.5, qbar=1.0, h=1.0, profile=profile)])
    with pytest.raises(errors.InvalidSensorIds):
        validate_rab(rab)


def test_invalid_h():
    with pytest.raises(errors.InvalidSensor) as err:
        validate_rab(make_rab([[1, 0.5], [1, 0.5]], h=[1.0, 0.0]))
    assert err.value.sensor == 2
    assert err.value.field == "h"


def test_ordered_by_id():
    first = WeightProfile([1, 1])
    second = WeightProfile([1, 0])
    rab = RabConfig(T=2, sensors=[
        SensorSpec(id=2, alpha=0.5, qbar=1.0, h=1.0, profile=second),
        SensorSpec(id=1, alpha=0.5, qbar=1.0, h=1.0, profile=first)])
    assert np.array_equal(rab.weights, [[1, 1], [1, 0]])


@pytest.mark.smoke
def test_rates_direct_sum(rab_quarter):
    rates = rates_of_allocation(rab_quarter, Allocation([1, 2, 1]))
    assert rates.r == pytest.approx((1.25, 0.5))
    assert rates.v == pytest.approx((1.25 / 1.75, 0.5 / 1.75))


def test_rates_single_sensor():
    rab = make_rab([[1, 0.7, 0.2, 0.1]])
    rates = rates_of_allocation(rab, Allocation([1, 1, 1, 1]))
    assert rates.r == pytest.approx((2.0,))


def test_rates_exponential(rab_half):
    rates = rates_of_allocation(rab_half, Allocation([1, 2, 1, 2]))
    assert rates.r == pytest.approx((1.25, 0.625))


def test_allocation_unknown_sensor(rab_half):
    with pytest.raises(errors.UnknownSensor) as err:
        validate_allocation(rab_half, Allocation([1, 2, 3, 1]))
    assert err.value.slot == 3


def test_allocation_length(rab_half):
    with pytest.raises(errors.LengthMismatch):
        rates_of_allocation(rab_half, Allocation([1, 2]))


def test_allocation_counts():
    assert Allocation([1, 2, 2, 1, 1]).counts(3) == (3, 2, 0)


def test_common_delta(rab_half, rab_quarter):
    assert rab_half.common_delta == 0.5
    assert rab_quarter.common_delta is None
    mixed = make_rab([exponential_profile(0.5, 3), exponential_profile(0.6, 3)])
    assert mixed.common_delta is None


def test_profile_equality_and_tail():
    profile = exponential_profile(0.5, 3)
    assert profile == WeightProfile([1, 0.5, 0.25], kind=ProfileKind.EXPONENTIAL, delta=0.5)
    assert profile != WeightProfile([1, 0.5, 0.25])
    assert profile.tail() == pytest.approx([0.75, 0.25, 0.0])
    assert not profile.weights.flags.writeable


def test_rate_vector_of():
    rates = RateVector.of([1.0, 3.0], totals=[2.0, 4.0])
    assert rates.v == (0.5, 0.75)
    assert rates.total == 4.0


def test_rates_account_for_every_slot():
    rng = np.random.default_rng(11)
    for _ in range(50):
        N, T = int(rng.integers(1, 6)), int(rng.integers(1, 40))
        rab = random_rab(rng, N, T)
        slots = rng.integers(1, N + 1, size=T)
        rates = rates_of_allocation(rab, Allocation(slots))
        earned = rab.weights[slots - 1, np.arange(T)].sum()
        assert sum(rates.r) == pytest.approx(earned, rel=1e-12, abs=1e-12)
        assert np.all(rates.as_array() <= rab.weights.sum(axis=1) + 1e-12)


def test_rates_follow_relabelled_sensors():
    rng = np.random.default_rng(12)
    for _ in range(30):
        N, T = int(rng.integers(2, 6)), int(rng.integers(1, 30))
        rab = random_rab(rng, N, T)
        order = rng.permutation(N)
        new_id = np.empty(N, dtype=int)
        new_id[order] = np.arange(N) + 1
        slots = rng.integers(1, N + 1, size=T)
        rates = rates_of_allocation(rab, Allocation(slots))
        moved = rates_of_allocation(relabel(rab, order), Allocation(new_id[slots - 1]))
        assert moved.r == pytest.approx([rates.r[old] for old in order], rel=1e-12)
        assert moved.v == pytest.approx([rates.v[old] for old in order], rel=1e-12)
