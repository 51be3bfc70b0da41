import numpy as np
import pytest

from dara_alloc import errors
from dara_alloc.metrics import gap_bound, normalized_rates, unreachable_sensors, utility
from dara_alloc.model import Allocation, RateVector
from dara_alloc.policies import decomposition_allocate
from dara_alloc.rate_alloc import Objective, feasibility_threshold, target_rates
from tests.builders import exponential_rab, make_rab, random_profile, random_rab, relabel


@pytest.mark.smoke
def test_utility_direct_formula():
    rab = make_rab([[1, 0.5], [1, 0.5]])
    report = utility(rab, Allocation([1, 2]))
    assert report.per_sensor_utility == pytest.approx((1.0, 0.5))
    assert report.objective_value == pytest.approx(0.25)
    assert report.gap_to_target is None


def test_utility_idle_sensor():
    rab = make_rab([[1, 0.5], [1, 0.5]])
    report = utility(rab, Allocation([1, 1]), Objective.WEIGHTED_SUM)
    assert report.per_sensor_utility[1] == 0.0
    assert report.objective_value == pytest.approx(0.75)


def test_utility_scales_with_qbar():
    base = utility(make_rab([[1, 0.5], [1, 0.5]]), Allocation([1, 2]))
    scaled = utility(make_rab([[1, 0.5], [1, 0.5]], qbar=3.0), Allocation([1, 2]))
    assert scaled.per_sensor_utility == pytest.approx([3 * q for q in base.per_sensor_utility])


def test_utility_gap_to_target(rab_half):
    report = utility(rab_half, Allocation([1, 2, 1, 2]), target=RateVector((1.0, 0.875)))
    assert report.gap_to_target == pytest.approx((0.25 / 1.875, -0.25 / 1.875))
    assert report.gap_bound == pytest.approx(0.5 ** 4)


def test_utility_no_bound_for_empirical(rab_quarter):
    assert utility(rab_quarter, Allocation([1, 2, 1])).gap_bound is None


def test_utility_target_dimension(rab_half):
    with pytest.raises(errors.TargetDimensionMismatch):
        utility(rab_half, Allocation([1, 2, 1, 2]), target=RateVector((1.0,)))


@pytest.mark.smoke
def test_normalized_rates_infinite():
    assert normalized_rates(0.5, None, (1.2, 0.8)).v == pytest.approx((0.6, 0.4))


def test_normalized_rates_zero_delta():
    assert normalized_rates(0.0, 7, RateVector((1.0, 0.0))).v == pytest.approx((1.0, 0.0))


def test_normalized_rates_finite():
    total = (1 - 0.99 ** 500) / 0.01
    rates = normalized_rates(0.99, 500, [total / 6] * 6)
    assert rates.v == pytest.approx([1 / 6] * 6)


def test_normalized_rates_delta_one():
    with pytest.raises(errors.DeltaOne):
        normalized_rates(1.0, None, (1.0,))


@pytest.mark.parametrize("delta,T,expected", [
    (0.99, 500, 6.57e-3),
    (0.0, 1, 0.0),
    (0.5, 10, 9.77e-4),
])
def test_gap_bound(delta, T, expected):
    assert gap_bound(delta, T) == pytest.approx(expected, rel=1e-3, abs=1e-12)


def test_unreachable_sensors(rab_half, caplog):
    report = utility(rab_half, Allocation([1, 1, 1, 1]), target=RateVector((1.0, 0.875)))
    assert unreachable_sensors(report) == [2]
    assert "miss their target" in caplog.text
    assert unreachable_sensors(report, bound=1.0) == []


def test_decomposition_normalised_rates_sum_to_one():
    rng = np.random.default_rng(15)
    for _ in range(30):
        N, T = int(rng.integers(1, 6)), int(rng.integers(1, 60))
        delta = float(rng.uniform(feasibility_threshold(N), 0.99))
        rab = exponential_rab(delta, N, T, h=list(rng.uniform(1, 300, size=N)))
        target = target_rates(rab, Objective.MAX_MIN)
        alloc = decomposition_allocate(delta, N, T, target).allocation
        assert sum(utility(rab, alloc).per_sensor_rate.v) == pytest.approx(1.0, abs=1e-12)


def test_maxmin_objective_ignores_labels():
    rng = np.random.default_rng(16)
    for _ in range(30):
        N, T = int(rng.integers(2, 6)), int(rng.integers(1, 30))
        rab = random_rab(rng, N, T)
        order = rng.permutation(N)
        new_id = np.empty(N, dtype=int)
        new_id[order] = np.arange(N) + 1
        slots = rng.integers(1, N + 1, size=T)
        base = utility(rab, Allocation(slots))
        moved = utility(relabel(rab, order), Allocation(new_id[slots - 1]))
        assert moved.objective_value == pytest.approx(base.objective_value, rel=1e-12)


def test_utility_linear_in_h():
    rng = np.random.default_rng(17)
    for _ in range(30):
        N, T = int(rng.integers(1, 6)), int(rng.integers(1, 30))
        profiles = [random_profile(rng, T) for _ in range(N)]
        h = rng.uniform(1, 300, size=N)
        factor = rng.uniform(0.1, 10, size=N)
        slots = Allocation(rng.integers(1, N + 1, size=T))
        base = utility(make_rab(profiles, h=list(h)), slots, Objective.WEIGHTED_SUM)
        scaled = utility(make_rab(profiles, h=list(h * factor)), slots, Objective.WEIGHTED_SUM)
        assert scaled.per_sensor_utility == pytest.approx(factor * base.per_sensor_utility,
                                                          rel=1e-12)
        common = utility(make_rab(profiles, h=list(h * factor[0])), slots,
                         Objective.WEIGHTED_SUM)
        assert common.objective_value == pytest.approx(factor[0] * base.objective_value,
                                                       rel=1e-12, abs=1e-12)
