import numpy as np
import pytest

from dara_alloc import errors
from dara_alloc.model import ProfileKind, WeightProfile
from dara_alloc.weights import (DeadlineHistogram, exponential_profile, fit_exponential,
                                load_histogram, profile_from_histogram, truncate_histogram)


@pytest.fixture()
def histogram_csv(tmp_path):
    path = tmp_path / "deadlines.csv"
    path.write_text("slot,bytes\n1,4\n2,2\n3,2\n")
    return path


@pytest.mark.smoke
@pytest.mark.parametrize("delta,T,expected", [
    (0.0, 3, [1, 0, 0]),
    (0.5, 4, [1, 0.5, 0.25, 0.125]),
    (0.99, 2, [1, 0.99]),
])
def test_exponential_profile(delta, T, expected):
    profile = exponential_profile(delta, T)
    assert profile.weights == pytest.approx(expected)
    assert profile.kind is ProfileKind.EXPONENTIAL
    assert profile.delta == delta


@pytest.mark.parametrize("delta", [-0.1, 1.0, 1.5])
def test_exponential_profile_delta_range(delta):
    with pytest.raises(errors.DeltaOutOfRange):
        exponential_profile(delta, 3)


@pytest.mark.smoke
@pytest.mark.parametrize("values,expected", [
    ([4, 2, 2], [1, 0.5, 0.5]),
    ([1, 0, 0], [1, 0, 0]),
    ([1, 1, 1, 1], [1, 0.75, 0.5, 0.25]),
])
def test_profile_from_histogram(values, expected):
    profile = profile_from_histogram(DeadlineHistogram(values))
    assert profile.weights == pytest.approx(expected)
    assert profile.kind is ProfileKind.EMPIRICAL


def test_empty_histogram():
    with pytest.raises(errors.EmptyHistogram):
        profile_from_histogram(DeadlineHistogram([0, 0, 0]))
    with pytest.raises(errors.EmptyHistogram):
        profile_from_histogram(DeadlineHistogram([]))


def test_negative_histogram():
    with pytest.raises(errors.ValidationError):
        profile_from_histogram(DeadlineHistogram([1, -1, 2]))


def test_truncate_histogram_folds_tail():
    hist = truncate_histogram([1, 2, 3, 4], 2)
    assert list(hist.bytes_by_deadline) == [1, 9]


def test_truncate_histogram_pads():
    hist = truncate_histogram([1, 2], 4)
    assert list(hist.bytes_by_deadline) == [1, 2, 0, 0]


def test_load_histogram(histogram_csv):
    hist = load_histogram(histogram_csv)
    assert list(hist.bytes_by_deadline) == [4, 2, 2]
    assert load_histogram(histogram_csv, T=2).T == 2


def test_load_histogram_non_contiguous(tmp_path):
    path = tmp_path / "gap.csv"
    path.write_text("slot,bytes\n1,4\n3,2\n")
    with pytest.raises(errors.ValidationError):
        load_histogram(path)


def test_load_histogram_header(tmp_path):
    path = tmp_path / "header.csv"
    path.write_text("t,b\n1,4\n")
    with pytest.raises(errors.ValidationError):
        load_histogram(path)


def test_load_histogram_missing_file(tmp_path):
    with pytest.raises(errors.ValidationError):
        load_histogram(tmp_path / "missing.csv")


def test_load_histogram_invalid_utf8(tmp_path):
    path = tmp_path / "binary.csv"
    path.write_bytes(b"slot,bytes\n1,\xff\xfe\n")
    with pytest.raises(errors.ValidationError):
        load_histogram(path)


@pytest.mark.smoke
@pytest.mark.parametrize("delta", [0.0, 0.3, 0.9, 0.995])
def test_fit_exponential_recovers_delta(delta):
    assert fit_exponential(exponential_profile(delta, 10)) == pytest.approx(delta, abs=1e-9)


def test_fit_exponential_log_least_squares():
    assert fit_exponential(WeightProfile([1, 0.5, 0.5])) == pytest.approx(2 ** -0.6)


def test_fit_exponential_degenerate():
    with pytest.raises(errors.DegenerateProfile):
        fit_exponential(WeightProfile([1, 0, 0, 0]))


def test_random_histograms_give_valid_profiles():
    rng = np.random.default_rng(7)
    for _ in range(50):
        values = rng.integers(0, 5, size=rng.integers(1, 20)).astype(float)
        values[rng.integers(0, len(values))] += 1
        weights = profile_from_histogram(DeadlineHistogram(values)).weights
        assert weights[0] == 1.0
        assert np.all(np.diff(weights) <= 1e-12)
        assert np.all(weights >= 0)


def test_histogram_profile_ignores_scale():
    rng = np.random.default_rng(13)
    for _ in range(30):
        values = rng.integers(0, 50, size=rng.integers(1, 25)).astype(float)
        values[0] += 1
        scale = float(rng.uniform(1e-3, 1e4))
        base = profile_from_histogram(DeadlineHistogram(values)).weights
        scaled = profile_from_histogram(DeadlineHistogram(values * scale)).weights
        assert scaled == pytest.approx(base, rel=1e-9, abs=1e-12)
