import math
from fractions import Fraction

import numpy as np
import pytest

from sestrack import (
    AR1,
    MA1,
    MAq,
    Constant,
    Linear,
    Sinusoid,
    Table,
    WhiteGaussian,
    autocovariance,
    sample_path,
    trend_sequence,
    trend_value,
)

MODELS = [
    WhiteGaussian(1.3),
    MA1(2.0),
    MA1(-0.4, 0.7),
    AR1(0.2),
    AR1(0.85, 2.0),
    MAq((0.5, -0.3), 1.2),
]


# ---------------------------------------------------------------------------
# autocovariance values
# ---------------------------------------------------------------------------

def test_ma1_lag_one_value():
    # a / (1 + a^2) at a = 2 is exactly 2/5
    assert autocovariance(MA1(2.0), 1) == pytest.approx(0.4, abs=1e-15)
    assert autocovariance(MA1(2.0), 0) == 1.0
    assert autocovariance(MA1(2.0), 2) == 0.0
    assert autocovariance(MA1(2.0), -1) == pytest.approx(0.4, abs=1e-15)


def test_white_noise_off_lag_zero():
    assert autocovariance(WhiteGaussian(1.0), 3) == 0.0
    assert autocovariance(WhiteGaussian(2.5), 0) == 2.5


def test_ar1_stationary_variance():
    expected = float(Fraction(1, 1) / (1 - Fraction(1, 5) ** 2))  # 1 / (1 - 0.04)
    assert autocovariance(AR1(0.2), 0) == pytest.approx(expected, abs=1e-12)
    assert autocovariance(AR1(0.2), 3) == pytest.approx(expected * 0.2**3, rel=1e-12)


def test_ma1_negative_coefficient():
    expected = float(Fraction(-4, 10) / (1 + Fraction(4, 10) ** 2))  # -10/29
    assert autocovariance(MA1(-0.4), 1) == pytest.approx(expected, abs=1e-12)


def test_maq_matches_brute_force():
    rng = np.random.default_rng(7)
    coeffs = tuple(rng.uniform(-1, 1, size=4))
    model = MAq(coeffs, 1.7)
    b = (1.0,) + coeffs
    for k in range(7):
        expected = 1.7 * sum(
            b[j] * b[j + k] for j in range(len(b) - k) if j + k < len(b)
        ) if k < len(b) else 0.0
        assert model.gamma(k) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_maq_unnormalized_variance():
    model = MAq((0.5, -0.3), 2.0)
    assert model.gamma(0) == pytest.approx(2.0 * (1 + 0.25 + 0.09), rel=1e-12)


@pytest.mark.parametrize("model", MODELS)
def test_evenness_and_dominance(model):
    g0 = model.gamma(0)
    assert g0 >= 0.0
    for k in range(-10, 11):
        assert autocovariance(model, k) == autocovariance(model, -k)
        assert abs(autocovariance(model, k)) <= g0 + 1e-15


def test_validation():
    with pytest.raises(ValueError):
        AR1(0.0)
    with pytest.raises(ValueError):
        AR1(1.0)
    with pytest.raises(ValueError):
        WhiteGaussian(-1.0)
    with pytest.raises(ValueError):
        MAq(())


# ---------------------------------------------------------------------------
# trends
# ---------------------------------------------------------------------------

def test_linear_first_step_is_start():
    assert trend_value(Linear(2.0, 0.1), 1) == 2.0
    assert trend_value(Linear(2.0, 0.1), 11) == pytest.approx(3.0, rel=1e-12)


def test_sinusoid_starts_at_phase():
    assert trend_value(Sinusoid(1.0, math.pi / 1000, 0.0), 1) == 0.0


def test_constant_everywhere():
    assert trend_value(Constant(5.0), 1) == 5.0
    assert trend_value(Constant(5.0), 12345) == 5.0


def test_table_lookup_and_errors():
    table = Table((1.0, 2.5, 2.0))
    assert trend_value(table, 2) == 2.5
    with pytest.raises(IndexError):
        trend_value(table, 4)
    with pytest.raises(ValueError):
        trend_value(table, 0)
    with pytest.raises(IndexError):
        trend_sequence(table, 4)


def test_lipschitz_constants():
    assert Constant(9.0).lipschitz_constant == 0.0
    assert Linear(0.0, -0.25).lipschitz_constant == 0.25
    assert Sinusoid(2.0, 0.01).lipschitz_constant == pytest.approx(0.02)
    assert Table((0.0, 1.0, 0.4)).lipschitz_constant == pytest.approx(1.0)
    assert Table((3.0,)).lipschitz_constant == 0.0


def test_sequence_matches_pointwise():
    for trend in (Linear(2.0, 0.1), Sinusoid(1.5, 0.01, 0.4), Constant(-2.0)):
        seq = trend_sequence(trend, 50)
        assert seq == pytest.approx([trend_value(trend, t) for t in range(1, 51)])


# ---------------------------------------------------------------------------
# path simulation
# ---------------------------------------------------------------------------

def test_same_seed_same_path():
    a = sample_path(AR1(0.3), Linear(0.0, 0.1), 200, seed=77)
    b = sample_path(AR1(0.3), Linear(0.0, 0.1), 200, seed=77)
    assert np.array_equal(a.observations, b.observations)
    assert not np.array_equal(
        a.observations, sample_path(AR1(0.3), Linear(0.0, 0.1), 200, seed=78).observations
    )


def test_zero_noise_path_is_trend():
    path = sample_path(WhiteGaussian(0.0), Sinusoid(1.0, 0.01), 100, seed=1)
    assert np.array_equal(path.observations, path.trend)


def test_path_is_frozen():
    path = sample_path(WhiteGaussian(1.0), Constant(0.0), 10, seed=3)
    with pytest.raises(ValueError):
        path.observations[0] = 99.0


def _bartlett_se(model, k: int, n: int) -> float:
    # large-lag window is plenty: every model here has gamma ~ 0 past lag 60
    var = sum(
        model.gamma(j) ** 2 + model.gamma(j + k) * model.gamma(j - k)
        for j in range(-80, 81)
    )
    return math.sqrt(var / n)


def _sample_autocov(residuals: np.ndarray, k: int) -> float:
    centered = residuals - residuals.mean()
    return float((centered[: len(centered) - k] * centered[k:]).mean())


@pytest.mark.parametrize(
    "model", [WhiteGaussian(1.0), MA1(0.7), MA1(-0.4), AR1(0.5), MAq((0.5, -0.3))]
)
def test_empirical_autocovariance_consistency(model):
    n = 10**6
    path = sample_path(model, Constant(0.0), n, seed=101)
    residuals = path.residuals()
    for k in range(6):
        estimate = _sample_autocov(residuals, k)
        se = _bartlett_se(model, k, n)
        assert abs(estimate - model.gamma(k)) <= 4.0 * se, (k, estimate, model.gamma(k))


def test_ar1_lag_one_against_analytic():
    model = AR1(0.2)
    n = 10**6
    path = sample_path(model, Constant(0.0), n, seed=55)
    estimate = _sample_autocov(path.residuals(), 1)
    se = _bartlett_se(model, 1, n)
    assert abs(estimate - 0.2 * model.gamma(0)) <= 3.0 * se


@pytest.mark.parametrize("model", [AR1(0.6), MA1(1.5)])
def test_stationary_start(model):
    reps = 10**4
    first = np.empty(reps)
    late = np.empty(reps)
    for r in range(reps):
        path = sample_path(model, Constant(0.0), 1000, seed=9_000_000 + r)
        first[r] = path.observations[0]
        late[r] = path.observations[999]
    g0 = model.gamma(0)
    se = g0 * math.sqrt(2.0 / reps)
    assert abs(first.var() - g0) <= 4.0 * se
    assert abs(late.var() - g0) <= 4.0 * se


def test_residual_mean_near_zero_over_replications():
    total = 0.0
    count = 0
    for r in range(400):
        path = sample_path(MA1(0.8), Linear(1.0, 0.05), 50, seed=777 + r)
        total += path.residuals().sum()
        count += 50
    se = math.sqrt(MA1(0.8).gamma(0) / count) * 2.0  # crude bound, correlation <= doubles it
    assert abs(total / count) <= 4.0 * se


def test_burn_in_shifts_stream_only():
    base = sample_path(AR1(0.4), Constant(0.0), 50, seed=5)
    burned = sample_path(AR1(0.4), Constant(0.0), 50, seed=5, burn_in=10)
    assert len(burned.observations) == 50
    assert not np.array_equal(base.observations, burned.observations)
    # burn-in consumes the leading draws of the same stream
    longer = sample_path(AR1(0.4), Constant(0.0), 60, seed=5)
    assert np.array_equal(burned.observations, longer.observations[10:])


def test_sample_path_validation():
    with pytest.raises(ValueError):
        sample_path(WhiteGaussian(1.0), Constant(0.0), 0, seed=1)
    with pytest.raises(ValueError):
        sample_path(WhiteGaussian(1.0), Constant(0.0), 10, seed=1, burn_in=-1)
