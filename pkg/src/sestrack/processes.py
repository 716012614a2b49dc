"""Trend-stationary process models and seeded path simulation.

An observed series decomposes as ``x_t = m*_t + eps_t`` where the trend
``m*_t`` is a deterministic sequence and the noise ``eps_t`` is zero mean
and weakly stationary with autocovariance ``gamma(k) = cov(eps_t,
eps_{t+k})``.  Everything here is 1-indexed: entry ``i`` of an array holds
step ``t = i + 1``.  Plot captions that count from t = 0 are mapped by
evaluating the trend formula at ``t - 1``.

Noise variants:

* ``WhiteGaussian`` - independent N(0, variance) draws.
* ``MA1`` - normalized first-order moving average
  ``(eta_t + a * eta_{t-1}) / sqrt(1 + a^2)``, so gamma(0) equals the
  innovation variance.
* ``AR1`` - first-order autoregression ``eps_{t+1} = theta * eps_t + eta_t``
  with theta in (0, 1), started from the exact stationary law (no burn-in
  needed; one is still available as an option).
* ``MAq`` - un-normalized moving average of order q with coefficients
  b_1..b_q and implicit b_0 = 1, so gamma(0) = variance * sum_j b_j^2.

Zero innovation variance is accepted and produces deterministic paths,
which the exact-recursion oracles rely on.  Every variant draws a fixed
number of extra initial innovations so that ``eps_1`` already follows the
stationary distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.signal import lfilter

from .seeding import make_generator


def _check_variance(value: float) -> None:
    if not (math.isfinite(value) and value >= 0.0):
        raise ValueError(f"innovation variance must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class Autocovariance:
    """Even autocovariance function, evaluated by integer lag.

    ``summable`` is True when sum_k |gamma(k)| is finite by construction.
    ``weighted_tail``, when present, evaluates ``sum_{k>=1} gamma(k) *
    beta^k`` in closed form for beta in (0, 1); generic instances leave it
    None and consumers fall back to truncated summation.
    """

    fn: Callable[[int], float]
    summable: bool = True
    weighted_tail: Callable[[float], float] | None = None

    def __call__(self, lag: int) -> float:
        return float(self.fn(abs(int(lag))))

    @property
    def variance(self) -> float:
        return float(self.fn(0))


@dataclass(frozen=True)
class WhiteGaussian:
    """Independent Gaussian noise with the given variance."""

    variance: float = 1.0

    def __post_init__(self) -> None:
        _check_variance(self.variance)

    def gamma(self, lag: int) -> float:
        return self.variance if lag == 0 else 0.0

    def autocovariance_fn(self) -> Autocovariance:
        return Autocovariance(self.gamma, summable=True, weighted_tail=lambda beta: 0.0)

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return math.sqrt(self.variance) * rng.standard_normal(n)


@dataclass(frozen=True)
class MA1:
    """Normalized first-order moving average.

    ``eps_t = (eta_t + coefficient * eta_{t-1}) / sqrt(1 + coefficient^2)``
    with iid N(0, innovation_variance) innovations.  The sqrt normalization
    makes gamma(0) equal to the innovation variance and
    gamma(1) = innovation_variance * coefficient / (1 + coefficient^2);
    all longer lags vanish.  One extra eta_0 is drawn so eps_1 is already
    stationary.
    """

    coefficient: float
    innovation_variance: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.coefficient):
            raise ValueError("MA1 coefficient must be finite")
        _check_variance(self.innovation_variance)

    def gamma(self, lag: int) -> float:
        lag = abs(lag)
        if lag == 0:
            return self.innovation_variance
        if lag == 1:
            a = self.coefficient
            return self.innovation_variance * a / (1.0 + a * a)
        return 0.0

    def autocovariance_fn(self) -> Autocovariance:
        return Autocovariance(
            self.gamma, summable=True, weighted_tail=lambda beta: self.gamma(1) * beta
        )

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        eta = math.sqrt(self.innovation_variance) * rng.standard_normal(n + 1)
        return (eta[1:] + self.coefficient * eta[:-1]) / math.sqrt(
            1.0 + self.coefficient**2
        )


@dataclass(frozen=True)
class AR1:
    """First-order autoregression ``eps_{t+1} = theta * eps_t + eta_t``.

    ``theta`` must lie strictly inside (0, 1).  gamma(0) =
    innovation_variance / (1 - theta^2) and gamma(k) = theta^|k| gamma(0).
    eps_1 is drawn from the exact stationary law, then the recursion runs
    in a single C-level filter pass.
    """

    theta: float
    innovation_variance: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.theta < 1.0):
            raise ValueError(f"AR1 coefficient must lie in (0, 1), got {self.theta}")
        _check_variance(self.innovation_variance)

    def gamma(self, lag: int) -> float:
        g0 = self.innovation_variance / (1.0 - self.theta**2)
        return g0 * self.theta ** abs(lag)

    def autocovariance_fn(self) -> Autocovariance:
        def tail(beta: float) -> float:
            x = self.theta * beta
            return self.gamma(0) * x / (1.0 - x)

        return Autocovariance(self.gamma, summable=True, weighted_tail=tail)

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        first = math.sqrt(self.gamma(0)) * rng.standard_normal()
        if n == 1:
            return np.array([first])
        eta = math.sqrt(self.innovation_variance) * rng.standard_normal(n - 1)
        driven = np.concatenate(([first], eta))
        return lfilter([1.0], [1.0, -self.theta], driven)


@dataclass(frozen=True)
class MAq:
    """Un-normalized moving average of order q.

    ``eps_t = eta_t + sum_j coefficients[j-1] * eta_{t-j}`` with implicit
    leading coefficient 1, so gamma(k) = innovation_variance *
    sum_j b_j b_{j+k} over the overlap (b_0 = 1).  Unlike MA1 this variant
    is not variance-normalized: gamma(0) = innovation_variance * sum b_j^2.
    """

    coefficients: tuple[float, ...]
    innovation_variance: float = 1.0

    def __post_init__(self) -> None:
        coeffs = tuple(float(b) for b in self.coefficients)
        if not coeffs:
            raise ValueError("MAq needs at least one coefficient")
        if not all(math.isfinite(b) for b in coeffs):
            raise ValueError("MAq coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)
        _check_variance(self.innovation_variance)

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def gamma(self, lag: int) -> float:
        lag = abs(lag)
        if lag > self.order:
            return 0.0
        b = (1.0,) + self.coefficients
        return self.innovation_variance * sum(
            b[j] * b[j + lag] for j in range(self.order - lag + 1)
        )

    def autocovariance_fn(self) -> Autocovariance:
        def tail(beta: float) -> float:
            return sum(self.gamma(k) * beta**k for k in range(1, self.order + 1))

        return Autocovariance(self.gamma, summable=True, weighted_tail=tail)

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        eta = math.sqrt(self.innovation_variance) * rng.standard_normal(n + self.order)
        kernel = np.array((1.0,) + self.coefficients)
        return np.convolve(eta, kernel, mode="valid")


NoiseModel = Union[WhiteGaussian, MA1, AR1, MAq]


def autocovariance(noise: NoiseModel, lag: int) -> float:
    """gamma(|lag|) of the noise model; total on all integer lags."""
    return noise.gamma(abs(int(lag)))


def _check_step(t: int) -> int:
    t = int(t)
    if t < 1:
        raise ValueError(f"step index must be >= 1, got {t}")
    return t


@dataclass(frozen=True)
class Constant:
    """Flat trend; one-step increments are all zero."""

    level: float

    @property
    def lipschitz_constant(self) -> float:
        return 0.0

    def value(self, t: int) -> float:
        _check_step(t)
        return self.level

    def sequence(self, horizon: int) -> np.ndarray:
        return np.full(horizon, float(self.level))


@dataclass(frozen=True)
class Linear:
    """Ramp ``start + slope * (t - 1)``; the increment bound is |slope|."""

    start: float
    slope: float

    @property
    def lipschitz_constant(self) -> float:
        return abs(self.slope)

    def value(self, t: int) -> float:
        return self.start + self.slope * (_check_step(t) - 1)

    def sequence(self, horizon: int) -> np.ndarray:
        return self.start + self.slope * np.arange(horizon, dtype=float)


@dataclass(frozen=True)
class Sinusoid:
    """``amplitude * sin(rate * (t - 1) + phase)``.

    |sin x - sin y| <= |x - y| certifies |amplitude * rate| as the
    one-step increment bound.
    """

    amplitude: float
    rate: float
    phase: float = 0.0

    @property
    def lipschitz_constant(self) -> float:
        return abs(self.amplitude * self.rate)

    def value(self, t: int) -> float:
        return self.amplitude * math.sin(self.rate * (_check_step(t) - 1) + self.phase)

    def sequence(self, horizon: int) -> np.ndarray:
        return self.amplitude * np.sin(
            self.rate * np.arange(horizon, dtype=float) + self.phase
        )


@dataclass(frozen=True)
class Table:
    """Explicit 1-indexed trend values; the increment bound is the largest
    consecutive difference."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("Table trend needs at least one value")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("Table trend values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def lipschitz_constant(self) -> float:
        if len(self.values) == 1:
            return 0.0
        return max(abs(b - a) for a, b in zip(self.values, self.values[1:]))

    def value(self, t: int) -> float:
        t = _check_step(t)
        if t > len(self.values):
            raise IndexError(
                f"table trend has {len(self.values)} entries, step {t} requested"
            )
        return self.values[t - 1]

    def sequence(self, horizon: int) -> np.ndarray:
        if horizon > len(self.values):
            raise IndexError(
                f"table trend has {len(self.values)} entries, horizon {horizon} requested"
            )
        return np.array(self.values[:horizon])


TrendSpec = Union[Constant, Linear, Sinusoid, Table]


def trend_value(trend: TrendSpec, t: int) -> float:
    """Deterministic trend value m*_t (t >= 1)."""
    return float(trend.value(t))


def trend_sequence(trend: TrendSpec, horizon: int) -> np.ndarray:
    """Vector of m*_1 .. m*_horizon."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    return np.asarray(trend.sequence(int(horizon)), dtype=float)


@dataclass(frozen=True)
class PathSample:
    """One simulated path: observations, the trend that generated them, and
    the full description needed to regenerate it."""

    observations: np.ndarray
    trend: np.ndarray
    seed: int
    noise: NoiseModel
    trend_spec: TrendSpec

    def __post_init__(self) -> None:
        # value object: freeze the arrays so instances can be shared freely
        self.observations.flags.writeable = False
        self.trend.flags.writeable = False

    @property
    def horizon(self) -> int:
        return len(self.observations)

    def residuals(self) -> np.ndarray:
        return self.observations - self.trend


def sample_path(
    noise: NoiseModel,
    trend: TrendSpec,
    horizon: int,
    seed: int,
    burn_in: int = 0,
) -> PathSample:
    """Simulate x_1..x_horizon = m*_t + eps_t, deterministically in ``seed``.

    ``burn_in`` extra noise steps are generated and discarded before step 1.
    Since every variant already starts stationary this does not change the
    path law, only the draw layout; the default is 0.
    """
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    rng = make_generator(seed)
    eps = np.asarray(noise._draw(rng, horizon + burn_in), dtype=float)
    if burn_in:
        eps = eps[burn_in:]
    m_star = trend_sequence(trend, horizon)
    return PathSample(m_star + eps, m_star, int(seed), noise, trend)
