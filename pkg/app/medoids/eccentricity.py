"""Sample eccentricity with a normal confidence interval, and analytic oracles."""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import norm

from app.errors.exceptions import SchemaError
from .core import Dataset, KTuple, MetricSpec, min_distances

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class EccEstimate:
    mean: float
    n: int
    var_of_mean: float
    half_width: float
    alpha: float

    @property
    def lo(self) -> float:
        return self.mean - self.half_width

    @property
    def hi(self) -> float:
        return self.mean + self.half_width

    def to_dict(self) -> dict:
        data = asdict(self)
        data.update(lo=self.lo, hi=self.hi)
        return data


def z_quantile(alpha: float) -> float:
    """
    z with Phi(z) = 1 - alpha/2.

    Uses ``scipy.special.ndtri`` (the Cephes rational approximation of the
    inverse normal cdf, accurate to about 1e-15).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return float(ndtri(1.0 - alpha / 2.0))


def moments(values: np.ndarray) -> tuple[float, float, int]:
    """(sum, sum of squares, count) of a 1-D array of distances."""
    return float(values.sum()), float(np.dot(values, values)), int(values.shape[0])


def bounds_from_moments(total, total_sq, count, z):
    """
    Mean, variance of the mean and half width from running sums.

    Works elementwise on numpy arrays so the swap search and the scalar path
    share one arithmetic. The variance is the unbiased s^2 divided by n; a
    single observation gives zero.
    """
    mean = total / count
    if count <= 1:
        zero = np.zeros_like(mean)
        return mean, zero, zero
    s2 = np.maximum(total_sq - total * mean, 0.0) / (count - 1)
    var_of_mean = s2 / count
    return mean, var_of_mean, z * np.sqrt(var_of_mean)


def estimate_from_moments(total: float, total_sq: float, count: int, alpha: float) -> EccEstimate:
    if count < 1:
        raise SchemaError("Eccentricity needs at least one sample point")
    mean, var_of_mean, half = bounds_from_moments(total, total_sq, count, z_quantile(alpha))
    return EccEstimate(mean=float(mean), n=int(count), var_of_mean=float(var_of_mean),
                       half_width=float(half), alpha=alpha)


def sample_ecc(candidate: KTuple, sample: Dataset, metric: MetricSpec,
               alpha: float = DEFAULT_ALPHA) -> EccEstimate:
    """Mean min-distance from ``sample`` to ``candidate`` with its interval."""
    if sample is None or len(sample) == 0:
        raise SchemaError("Eccentricity needs a non-empty sample")
    return estimate_from_moments(*moments(min_distances(metric, sample, candidate)), alpha=alpha)


def analytic_ecc_gaussian_l1(x: float, mu: float, sigma: float) -> float:
    """E|Y - x| for Y ~ Normal(mu, sigma^2)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    t = (x - mu) / sigma
    return sigma * (2.0 * norm.pdf(t) + t * (2.0 * norm.cdf(t) - 1.0))


def analytic_ecc_gaussian_sql2(x: float, mu: float, sigma: float) -> float:
    """E(Y - x)^2 for Y ~ Normal(mu, sigma^2); minimised at the mean."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return sigma * sigma + (x - mu) ** 2


def gaussian_l1_medoid_ecc(sigma: float) -> float:
    return sigma * math.sqrt(2.0 / math.pi)
