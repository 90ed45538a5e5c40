import os
import sys
import math
import numpy as np
import pytest
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from app.errors.exceptions import SchemaError
from app.medoids.core import Dataset, KTuple, MetricSpec, Point
from app.medoids.eccentricity import (analytic_ecc_gaussian_l1, analytic_ecc_gaussian_sql2, estimate_from_moments,
                                      gaussian_l1_medoid_ecc, sample_ecc, z_quantile)
from app.medoids.enums import MetricKind

L1 = MetricSpec(MetricKind.L1)
FIVE = Dataset.from_values([90, 170, 60, 200, 190])


@pytest.mark.parametrize('candidate,expected', [(170, 48.0), (90, 64.0), (190, 52.0)])
def test_full_sample_eccentricity(candidate, expected):
    est = sample_ecc(KTuple((Point.of(candidate),)), FIVE, L1)
    assert est.mean == pytest.approx(expected)
    assert est.n == 5
    assert est.lo < est.mean < est.hi


def test_singleton_sample_has_zero_width():
    est = sample_ecc(KTuple((Point.of(3),)), Dataset.from_values([3]), L1)
    assert est.mean == 0.0
    assert est.lo == est.hi == 0.0

    est = sample_ecc(KTuple((Point.of(0),)), Dataset.from_values([3]), L1)
    assert est.mean == 3.0
    assert est.half_width == 0.0


def test_variance_is_unbiased_over_n():
    est = sample_ecc(KTuple((Point.of(0),)), Dataset.from_values([1, 2, 3, 4]), L1)
    assert est.mean == pytest.approx(2.5)
    assert est.var_of_mean == pytest.approx((5.0 / 3.0) / 4.0)
    assert est.half_width == pytest.approx(z_quantile(0.05) * math.sqrt((5.0 / 3.0) / 4.0))


def test_k_tuple_uses_nearest_slot():
    est = sample_ecc(KTuple((Point.of(60), Point.of(190))), FIVE, L1)
    # 30, 20, 0, 10, 0
    assert est.mean == pytest.approx(12.0)


def test_estimate_from_moments_rejects_empty():
    with pytest.raises(SchemaError):
        estimate_from_moments(0.0, 0.0, 0, 0.05)


@pytest.mark.parametrize('alpha,z', [(0.05, 1.959964), (0.3173, 1.0), (0.01, 2.575829)])
def test_z_quantile(alpha, z):
    assert z_quantile(alpha) == pytest.approx(z, abs=1e-4)


@pytest.mark.parametrize('alpha', [0.0, 1.0, -0.1, 1.5])
def test_z_quantile_rejects_out_of_range(alpha):
    with pytest.raises(ValueError):
        z_quantile(alpha)


def test_analytic_gaussian_l1():
    assert analytic_ecc_gaussian_l1(100, 100, 100) == pytest.approx(79.788, abs=1e-3)
    assert analytic_ecc_gaussian_l1(90, 100, 100) == pytest.approx(80.187, abs=1e-3)
    assert analytic_ecc_gaussian_l1(100, 100, 100) == pytest.approx(gaussian_l1_medoid_ecc(100))
    # linear in sigma at a fixed standardised offset
    assert analytic_ecc_gaussian_l1(2, 0, 2) == pytest.approx(2 * analytic_ecc_gaussian_l1(1, 0, 1))
    with pytest.raises(ValueError):
        analytic_ecc_gaussian_l1(0, 0, 0)


def test_analytic_gaussian_sql2():
    assert analytic_ecc_gaussian_sql2(3, 1, 2) == pytest.approx(8.0)
    assert analytic_ecc_gaussian_sql2(1, 1, 2) == pytest.approx(4.0)


def test_large_sample_matches_analytic_value():
    rng = np.random.default_rng(11)
    data = Dataset.from_values(rng.normal(100, 100, size=200000))
    est = sample_ecc(KTuple((Point.of(90),)), data, L1)
    assert abs(est.mean - analytic_ecc_gaussian_l1(90, 100, 100)) < 4 * math.sqrt(est.var_of_mean)


@pytest.mark.slow
def test_interval_coverage():
    rng = np.random.default_rng(2024)
    truth = gaussian_l1_medoid_ecc(1.0)
    candidate = KTuple((Point.of(0.0),))
    hits = 0
    for _ in range(1000):
        est = sample_ecc(candidate, Dataset.from_values(rng.standard_normal(1000)), L1)
        hits += est.lo <= truth <= est.hi
    assert hits / 1000 >= 0.92
