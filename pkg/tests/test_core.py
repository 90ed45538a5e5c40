import os
import sys
import numpy as np
import pytest
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from app.errors.exceptions import ConfigError, SchemaError
from app.medoids.core import (Dataset, KTuple, MetricSpec, Point, Schema, cross_distances, distance,
                              min_distance, min_distances)
from app.medoids.enums import ColumnKind, MetricKind

L1 = MetricSpec(MetricKind.L1)
SQL2 = MetricSpec(MetricKind.SQUARED_L2)
GOWER = MetricSpec(MetricKind.GOWER)


@pytest.mark.parametrize('metric,a,b,expected', [
    (L1, Point.of(90), Point.of(170), 80.0),
    (SQL2, Point.of(0), Point.of(3), 9.0),
    (MetricSpec(MetricKind.L2), Point.of(0, 0), Point.of(3, 4), 5.0),
    (L1, Point.of(1, 2), Point.of(4, 6), 7.0),
])
def test_distance_values(metric, a, b, expected):
    assert distance(metric, a, b) == pytest.approx(expected)
    assert distance(metric, b, a) == pytest.approx(expected)


def test_gower_identical_mixed_points_is_zero():
    p = Point(numeric=(1.5, 2.0), categorical=(3,))
    assert distance(GOWER, p, p) == 0.0


def test_gower_weights():
    data = Dataset.from_arrays(numeric=[[0.0], [5.0], [10.0]], categorical=[[0], [1], [0]])
    assert cross_distances(GOWER, data, data)[0, 1] == pytest.approx(0.75)
    weighted = MetricSpec(MetricKind.GOWER, weights=(3.0, 1.0))
    assert cross_distances(weighted, data, data)[0, 1] == pytest.approx(0.625)
    # same categorical code, numeric half of the range
    assert cross_distances(GOWER, data, data)[0, 2] == pytest.approx(0.5)


def test_gower_zero_range_with_differing_values():
    schema = Schema(kinds=(ColumnKind.NUMERIC,), mins=(1.0,), maxs=(1.0,))
    with pytest.raises(SchemaError):
        distance(GOWER, Point.of(1), Point.of(2), schema=schema)
    assert distance(GOWER, Point.of(1), Point.of(1), schema=schema) == 0.0


def test_gower_weight_count_must_match_columns():
    data = Dataset.from_values([0, 1, 2])
    with pytest.raises(SchemaError):
        cross_distances(MetricSpec(MetricKind.GOWER, weights=(1.0, 1.0)), data, data)


def test_min_distance():
    assert min_distance(Point.of(5), KTuple((Point.of(3), Point.of(10))), L1) == pytest.approx(2.0)
    candidate = KTuple((Point.of(0), Point.of(10), Point.of(100)))
    assert min_distance(Point.of(7), candidate, SQL2) == pytest.approx(9.0)


def test_min_distances_match_scalar_path():
    rng = np.random.default_rng(4)
    data = Dataset.from_arrays(numeric=rng.normal(size=(50, 3)))
    candidate = KTuple.from_dataset(data, [3, 17])
    vector = min_distances(L1, data, candidate)
    scalar = [min_distance(p, candidate, L1, schema=data.schema) for p in data.points()]
    assert np.array_equal(vector, np.array(scalar))


def test_arity_mismatch():
    with pytest.raises(SchemaError):
        distance(L1, Point.of(1), Point.of(1, 2))
    with pytest.raises(SchemaError):
        KTuple((Point.of(1), Point.of(1, 2)))
    with pytest.raises(SchemaError):
        Dataset.from_points([Point.of(1), Point.of(1, 2)])
    data = Dataset.from_values([1, 2, 3])
    with pytest.raises(SchemaError):
        min_distances(L1, data, KTuple((Point.of(1, 2),)))


def test_numeric_metric_rejects_categorical_columns():
    a = Point(numeric=(1.0,), categorical=(0,))
    b = Point(numeric=(2.0,), categorical=(1,))
    with pytest.raises(SchemaError):
        distance(L1, a, b)


def test_invalid_points_and_datasets():
    with pytest.raises(SchemaError):
        Dataset.from_values([])
    with pytest.raises(SchemaError):
        Dataset.from_points([])
    with pytest.raises(SchemaError):
        Point.of(float('nan'))
    with pytest.raises(SchemaError):
        Point()
    with pytest.raises(SchemaError):
        Dataset.from_values([1.0, float('inf')])
    with pytest.raises(SchemaError):
        Dataset.from_values([1, 2], labels=[0])


def test_dataset_arrays_are_read_only():
    data = Dataset.from_values([1, 2, 3])
    with pytest.raises(ValueError):
        data.numeric[0, 0] = 5.0


def test_take_keeps_schema_and_allows_duplicates():
    data = Dataset.from_values([90, 170, 60, 200, 190], labels=[0, 1, 0, 1, 1])
    sample = data.take([1, 1, 4])
    assert sample.schema == data.schema
    assert sample.numeric[:, 0].tolist() == [170.0, 170.0, 190.0]
    assert sample.labels.tolist() == [1, 1, 1]
    assert data.slice(1, 3).numeric[:, 0].tolist() == [170.0, 60.0]


def test_ktuple_replace_and_dict_forms():
    t = KTuple((Point.of(1), Point.of(2)))
    swapped = t.replace(1, Point.of(7))
    assert swapped.slots == (Point.of(1), Point.of(7))
    assert t.slots == (Point.of(1), Point.of(2))
    assert swapped.to_list() == [{'numeric': [1.0], 'categorical': []}, {'numeric': [7.0], 'categorical': []}]
    assert Point.from_dict(5) == Point.of(5)
    assert Point.from_dict([1, 2]) == Point.of(1, 2)
    assert Point.from_dict({'numeric': [1], 'categorical': [2]}) == Point(numeric=(1.0,), categorical=(2,))


def test_schema_round_trip():
    data = Dataset.from_arrays(numeric=[[0.0], [4.0]], categorical=[[1], [0]], names=['x', 'c'],
                               levels=[('a', 'b')])
    assert Schema.from_dict(data.schema.to_dict()) == data.schema


@pytest.mark.parametrize('name,kind', [
    ('manhattan', MetricKind.L1),
    ('l2', MetricKind.L2),
    ('squared-l2', MetricKind.SQUARED_L2),
    ('sql2', MetricKind.SQUARED_L2),
    ('Gower', MetricKind.GOWER),
])
def test_metric_parse(name, kind):
    assert MetricSpec.parse(name).kind == kind


def test_metric_parse_rejects_bad_input():
    with pytest.raises(ConfigError):
        MetricSpec.parse('cosine')
    with pytest.raises(ConfigError):
        MetricSpec.parse('gower', weights=[1.0, -1.0])
    with pytest.raises(ConfigError):
        MetricSpec.parse('gower', weights=[0.0, 0.0])
