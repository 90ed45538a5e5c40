import os
import sys
import numpy as np
import pytest
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from app.errors.exceptions import ConfigError, SchemaError
from app.ingest import (ari, clustering_cost, gen_gaussian_mixture, gen_mixed_clusters, load_csv, quality_report,
                        save_csv)
from app.medoids.clustering import exhaustive_medoid
from app.medoids.core import KTuple, MetricSpec, Point, cross_distances
from app.medoids.enums import ColumnKind, MetricKind
from test_api import fixture_path

L1 = MetricSpec(MetricKind.L1)
L2 = MetricSpec(MetricKind.L2)


def write(tmp_path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_load_fixture():
    data = load_csv(fixture_path('five_points.csv'))
    assert data.numeric[:, 0].tolist() == [90.0, 170.0, 60.0, 200.0, 190.0]
    assert data.schema.names == ('x',)
    assert data.labels is None


def test_round_trip_keeps_values_and_levels(tmp_path):
    source = write(tmp_path, 'in.csv',
                   "a,b,color,label\n1.5,2,red,0\n0.1,-3.25,blue,1\n7,8e-3,red,1\n")
    decl = ['numeric', 'numeric', 'categorical', 'label']
    first = load_csv(source, decl)
    out = str(tmp_path / 'out.csv')
    save_csv(first, out)
    second = load_csv(out, decl)
    assert np.array_equal(first.numeric, second.numeric)
    names_first = [first.schema.levels[0][code] for code in first.categorical[:, 0]]
    names_second = [second.schema.levels[0][code] for code in second.categorical[:, 0]]
    assert names_first == names_second == ['red', 'blue', 'red']
    assert second.labels.tolist() == [0, 1, 1]
    assert second.schema.mins == first.schema.mins
    assert second.schema.maxs == first.schema.maxs


def test_levels_in_order_of_first_appearance(tmp_path):
    data = load_csv(write(tmp_path, 'c.csv', "x,c\n1,red\n2,blue\n3,red\n4,green\n"))
    assert data.schema.kinds == (ColumnKind.NUMERIC, ColumnKind.CATEGORICAL)
    assert data.categorical[:, 0].tolist() == [0, 1, 0, 2]
    assert data.schema.levels == (('red', 'blue', 'green'),)


def test_mapping_declaration_skips_other_columns(tmp_path):
    path = write(tmp_path, 'm.csv', "id,x,y,group\nA,1,2,g1\nB,3,4,g2\n")
    data = load_csv(path, {'x': 'numeric', 'y': 'numeric', 'group': 'label'})
    assert data.numeric.shape == (2, 2)
    assert data.labels.tolist() == ['g1', 'g2']


def test_label_column_by_name(tmp_path):
    path = write(tmp_path, 'l.csv', "x,truth\n1,0\n2,1\n")
    data = load_csv(path, label_column='truth')
    assert data.numeric.shape == (2, 1)
    assert data.labels.tolist() == [0, 1]
    with pytest.raises(ConfigError):
        load_csv(path, label_column='missing')


@pytest.mark.parametrize('text', [
    "x,y\n1,2\n3\n",
    "x,y\n1,2\n3,4,5\n",
])
def test_ragged_rows_name_the_line(tmp_path, text):
    with pytest.raises(SchemaError) as info:
        load_csv(write(tmp_path, 'r.csv', text))
    assert info.value.row == 3


def test_unparseable_numeric_names_the_line(tmp_path):
    with pytest.raises(SchemaError) as info:
        load_csv(write(tmp_path, 'n.csv', "x,y\n1,2\n3,abc\n"), ['numeric', 'numeric'])
    assert info.value.row == 3
    assert 'abc' in str(info.value)


def test_bad_declarations(tmp_path):
    path = write(tmp_path, 'd.csv', "x,y\n1,2\n")
    with pytest.raises(ConfigError):
        load_csv(path, ['numeric'])
    with pytest.raises(ConfigError):
        load_csv(path, ['numeric', 'text'])
    with pytest.raises(ConfigError):
        load_csv(path, {'z': 'numeric'})
    with pytest.raises(SchemaError):
        load_csv(path, ['skip', 'skip'])


def test_empty_file(tmp_path):
    with pytest.raises(SchemaError):
        load_csv(write(tmp_path, 'e.csv', "x,y\n"))


def test_mixture_is_deterministic():
    a = gen_gaussian_mixture(3, 2, 50, 1.0, seed=1)
    b = gen_gaussian_mixture(3, 2, 50, 1.0, seed=1)
    c = gen_gaussian_mixture(3, 2, 50, 1.0, seed=2)
    assert np.array_equal(a.numeric, b.numeric)
    assert not np.array_equal(a.numeric, c.numeric)
    assert len(a) == 150
    assert np.bincount(a.labels).tolist() == [50, 50, 50]


def test_mixture_without_spread_collapses_clusters():
    data = gen_gaussian_mixture(4, 3, [5, 6, 7, 8], 0.0, seed=0)
    dist = cross_distances(L2, data, data)
    same = data.labels[:, None] == data.labels[None, :]
    assert np.all(dist[same] == 0.0)
    assert np.all(dist[~same] >= 10.0)


def test_single_blob_medoid_is_near_centre():
    data = gen_gaussian_mixture(1, 2, 500, 1.0, seed=3)
    point, _ = exhaustive_medoid(data, L2)
    assert np.linalg.norm(point.numeric) < 0.3


def test_generator_argument_checks():
    with pytest.raises(ValueError):
        gen_gaussian_mixture(0, 2, 10, 1.0, seed=0)
    with pytest.raises(ValueError):
        gen_gaussian_mixture(2, 2, [10], 1.0, seed=0)
    with pytest.raises(ValueError):
        gen_gaussian_mixture(2, 2, 10, -1.0, seed=0)


def test_mixed_clusters():
    data = gen_mixed_clusters(3, seed=1)
    assert data.numeric.shape == (300, 2)
    assert data.categorical.shape == (300, 1)
    assert set(np.unique(data.categorical)) <= {0, 1}
    assert data.schema.names == ('x0', 'x1', 'c0')
    # level probability rises with the cluster index
    rates = [data.categorical[data.labels == j, 0].mean() for j in range(3)]
    assert rates[0] < rates[2]


def test_ari():
    assert ari([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0)
    assert ari([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0)
    a, b = [0, 0, 0, 1, 1, 1], [0, 0, 1, 1, 2, 2]
    assert ari(a, b) == pytest.approx(8 / 33)
    assert ari(b, a) == pytest.approx(ari(a, b))
    with pytest.raises(ValueError):
        ari([0, 1], [0, 1, 1])


def test_clustering_cost():
    data = load_csv(fixture_path('five_points.csv'))
    assert clustering_cost(data, KTuple((Point.of(170),)), L1) == pytest.approx(48.0)
    assert clustering_cost(data, KTuple(tuple(data.points())), L1) == 0.0
    _, ecc = exhaustive_medoid(data, L1)
    for point in data.points():
        assert clustering_cost(data, KTuple((point,)), L1) >= ecc


def test_quality_report():
    data = gen_gaussian_mixture(2, 2, 40, 0.5, seed=4)
    medoid = KTuple.from_dataset(data, [0, 40])
    report = quality_report(data, medoid, L2, runtime_ms=12.5, distance_evals=99)
    assert report.ari == pytest.approx(1.0)
    assert report.runtime_ms == 12.5
    assert report.distance_evals == 99
    assert report.to_dict()['cost_kind'] == 'mean'
    unlabelled = quality_report(data.with_rows(data.numeric, None), medoid, L2)
    assert unlabelled.ari is None
