import io
import os
import sys
import json
import pandas as pd
import pytest
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from app.cli import EXIT_OK, EXIT_USAGE, main
from test_api import fixture_path
from test_distributed import start_workers

TWO_GROUPS = "x,label\n0,0\n1,0\n2,0\n100,1\n101,1\n102,1\n"


def run_json(capsys, argv) -> dict:
    assert main(argv) == EXIT_OK
    return json.loads(capsys.readouterr().out)


def run_csv(capsys, argv) -> pd.DataFrame:
    assert main(argv) == EXIT_OK
    return pd.read_csv(io.StringIO(capsys.readouterr().out))


def test_cluster_pam(capsys):
    body = run_json(capsys, ['cluster', '--input', fixture_path('five_points.csv'), '--algo', 'pam', '-q'])
    assert body['medoid'] == [{'numeric': [170.0], 'categorical': []}]
    assert body['ecc']['mean'] == pytest.approx(48.0)
    assert 'runtime_ms' not in body


@pytest.mark.parametrize('algo', ['mcpam', 'exhaustive'])
def test_cluster_output_is_reproducible(capsys, algo):
    argv = ['cluster', '--input', fixture_path('seven_points.csv'), '--algo', algo, '--seed', '3', '--n-start', '4']
    first = run_json(capsys, argv)
    second = run_json(capsys, argv)
    assert first == second


def test_cluster_timing_flag(capsys):
    body = run_json(capsys, ['cluster', '--input', fixture_path('five_points.csv'), '--algo', 'pam', '--timing'])
    assert body['runtime_ms'] >= 0


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(['cluster'])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(['cluster', '--input', 'x.csv', '--algo', 'kmeans'])
    assert info.value.code == 2


def test_bad_values_exit_with_usage_code(caplog):
    assert main(['cluster', '--input', fixture_path('five_points.csv'), '--metric', 'cosine']) == EXIT_USAGE
    assert 'cosine' in caplog.text
    assert main(['cluster', '--input', fixture_path('missing.csv')]) == 1


def test_bounds_constants(capsys):
    body = run_json(capsys, ['bounds', '--family', 'chi2'])
    assert body['constants']['c2'] == pytest.approx(0.25)
    assert body['constants']['c6'] == pytest.approx(243.9, rel=1e-3)

    body = run_json(capsys, ['bounds', '--family', fixture_path('chi2_family.json'), '--m', '100', '--n', '10000'])
    assert body['rate']['ub5']['conditions_ok'] is True


def test_bounds_tolerance(capsys, caplog):
    body = run_json(capsys, ['bounds', '--m', '1000000', '--p', '5'])
    assert body['tolerance']['n'] == pytest.approx(4.106e7, rel=1e-3)

    assert main(['bounds', '--m', '1000000', '--p', '200']) == EXIT_USAGE
    assert 'p_max' in caplog.text
    assert main(['bounds', '--p', '5']) == EXIT_USAGE


def test_bounds_grid_csv(tmp_path):
    out = str(tmp_path / 'grid.csv')
    assert main(['bounds', '--n', '10000', '--delta-grid', '0.05:5:50', '--out', out]) == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 50
    assert frame['ub3_gen'].is_monotonic_decreasing


def test_verify_single_arm_has_zero_error(capsys):
    frame = run_csv(capsys, ['verify-mme', '--means', '4', '--n', '10,100', '--trials', '20'])
    assert frame['n'].tolist() == [10, 100]
    assert (frame['empirical_err'] == 0).all()


def test_verify_two_gaussian_arms(capsys):
    frame = run_csv(capsys, ['verify-mme', '--family', 'gaussian', '--means', '1,2', '--n', '1',
                             '--trials', '20000', '--seed', '1'])
    row = frame.iloc[0]
    assert abs(row['empirical_err'] - 0.2398) <= 3 * row['se']


def test_verify_leaves_verdict_empty_without_conditions(capsys):
    frame = run_csv(capsys, ['verify-mme', '--means', 'linspace:100:1:10', '--n', '10', '--trials', '20'])
    assert not frame['conditions_ok'].iloc[0]
    assert frame['pass'].isna().all()


def test_master_with_loopback_workers(capsys):
    endpoints, threads = start_workers(2)
    body = run_json(capsys, ['master', '--input', fixture_path('seven_points.csv'), '--workers', ','.join(endpoints),
                             '--n-start', '3', '--seed', '1'])
    assert body['workers'] == endpoints
    assert body['algorithm'] == 'mcpam'
    assert len(body['medoid']) == 1
    for thread in threads:
        thread.join(timeout=10)


def test_quality_from_cluster_result(tmp_path, capsys):
    data = tmp_path / 'groups.csv'
    data.write_text(TWO_GROUPS, encoding='utf-8')
    result = str(tmp_path / 'result.json')
    assert main(['cluster', '--input', str(data), '--algo', 'pam', '--k', '2', '--out', result]) == EXIT_OK
    body = run_json(capsys, ['quality', '--input', str(data), '--result', result])
    assert body['ari'] == pytest.approx(1.0)
    assert body['clustering_cost'] == pytest.approx(4.0 / 6.0)

    assert main(['quality', '--input', str(data), '--result', result, '--labels-col', 'truth']) == EXIT_USAGE


def test_print_config(capsys):
    body = run_json(capsys, ['cluster', '--input', 'x.csv', '--k', '3', '--print-config'])
    assert body['command'] == 'cluster'
    assert body['values'] == {'input': 'x.csv', 'k': 3}
    assert body['settings']['MEDOIDS_N_START'] == 1000


def test_config_file_with_flag_override(tmp_path, capsys):
    data = tmp_path / 'groups.csv'
    data.write_text(TWO_GROUPS, encoding='utf-8')
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'k': 2, 'algo': 'pam', 'MEDOIDS_SEED': 4}), encoding='utf-8')
    body = run_json(capsys, ['cluster', '--input', str(data), '--config', str(config)])
    assert len(body['medoid']) == 2
    assert body['config']['seed'] == 4
    body = run_json(capsys, ['cluster', '--input', str(data), '--config', str(config), '--k', '1'])
    assert len(body['medoid']) == 1

    config.write_text('[1, 2]', encoding='utf-8')
    assert main(['cluster', '--input', str(data), '--config', str(config)]) == EXIT_USAGE
