"""
Request-level logic for the medoids blueprint and the command line.

Functions here turn loosely typed parameter mappings (JSON bodies, argparse
namespaces turned into dicts) into typed calls on the clustering modules, so
routes and CLI commands stay thin.
"""

import os
import time
import logging

from werkzeug.utils import secure_filename

from app import ingest
from app.errors.exceptions import ConfigError, SchemaError
from .clustering import McpamConfig, MedoidResult, exhaustive_indices, mcpam, mcpam_single, pam
from .core import Dataset, KTuple, MetricSpec, Point, Schema
from .eccentricity import sample_ecc
from .enums import Algorithm

logger = logging.getLogger(__name__)


def _get(values: dict, key: str, default, cast):
    value = values.get(key)
    if value is None or value == '':
        return default
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid value for {key}: {value!r}") from None


def _flag(value) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ('1', 'true', 'yes', 'on')
    return bool(value)


def mcpam_config_from(values: dict, defaults: dict) -> McpamConfig:
    """McpamConfig from request values, falling back to MEDOIDS_* settings."""
    return McpamConfig(
        k=_get(values, 'k', 1, int),
        tau=_get(values, 'tau', defaults.get('MEDOIDS_TAU', 0.0), float),
        n_start=_get(values, 'n_start', defaults.get('MEDOIDS_N_START', 1000), int),
        growth=_get(values, 'growth', defaults.get('MEDOIDS_GROWTH', 10), int),
        n_max=_get(values, 'n_max', defaults.get('MEDOIDS_N_MAX'), int),
        alpha=_get(values, 'alpha', defaults.get('MEDOIDS_ALPHA', 0.05), float),
        seed=_get(values, 'seed', defaults.get('MEDOIDS_SEED', 0), int),
        practical_opts=_get(values, 'practical_opts', defaults.get('MEDOIDS_PRACTICAL_OPTS', False), _flag),
        threads=_get(values, 'threads', defaults.get('MEDOIDS_THREADS', 0), int),
    ).validate()


def metric_from(values: dict, defaults: dict) -> MetricSpec:
    return MetricSpec.parse(values.get('metric') or defaults.get('MEDOIDS_DEFAULT_METRIC', 'L1'),
                            values.get('weights'))


def get_data_dir(defaults: dict) -> str:
    data_dir = defaults.get('DATA_DIR') or 'data'
    os.makedirs(data_dir, exist_ok=True)
    return data_dir


def list_datasets(defaults: dict) -> list[dict]:
    data_dir = get_data_dir(defaults)
    files = []
    for name in sorted(os.listdir(data_dir)):
        if not name.lower().endswith('.csv'):
            continue
        stat = os.stat(os.path.join(data_dir, name))
        files.append({'name': name, 'mtime': int(stat.st_mtime), 'size': stat.st_size})
    return files


def stored_dataset(name: str, columns, defaults: dict) -> Dataset:
    """CSV file ``name`` from DATA_DIR, read with the optional column declaration."""
    filename = secure_filename(str(name))
    if not filename.lower().endswith('.csv'):
        filename = filename + '.csv'
    path = os.path.join(get_data_dir(defaults), filename)
    if not os.path.isfile(path):
        raise ConfigError(f"No dataset named {name!r}")
    if isinstance(columns, str):
        columns = [kind.strip() for kind in columns.split(',')]
    return ingest.load_csv(path, columns)


def dataset_from(values: dict, defaults: dict | None = None) -> Dataset:
    """
    Dataset from a JSON body: a stored ``dataset`` name, ``points`` (numbers,
    numeric lists or point objects) or column blocks ``numeric``/``categorical``;
    an optional ``schema`` fixes the ranges used by Gower.
    """
    if values.get('dataset'):
        return stored_dataset(values['dataset'], values.get('columns'), defaults or {})
    schema = Schema.from_dict(values['schema']) if values.get('schema') else None
    labels = values.get('labels')
    if values.get('points') is not None:
        points = [Point.from_dict(p) for p in values['points']]
        if schema is None:
            return Dataset.from_points(points, labels=labels)
        parsed = Dataset.from_points(points, labels=labels)
        return Dataset.from_arrays(numeric=parsed.numeric, categorical=parsed.categorical, labels=labels,
                                   schema=schema)
    if values.get('numeric') is None and values.get('categorical') is None:
        raise SchemaError("Request needs 'points' or 'numeric'/'categorical' columns")
    return Dataset.from_arrays(numeric=values.get('numeric'), categorical=values.get('categorical'),
                               labels=labels, schema=schema)


def ktuple_from(values, key: str = 'medoid') -> KTuple:
    slots = values.get(key)
    if not slots:
        raise SchemaError(f"Request needs '{key}'")
    if not isinstance(slots, list):
        slots = [slots]
    return KTuple(tuple(Point.from_dict(slot) for slot in slots))


def run_algorithm(data: Dataset, algo: Algorithm, cfg: McpamConfig, metric: MetricSpec,
                  single: bool = False, exhaustive_cap: int = 200000) -> MedoidResult:
    if algo == Algorithm.MCPAM:
        return mcpam_single(data, cfg, metric) if single else mcpam(data, cfg, metric)
    if algo == Algorithm.PAM:
        return pam(data, cfg.k, metric, tol=cfg.tau, alpha=cfg.alpha, seed=cfg.seed)
    indices, _ = exhaustive_indices(data, metric, cfg.k, cap=exhaustive_cap)
    medoid = KTuple.from_dataset(data, indices)
    return MedoidResult(medoid=medoid, ecc=sample_ecc(medoid, data, metric, cfg.alpha), trace=[],
                        total_distance_evals=len(data) * len(data) * cfg.k, indices=tuple(indices),
                        algorithm='exhaustive')


def cluster(values: dict, defaults: dict) -> dict:
    return cluster_dataset(dataset_from(values, defaults), values, defaults)


def cluster_dataset(data: Dataset, values: dict, defaults: dict) -> dict:
    """Run the requested algorithm and return the result body with its runtime."""
    cfg = mcpam_config_from(values, defaults)
    metric = metric_from(values, defaults)
    algo = Algorithm.parse(values.get('algo') or 'mcpam')
    start = time.perf_counter()
    result = run_algorithm(data, algo, cfg, metric, single=_flag(values.get('single', False)),
                           exhaustive_cap=defaults.get('MEDOIDS_EXHAUSTIVE_CAP', 200000))
    runtime_ms = (time.perf_counter() - start) * 1000.0
    logger.info("%s on %d points finished in %.1f ms", algo.name, len(data), runtime_ms)
    body = result.to_dict(full_trace=_flag(values.get('full_trace', False)))
    body['runtime_ms'] = runtime_ms
    body['config'] = cfg.to_dict()
    body['metric'] = metric.to_dict()
    return body


def eccentricity(values: dict, defaults: dict) -> dict:
    data = dataset_from(values, defaults)
    candidate = ktuple_from(values, 'candidate')
    alpha = _get(values, 'alpha', defaults.get('MEDOIDS_ALPHA', 0.05), float)
    return sample_ecc(candidate, data, metric_from(values, defaults), alpha).to_dict()


def quality(values: dict, defaults: dict) -> dict:
    data = dataset_from(values, defaults)
    if data.labels is None:
        raise SchemaError("Quality needs ground truth 'labels'")
    report = ingest.quality_report(data, ktuple_from(values), metric_from(values, defaults),
                                   runtime_ms=_get(values, 'runtime_ms', 0.0, float),
                                   distance_evals=_get(values, 'distance_evals', 0, int))
    return report.to_dict()
