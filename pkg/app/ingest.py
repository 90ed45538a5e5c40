"""CSV loading and saving, synthetic datasets and clustering quality."""

import re
import math
import time
import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd
from sklearn.metrics import adjusted_rand_score

from app.errors.exceptions import ConfigError, SchemaError
from app.medoids.clustering import assign_labels
from app.medoids.core import Dataset, KTuple, MetricSpec, min_distances
from app.utils import substream

logger = logging.getLogger(__name__)

NUMERIC = 'numeric'
CATEGORICAL = 'categorical'
LABEL = 'label'
SKIP = 'skip'
_DECL_KINDS = (NUMERIC, CATEGORICAL, LABEL, SKIP)
# pandas reports 1-based file lines; the header is line 1
_PARSER_LINE = re.compile(r'line (\d+)')


def _normalise_decl(columns: list[str], schema_decl) -> dict[str, str]:
    if schema_decl is None:
        return {}
    if isinstance(schema_decl, dict):
        decl = {str(k): str(v).lower() for k, v in schema_decl.items()}
        unknown = set(decl) - set(columns)
        if unknown:
            raise ConfigError(f"Schema declares unknown columns: {sorted(unknown)}")
    else:
        kinds = [str(v).lower() for v in schema_decl]
        if len(kinds) != len(columns):
            raise ConfigError(f"Schema declares {len(kinds)} columns, file has {len(columns)}")
        decl = dict(zip(columns, kinds))
    bad = {k: v for k, v in decl.items() if v not in _DECL_KINDS}
    if bad:
        raise ConfigError(f"Unknown column kinds {bad}; use one of {', '.join(_DECL_KINDS)}")
    if sum(1 for v in decl.values() if v == LABEL) > 1:
        raise ConfigError("At most one label column")
    return decl


def _numeric_column(frame: pd.DataFrame, name: str) -> np.ndarray:
    raw = frame[name]
    values = pd.to_numeric(raw, errors='coerce')
    bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=float, na_value=np.nan))
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise SchemaError(f"column {name!r}: cannot parse {raw.iloc[row]!r} as a finite number", row=row + 2)
    return values.to_numpy(dtype=np.float64)


def _label_column(raw: pd.Series) -> np.ndarray:
    values = pd.to_numeric(raw, errors='coerce')
    if not values.isna().any() and np.all(values == np.round(values)):
        return values.to_numpy(dtype=np.int64)
    return raw.to_numpy(dtype=str)


def load_csv(path, schema_decl=None, label_column: str | None = None) -> Dataset:
    """
    Read a CSV file with a header row.

    ``schema_decl`` maps column names to numeric, categorical, label or skip
    (or lists the kinds in column order); columns a mapping leaves out are
    skipped. Without it a column named ``label`` is the label column and
    every other column is numeric when all its values parse, categorical
    otherwise. ``label_column`` names the label column when no declaration
    covers it. Categorical levels are coded in order of first appearance.
    Errors name the file line (the header is line 1).
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        raise SchemaError(f"ragged row: {e}", row=int(match.group(1)) if match else None) from None
    except pd.errors.EmptyDataError:
        raise SchemaError("CSV file is empty") from None
    if frame.empty:
        raise SchemaError("CSV file has no data rows")
    short = frame.isna().any(axis=1).to_numpy()
    if short.any():
        raise SchemaError("ragged row: too few fields", row=int(np.flatnonzero(short)[0]) + 2)

    columns = list(frame.columns)
    decl = _normalise_decl(columns, schema_decl)
    if label_column is not None:
        if label_column not in columns:
            raise ConfigError(f"No column named {label_column!r}; columns are {columns}")
        decl.setdefault(label_column, LABEL)
    kinds = {}
    for name in columns:
        if name in decl:
            kinds[name] = decl[name]
        elif isinstance(schema_decl, dict):
            kinds[name] = SKIP
        elif label_column is None and name.strip().lower() == LABEL:
            kinds[name] = LABEL
        else:
            parsed = pd.to_numeric(frame[name], errors='coerce')
            kinds[name] = NUMERIC if not parsed.isna().any() else CATEGORICAL

    numeric_names = [c for c in columns if kinds[c] == NUMERIC]
    categorical_names = [c for c in columns if kinds[c] == CATEGORICAL]
    label_names = [c for c in columns if kinds[c] == LABEL]
    if not numeric_names and not categorical_names:
        raise SchemaError("No numeric or categorical columns to cluster on")

    numeric = np.column_stack([_numeric_column(frame, c) for c in numeric_names]) \
        if numeric_names else np.zeros((len(frame), 0))
    levels = []
    codes = []
    for name in categorical_names:
        column_codes, uniques = pd.factorize(frame[name], sort=False)
        codes.append(column_codes)
        levels.append(tuple(str(u) for u in uniques))
    categorical = np.column_stack(codes) if codes else np.zeros((len(frame), 0), dtype=np.int64)
    labels = _label_column(frame[label_names[0]]) if label_names else None

    logger.info("Loaded %d rows from %s (%d numeric, %d categorical)", len(frame), path,
                len(numeric_names), len(categorical_names))
    return Dataset.from_arrays(numeric=numeric, categorical=categorical, labels=labels,
                               names=numeric_names + categorical_names, levels=levels)


def save_csv(data: Dataset, path) -> None:
    """Write a dataset with a header; categorical codes are written as their level names when known."""
    schema = data.schema
    names = list(schema.names)
    if len(names) != schema.numeric_count + schema.categorical_count:
        names = [f"x{j}" for j in range(schema.numeric_count)] + \
                [f"c{j}" for j in range(schema.categorical_count)]
    columns = {}
    for j in range(schema.numeric_count):
        columns[names[j]] = data.numeric[:, j]
    for j in range(schema.categorical_count):
        codes = data.categorical[:, j]
        if j < len(schema.levels) and schema.levels[j]:
            columns[names[schema.numeric_count + j]] = np.asarray(schema.levels[j], dtype=object)[codes]
        else:
            columns[names[schema.numeric_count + j]] = codes
    if data.labels is not None:
        columns[LABEL] = data.labels
    # repr-exact floats so a reload reproduces every value
    pd.DataFrame(columns).to_csv(path, index=False, float_format='%.17g')


def _cluster_sizes(clusters: int, points_per_cluster) -> list[int]:
    if clusters < 1:
        raise ValueError(f"clusters must be at least 1, got {clusters}")
    if isinstance(points_per_cluster, int):
        sizes = [points_per_cluster] * clusters
    else:
        sizes = [int(s) for s in points_per_cluster]
        if len(sizes) != clusters:
            raise ValueError(f"Got {len(sizes)} cluster sizes for {clusters} clusters")
    if min(sizes) < 1:
        raise ValueError("Every cluster needs at least one point")
    return sizes


def _grid_centres(clusters: int, dim: int, separation: float) -> np.ndarray:
    side = math.ceil(clusters ** (1.0 / dim) - 1e-9)
    return np.array([np.unravel_index(c, (side,) * dim) for c in range(clusters)], dtype=float) * separation


def gen_gaussian_mixture(clusters: int, dim: int, points_per_cluster, spread: float, seed: int,
                         separation: float = 10.0) -> Dataset:
    """
    Isotropic Gaussian blobs with centres on a grid ``separation`` apart;
    overlap grows as ``spread / separation`` grows. Labels are cluster indices.
    """
    if dim < 1:
        raise ValueError(f"dim must be at least 1, got {dim}")
    if spread < 0:
        raise ValueError(f"spread must be non-negative, got {spread}")
    sizes = _cluster_sizes(clusters, points_per_cluster)
    rng = substream(seed, 0)
    centres = _grid_centres(clusters, dim, separation)
    blocks = [centre + spread * rng.standard_normal((size, dim)) for centre, size in zip(centres, sizes)]
    labels = np.repeat(np.arange(clusters), sizes)
    return Dataset.from_arrays(numeric=np.vstack(blocks), labels=labels,
                               names=[f"x{j}" for j in range(dim)])


def gen_mixed_clusters(clusters: int, seed: int, points_per_cluster=100, spread: float = 1.0,
                       separation: float = 6.0) -> Dataset:
    """
    Two numeric columns from per-cluster Gaussians plus one binary categorical
    column whose level probability differs per cluster.
    """
    sizes = _cluster_sizes(clusters, points_per_cluster)
    rng = substream(seed, 0)
    centres = _grid_centres(clusters, 2, separation)
    probabilities = (np.arange(clusters) + 1.0) / (clusters + 1.0)
    numeric = []
    categorical = []
    for centre, size, p in zip(centres, sizes, probabilities):
        numeric.append(centre + spread * rng.standard_normal((size, 2)))
        categorical.append(rng.binomial(1, p, size=size))
    return Dataset.from_arrays(numeric=np.vstack(numeric), categorical=np.concatenate(categorical),
                               labels=np.repeat(np.arange(clusters), sizes),
                               names=['x0', 'x1', 'c0'], levels=[('0', '1')])


def ari(labels_a, labels_b) -> float:
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"Label vectors differ in length: {a.shape[0]} and {b.shape[0]}")
    if a.shape[0] < 2:
        raise ValueError("ARI needs at least two points")
    return float(adjusted_rand_score(a, b))


def clustering_cost(data: Dataset, medoid: KTuple, metric: MetricSpec) -> float:
    """Mean distance from each point to its nearest medoid slot."""
    return float(min_distances(metric, data, medoid).mean())


@dataclass(frozen=True)
class QualityReport:
    ari: float | None
    clustering_cost: float
    runtime_ms: float
    distance_evals: int
    cost_kind: str = 'mean'

    def to_dict(self) -> dict:
        return asdict(self)


def quality_report(data: Dataset, medoid: KTuple, metric: MetricSpec, labels=None,
                   runtime_ms: float = 0.0, distance_evals: int = 0) -> QualityReport:
    """
    Cost of ``medoid`` on ``data`` and, when ground truth labels are known
    (given or carried by the dataset), the ARI of nearest-medoid assignment.
    """
    start = time.perf_counter()
    truth = labels if labels is not None else data.labels
    cost = clustering_cost(data, medoid, metric)
    score = ari(truth, assign_labels(data, medoid, metric)) if truth is not None else None
    elapsed = (time.perf_counter() - start) * 1000.0
    return QualityReport(ari=score, clustering_cost=cost, runtime_ms=runtime_ms or elapsed,
                         distance_evals=distance_evals or len(data) * medoid.k)
