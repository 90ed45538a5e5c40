"""
Points, datasets, k-tuples and semi-metric evaluation.

Everything here is immutable after construction. Distances are computed with
``scipy.spatial.distance.cdist`` on numpy arrays; the scalar helpers
``distance`` and ``min_distance`` are thin wrappers over the same code path so
that scalar and vectorised results agree bit for bit.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from app.errors.exceptions import ConfigError, SchemaError
from .enums import ColumnKind, MetricKind

logger = logging.getLogger(__name__)

_CDIST_NAMES = {
    MetricKind.L1: 'cityblock',
    MetricKind.L2: 'euclidean',
    MetricKind.SQUARED_L2: 'sqeuclidean',
}


@dataclass(frozen=True)
class Point:
    numeric: tuple[float, ...] = ()
    categorical: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'numeric', tuple(float(v) for v in self.numeric))
        object.__setattr__(self, 'categorical', tuple(int(v) for v in self.categorical))
        if not all(math.isfinite(v) for v in self.numeric):
            raise SchemaError(f"Point has non-finite numeric value: {self.numeric}")
        if not self.numeric and not self.categorical:
            raise SchemaError("Point has no attributes")

    @classmethod
    def of(cls, *values: float) -> "Point":
        """Purely numeric point, e.g. ``Point.of(170)``."""
        return cls(numeric=values)

    def to_dict(self) -> dict:
        return {'numeric': list(self.numeric), 'categorical': list(self.categorical)}

    @classmethod
    def from_dict(cls, data) -> "Point":
        if isinstance(data, (int, float)):
            return cls.of(data)
        if isinstance(data, (list, tuple)):
            return cls(numeric=data)
        return cls(numeric=data.get('numeric', ()), categorical=data.get('categorical', ()))


@dataclass(frozen=True)
class Schema:
    """Column kinds plus observed numeric ranges used for Gower normalisation."""
    kinds: tuple[ColumnKind, ...]
    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    names: tuple[str, ...] = ()
    levels: tuple[tuple[str, ...], ...] = ()

    @property
    def numeric_count(self) -> int:
        return sum(1 for kind in self.kinds if kind == ColumnKind.NUMERIC)

    @property
    def categorical_count(self) -> int:
        return sum(1 for kind in self.kinds if kind == ColumnKind.CATEGORICAL)

    @property
    def ranges(self) -> np.ndarray:
        return np.asarray(self.maxs, dtype=float) - np.asarray(self.mins, dtype=float)

    def check_point(self, point: Point) -> None:
        if len(point.numeric) != self.numeric_count or len(point.categorical) != self.categorical_count:
            raise SchemaError(
                f"Point arity ({len(point.numeric)} numeric, {len(point.categorical)} categorical) "
                f"does not match schema ({self.numeric_count} numeric, {self.categorical_count} categorical)")

    def to_dict(self) -> dict:
        return {
            'kinds': [kind.name.lower() for kind in self.kinds],
            'mins': list(self.mins),
            'maxs': list(self.maxs),
            'names': list(self.names),
            'levels': [list(lv) for lv in self.levels],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Schema":
        return cls(
            kinds=tuple(ColumnKind[k.upper()] for k in data['kinds']),
            mins=tuple(float(v) for v in data['mins']),
            maxs=tuple(float(v) for v in data['maxs']),
            names=tuple(data.get('names', ())),
            levels=tuple(tuple(lv) for lv in data.get('levels', ())),
        )


def _as_2d(values, dtype, rows: int) -> np.ndarray:
    if values is None:
        return np.zeros((rows, 0), dtype=dtype)
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ordered, non-empty collection of points sharing one schema."""
    schema: Schema
    numeric: np.ndarray
    categorical: np.ndarray
    labels: np.ndarray | None = field(default=None)

    def __post_init__(self):
        rows = self.numeric.shape[0]
        if rows == 0:
            raise SchemaError("Dataset is empty")
        if self.categorical.shape[0] != rows:
            raise SchemaError("Numeric and categorical blocks differ in length")
        if self.numeric.shape[1] != self.schema.numeric_count or \
                self.categorical.shape[1] != self.schema.categorical_count:
            raise SchemaError("Dataset columns do not match schema")
        if not np.all(np.isfinite(self.numeric)):
            raise SchemaError("Dataset has non-finite numeric values")
        if self.labels is not None and len(self.labels) != rows:
            raise SchemaError("Label column length differs from point count")
        for arr in (self.numeric, self.categorical, self.labels):
            if arr is not None:
                arr.setflags(write=False)

    @classmethod
    def from_arrays(cls, numeric=None, categorical=None, labels=None,
                    names: Sequence[str] = (), levels: Sequence[Sequence[str]] = (),
                    schema: Schema | None = None) -> "Dataset":
        """Build a dataset, computing observed ranges unless a schema is given."""
        if numeric is None and categorical is None:
            raise SchemaError("Dataset needs numeric or categorical columns")
        rows = len(numeric) if numeric is not None else len(categorical)
        num = _as_2d(numeric, np.float64, rows).copy()
        cat = _as_2d(categorical, np.int64, rows).copy()
        if schema is None:
            if rows == 0:
                raise SchemaError("Dataset is empty")
            kinds = (ColumnKind.NUMERIC,) * num.shape[1] + (ColumnKind.CATEGORICAL,) * cat.shape[1]
            mins = tuple(float(v) for v in num.min(axis=0)) if num.shape[1] else ()
            maxs = tuple(float(v) for v in num.max(axis=0)) if num.shape[1] else ()
            schema = Schema(kinds=kinds, mins=mins, maxs=maxs, names=tuple(names),
                            levels=tuple(tuple(lv) for lv in levels))
        lab = None if labels is None else np.asarray(labels).copy()
        return cls(schema=schema, numeric=num, categorical=cat, labels=lab)

    @classmethod
    def from_values(cls, values: Iterable[float], labels=None) -> "Dataset":
        """One numeric column, e.g. ``Dataset.from_values([90, 170, 60])``."""
        return cls.from_arrays(numeric=np.asarray(list(values), dtype=np.float64), labels=labels)

    @classmethod
    def from_points(cls, points: Sequence[Point], labels=None) -> "Dataset":
        if not points:
            raise SchemaError("Dataset is empty")
        first = points[0]
        for row, point in enumerate(points):
            if len(point.numeric) != len(first.numeric) or len(point.categorical) != len(first.categorical):
                raise SchemaError("Point arity differs from the first point", row=row)
        numeric = np.array([p.numeric for p in points], dtype=np.float64).reshape(len(points), len(first.numeric))
        categorical = np.array([p.categorical for p in points], dtype=np.int64).reshape(len(points), len(first.categorical))
        return cls.from_arrays(numeric=numeric, categorical=categorical, labels=labels)

    def __len__(self) -> int:
        return self.numeric.shape[0]

    def point(self, index: int) -> Point:
        return Point(numeric=self.numeric[index], categorical=self.categorical[index])

    def points(self) -> list[Point]:
        return [self.point(i) for i in range(len(self))]

    def take(self, indices) -> "Dataset":
        """Rows by index (duplicates allowed); the schema and its ranges are kept."""
        idx = np.asarray(indices, dtype=np.int64)
        labels = None if self.labels is None else self.labels[idx]
        return Dataset(schema=self.schema, numeric=self.numeric[idx], categorical=self.categorical[idx],
                       labels=labels)

    def slice(self, start: int, stop: int) -> "Dataset":
        return self.take(np.arange(start, stop))

    def with_rows(self, numeric, categorical) -> "Dataset":
        """Rows given by value that reuse this dataset's schema."""
        rows = len(numeric) if numeric is not None else len(categorical)
        return Dataset(schema=self.schema,
                       numeric=_as_2d(numeric, np.float64, rows).reshape(rows, self.schema.numeric_count),
                       categorical=_as_2d(categorical, np.int64, rows).reshape(rows, self.schema.categorical_count))


@dataclass(frozen=True)
class KTuple:
    """A candidate k-medoid: k points held by value."""
    slots: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, 'slots', tuple(self.slots))
        if not self.slots:
            raise SchemaError("KTuple needs at least one slot")
        first = self.slots[0]
        for slot in self.slots[1:]:
            if len(slot.numeric) != len(first.numeric) or len(slot.categorical) != len(first.categorical):
                raise SchemaError("KTuple slots have different arity")

    @property
    def k(self) -> int:
        return len(self.slots)

    @classmethod
    def from_dataset(cls, data: Dataset, indices: Iterable[int]) -> "KTuple":
        return cls(tuple(data.point(int(i)) for i in indices))

    def replace(self, slot: int, point: Point) -> "KTuple":
        slots = list(self.slots)
        slots[slot] = point
        return KTuple(tuple(slots))

    def as_rows(self, schema: Schema) -> tuple[np.ndarray, np.ndarray]:
        for slot in self.slots:
            schema.check_point(slot)
        numeric = np.array([s.numeric for s in self.slots], dtype=np.float64).reshape(self.k, schema.numeric_count)
        categorical = np.array([s.categorical for s in self.slots], dtype=np.int64).reshape(self.k, schema.categorical_count)
        return numeric, categorical

    def to_list(self) -> list[dict]:
        return [slot.to_dict() for slot in self.slots]


@dataclass(frozen=True)
class MetricSpec:
    kind: MetricKind = MetricKind.L1
    # Gower only; one weight per column in schema order, default equal
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.weights is not None:
            object.__setattr__(self, 'weights', tuple(float(w) for w in self.weights))
            if any(w < 0 for w in self.weights) or not any(w > 0 for w in self.weights):
                raise ConfigError("Metric weights must be non-negative and not all zero")

    @classmethod
    def parse(cls, name: str, weights=None) -> "MetricSpec":
        try:
            return cls(MetricKind.parse(name), None if weights is None else tuple(weights))
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def to_dict(self) -> dict:
        return {'kind': self.kind.name, 'weights': None if self.weights is None else list(self.weights)}


def _gower(metric: MetricSpec, schema: Schema, a_num, a_cat, b_num, b_cat) -> np.ndarray:
    n_num, n_cat = schema.numeric_count, schema.categorical_count
    weights = np.ones(n_num + n_cat) if metric.weights is None else np.asarray(metric.weights, dtype=float)
    if len(weights) != n_num + n_cat:
        raise SchemaError(f"Gower metric has {len(weights)} weights for {n_num + n_cat} columns")
    w_num, w_cat = weights[:n_num], weights[n_num:]
    total = np.zeros((a_num.shape[0], b_num.shape[0]))
    if n_num:
        ranges = schema.ranges
        flat = ranges <= 0
        if np.any(flat):
            cols = np.flatnonzero(flat)
            for col in cols:
                if np.any(a_num[:, col][:, None] != b_num[:, col][None, :]):
                    raise SchemaError(f"Gower column {col} has zero range but differing values")
        scale = np.where(flat, 0.0, w_num / np.where(flat, 1.0, ranges))
        total += cdist(a_num * scale, b_num * scale, 'cityblock')
    if n_cat and w_cat.sum() > 0:
        total += cdist(a_cat, b_cat, 'hamming', w=w_cat) * w_cat.sum()
    return total / weights.sum()


def pairwise(metric: MetricSpec, schema: Schema, a_num: np.ndarray, a_cat: np.ndarray,
             b_num: np.ndarray, b_cat: np.ndarray) -> np.ndarray:
    """Distance matrix between two row blocks conforming to ``schema``."""
    if metric.kind == MetricKind.GOWER:
        return _gower(metric, schema, a_num, a_cat, b_num, b_cat)
    if schema.categorical_count:
        raise SchemaError(f"{metric.kind.name} metric is numeric only; use GOWER for categorical columns")
    return cdist(a_num, b_num, _CDIST_NAMES[metric.kind])


def cross_distances(metric: MetricSpec, left: Dataset, right: Dataset) -> np.ndarray:
    if left.schema != right.schema:
        raise SchemaError("Datasets have different schemas")
    return pairwise(metric, left.schema, left.numeric, left.categorical, right.numeric, right.categorical)


def slot_distances(metric: MetricSpec, data: Dataset, candidate: KTuple) -> np.ndarray:
    """(len(data), k) distances from every point to every slot."""
    c_num, c_cat = candidate.as_rows(data.schema)
    return pairwise(metric, data.schema, data.numeric, data.categorical, c_num, c_cat)


def min_distances(metric: MetricSpec, data: Dataset, candidate: KTuple) -> np.ndarray:
    """Δ(x, candidate) for every x in ``data``."""
    return slot_distances(metric, data, candidate).min(axis=1)


def _single_schema(a: Point, b: Point, schema: Schema | None) -> Schema:
    if len(a.numeric) != len(b.numeric) or len(a.categorical) != len(b.categorical):
        raise SchemaError("Points have different arity")
    if schema is None:
        mins = tuple(min(x, y) for x, y in zip(a.numeric, b.numeric))
        maxs = tuple(max(x, y) for x, y in zip(a.numeric, b.numeric))
        kinds = (ColumnKind.NUMERIC,) * len(a.numeric) + (ColumnKind.CATEGORICAL,) * len(a.categorical)
        schema = Schema(kinds=kinds, mins=mins, maxs=maxs)
    schema.check_point(a)
    return schema


def distance(metric: MetricSpec, a: Point, b: Point, schema: Schema | None = None) -> float:
    """
    Distance between two points.

    Gower needs the dataset schema for range normalisation; without one the
    range of each numeric column is taken from the two points themselves.
    """
    schema = _single_schema(a, b, schema)
    a_num, a_cat = KTuple((a,)).as_rows(schema)
    b_num, b_cat = KTuple((b,)).as_rows(schema)
    return float(pairwise(metric, schema, a_num, a_cat, b_num, b_cat)[0, 0])


def min_distance(point: Point, candidate: KTuple, metric: MetricSpec, schema: Schema | None = None) -> float:
    if schema is None:
        schema = _single_schema(point, candidate.slots[0], None)
        schema = Schema(kinds=schema.kinds,
                        mins=tuple(min(v) for v in zip(point.numeric, *(s.numeric for s in candidate.slots))),
                        maxs=tuple(max(v) for v in zip(point.numeric, *(s.numeric for s in candidate.slots))))
    p_num, p_cat = KTuple((point,)).as_rows(schema)
    c_num, c_cat = candidate.as_rows(schema)
    return float(pairwise(metric, schema, p_num, p_cat, c_num, c_cat).min())
