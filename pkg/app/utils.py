# -*- coding: utf-8 -*-

import os
import math
import dataclasses
from enum import Enum

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """
    Independent PCG64 stream for ``key`` under ``seed``.

    Streams are addressed by key rather than drawn in sequence, so the numbers
    a given (outer iteration, inner round) sees do not depend on how many
    threads or workers took part.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF,
                                                        spawn_key=tuple(int(k) for k in key)))


def resolve_threads(threads: int | None) -> int:
    if not threads or threads < 0:
        return os.cpu_count() or 1
    return int(threads)


def partition(m: int, c: int) -> list[range]:
    """Split ``range(m)`` into ``c`` contiguous ranges whose sizes differ by at most one."""
    if c < 1:
        raise ValueError(f"Need at least one part, got {c}")
    if m < c:
        raise ValueError(f"Cannot split {m} items into {c} non-empty parts")
    base, extra = divmod(m, c)
    ranges = []
    start = 0
    for part in range(c):
        stop = start + base + (1 if part < extra else 0)
        ranges.append(range(start, stop))
        start = stop
    return ranges


def to_jsonable(obj):
    """Convert results (dataclasses, enums, numpy scalars, infinities) to JSON-safe values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, 'to_dict'):
            return to_jsonable(obj.to_dict())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Enum):
        return obj.name
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
    return obj
