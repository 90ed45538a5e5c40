"""
K-medoid search: MCPAM (sequential Monte Carlo swap search), GPAM/PAM,
K++ seeding and exhaustive oracles.

MCPAM talks to the data through an evaluator object with three methods
(``full_moments``, ``eval_swaps`` and ``point``). ``LocalEvaluator`` works on
an in-memory dataset; the distributed master supplies a remote one, so both
run the same decision code.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np
from joblib import Parallel, delayed

from app.errors.exceptions import ConfigError, SchemaError
from app.utils import resolve_threads, substream
from .core import Dataset, KTuple, MetricSpec, Point, min_distances, pairwise, slot_distances
from .eccentricity import (
    DEFAULT_ALPHA,
    EccEstimate,
    bounds_from_moments,
    estimate_from_moments,
    moments,
    sample_ecc,
    z_quantile,
)
from .enums import RoundOutcome

logger = logging.getLogger(__name__)

# Upper bound on distance matrix entries materialised at once
BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class McpamConfig:
    k: int = 1
    tau: float = 0.0
    n_start: int = 1000
    growth: int = 10
    n_max: int | None = None
    alpha: float = DEFAULT_ALPHA
    seed: int = 0
    practical_opts: bool = False
    threads: int = 1

    def validate(self) -> "McpamConfig":
        if self.k < 1:
            raise ConfigError(f"k must be at least 1, got {self.k}")
        if self.n_start < 1:
            raise ConfigError(f"n_start must be at least 1, got {self.n_start}")
        if self.growth < 2:
            raise ConfigError(f"growth must be at least 2, got {self.growth}")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError(f"n_max must be positive, got {self.n_max}")
        if self.n_max is not None and self.n_max < self.n_start:
            raise ConfigError(f"n_max={self.n_max} is below n_start={self.n_start}")
        if not self.tau >= 0:
            raise ConfigError(f"tau must be non-negative, got {self.tau}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        return self

    def resolved_n_max(self, m: int) -> int:
        return m if self.n_max is None else self.n_max

    def to_dict(self) -> dict:
        return {
            'k': self.k, 'tau': self.tau, 'n_start': self.n_start, 'growth': self.growth,
            'n_max': self.n_max, 'alpha': self.alpha, 'seed': self.seed,
            'practical_opts': self.practical_opts, 'threads': self.threads,
        }


@dataclass(frozen=True, order=True)
class SwapBest:
    """Best swap candidate under one criterion; ordered by (value, i, l)."""
    value: float
    i: int
    l: int
    mean: float = field(compare=False)
    half_width: float = field(compare=False)

    @property
    def lo(self) -> float:
        return self.mean - self.half_width

    @property
    def hi(self) -> float:
        return self.mean + self.half_width

    def to_dict(self) -> dict:
        return {'value': self.value, 'i': self.i, 'l': self.l, 'mean': self.mean, 'half_width': self.half_width}

    @classmethod
    def from_dict(cls, data: dict) -> "SwapBest":
        return cls(value=float(data['value']), i=int(data['i']), l=int(data['l']),
                   mean=float(data['mean']), half_width=float(data['half_width']))


def _pick(a: SwapBest | None, b: SwapBest | None) -> SwapBest | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class SwapPartial:
    """Chunk-local minima by upper and by lower bound, plus distance evaluations spent."""
    minhi: SwapBest | None
    minlo: SwapBest | None
    evals: int = 0

    def merge(self, other: "SwapPartial") -> "SwapPartial":
        return SwapPartial(minhi=_pick(self.minhi, other.minhi), minlo=_pick(self.minlo, other.minlo),
                           evals=self.evals + other.evals)

    def to_dict(self) -> dict:
        return {
            'minhi': None if self.minhi is None else self.minhi.to_dict(),
            'minlo': None if self.minlo is None else self.minlo.to_dict(),
            'evals': self.evals,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SwapPartial":
        return cls(minhi=None if data.get('minhi') is None else SwapBest.from_dict(data['minhi']),
                   minlo=None if data.get('minlo') is None else SwapBest.from_dict(data['minlo']),
                   evals=int(data.get('evals', 0)))


def _others_min(cur_dist: np.ndarray) -> list[np.ndarray]:
    """For each slot l, the min over the remaining slots (inf when k == 1)."""
    k = cur_dist.shape[1]
    if k == 1:
        return [np.full(cur_dist.shape[0], np.inf)]
    return [np.delete(cur_dist, l, axis=1).min(axis=1) for l in range(k)]


def _row_blocks(rows: int, width: int) -> list[tuple[int, int]]:
    step = max(1, BLOCK_ELEMENTS // max(width, 1))
    return [(start, min(start + step, rows)) for start in range(0, rows, step)]


def _eval_block(metric, chunk: Dataset, start: int, stop: int, offset: int, sample: Dataset,
                others: list[np.ndarray], z: float) -> SwapPartial:
    dist = pairwise(metric, chunk.schema, chunk.numeric[start:stop], chunk.categorical[start:stop],
                    sample.numeric, sample.categorical)
    n = dist.shape[1]
    best_hi = best_lo = None
    for l, other in enumerate(others):
        vals = np.minimum(dist, other[None, :])
        total = vals.sum(axis=1)
        total_sq = np.einsum('ij,ij->i', vals, vals)
        mean, _, half = bounds_from_moments(total, total_sq, n, z)
        hi = mean + half
        lo = mean - half
        r = int(np.argmin(hi))
        best_hi = _pick(best_hi, SwapBest(float(hi[r]), offset + start + r, l, float(mean[r]), float(half[r])))
        r = int(np.argmin(lo))
        best_lo = _pick(best_lo, SwapBest(float(lo[r]), offset + start + r, l, float(mean[r]), float(half[r])))
    return SwapPartial(best_hi, best_lo, evals=(stop - start) * n)


def evaluate_swaps(chunk: Dataset, offset: int, cur: KTuple, sample: Dataset, metric: MetricSpec,
                   z: float, threads: int = 1) -> SwapPartial:
    """
    Score every swap of a chunk point into every slot of ``cur`` on ``sample``.

    Indices in the result are global (``offset`` + chunk row). Blocks are
    reduced in index order with the (value, i, l) tie-break, so the answer
    does not depend on ``threads``.
    """
    others = _others_min(slot_distances(metric, sample, cur))
    blocks = _row_blocks(len(chunk), len(sample))
    jobs = resolve_threads(threads)
    if jobs > 1 and len(blocks) > 1:
        parts = Parallel(n_jobs=jobs, prefer="threads")(
            delayed(_eval_block)(metric, chunk, start, stop, offset, sample, others, z) for start, stop in blocks)
    else:
        parts = [_eval_block(metric, chunk, start, stop, offset, sample, others, z) for start, stop in blocks]
    result = SwapPartial(None, None, evals=len(sample) * cur.k)
    for part in parts:
        result = result.merge(part)
    return result


class Evaluator(Protocol):
    size: int

    def full_moments(self, cur: KTuple) -> tuple[float, float, int]: ...

    def eval_swaps(self, cur: KTuple, sample_indices: np.ndarray, z: float) -> SwapPartial: ...

    def point(self, index: int) -> Point: ...


class LocalEvaluator:
    def __init__(self, data: Dataset, metric: MetricSpec, threads: int = 1):
        self.data = data
        self.metric = metric
        self.threads = threads
        self.size = len(data)

    def full_moments(self, cur: KTuple) -> tuple[float, float, int]:
        return moments(min_distances(self.metric, self.data, cur))

    def eval_swaps(self, cur: KTuple, sample_indices: np.ndarray, z: float) -> SwapPartial:
        sample = self.data.take(sample_indices)
        return evaluate_swaps(self.data, 0, cur, sample, self.metric, z, self.threads)

    def point(self, index: int) -> Point:
        return self.data.point(index)


@dataclass(frozen=True)
class RoundRecord:
    """One inner sampling round: the sample size, the decision values and the outcome."""
    outer: int
    round: int
    n: int
    outcome: RoundOutcome
    cur_ecc: float
    cur_lo: float
    cur_hi: float
    minhi: SwapBest | None = None
    minlo: SwapBest | None = None
    evals: int = 0

    @property
    def swapped(self) -> bool:
        return self.outcome == RoundOutcome.SWAP

    def to_dict(self) -> dict:
        return {
            'outer': self.outer, 'round': self.round, 'n': self.n, 'outcome': self.outcome.name,
            'swapped': self.swapped, 'cur_ecc': self.cur_ecc, 'cur_lo': self.cur_lo, 'cur_hi': self.cur_hi,
            'minhi': None if self.minhi is None else self.minhi.to_dict(),
            'minlo': None if self.minlo is None else self.minlo.to_dict(),
            'evals': self.evals,
        }


@dataclass
class MedoidResult:
    medoid: KTuple
    ecc: EccEstimate
    trace: list[RoundRecord]
    total_distance_evals: int = 0
    indices: tuple[int | None, ...] = ()
    algorithm: str = ''

    def swaps(self) -> list[tuple[int, int]]:
        return [(r.minhi.i, r.minhi.l) for r in self.trace if r.swapped]

    def to_dict(self, full_trace: bool = False) -> dict:
        outcomes = {}
        for record in self.trace:
            outcomes[record.outcome.name] = outcomes.get(record.outcome.name, 0) + 1
        data = {
            'algorithm': self.algorithm,
            'medoid': self.medoid.to_list(),
            'indices': list(self.indices),
            'ecc': self.ecc.to_dict(),
            'total_distance_evals': self.total_distance_evals,
            'trace_summary': {
                'rounds': len(self.trace),
                'swaps': sum(1 for r in self.trace if r.swapped),
                'max_n': max((r.n for r in self.trace), default=0),
                'outcomes': outcomes,
            },
        }
        if full_trace:
            data['trace'] = [r.to_dict() for r in self.trace]
        return data


# ---------------------------------------------------------------------------
# Seeding and exhaustive oracles
# ---------------------------------------------------------------------------

def kpp_init_indices(data: Dataset, k: int, metric: MetricSpec, rng: np.random.Generator) -> list[int]:
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    m = len(data)
    if m < k:
        raise ConfigError(f"Need at least k={k} points, dataset has {m}")
    chosen = [int(rng.integers(m))]
    nearest = min_distances(metric, data, KTuple.from_dataset(data, chosen))
    while len(chosen) < k:
        total = nearest.sum()
        if total > 0:
            index = int(rng.choice(m, p=nearest / total))
        else:
            index = int(rng.integers(m))
        chosen.append(index)
        nearest = np.minimum(nearest, min_distances(metric, data, KTuple((data.point(index),))))
    return chosen


def kpp_init(data: Dataset, k: int, metric: MetricSpec, rng: np.random.Generator) -> KTuple:
    """First slot uniform, later slots drawn proportionally to min-distance to the chosen ones."""
    return KTuple.from_dataset(data, kpp_init_indices(data, k, metric, rng))


def _point_eccs(data: Dataset, metric: MetricSpec, candidates: Dataset) -> np.ndarray:
    out = np.empty(len(candidates))
    for start, stop in _row_blocks(len(candidates), len(data)):
        block = pairwise(metric, data.schema, candidates.numeric[start:stop], candidates.categorical[start:stop],
                         data.numeric, data.categorical)
        out[start:stop] = block.mean(axis=1)
    return out


def exhaustive_indices(data: Dataset, metric: MetricSpec, k: int = 1, cap: int = 200000) -> tuple[tuple[int, ...], float]:
    m = len(data)
    if k < 1 or k > m:
        raise ConfigError(f"k must lie in [1, {m}], got {k}")
    if k == 1:
        if m > cap:
            raise ConfigError(f"Exhaustive search over {m} points exceeds the cap of {cap}")
        eccs = _point_eccs(data, metric, data)
        best = int(np.argmin(eccs))
        return (best,), float(eccs[best])
    combos = math.comb(m, k)
    if combos > cap:
        raise ConfigError(f"Exhaustive search needs {combos} candidates, cap is {cap}")
    dist = pairwise(metric, data.schema, data.numeric, data.categorical, data.numeric, data.categorical)
    best_combo, best_ecc = None, math.inf
    for combo in itertools.combinations(range(m), k):
        ecc = float(dist[:, combo].min(axis=1).mean())
        if ecc < best_ecc:
            best_combo, best_ecc = combo, ecc
    return best_combo, best_ecc


def exhaustive_medoid(data: Dataset, metric: MetricSpec, k: int = 1, cap: int = 200000):
    """
    Exact minimiser of the full-data sample eccentricity, ties to the lowest index.

    Returns ``(Point, ecc)`` for k == 1 and ``(KTuple, ecc)`` otherwise.
    """
    indices, ecc = exhaustive_indices(data, metric, k, cap)
    if k == 1:
        return data.point(indices[0]), ecc
    return KTuple.from_dataset(data, indices), ecc


# ---------------------------------------------------------------------------
# GPAM / PAM
# ---------------------------------------------------------------------------

def _swap_eccs(metric, eval_set: Dataset, swaps: Dataset, start: int, stop: int,
               others: list[np.ndarray]) -> np.ndarray:
    dist = pairwise(metric, eval_set.schema, eval_set.numeric, eval_set.categorical,
                    swaps.numeric[start:stop], swaps.categorical[start:stop])
    out = np.empty((stop - start, len(others)))
    for l, other in enumerate(others):
        out[:, l] = np.minimum(dist, other[:, None]).mean(axis=0)
    return out


def gpam_inner(cur: KTuple, ecc_cur: float, swaps: Dataset, eval_samples, metric: MetricSpec,
               indices: list[int | None] | None = None) -> tuple[KTuple, float]:
    """
    One greedy pass over all swaps (i over ``swaps``, l over slots, in order).

    A swap is kept as soon as its sample eccentricity is strictly below the
    current one. ``eval_samples`` is either one Dataset shared by every swap
    or a nested sequence ``eval_samples[i][l]`` of per-swap samples.
    ``indices``, when given, is updated in place with the swap-set index of
    each slot.
    """
    k = cur.k
    m = len(swaps)
    if isinstance(eval_samples, Dataset):
        if eval_samples.schema != swaps.schema:
            raise SchemaError("Swap set and evaluation sample have different schemas")
        pos = 0
        others = _others_min(slot_distances(metric, eval_samples, cur))
        blocks = _row_blocks(m, len(eval_samples))
        b = 0
        while b < len(blocks):
            start, stop = blocks[b]
            if pos >= stop * k:
                b += 1
                continue
            eccs = _swap_eccs(metric, eval_samples, swaps, start, stop, others).ravel()
            offset = start * k
            better = np.flatnonzero(eccs[pos - offset:] < ecc_cur) if pos > offset else np.flatnonzero(eccs < ecc_cur)
            if better.size == 0:
                pos = stop * k
                b += 1
                continue
            local = int(better[0]) + max(pos - offset, 0)
            p = offset + local
            i, l = divmod(p, k)
            cur = cur.replace(l, swaps.point(i))
            ecc_cur = float(eccs[local])
            if indices is not None:
                indices[l] = i
            others = _others_min(slot_distances(metric, eval_samples, cur))
            pos = p + 1
        return cur, ecc_cur

    for i in range(m):
        for l in range(k):
            candidate = cur.replace(l, swaps.point(i))
            ecc = float(min_distances(metric, eval_samples[i][l], candidate).mean())
            if ecc < ecc_cur:
                cur, ecc_cur = candidate, ecc
                if indices is not None:
                    indices[l] = i
    return cur, ecc_cur


def pam(data: Dataset, k: int, metric: MetricSpec, tol: float = 0.0, init: KTuple | None = None,
        alpha: float = DEFAULT_ALPHA, seed: int = 0, init_indices: Sequence[int] | None = None) -> MedoidResult:
    """
    PAM as GPAM with the swap set and every evaluation sample equal to the data.

    Passes repeat while a pass lowers the eccentricity by more than ``tol``.
    """
    if len(data) < k:
        raise ConfigError(f"Need at least k={k} points, dataset has {len(data)}")
    if init is None:
        init_indices = kpp_init_indices(data, k, metric, substream(seed, 0))
        init = KTuple.from_dataset(data, init_indices)
    if init.k != k:
        raise ConfigError(f"Initial tuple has {init.k} slots, expected {k}")
    indices = list(init_indices) if init_indices is not None else [None] * k
    m = len(data)
    cur = init
    ecc_cur = float(min_distances(metric, data, cur).mean())
    evals = m * k
    trace = []
    outer = 0
    while True:
        new_indices = list(indices)
        new, ecc_new = gpam_inner(cur, ecc_cur, data, data, metric, indices=new_indices)
        evals += m * m * k
        # sub-ulp differences between summation layouts are not improvements
        improved = ecc_cur - ecc_new > max(tol, 1e-12 * abs(ecc_cur))
        trace.append(RoundRecord(outer=outer, round=0, n=m,
                                 outcome=RoundOutcome.SWAP if improved else RoundOutcome.NO_IMPROVEMENT,
                                 cur_ecc=ecc_cur, cur_lo=ecc_cur, cur_hi=ecc_cur, evals=m * m * k))
        logger.debug("PAM pass %d: %.6g -> %.6g", outer, ecc_cur, ecc_new)
        if not improved:
            break
        cur, ecc_cur, indices = new, ecc_new, new_indices
        outer += 1
    return MedoidResult(medoid=cur, ecc=sample_ecc(cur, data, metric, alpha), trace=trace,
                        total_distance_evals=evals, indices=tuple(indices), algorithm='pam')


# ---------------------------------------------------------------------------
# MCPAM
# ---------------------------------------------------------------------------

class _Search:
    """State shared by the k >= 1 and single-medoid loops."""

    def __init__(self, evaluator: Evaluator, cfg: McpamConfig, init: KTuple, indices):
        self.evaluator = evaluator
        self.cfg = cfg
        self.z = z_quantile(cfg.alpha)
        self.m = evaluator.size
        self.n_max = cfg.resolved_n_max(self.m)
        self.trace: list[RoundRecord] = []
        self.evals = 0
        self.cur = init
        self.indices = list(indices) if indices is not None else [None] * init.k
        self.cur_est = self.full_estimate(init)

    def full_estimate(self, cur: KTuple) -> EccEstimate:
        self.evals += self.m * cur.k
        return estimate_from_moments(*self.evaluator.full_moments(cur), alpha=self.cfg.alpha)

    def sample(self, outer: int, rnd: int, n: int) -> np.ndarray:
        # drawn with replacement
        return substream(self.cfg.seed, outer, rnd).integers(0, self.m, size=n)

    def decide(self, outer: int, rnd: int, n: int, cur_est: EccEstimate) -> tuple[RoundOutcome, SwapPartial]:
        part = self.evaluator.eval_swaps(self.cur, self.sample(outer, rnd, n), self.z)
        self.evals += part.evals
        minhi = part.minhi
        minlo = minhi if self.cfg.practical_opts else part.minlo
        if self.cfg.practical_opts:
            cur_lo = cur_hi = cur_est.mean
        else:
            cur_lo, cur_hi = cur_est.lo, cur_est.hi
        tau = self.cfg.tau
        if cur_hi < minlo.lo + tau:
            outcome = RoundOutcome.NO_IMPROVEMENT
        elif cur_lo >= minhi.hi + tau:
            outcome = RoundOutcome.SWAP
        elif n >= self.n_max:
            outcome = RoundOutcome.N_MAX
        else:
            outcome = RoundOutcome.GROW
        self.trace.append(RoundRecord(outer=outer, round=rnd, n=n, outcome=outcome, cur_ecc=cur_est.mean,
                                      cur_lo=cur_lo, cur_hi=cur_hi, minhi=minhi, minlo=minlo, evals=part.evals))
        logger.debug("round %d.%d n=%d cur=[%.6g, %.6g] minhi=%.6g minlo=%.6g -> %s",
                     outer, rnd, n, cur_lo, cur_hi, minhi.hi, minlo.lo, outcome.name)
        if outcome == RoundOutcome.N_MAX:
            logger.warning("No conclusive decision at n_max=%d; keeping the current medoid", self.n_max)
        return outcome, part

    def swapped(self, best: SwapBest) -> tuple[KTuple, list]:
        indices = list(self.indices)
        indices[best.l] = best.i
        return self.cur.replace(best.l, self.evaluator.point(best.i)), indices

    def result(self, name: str) -> MedoidResult:
        return MedoidResult(medoid=self.cur, ecc=self.cur_est, trace=self.trace, total_distance_evals=self.evals,
                            indices=tuple(self.indices), algorithm=name)


def initial_medoid(cfg: McpamConfig, metric, init, init_indices, data: Dataset):
    if init is not None:
        if init.k != cfg.k:
            raise ConfigError(f"Initial tuple has {init.k} slots, expected k={cfg.k}")
        return init, init_indices
    idx = kpp_init_indices(data, cfg.k, metric, substream(cfg.seed, 2 ** 32 - 1))
    return KTuple.from_dataset(data, idx), idx


def run_mcpam(evaluator: Evaluator, cfg: McpamConfig, init: KTuple,
              init_indices: Sequence[int] | None = None) -> MedoidResult:
    """MCPAM decision loop over any evaluator."""
    cfg.validate()
    if evaluator.size < cfg.k:
        raise ConfigError(f"Need at least k={cfg.k} points, dataset has {evaluator.size}")
    search = _Search(evaluator, cfg, init, init_indices)
    outer = 0
    while True:
        logger.info("MCPAM outer iteration %d, Ecc=%.6g", outer, search.cur_est.mean)
        new, new_indices, new_est = search.cur, search.indices, search.cur_est
        n = cfg.n_start
        rnd = 0
        while True:
            n_round = min(n, search.n_max)
            outcome, part = search.decide(outer, rnd, n_round, search.cur_est)
            if outcome == RoundOutcome.SWAP:
                new, new_indices = search.swapped(part.minhi)
                new_est = search.full_estimate(new)
                logger.info("Swap slot %d <- point %d, Ecc %.6g -> %.6g",
                            part.minhi.l, part.minhi.i, search.cur_est.mean, new_est.mean)
            if outcome != RoundOutcome.GROW:
                break
            n *= cfg.growth
            rnd += 1
        if search.cur_est.mean - new_est.mean <= 0:
            break
        search.cur, search.indices, search.cur_est = new, new_indices, new_est
        outer += 1
    return search.result('mcpam')


def run_mcpam_single(evaluator: Evaluator, cfg: McpamConfig, init: KTuple,
                     init_indices: Sequence[int] | None = None) -> MedoidResult:
    """
    Single-medoid MCPAM: one loop, where a swap continues sampling at the
    current n and a conclusive "no improvement" ends the search.

    Every conclusive swap is taken, even when the full-data eccentricity does
    not drop. The search also ends when n_max is reached without a decision,
    or when a swap would return to a point already held.
    """
    cfg.validate()
    if cfg.k != 1:
        raise ConfigError(f"Single-medoid search needs k=1, got {cfg.k}")
    search = _Search(evaluator, cfg, init, init_indices)
    held = {search.indices[0]}
    n = cfg.n_start
    rnd = 0
    while True:
        n_round = min(n, search.n_max)
        outcome, part = search.decide(0, rnd, n_round, search.cur_est)
        rnd += 1
        if outcome in (RoundOutcome.NO_IMPROVEMENT, RoundOutcome.N_MAX):
            break
        if outcome == RoundOutcome.GROW:
            n *= cfg.growth
            continue
        if part.minhi.i in held:
            logger.warning("Swap back to point %d; stopping", part.minhi.i)
            break
        held.add(part.minhi.i)
        new, new_indices = search.swapped(part.minhi)
        new_est = search.full_estimate(new)
        if new_est.mean >= search.cur_est.mean:
            logger.info("Swap to point %d did not lower the full-data Ecc (%.6g -> %.6g)",
                        part.minhi.i, search.cur_est.mean, new_est.mean)
        else:
            logger.info("Swap to point %d, Ecc %.6g -> %.6g", part.minhi.i, search.cur_est.mean, new_est.mean)
        search.cur, search.indices, search.cur_est = new, new_indices, new_est
    return search.result('mcpam_single')


def mcpam(data: Dataset, cfg: McpamConfig, metric: MetricSpec, init: KTuple | None = None,
          init_indices: Sequence[int] | None = None) -> MedoidResult:
    """MCPAM on an in-memory dataset; K++ seeding when ``init`` is omitted."""
    cfg.validate()
    if len(data) < cfg.k:
        raise ConfigError(f"Need at least k={cfg.k} points, dataset has {len(data)}")
    init, init_indices = initial_medoid(cfg, metric, init, init_indices, data)
    return run_mcpam(LocalEvaluator(data, metric, cfg.threads), cfg, init, init_indices)


def mcpam_single(data: Dataset, cfg: McpamConfig, metric: MetricSpec, init: KTuple | None = None,
                 init_indices: Sequence[int] | None = None) -> MedoidResult:
    if cfg.k != 1:
        raise ConfigError(f"Single-medoid search needs k=1, got {cfg.k}")
    init, init_indices = initial_medoid(cfg, metric, init, init_indices, data)
    return run_mcpam_single(LocalEvaluator(data, metric, cfg.threads), cfg, init, init_indices)


def assign_labels(data: Dataset, medoid: KTuple, metric: MetricSpec) -> np.ndarray:
    """Index of the nearest slot for each point, lowest slot on ties."""
    return np.argmin(slot_distances(metric, data, medoid), axis=1)
