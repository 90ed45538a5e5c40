"""
Minimum mean estimation (MME) simulator.

m arms, n draws each; the estimator picks the arm with the smallest sample
mean and its error is the relative exceedance of the chosen arm's true mean
over the smallest true mean. Trials run on per-trial substreams so results
do not depend on how trials are split across threads.
"""

import math
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from app.errors.exceptions import Condition, ConfigError
from app.utils import partition, resolve_threads, substream
from .calculus import (CHI2_FAMILY, BoundConstants, PowerVarianceFamily, err3_compose, rel_error_ub3_gen,
                       rel_error_ub5)
from .enums import ArmKind, BoundKind

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 200
SWEEP_COLUMNS = ['m', 'n', 'trials', 'empirical_err', 'se', 'bound', 'conditions_ok']


def _check_mean(kind: ArmKind, mu: float, fam: PowerVarianceFamily | None) -> None:
    gamma = CHI2_FAMILY.gamma if kind is ArmKind.NONCENTRAL_CHISQ1 else fam.gamma
    if mu < gamma:
        raise ValueError(f"Arm mean {mu} is below gamma={gamma}")


def sample_arm(kind: ArmKind, mu: float, rng: np.random.Generator,
               fam: PowerVarianceFamily | None = None, size=None):
    """
    Draw from one arm. Gaussian arms take their variance from ``fam``;
    non-central chi-squared arms are (Z + sqrt(mu - 1))**2.
    """
    if kind is ArmKind.GAUSSIAN and fam is None:
        raise ConfigError("Gaussian arms need a power-variance family for their variance")
    _check_mean(kind, mu, fam)
    if kind is ArmKind.GAUSSIAN:
        return rng.normal(mu, math.sqrt(fam.variance(mu)), size=size)
    z = rng.standard_normal(size=size)
    return (z + math.sqrt(mu - 1.0)) ** 2


def arm_kurtosis(kind: ArmKind, mu: float) -> float:
    if kind is ArmKind.GAUSSIAN:
        return 3.0
    lam = mu - 1.0
    return 3.0 + 12.0 * (1.0 + 4.0 * lam) / (1.0 + 2.0 * lam) ** 2


@dataclass(frozen=True)
class MMEInstance:
    fam: PowerVarianceFamily
    kind: ArmKind
    means: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, 'means', tuple(float(mu) for mu in self.means))
        if not self.means:
            raise ValueError("An instance needs at least one arm")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        for mu in self.means:
            _check_mean(self.kind, mu, self.fam)

    @property
    def m(self) -> int:
        return len(self.means)

    @property
    def mu_min(self) -> float:
        return min(self.means)

    def error_of(self, index: int) -> float:
        return (self.means[index] - self.mu_min) / self.mu_min

    def to_dict(self) -> dict:
        return {'fam': self.fam.to_dict(), 'kind': self.kind.name, 'means': list(self.means), 'n': self.n}


@dataclass(frozen=True)
class MMEOutcome:
    chosen_index: int
    err_mme: float
    sample_means: np.ndarray

    def to_dict(self) -> dict:
        return {'chosen_index': self.chosen_index, 'err_mme': self.err_mme,
                'sample_means': self.sample_means.tolist()}


def draw_samples(instance: MMEInstance, rng: np.random.Generator) -> np.ndarray:
    """Raw (m, n) draws, one row per arm."""
    return np.stack([sample_arm(instance.kind, mu, rng, fam=instance.fam, size=instance.n)
                     for mu in instance.means])


def draw_sample_means(instance: MMEInstance, rng: np.random.Generator) -> np.ndarray:
    """
    Per-arm sample means drawn from their exact sampling distribution:
    Normal(mu, var/n) for Gaussian arms, chi2(n, n*lambda)/n for chi-squared arms.
    """
    means = np.asarray(instance.means)
    n = instance.n
    if instance.kind is ArmKind.GAUSSIAN:
        variances = instance.fam.alpha * means ** instance.fam.beta + instance.fam.k_var
        return rng.normal(means, np.sqrt(variances / n))
    lam = means - 1.0
    out = np.empty_like(means)
    central = lam <= 0
    out[central] = rng.chisquare(n, size=int(central.sum())) / n
    out[~central] = rng.noncentral_chisquare(n, n * lam[~central]) / n
    return out


def mme_estimate(samples) -> int:
    """Index of the arm with the smallest sample mean; ties go to the lowest index."""
    arms = [np.asarray(arm, dtype=float) for arm in samples]
    if not arms:
        raise ValueError("No arms given")
    sizes = {arm.shape[0] for arm in arms}
    if 0 in sizes:
        raise ValueError("Every arm needs at least one sample")
    if len(sizes) > 1:
        raise ValueError(f"Arms have unequal sample sizes {sorted(sizes)}")
    return int(np.argmin([arm.mean() for arm in arms]))


def run_trial(instance: MMEInstance, rng: np.random.Generator) -> MMEOutcome:
    sample_means = draw_sample_means(instance, rng)
    # each arm enters as its single sample mean
    chosen = mme_estimate(sample_means[:, None])
    return MMEOutcome(chosen_index=chosen, err_mme=instance.error_of(chosen), sample_means=sample_means)


def _chosen_indices(instance: MMEInstance, trials: range, seed: int) -> list[int]:
    return [run_trial(instance, substream(seed, trial)).chosen_index for trial in trials]


def simulate_choices(instance: MMEInstance, trials: int, seed: int = 0, threads: int = 1) -> np.ndarray:
    """Chosen arm index for each trial."""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if instance.m == 1:
        return np.zeros(trials, dtype=int)
    parts = partition(trials, min(resolve_threads(threads), trials))
    if len(parts) == 1:
        return np.asarray(_chosen_indices(instance, parts[0], seed))
    chunks = Parallel(n_jobs=len(parts), prefer='threads')(
        delayed(_chosen_indices)(instance, part, seed) for part in parts)
    return np.asarray([index for chunk in chunks for index in chunk])


def _mean_and_se(values: np.ndarray) -> tuple[float, float]:
    if values.shape[0] < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.shape[0]))


def mme_error(instance: MMEInstance, trials: int = DEFAULT_TRIALS, seed: int = 0,
              threads: int = 1) -> tuple[float, float]:
    """Mean err_MME over ``trials`` with its Monte Carlo standard error."""
    choices = simulate_choices(instance, trials, seed=seed, threads=threads)
    errors = np.asarray(instance.means)[choices] / instance.mu_min - 1.0
    return _mean_and_se(errors)


@dataclass
class VerifyReport:
    m: int
    n: int
    trials: int
    empirical: float
    se: float
    bound_kind: BoundKind
    bound: float
    conditions_ok: bool
    passed: bool | None
    ub5: float
    diagnostics: list[Condition] = field(default_factory=list)

    @property
    def status(self) -> str:
        if not self.conditions_ok:
            return 'conditions unmet'
        return 'pass' if self.passed else 'fail'

    def to_dict(self) -> dict:
        return {
            'm': self.m, 'n': self.n, 'trials': self.trials, 'empirical': self.empirical, 'se': self.se,
            'bound_kind': self.bound_kind.name, 'bound': self.bound, 'conditions_ok': self.conditions_ok,
            'pass': self.passed, 'status': self.status, 'ub5': self.ub5,
            'diagnostics': [d.to_dict() for d in self.diagnostics],
        }


def bound_for(c: BoundConstants, means, n: int) -> tuple[BoundKind, float, bool, list[Condition]]:
    """
    The bound an instance is judged against: the general two-mean bound at the
    realised exceedance when m == 2, otherwise the m^(1/3)/n^(2/3) rate.
    """
    means = sorted(float(mu) for mu in means)
    if len(means) == 2:
        delta = (means[1] - means[0]) / means[0]
        value = rel_error_ub3_gen(c, n, delta) if delta > 0 else 0.0
        return BoundKind.UB3_GEN, value, True, []
    rate = rel_error_ub5(c, n, len(means))
    return BoundKind.UB5, rate.value, rate.conditions_ok, rate.diagnostics


def verify_bound(fam: PowerVarianceFamily, means, n: int, trials: int, c: BoundConstants,
                 kind: ArmKind = ArmKind.NONCENTRAL_CHISQ1, seed: int = 0, threads: int = 1) -> VerifyReport:
    instance = MMEInstance(fam=fam, kind=kind, means=tuple(means), n=n)
    empirical, se = mme_error(instance, trials, seed=seed, threads=threads)
    bound_kind, bound, ok, diagnostics = bound_for(c, instance.means, n)
    passed = empirical + 3.0 * se <= bound if ok else None
    if not ok:
        logger.warning("Bound conditions unmet for m=%d n=%d; reporting without a verdict", instance.m, n)
    else:
        logger.info("m=%d n=%d: empirical %.6g (se %.3g) against %s %.6g", instance.m, n, empirical, se,
                    bound_kind.name, bound)
    return VerifyReport(m=instance.m, n=n, trials=trials, empirical=empirical, se=se, bound_kind=bound_kind,
                        bound=bound, conditions_ok=ok, passed=passed,
                        ub5=rel_error_ub5(c, n, instance.m).value, diagnostics=diagnostics)


@dataclass(frozen=True)
class TwoStageReport:
    m: int
    n: int
    trials: int
    infimum: float
    err1: float
    err1_se: float
    err2: float
    err2_se: float
    err3: float
    err3_se: float

    @property
    def composed(self) -> float:
        return err3_compose(self.err1, self.err2)

    def to_dict(self) -> dict:
        return {
            'm': self.m, 'n': self.n, 'trials': self.trials, 'infimum': self.infimum,
            'err1': self.err1, 'err1_se': self.err1_se, 'err2': self.err2, 'err2_se': self.err2_se,
            'err3': self.err3, 'err3_se': self.err3_se, 'composed': self.composed,
        }


def _ratio_se(a: np.ndarray, b: np.ndarray) -> float:
    """Delta-method standard error of mean(a) / mean(b)."""
    count = a.shape[0]
    if count < 2:
        return 0.0
    ratio = a.mean() / b.mean()
    cov = np.cov(a, b, ddof=1)
    var = (cov[0, 0] - 2.0 * ratio * cov[0, 1] + ratio ** 2 * cov[1, 1]) / (count * b.mean() ** 2)
    return float(math.sqrt(max(var, 0.0)))


def two_stage_errors(fam: PowerVarianceFamily, kind: ArmKind, m: int, n: int, trials: int = DEFAULT_TRIALS,
                     prior: tuple[float, float] = (1.0, 10.0), seed: int = 0) -> TwoStageReport:
    """
    Draw m arm means uniformly from ``prior`` (whose lower end is the infimum),
    then run MME over them. err1 is the MME error, err2 the gap between the
    best drawn mean and the infimum, err3 the gap between the chosen mean and
    the infimum; each is a ratio of expectations over the same trials.
    """
    lo, hi = prior
    if not lo < hi:
        raise ConfigError(f"Prior range must be increasing, got {prior}")
    if m < 1 or trials < 1:
        raise ValueError("m and trials must be at least 1")
    chosen = np.empty(trials)
    best = np.empty(trials)
    for trial in range(trials):
        rng = substream(seed, trial)
        means = rng.uniform(lo, hi, size=m)
        instance = MMEInstance(fam=fam, kind=kind, means=tuple(means), n=n)
        outcome = run_trial(instance, rng)
        chosen[trial] = means[outcome.chosen_index]
        best[trial] = means.min()
    inf = float(lo)
    return TwoStageReport(
        m=m, n=n, trials=trials, infimum=inf,
        err1=float((chosen - best).mean() / best.mean()), err1_se=_ratio_se(chosen - best, best),
        err2=float(best.mean() / inf - 1.0), err2_se=_mean_and_se(best / inf)[1],
        err3=float(chosen.mean() / inf - 1.0), err3_se=_mean_and_se(chosen / inf)[1],
    )


@dataclass(frozen=True)
class ErrorDecomposition:
    sorted_means: list
    deltas: list
    probabilities: list
    probability_se: list
    decomposed: float
    empirical: float
    se: float

    def to_dict(self) -> dict:
        rows = [{'rank': rank + 1, 'mean': mu, 'delta': d, 'p': p, 'p_se': s}
                for rank, (mu, d, p, s) in enumerate(zip(self.sorted_means, self.deltas,
                                                         self.probabilities, self.probability_se))]
        return {'rows': rows, 'decomposed': self.decomposed, 'empirical': self.empirical, 'se': self.se}


def expected_error_decomposition(instance: MMEInstance, trials: int = DEFAULT_TRIALS, seed: int = 0,
                                 threads: int = 1) -> ErrorDecomposition:
    """
    Empirical probability that the i-th smallest mean is chosen, and the
    error rebuilt as the sum over ranks of delta_i * P_i.
    """
    order = np.argsort(instance.means, kind='stable')
    means = np.asarray(instance.means)[order]
    rank_of = np.empty_like(order)
    rank_of[order] = np.arange(order.shape[0])
    choices = simulate_choices(instance, trials, seed=seed, threads=threads)
    ranks = rank_of[choices]
    probs = np.bincount(ranks, minlength=instance.m) / trials
    deltas = means / means[0] - 1.0
    empirical, se = _mean_and_se(deltas[ranks])
    return ErrorDecomposition(
        sorted_means=means.tolist(), deltas=deltas.tolist(), probabilities=probs.tolist(),
        probability_se=np.sqrt(probs * (1.0 - probs) / trials).tolist(),
        decomposed=float(np.dot(deltas, probs)), empirical=empirical, se=se)


def means_linspace(m: int, lo: float = 1.0, hi: float = 10.0) -> list[float]:
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    return np.linspace(lo, hi, m).tolist()


def sweep(fam: PowerVarianceFamily, kind: ArmKind, means, n_grid, trials: int, seed: int,
          c: BoundConstants, threads: int = 1) -> pd.DataFrame:
    """
    Empirical MME error against its bound for every arm configuration in
    ``means`` and every n in ``n_grid``.
    """
    rows = []
    for arm_means in means:
        for n in n_grid:
            instance = MMEInstance(fam=fam, kind=kind, means=tuple(arm_means), n=int(n))
            empirical, se = mme_error(instance, trials, seed=seed, threads=threads)
            _, bound, ok, _ = bound_for(c, instance.means, instance.n)
            logger.debug("sweep m=%d n=%d err=%.6g bound=%.6g", instance.m, instance.n, empirical, bound)
            rows.append((instance.m, instance.n, trials, empirical, se, bound, ok))
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def with_verdicts(frame: pd.DataFrame) -> pd.DataFrame:
    """Sweep rows plus a ``pass`` column, left empty where the bound's conditions are unmet."""
    verdicts = frame['empirical_err'] + 3.0 * frame['se'] <= frame['bound']
    out = frame.copy()
    out['pass'] = verdicts.astype(object).where(frame['conditions_ok'].astype(bool), None)
    return out
