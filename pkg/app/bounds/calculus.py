"""
Error-bound calculus for minimum mean estimation over power-variance families.

A power-variance family has means mu >= gamma and variance
alpha * mu**beta + k_var. From it we derive the constants C1..C7 and delta_c
and evaluate:

* z-scores of zero for the difference of two sample means and their upper bound,
* relative-error bounds for two means (Gaussian tail, Berry-Esseen, general),
* exceedance thresholds delta_th that push those bounds below a target T,
* the m-mean reduction, the optimal split T*, the m^(1/3)/n^(2/3) rate,
* the feasible region of that rate's conditions and n for a given tolerance.

Every function that inverts a bound checks its preconditions and raises
``ConditionError`` with the full list of evaluated conditions.
"""

import math
import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import bisect
from scipy.stats import norm

from app.errors.exceptions import Condition, ConditionError, ConfigError

logger = logging.getLogger(__name__)

C4_DEFAULT = 32.0
# p_max is this multiple of delta_c
P_MAX_FACTOR = 150.0
BETA_GEN_LIMIT = 4.0 / 3.0
INVERSE_XTOL = 1e-12


@dataclass(frozen=True)
class PowerVarianceFamily:
    alpha: float
    beta: float
    gamma: float
    k_var: float = 0.0
    kappa_ub: float = 3.0
    name: str = ''

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if not self.beta >= 0:
            raise ConfigError(f"beta must be non-negative, got {self.beta}")
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.alpha * self.gamma ** self.beta < -self.k_var:
            raise ConfigError("alpha * gamma**beta must be at least -k_var")
        if not self.kappa_ub >= 1:
            raise ConfigError(f"kappa_ub must be at least 1, got {self.kappa_ub}")

    def variance(self, mu: float) -> float:
        return self.alpha * mu ** self.beta + self.k_var

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PowerVarianceFamily":
        try:
            return cls(alpha=float(data['alpha']), beta=float(data['beta']), gamma=float(data['gamma']),
                       k_var=float(data.get('k_var', data.get('k', 0.0))),
                       kappa_ub=float(data.get('kappa_ub', 3.0)), name=str(data.get('name', '')))
        except KeyError as e:
            raise ConfigError(f"Family is missing field {e}") from None


# Non-central chi-squared with one degree of freedom, parametrised by its mean 1 + lambda
CHI2_FAMILY = PowerVarianceFamily(alpha=4.0, beta=1.0, gamma=1.0, k_var=-2.0, kappa_ub=15.0,
                                  name='noncentral_chi2_1')


@dataclass(frozen=True)
class BoundConstants:
    c1: float
    delta_c: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    beta: float

    def to_dict(self) -> dict:
        return asdict(self)


def derive_constants(fam: PowerVarianceFamily, c4: float = C4_DEFAULT) -> BoundConstants:
    if not 0 < c4 <= 32:
        raise ConfigError(f"C4 must lie in (0, 32], got {c4}")
    if fam.beta > 2:
        raise ConfigError(f"beta={fam.beta} is outside the bounds regime [0, 2]")
    a, b, g = fam.alpha, fam.beta, fam.gamma
    c1 = 1.0 + 2.0 * fam.k_var / (a * g ** b) if fam.k_var > 0 else 1.0
    scale = g ** (1.0 - b / 2.0) / math.sqrt(a)
    if b == 0:
        delta_c = math.inf
        c2 = scale / math.sqrt(1.0 + c1)
    else:
        delta_c = max(1.0, c1 ** (1.0 / b) - 1.0)
        c2 = scale / (2.0 ** ((1.0 + b) / 2.0) * delta_c ** (b / 2.0))
    # only reached through beta-weighted terms when beta == 0
    c3 = scale / 2.0 ** ((1.0 + b) / 2.0)
    c5 = familywise_kurtosis_bound(fam.kappa_ub) ** 0.75
    c6 = c4 * c5
    c7 = c6 ** (1.0 / 3.0) / c2 * 3.0 / 2.0 ** (1.0 / 3.0)
    return BoundConstants(c1=c1, delta_c=delta_c, c2=c2, c3=c3, c4=c4, c5=c5, c6=c6, c7=c7, beta=b)


# ---------------------------------------------------------------------------
# z-scores
# ---------------------------------------------------------------------------

def zscore_of_zero(fam: PowerVarianceFamily, mu1: float, delta: float, n: int) -> float:
    """z-score of zero for the difference of two n-sample means, mu2 = (1 + delta) * mu1."""
    if mu1 < fam.gamma:
        raise ValueError(f"mu1={mu1} is below gamma={fam.gamma}")
    if delta < 0 or n < 1:
        raise ValueError("delta must be non-negative and n at least 1")
    b = fam.beta
    radicand = (1.0 + delta) ** b + 1.0 + 2.0 * fam.k_var / (fam.alpha * mu1 ** b)
    if radicand <= 0:
        raise ValueError(f"Non-positive variance term {radicand}")
    return -(mu1 ** (1.0 - b / 2.0) * math.sqrt(n) / math.sqrt(fam.alpha)) * delta / math.sqrt(radicand)


def zscore_ub(c: BoundConstants, n: int, delta: float) -> float:
    """Piecewise upper bound on the z-score of zero, linear up to delta_c."""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if delta <= c.delta_c:
        return -c.c2 * math.sqrt(n) * delta
    return -c.c3 * math.sqrt(n) * delta ** (1.0 - c.beta / 2.0)


def gaussian_tail_bound(a: float) -> float:
    """phi(a)/a, which exceeds Phi(-a) for every a > 0."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    return float(norm.pdf(a) / a)


def two_mean_error_gaussian(fam: PowerVarianceFamily, mu1: float, mu2: float, n: int) -> float:
    """Exact expected relative error of picking the smaller of two Gaussian sample means."""
    lo, hi = min(mu1, mu2), max(mu1, mu2)
    delta = (hi - lo) / lo
    return delta * float(norm.cdf(zscore_of_zero(fam, lo, delta, n)))


# ---------------------------------------------------------------------------
# Two-mean relative error bounds
# ---------------------------------------------------------------------------

def _check_delta(delta: float) -> None:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")


def rel_error_ub3_normal(c: BoundConstants, n: int, delta: float, beta: float | None = None) -> float:
    _check_delta(delta)
    b = c.beta if beta is None else beta
    if delta <= c.delta_c:
        return 1.0 / math.sqrt(2.0 * math.pi) / (c.c2 * math.sqrt(n)) * math.exp(-0.5 * c.c2 ** 2 * n * delta ** 2)
    return (1.0 / math.sqrt(2.0 * math.pi) * delta ** (b / 2.0) / (c.c3 * math.sqrt(n))
            * math.exp(-0.5 * c.c3 ** 2 * n * delta ** (2.0 - b)))


def rel_error_ub3_be(c: BoundConstants, n: int, delta: float) -> float:
    _check_delta(delta)
    if delta <= c.delta_c:
        return c.c6 / (c.c2 ** 3 * n ** 2) * delta ** -2.0
    return c.c6 / (c.c3 ** 3 * n ** 2) * delta ** ((3.0 * c.beta - 4.0) / 2.0)


def rel_error_ub3_gen(c: BoundConstants, n: int, delta: float) -> float:
    return rel_error_ub3_normal(c, n, delta) + rel_error_ub3_be(c, n, delta)


def _cond(name: str, lhs: float, relation: str, rhs: float) -> Condition:
    ops = {
        '>': lambda x, y: x > y,
        '>=': lambda x, y: x >= y,
        '<': lambda x, y: x < y,
        '<=': lambda x, y: x <= y,
    }
    return Condition(name=name, lhs=float(lhs), rhs=float(rhs), relation=relation, holds=bool(ops[relation](lhs, rhs)))


def monotonicity_floor(c: BoundConstants) -> float:
    """Smallest n (exclusive) for which the Gaussian bound decreases past delta_c."""
    b = c.beta
    if b == 0:
        return 0.0
    if b >= 2:
        return math.inf
    return b / (c.c3 ** 2 * (2.0 - b) * c.delta_c ** (2.0 - b))


def _tail_at_knot(c: BoundConstants, n: int) -> float:
    if math.isinf(c.delta_c):
        return 0.0
    return math.exp(-c.c2 ** 2 * n * c.delta_c ** 2)


def normal_conditions(c: BoundConstants, n: int, T: float) -> list[Condition]:
    conditions = [_cond('target_positive', T, '>', 0.0)]
    conditions.append(_cond('monotonicity', n, '>', monotonicity_floor(c)))
    if T > 0:
        rhs = _tail_at_knot(c, n) / (2.0 * math.pi * c.c2 ** 2 * T ** 2)
        conditions.append(_cond('piecewise_inverse', n, '>=', rhs))
    return conditions


def _raise_on_failure(what: str, conditions: list[Condition]) -> None:
    failed = [cond.name for cond in conditions if not cond.holds]
    if failed:
        raise ConditionError(f"{what}: conditions not met: {', '.join(failed)}", conditions)


def delta_th_normal(c: BoundConstants, n: int, T: float) -> float:
    """Exceedance beyond which the Gaussian two-mean bound is below T."""
    _raise_on_failure('delta_th_normal', normal_conditions(c, n, T))
    if T < 1.0 / (math.sqrt(2.0 * math.pi) * c.c2 * math.sqrt(n)):
        return math.sqrt(-(2.0 / (c.c2 ** 2 * n)) * math.log(math.sqrt(2.0 * math.pi * n) * c.c2 * T))
    return 0.0


def be_inverse(c: BoundConstants, n: int, T: float) -> float:
    """delta at which the Berry-Esseen term alone equals T/2 (first branch)."""
    return math.sqrt(c.c6) * math.sqrt(2.0) / (c.c2 ** 1.5 * n * math.sqrt(T))


def gen_conditions(c: BoundConstants, n: int, T: float) -> list[Condition]:
    conditions = [
        _cond('target_positive', T, '>', 0.0),
        _cond('monotonicity', n, '>', monotonicity_floor(c)),
    ]
    if T > 0:
        conditions.append(_cond('piecewise_inverse', n, '>=',
                                2.0 * _tail_at_knot(c, n) / (math.pi * c.c2 ** 2 * T ** 2)))
    conditions.append(_cond('beta_below_4_3', c.beta, '<', BETA_GEN_LIMIT))
    if T > 0:
        rhs = 0.0 if math.isinf(c.delta_c) else \
            math.sqrt(c.c6) * math.sqrt(2.0) / (c.c2 ** 1.5 * math.sqrt(T) * c.delta_c)
        conditions.append(_cond('be_inverse', n, '>=', rhs))
    return conditions


def delta_th_gen(c: BoundConstants, n: int, T: float) -> float:
    """Exceedance beyond which the general (Gaussian + Berry-Esseen) bound is below T."""
    _raise_on_failure('delta_th_gen', gen_conditions(c, n, T))
    be_term = be_inverse(c, n, T)
    if T < math.sqrt(2.0 / math.pi) / (c.c2 * math.sqrt(n)):
        normal_term = math.sqrt(-(2.0 / (c.c2 ** 2 * n)) * math.log(math.sqrt(math.pi * n / 2.0) * c.c2 * T))
        return max(normal_term, be_term)
    return be_term


# ---------------------------------------------------------------------------
# m means
# ---------------------------------------------------------------------------

def rel_error_ub4(delta_th: float, T: float, m: int) -> float:
    if delta_th < 0 or T <= 0 or m < 2:
        raise ValueError("Need delta_th >= 0, T > 0 and m >= 2")
    return delta_th + m * T


def t_star(c: BoundConstants, n: int, m: int) -> float:
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    return c.c6 ** (1.0 / 3.0) / (2.0 ** (1.0 / 3.0) * c.c2 * n ** (2.0 / 3.0) * m ** (2.0 / 3.0))


@dataclass(frozen=True)
class RateBound:
    value: float
    conditions_ok: bool
    diagnostics: list[Condition] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {'value': self.value, 'conditions_ok': self.conditions_ok,
                'diagnostics': [d.to_dict() for d in self.diagnostics]}


def _component_split(c: BoundConstants) -> float:
    return c.c6 ** 2 * math.pi ** 3 / 2.0 ** 5


def _g5_log_coefficient(c: BoundConstants, m: float) -> float:
    return math.log(2.0 ** (5.0 / 6.0) * m ** (2.0 / 3.0) / (math.sqrt(math.pi) * c.c6 ** (1.0 / 3.0)))


def ub5_conditions(c: BoundConstants, n: int, m: int) -> tuple[bool, list[Condition]]:
    inv_knot = 0.0 if math.isinf(c.delta_c) else 1.0 / (c.c2 ** 2 * c.delta_c ** 2)
    normal_rhs = inv_knot * (math.log(2.0 ** (5.0 / 3.0) / (math.pi * c.c6 ** (2.0 / 3.0)))
                             + (4.0 / 3.0) * math.log(m) + (1.0 / 3.0) * math.log(n))
    be_rhs = 0.0 if math.isinf(c.delta_c) else \
        2.0 * math.sqrt(c.c6) / (c.c2 ** 1.5 * c.delta_c ** 1.5) * math.sqrt(m)
    conditions = [
        _cond('monotonicity', n, '>', monotonicity_floor(c)),
        _cond('normal_inverse', n, '>=', normal_rhs),
        _cond('beta_below_4_3', c.beta, '<', BETA_GEN_LIMIT),
        _cond('be_inverse', n, '>=', be_rhs),
    ]
    split = _component_split(c)
    first_lower = _cond('first_component_lower', float(m) ** 4 * n, '>', split)
    x = _g5_log_coefficient(c, m) + math.log(n) / 6.0
    upper_rhs = 2.0 * c.c6 ** 2 * m ** 2 / x ** 3 if x > 0 else -math.inf
    first_upper = _cond('first_component_upper', n, '<=', upper_rhs)
    second = _cond('second_component', float(m) ** 4 * n, '<=', split)
    conditions += [first_lower, first_upper, second]
    ok = all(cond.holds for cond in conditions[:4]) and ((first_lower.holds and first_upper.holds) or second.holds)
    return ok, conditions


def rel_error_ub5(c: BoundConstants, n: int, m: int) -> RateBound:
    """C7 * m^(1/3) / n^(2/3), with the conditions under which it bounds the MME error."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    ok, conditions = ub5_conditions(c, n, m)
    if not ok:
        logger.debug("UB5 conditions unmet at n=%d m=%d: %s", n, m,
                     [cond.name for cond in conditions if not cond.holds])
    return RateBound(value=c.c7 * m ** (1.0 / 3.0) / n ** (2.0 / 3.0), conditions_ok=ok, diagnostics=conditions)


# ---------------------------------------------------------------------------
# Feasible region of the rate conditions
# ---------------------------------------------------------------------------

def m_threshold(c: BoundConstants) -> float:
    return math.exp(0.25) * math.pi ** 0.75 * math.sqrt(c.c6) / 2.0 ** 1.25


def feasibility_functions(c: BoundConstants, m: float) -> dict:
    """The rate conditions written as g(n) >= 0 (g1..g4) and g5(n) <= 0."""
    inv_knot = 0.0 if math.isinf(c.delta_c) else 1.0 / (c.c2 ** 2 * c.delta_c ** 2)
    k2 = math.log(2.0 ** (5.0 / 3.0) / (math.pi * c.c6 ** (2.0 / 3.0))) + (4.0 / 3.0) * math.log(m)
    a1 = monotonicity_floor(c)
    a3 = 0.0 if math.isinf(c.delta_c) else 2.0 * math.sqrt(c.c6) * math.sqrt(m) / (c.c2 ** 1.5 * c.delta_c ** 1.5)
    a4 = _component_split(c) / m ** 4
    coef = _g5_log_coefficient(c, m)
    cap = 2.0 ** (1.0 / 3.0) * c.c6 ** (2.0 / 3.0) * m ** (2.0 / 3.0)
    return {
        'g1': lambda n: n - a1,
        'g2': lambda n: n - inv_knot * (k2 + math.log(n) / 3.0),
        'g3': lambda n: n - a3,
        'g4': lambda n: n - a4,
        'g5': lambda n: coef * n ** (1.0 / 3.0) + math.log(n) * n ** (1.0 / 3.0) / 6.0 - cap,
    }


def extended_inverse(g, lo: float = 1.0, hi: float | None = None) -> float:
    """
    Root of an increasing ``g`` on [lo, inf), or -inf / +inf when 0 lies
    below / above the range of ``g``.
    """
    g_lo = g(lo)
    if g_lo > 0:
        return -math.inf
    if g_lo == 0:
        return lo
    hi = max(2.0 * lo, 2.0) if hi is None else hi
    while g(hi) < 0:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    if not g(hi) >= g_lo:
        raise ArithmeticError("Function is not increasing on the bracket")
    return float(bisect(g, lo, hi, xtol=INVERSE_XTOL, maxiter=2000))


@dataclass(frozen=True)
class FeasibleRegion:
    lower: float
    upper: float
    lower_open: bool
    inverses: dict

    @property
    def empty(self) -> bool:
        return self.lower > self.upper or (self.lower == self.upper and self.lower_open)

    def contains(self, n: float) -> bool:
        above = n > self.lower if self.lower_open else n >= self.lower
        return above and n <= self.upper

    def to_dict(self) -> dict:
        return {'lower': self.lower, 'upper': self.upper, 'lower_open': self.lower_open, 'empty': self.empty,
                'inverses': dict(self.inverses)}


def feasible_region(c: BoundConstants, m: int) -> FeasibleRegion:
    """Interval of n satisfying the rate conditions with the first delta_th component active."""
    threshold = m_threshold(c)
    if m < threshold:
        raise ConditionError(f"m={m} is below the feasibility threshold {threshold:.6g}",
                             [_cond('m_threshold', m, '>=', threshold)])
    g = feasibility_functions(c, m)
    # g2 is convex with its minimum at n = 1/(3 C2^2 delta_c^2)
    g2_start = 1.0 if math.isinf(c.delta_c) else max(1.0, 1.0 / (3.0 * c.c2 ** 2 * c.delta_c ** 2))
    inverses = {
        'g1': extended_inverse(g['g1']),
        'g2': extended_inverse(g['g2'], lo=g2_start),
        'g3': extended_inverse(g['g3']),
        'g4': extended_inverse(g['g4']),
        'g5': extended_inverse(g['g5']),
    }
    lowers = {name: max(inverses[name], 1.0) for name in ('g1', 'g2', 'g3', 'g4')}
    lower = max(lowers.values())
    strict = {'g1', 'g4'}
    lower_open = any(name in strict and value == lower and inverses[name] >= 1.0
                     for name, value in lowers.items())
    return FeasibleRegion(lower=lower, upper=inverses['g5'], lower_open=lower_open, inverses=inverses)


# ---------------------------------------------------------------------------
# n for a given tolerance
# ---------------------------------------------------------------------------

def p_max(c: BoundConstants) -> float:
    return P_MAX_FACTOR * c.delta_c


def _log_term(c: BoundConstants, p: float, m: float) -> float:
    return (math.log(2400.0 / (math.pi ** 2 * c.c2 * c.c6)) / 3.0 - math.log(p) / 3.0 + math.log(m)) ** 2


def m_min_components(c: BoundConstants, p: float, m: float) -> dict:
    b = c.beta
    if b == 0 or math.isinf(c.delta_c):
        m1 = 0.0
        m2 = 0.0
    else:
        m1 = (1.0 / (4.0 * P_MAX_FACTOR ** 3) * c.c2 ** 3 / (c.c6 * c.c3 ** 4) * (b / (2.0 - b)) ** 2
              * p ** 3 / c.delta_c ** (4.0 - 2.0 * b))
        m2 = 1.0 / 6e6 * p ** 3 / (c.c2 * c.c6 * c.delta_c ** 4) * _log_term(c, p, m)
    m3 = (math.pi ** (2.0 / 3.0) / (2.0 * 10.0 ** (2.0 / 3.0) * 3.0 ** (1.0 / 3.0))
          * c.c6 ** (1.0 / 3.0) * c.c2 ** (1.0 / 3.0) * p ** (1.0 / 3.0))
    m4 = 27.0 * 100.0 / 32.0 / (c.c2 * c.c6 * p) * _log_term(c, p, m)
    return {'m_min1': m1, 'm_min2': m2, 'm_min3': m3, 'm_min4': m4}


@dataclass
class ToleranceReport:
    p: float
    p_max: float
    m: int
    m_min: dict
    binding: str
    n: int
    feasible: bool
    diagnostics: list[Condition]
    rate: RateBound | None = None

    def to_dict(self) -> dict:
        return {
            'p': self.p, 'p_max': self.p_max, 'm': self.m, 'm_min': dict(self.m_min),
            'm_min_binding': self.binding, 'm_min_value': self.m_min.get(self.binding),
            'n': self.n, 'feasible': self.feasible,
            'diagnostics': [d.to_dict() for d in self.diagnostics],
            'rate': None if self.rate is None else self.rate.to_dict(),
        }


def tolerance_n(c: BoundConstants, m: int, p: float) -> int:
    return math.ceil(2.0 * P_MAX_FACTOR ** 1.5 * math.sqrt(c.c6) / (c.c2 ** 1.5 * p ** 1.5) * math.sqrt(m))


def n_for_tolerance(c: BoundConstants, fam: PowerVarianceFamily, m: int, p: float) -> ToleranceReport:
    """Per-arm sample size n that keeps the MME error below p percent."""
    pm = p_max(c)
    components = m_min_components(c, p, m) if p > 0 else {}
    conditions = [
        _cond('p_positive', p, '>', 0.0),
        _cond('p_max', p, '<=', pm),
        _cond('beta_below_4_3', fam.beta, '<', BETA_GEN_LIMIT),
    ]
    if components:
        conditions += [
            _cond('m_min1', m, '>', components['m_min1']),
            _cond('m_min2', m, '>=', components['m_min2']),
            _cond('m_min3', m, '>', components['m_min3']),
            _cond('m_min4', m, '>=', components['m_min4']),
        ]
    binding = max(components, key=components.get) if components else ''
    failed = [cond.name for cond in conditions if not cond.holds]
    if failed:
        message = f"n_for_tolerance: conditions not met: {', '.join(failed)}"
        if any(name.startswith('m_min') for name in failed):
            message += f" (binding m_min component {binding}={components[binding]:.6g})"
        raise ConditionError(message, conditions)
    n = tolerance_n(c, m, p)
    return ToleranceReport(p=p, p_max=pm, m=m, m_min=components, binding=binding, n=n, feasible=True,
                           diagnostics=conditions, rate=rel_error_ub5(c, n, m))


# ---------------------------------------------------------------------------
# Moments and error composition
# ---------------------------------------------------------------------------

def kurtosis_diff_bound(sig1: float, sig2: float, kap1: float, kap2: float) -> float:
    """Kurtosis of Y2 - Y1 for independent Y1, Y2."""
    if sig1 <= 0 or sig2 <= 0:
        raise ValueError("Standard deviations must be positive")
    if kap1 < 1 or kap2 < 1:
        raise ValueError("Kurtosis is at least 1")
    v1, v2 = sig1 ** 2, sig2 ** 2
    return (v2 ** 2 * kap2 + 6.0 * v2 * v1 + v1 ** 2 * kap1) / (v2 + v1) ** 2


def familywise_kurtosis_bound(kappa_ub: float) -> float:
    return max(3.0, kappa_ub)


def pair_be_constant(fam: PowerVarianceFamily, mu1: float, mu2: float, c4: float = C4_DEFAULT,
                     kap1: float = 3.0, kap2: float = 3.0) -> float:
    """
    Berry-Esseen constant for one concrete pair of arms.

    ``kap1`` and ``kap2`` are the arm kurtoses; with both at most kappa_ub the
    result is at most the familywise C6.
    """
    sig1 = math.sqrt(fam.variance(mu1))
    sig2 = math.sqrt(fam.variance(mu2))
    return c4 * kurtosis_diff_bound(sig1, sig2, kap1, kap2) ** 0.75


def err3_compose(err1: float, err2: float) -> float:
    if err1 < 0 or err2 < 0:
        raise ValueError("Errors are non-negative")
    return err1 + err1 * err2 + err2


def delta_grid(c: BoundConstants, n: int, deltas) -> list[dict]:
    rows = []
    for delta in np.asarray(deltas, dtype=float):
        delta = float(delta)
        rows.append({
            'delta': delta,
            'zscore_ub': zscore_ub(c, n, delta),
            'ub3_normal': rel_error_ub3_normal(c, n, delta),
            'ub3_be': rel_error_ub3_be(c, n, delta),
            'ub3_gen': rel_error_ub3_gen(c, n, delta),
        })
    return rows
