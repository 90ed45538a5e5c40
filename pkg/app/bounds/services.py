"""
Business logic for the bounds blueprint and the ``bounds``/``verify-mme``
commands: parameter parsing plus assembly of the JSON reports.
"""

import logging

import numpy as np

from app.errors.exceptions import ConditionError, ConfigError
from .bandits import means_linspace, sweep, verify_bound
from .calculus import (CHI2_FAMILY, C4_DEFAULT, BoundConstants, PowerVarianceFamily, delta_grid, delta_th_gen,
                       derive_constants, feasible_region, n_for_tolerance, rel_error_ub5, t_star)
from .enums import ArmKind

logger = logging.getLogger(__name__)

NAMED_FAMILIES = {
    'chi2': CHI2_FAMILY,
    'noncentral_chi2_1': CHI2_FAMILY,
    'gaussian': PowerVarianceFamily(alpha=1.0, beta=0.0, gamma=1.0, k_var=0.0, kappa_ub=3.0, name='gaussian'),
}


def family_from(value) -> PowerVarianceFamily:
    """A named family (``chi2``, ``gaussian``) or a dict of family fields; chi2 when absent."""
    if value is None or value == '':
        return CHI2_FAMILY
    if isinstance(value, str):
        try:
            return NAMED_FAMILIES[value.strip().lower()]
        except KeyError:
            raise ConfigError(f"Unknown family {value!r}; use one of {', '.join(NAMED_FAMILIES)}") from None
    if isinstance(value, dict):
        return PowerVarianceFamily.from_dict(value)
    raise ConfigError(f"Cannot read a family from {value!r}")


def kind_for(fam: PowerVarianceFamily, value=None) -> ArmKind:
    if value:
        return ArmKind.parse(value)
    return ArmKind.NONCENTRAL_CHISQ1 if fam == CHI2_FAMILY else ArmKind.GAUSSIAN


def parse_means(value) -> list[float]:
    """
    Arm means from a list, a comma separated string, or ``linspace:m:lo:hi``.
    """
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, dict) and 'linspace' in value:
        m, lo, hi = value['linspace']
        return means_linspace(int(m), float(lo), float(hi))
    if isinstance(value, str):
        text = value.strip()
        if text.startswith('linspace:'):
            parts = text.split(':')[1:]
            if len(parts) != 3:
                raise ConfigError(f"Expected linspace:m:lo:hi, got {value!r}")
            return means_linspace(int(parts[0]), float(parts[1]), float(parts[2]))
        try:
            return [float(v) for v in text.split(',') if v.strip()]
        except ValueError:
            raise ConfigError(f"Cannot parse means {value!r}") from None
    raise ConfigError(f"Cannot parse means {value!r}")


def parse_grid(value) -> list[float]:
    """Grid from a list, a comma separated string, or ``lo:hi:count`` (evenly spaced)."""
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    text = str(value).strip()
    if text.count(':') == 2:
        lo, hi, count = text.split(':')
        return np.linspace(float(lo), float(hi), int(count)).tolist()
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigError(f"Cannot parse grid {value!r}") from None


def _int(values: dict, key: str, default: int) -> int:
    value = values.get(key)
    if value is None or value == '':
        return int(default)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid value for {key}: {value!r}") from None


def constants_for(values: dict, defaults: dict) -> tuple[PowerVarianceFamily, BoundConstants]:
    fam = family_from(values.get('family'))
    c4 = float(values.get('c4') or defaults.get('BOUNDS_C4', C4_DEFAULT))
    return fam, derive_constants(fam, c4)


def constants(values: dict, defaults: dict) -> dict:
    fam, c = constants_for(values, defaults)
    return {'family': fam.to_dict(), 'constants': c.to_dict()}


def tolerance(values: dict, defaults: dict) -> dict:
    fam, c = constants_for(values, defaults)
    try:
        m = int(values['m'])
        p = float(values['p'])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("Tolerance needs integer 'm' and percentage 'p'") from None
    report = n_for_tolerance(c, fam, m, p)
    return {'family': fam.to_dict(), 'constants': c.to_dict(), 'tolerance': report.to_dict()}


def rate(values: dict, defaults: dict) -> dict:
    fam, c = constants_for(values, defaults)
    try:
        m = int(values['m'])
        n = int(values['n'])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("Rate needs integers 'm' and 'n'") from None
    body = {'family': fam.to_dict(), 'constants': c.to_dict(), 'm': m, 'n': n,
            'ub5': rel_error_ub5(c, n, m).to_dict(), 't_star': t_star(c, n, m)}
    try:
        body['delta_th_gen_at_t_star'] = delta_th_gen(c, n, body['t_star'])
    except ConditionError as e:
        body['delta_th_gen_at_t_star'] = None
        body['delta_th_gen_failed'] = e.failed()
    try:
        body['feasible_region'] = feasible_region(c, m).to_dict()
    except ConditionError as e:
        logger.warning("No feasible region for m=%d: %s", m, e)
        body['feasible_region'] = None
        body['feasible_region_error'] = str(e)
    return body


def grid(values: dict, defaults: dict) -> dict:
    fam, c = constants_for(values, defaults)
    try:
        n = int(values['n'])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("Grid needs integer 'n'") from None
    deltas = parse_grid(values.get('deltas', '0.05:5:100'))
    return {'family': fam.to_dict(), 'constants': c.to_dict(), 'n': n, 'rows': delta_grid(c, n, deltas)}


def verify(values: dict, defaults: dict) -> dict:
    fam, c = constants_for(values, defaults)
    means = parse_means(values.get('means', 'linspace:2:1:2'))
    try:
        n = int(values['n'])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("Verification needs integer 'n'") from None
    trials = _int(values, 'trials', defaults.get('BANDITS_TRIALS', 200))
    report = verify_bound(fam, means, n, trials, c, kind=kind_for(fam, values.get('kind')),
                          seed=_int(values, 'seed', defaults.get('MEDOIDS_SEED', 0)),
                          threads=_int(values, 'threads', 1))
    return report.to_dict()


def verify_sweep(fam: PowerVarianceFamily, kind: ArmKind, means: list[float], n_grid: list[int], trials: int,
                 seed: int, c: BoundConstants, threads: int = 1):
    return sweep(fam, kind, [means], [int(n) for n in n_grid], trials, seed, c, threads=threads)
