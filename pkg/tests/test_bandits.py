import os
import sys
import math
import numpy as np
import pytest
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
from app.errors.exceptions import ConfigError
from app.bounds import bandits
from app.bounds.bandits import (SWEEP_COLUMNS, MMEInstance, arm_kurtosis, draw_sample_means, draw_samples,
                                expected_error_decomposition, means_linspace,
                                mme_error, mme_estimate, run_trial, sample_arm, simulate_choices, sweep,
                                two_stage_errors, verify_bound, with_verdicts)
from app.bounds.calculus import CHI2_FAMILY, PowerVarianceFamily, derive_constants
from app.bounds.enums import ArmKind, BoundKind
from app.utils import substream

CHI2 = ArmKind.NONCENTRAL_CHISQ1
GAUSS = ArmKind.GAUSSIAN
UNIT_GAUSSIAN = PowerVarianceFamily(alpha=1.0, beta=0.0, gamma=1.0, name='gaussian')
C = derive_constants(CHI2_FAMILY)


@pytest.mark.parametrize('kind,mu,fam,variance', [
    (CHI2, 3.0, None, 10.0),
    (CHI2, 1.0, None, 2.0),
    (GAUSS, 4.0, PowerVarianceFamily(alpha=2.0, beta=1.0, gamma=1.0), 8.0),
])
def test_sample_arm_moments(kind, mu, fam, variance):
    draws = sample_arm(kind, mu, substream(3, 0), fam=fam, size=1000000)
    kurtosis = arm_kurtosis(kind, mu)
    assert abs(draws.mean() - mu) < 4 * math.sqrt(variance / draws.size)
    assert abs(draws.var() - variance) < 4 * math.sqrt(variance ** 2 * (kurtosis - 1) / draws.size)


def test_sample_arm_rejects_bad_input():
    with pytest.raises(ConfigError):
        sample_arm(GAUSS, 1.0, substream(0, 0))
    with pytest.raises(ValueError):
        sample_arm(CHI2, 0.5, substream(0, 0))


def test_arm_kurtosis():
    assert arm_kurtosis(CHI2, 1.0) == pytest.approx(15.0)
    assert arm_kurtosis(CHI2, 3.0) == pytest.approx(7.32)
    assert arm_kurtosis(GAUSS, 2.0) == 3.0


def test_exact_sample_means_match_averaged_draws():
    instance = MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=(1.0, 3.0), n=10)
    rng = substream(9, 0)
    averaged = np.stack([draw_samples(instance, rng).mean(axis=1) for _ in range(20000)])
    exact = np.stack([draw_sample_means(instance, rng) for _ in range(20000)])
    assert draw_samples(instance, rng).shape == (2, 10)
    for arm, variance in enumerate((2.0 / 10, 10.0 / 10)):
        se = 4 * np.sqrt(2 * variance / 20000)
        assert abs(averaged[:, arm].mean() - exact[:, arm].mean()) < se
        assert averaged[:, arm].var() == pytest.approx(variance, rel=0.05)
        assert exact[:, arm].var() == pytest.approx(variance, rel=0.05)


def test_mme_estimate():
    assert mme_estimate([[1.0, 2.0], [0.0, 3.0]]) == 0
    assert mme_estimate([[5.0], [4.0], [4.5]]) == 1
    with pytest.raises(ValueError):
        mme_estimate([[1.0], []])
    with pytest.raises(ValueError):
        mme_estimate([[1.0, 2.0], [1.0]])
    with pytest.raises(ValueError):
        mme_estimate([])


def test_run_trial_picks_through_mme_estimate(monkeypatch):
    calls = []

    def recording_estimate(samples):
        calls.append(np.asarray(samples).shape)
        return mme_estimate(samples)

    monkeypatch.setattr(bandits, 'draw_sample_means', lambda instance, rng: np.array([2.0, 1.0, 1.0]))
    monkeypatch.setattr(bandits, 'mme_estimate', recording_estimate)
    instance = MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=(1.0, 1.5, 2.0), n=10)
    outcome = run_trial(instance, substream(0, 0))
    assert calls == [(3, 1)]
    assert outcome.chosen_index == 1
    assert outcome.err_mme == pytest.approx(0.5)


def test_instance_validation():
    with pytest.raises(ValueError):
        MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=(), n=10)
    with pytest.raises(ValueError):
        MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=(1.0, 2.0), n=0)


def test_trivial_instances_have_zero_error():
    single = MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=(4.0,), n=5)
    assert mme_error(single, 50) == (0.0, 0.0)
    same = MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=(2.0, 2.0, 2.0), n=5)
    assert mme_error(same, 50)[0] == 0.0


def test_two_gaussian_arms_match_closed_form():
    instance = MMEInstance(fam=UNIT_GAUSSIAN, kind=GAUSS, means=(1.0, 2.0), n=1)
    err, se = mme_error(instance, 100000, seed=7)
    assert abs(err - 0.2398) <= 3 * se


def test_choices_independent_of_threads():
    instance = MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=tuple(means_linspace(10)), n=20)
    one = simulate_choices(instance, 500, seed=4, threads=1)
    four = simulate_choices(instance, 500, seed=4, threads=4)
    assert np.array_equal(one, four)


def test_reordering_arms_does_not_change_error():
    means = (1.0, 1.3, 1.6, 2.5)
    a, se_a = mme_error(MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=means, n=20), 4000, seed=1)
    b, se_b = mme_error(MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=means[::-1], n=20), 4000, seed=2)
    assert abs(a - b) <= 3 * math.hypot(se_a, se_b)


def test_two_arm_bound_passes():
    report = verify_bound(CHI2_FAMILY, [1.0, 1.5], 2000, 200, C, kind=CHI2, seed=3)
    assert report.bound_kind == BoundKind.UB3_GEN
    assert report.conditions_ok
    assert report.status == 'pass'
    assert report.to_dict()['pass'] is True


def test_rate_bound_without_conditions_has_no_verdict():
    report = verify_bound(CHI2_FAMILY, means_linspace(100), 10, 50, C, kind=CHI2)
    assert report.bound_kind == BoundKind.UB5
    assert report.status == 'conditions unmet'
    assert report.passed is None
    assert report.to_dict()['pass'] is None
    assert any(not d['holds'] for d in report.to_dict()['diagnostics'])


def test_hundred_arms_against_rate_bound():
    means = means_linspace(100, 1.0, 10.0)
    reports = [verify_bound(CHI2_FAMILY, means, n, 200, C, kind=CHI2, seed=5) for n in (1000, 10000, 100000)]
    for report in reports:
        if report.conditions_ok:
            assert report.passed
    assert not reports[0].conditions_ok
    assert reports[1].conditions_ok and reports[2].conditions_ok
    errors = [r.empirical for r in reports]
    assert all(b <= a for a, b in zip(errors, errors[1:]))


def test_error_falls_with_n():
    means = tuple(means_linspace(100, 1.0, 10.0))
    errors = [mme_error(MMEInstance(fam=CHI2_FAMILY, kind=CHI2, means=means, n=n), 200, seed=6)[0]
              for n in (10, 100, 1000)]
    assert errors[0] > errors[1] > errors[2] > 0


def test_two_stage_composition_is_exact():
    report = two_stage_errors(CHI2_FAMILY, CHI2, m=20, n=30, trials=300, seed=2)
    assert report.err3 == pytest.approx(report.composed, rel=1e-9)
    assert report.err1 >= 0 and report.err2 >= 0
    with pytest.raises(ConfigError):
        two_stage_errors(CHI2_FAMILY, CHI2, m=5, n=5, prior=(3.0, 1.0))


def test_error_decomposition():
    instance = MMEInstance(fam=UNIT_GAUSSIAN, kind=GAUSS, means=(1.5, 1.0, 1.2), n=10)
    result = expected_error_decomposition(instance, trials=2000, seed=3)
    assert result.sorted_means == [1.0, 1.2, 1.5]
    assert sum(result.probabilities) == pytest.approx(1.0)
    assert result.decomposed == pytest.approx(result.empirical, abs=1e-12)
    assert result.probabilities[0] > result.probabilities[1] > result.probabilities[2]
    assert [row['rank'] for row in result.to_dict()['rows']] == [1, 2, 3]


def test_sweep_and_verdicts():
    frame = sweep(CHI2_FAMILY, CHI2, [[1.0, 2.0], [1.0, 2.0, 3.0]], [10, 100], 50, 0, C)
    assert list(frame.columns) == SWEEP_COLUMNS
    assert len(frame) == 4
    judged = with_verdicts(frame)
    two_arm = judged[judged['m'] == 2]
    three_arm = judged[judged['m'] == 3]
    assert two_arm['pass'].notna().all()
    assert three_arm['pass'].isna().all()
