import math
from fractions import Fraction as F

import numpy as np
import pytest

from ssdual import _mc
from ssdual.analysis import simulate_coupon_T
from ssdual.coupon import CouponParams, InvalidProbabilities, coupon_chain
from ssdual.markov import absorption_tail


def test_single_sure_coupon():
    s = simulate_coupon_T([1.0], [1], 1000, seed=5)
    assert np.all(s.samples == 1)
    s = simulate_coupon_T([1.0], [1], 100, seed=5, method="steps")
    assert np.all(s.samples == 1)


def test_two_fair_coupons_mean():
    s = simulate_coupon_T([0.5, 0.5], [1, 1], 100_000, seed=12)
    assert abs(s.mean - 3) <= 0.05
    assert s.variance == pytest.approx(2.0, rel=0.05)


def test_invalid():
    with pytest.raises(InvalidProbabilities):
        simulate_coupon_T([0.7, 0.6], 1, 10, seed=1)
    with pytest.raises(InvalidProbabilities):
        simulate_coupon_T([0.0, 0.5], 1, 10, seed=1)
    with pytest.raises(ValueError):
        simulate_coupon_T([0.5], 1, 0, seed=1)


@pytest.mark.parametrize("method", ["skip", "steps"])
def test_bit_reproducible_across_workers(method):
    p = [0.1, 0.2, 0.05, 0.3]
    a = simulate_coupon_T(p, [2, 1, 1, 3], 5000, seed=99, method=method, workers=1)
    b = simulate_coupon_T(p, [2, 1, 1, 3], 5000, seed=99, method=method, workers=4)
    c = simulate_coupon_T(p, [2, 1, 1, 3], 5000, seed=99, method=method, workers=3)
    assert np.array_equal(a.samples, b.samples) and np.array_equal(a.samples, c.samples)
    assert not np.array_equal(a.samples, simulate_coupon_T(p, [2, 1, 1, 3], 5000, seed=100, method=method).samples)


@pytest.mark.parametrize(
    "p,N,method",
    [
        ([F(1, 4), F(1, 3), F(1, 6)], [1, 2, 1], "skip"),
        ([F(1, 4), F(1, 3), F(1, 6)], [1, 2, 1], "steps"),
        ([F(1, 5)] * 3, [2, 2, 2], "skip"),
        ([F(1, 2), F(1, 8)], [1, 1], "steps"),
    ],
)
def test_empirical_tail_within_four_standard_errors(p, N, method):
    trials = 100_000
    K = 40
    exact = absorption_tail(coupon_chain(CouponParams(p, N)), K)
    s = simulate_coupon_T([float(x) for x in p], N, trials, seed=2024, method=method)
    emp = s.tail_grid(range(K + 1))
    for k in range(K + 1):
        q = float(exact[k])
        se = math.sqrt(max(q * (1 - q), 1e-12) / trials)
        assert abs(emp[k] - q) <= 4 * se + 1e-12, (k, emp[k], q)
    mean = float(sum(absorption_tail(coupon_chain(CouponParams(p, N)), 400)))
    assert abs(s.mean - mean) <= 4 * math.sqrt(s.variance / trials)


def test_skip_and_steps_agree_in_distribution():
    p = [0.02] * 20 + [0.01] * 30
    a = simulate_coupon_T(p, 1, 20_000, seed=1, method="skip").samples
    b = simulate_coupon_T(p, 1, 20_000, seed=2, method="steps").samples
    from scipy.stats import ks_2samp

    assert ks_2samp(a, b).pvalue > 1e-3


def test_uniform_fast_path_matches_general_kernel_in_law():
    d = 30
    uni = simulate_coupon_T([1 / d] * d, 2, 20_000, seed=4).samples
    out = np.empty(20_000, dtype=np.int64)
    _mc.skip_general(np.full(d, 1 / d), np.full(d, 2, dtype=np.int64), np.uint64(4), 0, 20_000, out)
    assert abs(uni.mean() - out.mean()) < 4 * math.sqrt(2 * uni.var() / 20_000)


def test_rng_helpers():
    key = _mc.trial_key(np.uint64(7), 3)
    u = np.array([_mc.uniform(key, c) for c in range(20000)])
    assert u.min() > 0 and u.max() <= 1
    assert abs(u.mean() - 0.5) < 0.01
    assert _mc.geometric(0.3, 1.0) == 1
    assert _mc.uniform(key, 5) == _mc.uniform(_mc.trial_key(np.uint64(7), 3), 5)


def test_alias_table_probabilities():
    w = np.array([0.1, 0.25, 0.05, 0.6])
    prob, alias = _mc.alias_table(w)
    n = w.size
    implied = np.zeros(n)
    for i in range(n):
        implied[i] += prob[i] / n
        implied[alias[i]] += (1 - prob[i]) / n
    np.testing.assert_allclose(implied, w, atol=1e-12)


def test_summary_grid():
    s = simulate_coupon_T([0.5, 0.5], 1, 1000, seed=8)
    summ = s.summary([0, 1, 2])
    assert summ["tail"][0] == [0.0, 1.0] and summ["tail"][1] == [1.0, 1.0]
    assert summ["trials"] == 1000 and summ["seed"] == 8
