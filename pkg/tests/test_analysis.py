import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ssdual.analysis import (
    Classic,
    LogWeights,
    NCopies,
    Piecewise,
    UnknownFamily,
    cutoff_experiment,
    float_profiles,
    gumbel_cdf,
    gumbel_limit,
    make_family,
    sep_profile,
    tv_profile,
    verify_sharp_pair,
)
from ssdual.coupon import CouponParams, antidual_product, antidual_uniform, coupon_chain, product_pi
from ssdual.duality import ZeroMass
from ssdual.fsst import pure_chain
from ssdual.markov import Chain, absorption_tail
from ssdual.numerics import RatMatrix

half = F(1, 2)


def test_sep_examples():
    two = antidual_uniform(CouponParams([half]))
    assert sep_profile(two, [half, half], 6) == [half ** k for k in range(7)]
    assert tv_profile(two, [half, half], 6) == [half ** (k + 1) for k in range(7)]
    assert sep_profile(pure_chain([F(1, 3)] * 3), [F(1, 3)] * 3, 4) == [1, 1, 0, 0, 0]
    stat = Chain((0, 1), (half, half), two.P)
    assert tv_profile(stat, [half, half], 3) == [0] * 4
    with pytest.raises(ZeroMass):
        sep_profile(two, [1, 0], 2)


def test_sharp_pair_reports():
    p, a = [half, F(1, 3)], [F(1, 3), F(3, 4)]
    x = antidual_product(p, a)
    rep = verify_sharp_pair(x, coupon_chain(CouponParams(p)), product_pi(a), 50)
    assert rep.ok and rep.first_mismatch is None
    wrong = coupon_chain(CouponParams([F(1, 4), F(1, 3)]))
    rep = verify_sharp_pair(x, wrong, product_pi(a), 50)
    assert not rep.ok and rep.first_mismatch is not None
    assert rep.sep[rep.first_mismatch] != rep.tail[rep.first_mismatch]


@given(st.lists(st.fractions(F(1, 8), F(1, 2), max_denominator=8), min_size=1, max_size=3), st.data())
def test_inequality_chain(p, data):
    if sum(p) > 1:
        p = [x / sum(p) for x in p]
    a = data.draw(st.lists(st.fractions(F(1, 4), F(3, 4), max_denominator=8), min_size=len(p), max_size=len(p)))
    x = antidual_product(p, a)
    pi = product_pi(a)
    sep, tv = sep_profile(x, pi, 20), tv_profile(x, pi, 20)
    tail = absorption_tail(coupon_chain(CouponParams(p)), 20)
    assert all(t <= s <= q for t, s, q in zip(tv, sep, tail))
    assert sep == tail
    assert all(u >= v for u, v in zip(sep, sep[1:]))


def test_float_profiles_agree_with_exact():
    x = antidual_product([half, F(1, 3)], [F(1, 3), F(3, 4)])
    pi = product_pi([F(1, 3), F(3, 4)])
    sep, tv = float_profiles([float(v) for v in x.nu], x.P.to_float(), [float(v) for v in pi], 15)
    np.testing.assert_allclose(sep, [float(v) for v in sep_profile(x, pi, 15)], atol=1e-12)
    np.testing.assert_allclose(tv, [float(v) for v in tv_profile(x, pi, 15)], atol=1e-12)


def test_gumbel():
    assert gumbel_cdf(0) == pytest.approx(0.367879, abs=1e-6)
    assert gumbel_cdf(-math.log(math.log(2))) == pytest.approx(0.5, abs=1e-12)
    assert gumbel_cdf(-1e6) == 0.0 and gumbel_cdf(1e6) == 1.0
    grid = np.linspace(-5, 10, 60)
    vals = [gumbel_cdf(c) for c in grid]
    assert all(u <= v for u, v in zip(vals, vals[1:]))
    assert gumbel_limit(0) == pytest.approx(1 - math.exp(-1))


def test_families():
    p, N = Classic().params(10)
    assert np.allclose(p, 0.1) and N == 1
    pw = Piecewise([0.5, 1.5], [0.5, 1.0])
    p, _ = pw.params(100)
    assert p.sum() == pytest.approx(1.0) and p[0] < p[-1]
    assert pw.centering(100, "stated") == pytest.approx((200 * (math.log(100) - math.log(0.5)), 200))
    assert pw.centering(100, "limit") == pytest.approx((200 * (math.log(100) + math.log(0.5)), 200))
    with pytest.raises(ValueError):
        Piecewise([1.0, 1.0], [0.5, 1.0])  # tied minimum
    with pytest.raises(ValueError):
        Piecewise([0.5, 1.0], [0.5, 1.0])  # does not integrate to 1
    d = 1000
    t, w = NCopies(2).centering(d)
    assert t == pytest.approx(d * math.log(d) + d * math.log(math.log(d)) - d * 0.5772156649015329)
    assert w == d
    with pytest.raises(ValueError):
        NCopies(1)
    p, N = LogWeights(2, 0.5).params(50)
    assert p.sum() == pytest.approx(1.0) and N == 2 and p[0] > p[-1]
    assert p[3] / p[7] == pytest.approx((math.log(9) / math.log(5)) ** 0.5)
    with pytest.raises(ValueError):
        LogWeights(2, 1.5)
    with pytest.raises(UnknownFamily):
        make_family("zipf")
    with pytest.raises(UnknownFamily):
        cutoff_experiment("zipf", 10, 10, [0], seed=1)


def test_cutoff_table_small():
    tab = cutoff_experiment("classic", 50, 4000, [-2, -1, 0, 1, 2, 3], seed=3)
    assert [r.gumbel_limit for r in tab.rows] == [gumbel_limit(c) for c in (-2, -1, 0, 1, 2, 3)]
    assert all(0 <= r.empirical_tail <= 1 for r in tab.rows)
    emp = [r.empirical_tail for r in tab.rows]
    assert all(u >= v for u, v in zip(emp, emp[1:]))
    csv = tab.to_csv().splitlines()
    assert csv[0] == "c,empirical,limit,d,trials,t_d,w_d"
    assert csv[3].startswith("0,") and "0.632121" in csv[3]
    # limit column never depends on d or family
    other = cutoff_experiment(NCopies(2), 30, 200, [-2, -1, 0, 1, 2, 3], seed=3)
    assert [r.gumbel_limit for r in other.rows] == [r.gumbel_limit for r in tab.rows]
