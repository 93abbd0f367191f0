from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from ssdual.coupon import CouponParams, coupon_chain, cube_pi, cube_walk, product_pi
from ssdual.duality import (
    AbsorbingMismatch,
    Direction,
    InitialNotMonotone,
    LabelMismatch,
    NotMonotone,
    ReversalNotMonotone,
    ZeroMass,
    antidual,
    build_link,
    function_mobius_monotone,
    mobius_monotone,
    phat,
    ssd,
    verify_duality,
)
from ssdual.markov import Chain, is_eigenvalue, reverse, stationary
from ssdual.numerics import RatMatrix, matmul
from ssdual.poset import product_lattice, total_order

half = F(1, 2)


def test_link_total_order_uniform():
    link = build_link(total_order(3), [F(1, 3)] * 3)
    assert link.Lambda == RatMatrix([[1, 0, 0], [half, half, 0], [F(1, 3)] * 3])
    assert matmul(link.Lambda, link.LambdaInv) == RatMatrix.identity(3)
    assert link.H == (F(1, 3), F(2, 3), 1)


def test_link_product_lattice():
    a = [F(1, 3), F(2, 7)]
    pos = product_lattice([1, 1])
    pi = product_pi(a)
    link = build_link(pos, pi)
    assert link.Lambda[pos.max_index] == pi
    assert link.H[pos.index((1, 0))] == 1 - a[1]
    assert link.Lambda.is_lower_triangular() and link.Lambda.is_stochastic()


def test_link_zero_mass():
    with pytest.raises(ZeroMass):
        build_link(total_order(2), [0, 1])


def test_function_monotonicity_follows_mobius_sums():
    t = total_order(3)
    # sum_{e >= i} mu(i, e) f(e) = f(i) - f(i+1): non-increasing f qualify
    assert function_mobius_monotone([3, 2, 1], t)
    assert not function_mobius_monotone([1, 2, 3], t)
    pos = product_lattice([1, 2])
    assert function_mobius_monotone([F(7)] * pos.size, pos)


def test_point_mass_at_minimum_is_monotone():
    pos = product_lattice([1, 1])
    pi = product_pi([F(1, 3), F(1, 4)])
    g = [F(0)] * 4
    g[pos.min_index] = 1 / pi[pos.min_index]
    assert function_mobius_monotone(g, pos)


def test_mobius_monotone_examples():
    pos = product_lattice([1, 1])
    for d in Direction:
        assert mobius_monotone(RatMatrix.identity(4), pos, d)
    for ab, expected in ((F(3, 10), False), (F(1, 4), True)):
        chain = cube_walk([ab] * 2, [ab] * 2)
        rev = reverse(chain, cube_pi([ab] * 2, [ab] * 2))
        assert mobius_monotone(rev, pos, Direction.DOWN) is expected


def test_phat_product_coupon():
    p, a = [F(1, 3), F(1, 2)], [F(1, 4), F(2, 3)]
    pos = product_lattice([1, 1])
    star = coupon_chain(CouponParams(p))
    ph = phat(star.P, product_pi(a), pos)
    assert phat(RatMatrix.identity(4), product_pi(a), pos) == RatMatrix.identity(4)
    for i, s in enumerate(pos.labels):
        for k in range(2):
            if s[k] == 0:
                t = s[:k] + (1,) + s[k + 1:]
                assert ph[i, pos.index(t)] == (1 - a[k]) * p[k]
        assert sum(ph[i]) == 1 - sum(a[j] * p[j] for j in range(2) if s[j] == 0)


def test_antidual_single_coupon():
    star = coupon_chain(CouponParams([half]))
    x = antidual(star, [half, half], product_lattice([1]))
    assert x.P == RatMatrix([[F(3, 4), F(1, 4)], [F(1, 4), F(3, 4)]])
    assert x.nu == (1, 0)


def test_antidual_of_pure_birth_is_fsst_chain():
    from ssdual.fsst import fsst_chain

    pi = [F(1, 10), F(2, 10), F(3, 10), F(4, 10)]
    p = [F(1, 2), F(1, 3), F(1, 4)]
    a = [F(1, 2), F(1, 4), F(1, 8), F(1, 8)]
    M = 4
    entries = {(k, k): 1 - p[k] for k in range(M - 1)}
    entries.update({(k, k + 1): p[k] for k in range(M - 1)})
    entries[M - 1, M - 1] = 1
    birth = Chain(tuple(range(1, M + 1)), a, RatMatrix.from_sparse(M, entries))
    x = antidual(birth, pi, total_order(M))
    ref = fsst_chain(pi, p, a)
    assert x.P == ref.P and x.nu == ref.nu


def test_antidual_not_monotone_reports_all_entries():
    # pi proportional to (1,1,1,2) on {0,1}^2 makes the two cross moves negative
    pos = product_lattice([1, 1])
    star = coupon_chain(CouponParams([half, half]))
    with pytest.raises(NotMonotone) as e:
        antidual(star, [F(1, 5), F(1, 5), F(1, 5), F(2, 5)], pos)
    assert sorted(e.value.entries) == [((0, 1), (1, 0), F(-1, 20)), ((1, 0), (0, 1), F(-1, 20))]
    assert not mobius_monotone(phat(star.P, [F(1, 5), F(1, 5), F(1, 5), F(2, 5)], pos), pos, Direction.UP)


def test_antidual_preconditions():
    star = coupon_chain(CouponParams([half]))
    with pytest.raises(LabelMismatch):
        antidual(star, [half, half], total_order(2))
    flipped = Chain(star.labels, (0, 1), RatMatrix([[1, 0], [half, half]]))
    with pytest.raises(AbsorbingMismatch):
        antidual(flipped, [half, half], product_lattice([1]))


def test_ssd_examples():
    sym = Chain((1, 2), (1, 0), RatMatrix([[F(3, 4), F(1, 4)], [F(1, 4), F(3, 4)]]))
    star = ssd(sym, total_order(2))
    assert star.P == RatMatrix([[half, half], [0, 1]]) and star.nu == (1, 0)
    # P3 with sum(alpha + beta) <= 1 gives the coupon chain with p = alpha + beta
    alpha, beta = [F(1, 10), F(1, 5)], [F(1, 5), F(1, 4)]
    star = ssd(cube_walk(alpha, beta), product_lattice([1, 1]))
    assert star == coupon_chain(CouponParams([x + y for x, y in zip(alpha, beta)]))
    # starting stationary: dual starts absorbed
    cube = cube_walk(alpha, beta)
    star = ssd(cube.with_nu(cube_pi(alpha, beta)), product_lattice([1, 1]))
    assert star.nu == (0, 0, 0, 1)


def test_ssd_failures():
    pos = product_lattice([1, 1])
    with pytest.raises(ReversalNotMonotone):
        ssd(cube_walk([F(3, 10)] * 2, [F(3, 10)] * 2), pos)
    cube = cube_walk([F(1, 8)] * 2, [F(1, 8)] * 2)
    with pytest.raises(InitialNotMonotone):
        ssd(cube.with_nu((0, 0, 0, 1)), pos)


def test_verify_duality_detects_perturbation():
    p = [F(1, 3), F(1, 2)]
    pos = product_lattice([1, 1])
    pi = product_pi([F(1, 3), F(1, 2)])
    star = coupon_chain(CouponParams(p))
    x = antidual(star, pi, pos)
    link = build_link(pos, pi)
    assert verify_duality(x, star, link).ok
    rows = x.P.tolist()
    eps = F(1, 1000)
    rows[0][0] -= eps
    rows[0][1] += eps
    bad = Chain(x.labels, x.nu, RatMatrix(rows))
    rep = verify_duality(bad, star, link)
    assert not rep["intertwining"].ok and rep.first_failure.name == "intertwining"
    one = build_link(total_order(1), [1])
    single = Chain((1,), (1,), RatMatrix([[1]]))
    assert verify_duality(single, single, one).ok


rat = st.fractions(min_value=F(1, 12), max_value=F(1, 2), max_denominator=12)


@given(st.lists(rat, min_size=1, max_size=3), st.data())
def test_round_trip_and_spectrum(p, data):
    if sum(p) > 1:
        p = [x / (2 * sum(p)) for x in p]
    a = data.draw(st.lists(st.fractions(F(1, 10), F(9, 10), max_denominator=10), min_size=len(p), max_size=len(p)))
    pos = product_lattice([1] * len(p))
    star = coupon_chain(CouponParams(p))
    try:
        x = antidual(star, product_pi(a), pos)
    except NotMonotone:
        assert not mobius_monotone(phat(star.P, product_pi(a), pos), pos, Direction.UP)
        return
    assert mobius_monotone(phat(star.P, product_pi(a), pos), pos, Direction.UP)
    assert stationary(x) == product_pi(a)
    assert ssd(x, pos) == star
    for lam in [1, 0, F(1, 2), 1 - p[0], 1 - sum(p), F(1, 7)]:
        assert is_eigenvalue(x.P, lam) == is_eigenvalue(star.P, lam)


@given(st.lists(st.integers(1, 4), min_size=4, max_size=4), st.fractions(F(1, 8), F(1, 2), max_denominator=8))
def test_monotonicity_equivalence_on_diamond(w, q):
    pos = product_lattice([1, 1])
    pi = [F(x, sum(w)) for x in w]
    star = coupon_chain(CouponParams([q, q]))
    ok = mobius_monotone(phat(star.P, pi, pos), pos, Direction.UP)
    try:
        antidual(star, pi, pos)
        assert ok
    except NotMonotone:
        assert not ok
