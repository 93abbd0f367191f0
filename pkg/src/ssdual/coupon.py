"""Generalized coupon collector chain and its closed-form sharp antiduals.

States are count vectors ``(i_1, ..., i_d)`` with ``0 <= i_j <= N_j``, listed
in the lexicographic numbering of :func:`ssdual.poset.product_lattice`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

from .markov import Chain
from .numerics import RatMatrix, to_rational
from .poset import product_lattice


class CouponError(ValueError):
    pass


class InvalidProbabilities(CouponError):
    pass


class ConditionViolated(CouponError):
    def __init__(self, lhs: Fraction):
        self.lhs = lhs
        super().__init__(f"sum_j (1 - 1/(N_j (N_j+1))) p_j = {lhs} exceeds 1")


class InvalidWeight(CouponError):
    pass


class NegativeHold(CouponError):
    pass


def _check_probabilities(p: Sequence[Fraction]) -> None:
    if not p:
        raise InvalidProbabilities("need at least one coupon type")
    bad = [k for k, x in enumerate(p) if x <= 0]
    if bad:
        raise InvalidProbabilities(f"p[{bad[0]}] = {p[bad[0]]} must be positive")
    if sum(p) > 1:
        raise InvalidProbabilities(f"sum of p is {sum(p)} > 1")


@dataclass(frozen=True)
class CouponParams:
    p: tuple
    N: tuple = None

    def __post_init__(self):
        p = tuple(to_rational(x) for x in self.p)
        N = tuple(int(n) for n in self.N) if self.N is not None else (1,) * len(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "N", N)
        _check_probabilities(p)
        if len(N) != len(p):
            raise CouponError(f"p has {len(p)} entries but N has {len(N)}")
        if any(n < 1 for n in N):
            raise CouponError(f"every N_j must be >= 1, got {N}")

    @property
    def d(self) -> int:
        return len(self.p)


def _states(N):
    labels = product_lattice(N).labels
    return labels, {s: k for k, s in enumerate(labels)}


def _delta0(n):
    return (Fraction(1),) + (Fraction(0),) * (n - 1)


def _shift(s, k, by):
    return s[:k] + (s[k] + by,) + s[k + 1:]


def coupon_chain(params: CouponParams) -> Chain:
    """Absorbing chain of the counts; absorbs at ``(N_1, ..., N_d)``."""
    p, N = params.p, params.N
    labels, index = _states(N)
    total = sum(p)
    entries = {}
    for r, s in enumerate(labels):
        hold = 1 - total
        for k in range(params.d):
            if s[k] < N[k]:
                entries[r, index[_shift(s, k, 1)]] = p[k]
            else:
                hold += p[k]
        entries[r, r] = hold
    n = len(labels)
    return Chain(labels, _delta0(n), RatMatrix.from_sparse(n, entries))


def uniform_condition(params: CouponParams) -> Fraction:
    """Left-hand side of the condition required by :func:`antidual_uniform`."""
    return sum((1 - Fraction(1, n * (n + 1))) * x for x, n in zip(params.p, params.N))


def antidual_uniform(params: CouponParams) -> Chain:
    """Sharp antidual with uniform stationary distribution, general ``N_j``.

    From ``i``: coordinate ``k`` goes up by one w.p. ``(i_k+1)/(i_k+2) p_k``
    and drops to each lower value ``i_k - m`` (``1 <= m <= i_k``) with the
    same probability, ``p_k/((i_k+1)(i_k+2))`` below the border and
    ``p_k/(N_k+1)`` on it.
    """
    lhs = uniform_condition(params)
    if lhs > 1:
        raise ConditionViolated(lhs)
    p, N = params.p, params.N
    labels, index = _states(N)
    entries = {}
    for r, s in enumerate(labels):
        hold = Fraction(1)
        for k in range(params.d):
            i = s[k]
            if i < N[k]:
                entries[r, index[_shift(s, k, 1)]] = Fraction(i + 1, i + 2) * p[k]
                down = p[k] / ((i + 1) * (i + 2))
                hold -= (1 - Fraction(1, (i + 1) * (i + 2))) * p[k]
            else:
                down = p[k] / (N[k] + 1)
                hold -= Fraction(N[k], N[k] + 1) * p[k]
            for m in range(1, i + 1):
                entries[r, index[_shift(s, k, -m)]] = down
        entries[r, r] = hold
    n = len(labels)
    return Chain(labels, _delta0(n), RatMatrix.from_sparse(n, entries))


def _check_weights(a: Sequence[Fraction]) -> None:
    for k, x in enumerate(a):
        if not 0 < x < 1:
            raise InvalidWeight(f"a[{k}] = {x} is not in the open interval (0, 1)")


def product_pi(a: Sequence) -> tuple[Fraction, ...]:
    """Product-form law on ``{0,1}^d``: coordinate ``j`` is 1 w.p. ``a_j``."""
    a = [to_rational(x) for x in a]
    _check_weights(a)
    labels = product_lattice([1] * len(a)).labels
    return tuple(prod((x if b else 1 - x) for x, b in zip(a, s)) for s in labels)


def antidual_product(p: Sequence, a: Sequence) -> Chain:
    """Sharp antidual of the ``N_j = 1`` coupon chain with stationary law :func:`product_pi`."""
    p = [to_rational(x) for x in p]
    a = [to_rational(x) for x in a]
    if len(a) != len(p):
        raise CouponError(f"p has {len(p)} entries but a has {len(a)}")
    _check_probabilities(p)
    _check_weights(a)
    d = len(p)
    labels, index = _states([1] * d)
    entries = {}
    for r, s in enumerate(labels):
        hold = Fraction(1)
        for k in range(d):
            if s[k] == 0:
                entries[r, index[_shift(s, k, 1)]] = a[k] * p[k]
                hold -= a[k] * p[k]
            else:
                entries[r, index[_shift(s, k, -1)]] = (1 - a[k]) * p[k]
                hold -= (1 - a[k]) * p[k]
        entries[r, r] = hold
    n = len(labels)
    return Chain(labels, _delta0(n), RatMatrix.from_sparse(n, entries))


def cube_pi(alpha: Sequence, beta: Sequence) -> tuple[Fraction, ...]:
    alpha = [to_rational(x) for x in alpha]
    beta = [to_rational(x) for x in beta]
    return product_pi([x / (x + y) for x, y in zip(alpha, beta)])


def cube_walk(alpha: Sequence, beta: Sequence) -> Chain:
    """Walk on ``{0,1}^d``: coordinate k flips up w.p. alpha_k, down w.p. beta_k."""
    alpha = [to_rational(x) for x in alpha]
    beta = [to_rational(x) for x in beta]
    if len(alpha) != len(beta) or not alpha:
        raise CouponError("alpha and beta must be non-empty and of equal length")
    if any(x <= 0 for x in alpha + beta):
        raise CouponError("alpha and beta must be positive")
    d = len(alpha)
    labels, index = _states([1] * d)
    entries = {}
    for r, s in enumerate(labels):
        hold = Fraction(1)
        for k in range(d):
            if s[k] == 0:
                entries[r, index[_shift(s, k, 1)]] = alpha[k]
                hold -= alpha[k]
            else:
                entries[r, index[_shift(s, k, -1)]] = beta[k]
                hold -= beta[k]
        if hold < 0:
            raise NegativeHold(f"hold probability at {s} is {hold}")
        entries[r, r] = hold
    n = len(labels)
    return Chain(labels, _delta0(n), RatMatrix.from_sparse(n, entries))


def uniform_pi(N: Sequence[int]) -> tuple[Fraction, ...]:
    n = prod(x + 1 for x in N)
    return (Fraction(1, n),) * n
