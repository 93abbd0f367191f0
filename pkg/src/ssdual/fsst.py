"""Chains with a prescribed stationary law and prescribed fastest strong stationary time.

Every chain here is the sharp antidual, for the total order on ``{1..M}``, of
a pure-birth chain ``k -> k+1`` w.p. ``p_k``.  Its FSST is a mixture of sums
of geometric variables (each supported on ``{1, 2, ...}``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .markov import Chain, _tail
from .numerics import RatMatrix, to_rational
from .poset import product_lattice


class FsstError(ValueError):
    pass


class NotRealizable(FsstError):
    """Some entry of the constructed matrix is negative.

    ``entries`` holds ``(k, s, value)`` with 1-based state labels.
    """

    def __init__(self, entries):
        self.entries = entries
        shown = ", ".join(f"P({k},{s}) = {v}" for k, s, v in entries[:5])
        super().__init__(f"{len(entries)} negative entries: {shown}")


class InvalidP(FsstError):
    pass


@dataclass(frozen=True)
class GeometricMixture:
    """``T ~ sum_i a_i G(p_i, ..., p_{M-1})``; weight ``a_M`` is an atom at 0."""

    a: tuple
    p: tuple

    def __post_init__(self):
        a = tuple(to_rational(x) for x in self.a)
        p = tuple(to_rational(x) for x in self.p)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "p", p)
        if len(p) != len(a) - 1:
            raise FsstError(f"need len(p) = len(a) - 1, got {len(p)} and {len(a)}")
        if any(x < 0 for x in a) or sum(a) != 1:
            raise FsstError("a must be a probability vector")
        if any(not 0 <= x <= 1 for x in p):
            raise FsstError("every p_k must lie in [0, 1]")

    @property
    def M(self) -> int:
        return len(self.a)


def _validate_pi(pi):
    pi = tuple(to_rational(x) for x in pi)
    if len(pi) < 2:
        raise FsstError("need at least two states")
    if any(x <= 0 for x in pi) or sum(pi) != 1:
        raise FsstError("pi must be strictly positive and sum to 1")
    return pi


def _cumulative(pi):
    H = [Fraction(0)]
    for x in pi:
        H.append(H[-1] + x)
    return H  # H[k] = pi(1) + ... + pi(k), H[0] = 0


def fsst_chain(pi: Sequence, p: Sequence, a: Sequence) -> Chain:
    """Skip-free chain on ``{1..M}`` with stationary law ``pi`` and FSST
    ``sum_i a_i G(p_i, ..., p_{M-1})``.

    The initial law is ``nu(k) = pi(k) sum_{i >= k} a_i / H(i)``.
    """
    pi = _validate_pi(pi)
    M = len(pi)
    mix = GeometricMixture(a, p)
    if mix.M != M:
        raise FsstError(f"a has {mix.M} weights for {M} states")
    p = (None,) + mix.p  # 1-based
    q = (None,) + pi
    H = _cumulative(pi)
    P = {}
    P[1, 1] = 1 - q[2] / (q[1] + q[2]) * p[1]
    P[1, 2] = q[2] / (q[1] + q[2]) * p[1]
    for k in range(2, M):
        below = p[k - 1] * (1 - H[k - 1] / H[k]) - p[k] * (1 - H[k] / H[k + 1])
        for s in range(1, k):
            P[k, s] = q[s] / q[k] * below
        P[k, k] = 1 - p[k] * (1 - H[k] / H[k + 1]) - p[k - 1] * H[k - 1] / H[k]
        P[k, k + 1] = p[k] * H[k] / H[k + 1] * q[k + 1] / q[k]
    for s in range(1, M):
        P[M, s] = p[M - 1] * q[s]
    P[M, M] = 1 - p[M - 1] + p[M - 1] * q[M]
    neg = [(k, s, v) for (k, s), v in sorted(P.items()) if v < 0]
    if neg:
        raise NotRealizable(neg)
    nu = []
    for k in range(1, M + 1):
        nu.append(q[k] * sum((mix.a[i - 1] / H[i] for i in range(k, M + 1)), Fraction(0)))
    matrix = RatMatrix.from_sparse(M, {(k - 1, s - 1): v for (k, s), v in P.items()})
    return Chain(tuple(range(1, M + 1)), tuple(nu), matrix)


def pure_chain(pi: Sequence) -> Chain:
    """Chain started at state 1 whose FSST equals ``M - 1`` almost surely.

    Not every positive ``pi`` is admissible: the entries below the diagonal
    need ``H(k)^2 >= H(k-1) H(k+1)``, which holds e.g. for non-increasing
    ``pi``.  Otherwise NotRealizable is raised.
    """
    pi = tuple(to_rational(x) for x in pi)
    if len(pi) == 1:
        return Chain((1,), (Fraction(1),), RatMatrix([[1]]))
    pi = _validate_pi(pi)
    M = len(pi)
    q = (None,) + pi
    H = _cumulative(pi)
    P = {}
    for r in (1, 2):
        P[1, r] = q[r] / (q[1] + q[2])
    for k in range(2, M):
        c = H[k] / H[k + 1] - H[k - 1] / H[k]
        for r in range(1, k + 1):
            P[k, r] = q[r] / q[k] * c
        P[k, k + 1] = q[k + 1] / q[k] * H[k] / H[k + 1]
    for r in range(1, M + 1):
        P[M, r] = q[r]
    neg = [(k, s, v) for (k, s), v in sorted(P.items()) if v < 0]
    if neg:
        raise NotRealizable(neg)
    nu = (Fraction(1),) + (Fraction(0),) * (M - 1)
    matrix = RatMatrix.from_sparse(M, {(k - 1, r - 1): v for (k, r), v in P.items()})
    return Chain(tuple(range(1, M + 1)), nu, matrix)


def pure_birth_chain(p: Sequence, a: Sequence) -> Chain:
    """Absorbing dual: ``k -> k+1`` w.p. ``p_k``, started from ``a``."""
    mix = GeometricMixture(a, p)
    M = mix.M
    entries = {}
    for k in range(M - 1):
        entries[k, k] = 1 - mix.p[k]
        entries[k, k + 1] = mix.p[k]
    entries[M - 1, M - 1] = Fraction(1)
    return Chain(tuple(range(1, M + 1)), mix.a, RatMatrix.from_sparse(M, entries))


def mixture_tail(mix: GeometricMixture, K: int) -> list[Fraction]:
    """Exact ``P(T > k)`` for k = 0..K."""
    chain = pure_birth_chain(mix.p, mix.a)
    return _tail(chain.nu, chain.P, mix.M - 1, K)


def _check_pair_args(d: int, p) -> Fraction:
    p = to_rational(p)
    if d < 2:
        raise InvalidP(f"d must exceed 1, got {d}")
    if not 0 < p <= Fraction(1, d):
        raise InvalidP(f"need 0 < p <= 1/d = 1/{d}, got {p}")
    return p


def hypercube_pair(d: int, p) -> tuple[Chain, Chain]:
    """Two chains with uniform stationary laws on ``{1..d}`` and ``{0,1}^d``
    sharing the FSST ``sum_{k=1}^{d-1} Geo(k p)``.
    """
    p = _check_pair_args(d, p)
    path = fsst_chain(
        [Fraction(1, d)] * d,
        [(d - k) * p for k in range(1, d)],
        [Fraction(1)] + [Fraction(0)] * (d - 1),
    )
    labels = product_lattice([1] * d).labels
    index = {s: k for k, s in enumerate(labels)}
    entries = {}
    for r, s in enumerate(labels):
        entries[r, r] = 1 - d * p / 2
        for k in range(d):
            t = s[:k] + (1 - s[k],) + s[k + 1:]
            entries[r, index[t]] = p / 2
    n = len(labels)
    nu = [Fraction(0)] * n
    nu[index[(0,) * d]] = Fraction(1, 2)
    nu[index[(1,) + (0,) * (d - 1)]] = Fraction(1, 2)
    cube = Chain(labels, tuple(nu), RatMatrix.from_sparse(n, entries))
    return path, cube


def hypercube_pair_duals(d: int, p) -> tuple[Chain, Chain]:
    """The absorbing sharp duals of :func:`hypercube_pair`'s two chains."""
    from .coupon import CouponParams, coupon_chain

    p = _check_pair_args(d, p)
    birth = pure_birth_chain([(d - k) * p for k in range(1, d)], [1] + [0] * (d - 1))
    star = coupon_chain(CouponParams(p=[p] * d, N=[1] * d))
    start = [Fraction(0)] * star.size
    start[star.labels.index((1,) + (0,) * (d - 1))] = Fraction(1)
    return birth, star.with_nu(start)
