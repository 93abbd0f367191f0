"""Exact finite Markov chains: classification, stationary laws, reversal, tails."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .numerics import RatMatrix, determinant, solve, to_rational, vecmat


class ChainError(ValueError):
    pass


class NotErgodic(ChainError):
    pass


class NotAbsorbing(ChainError):
    pass


class NotStationary(ChainError):
    pass


@dataclass(frozen=True)
class Chain:
    """A chain ``X ~ (nu, P)`` with exact entries.

    Construction checks that ``P`` is square and row-stochastic and that
    ``nu`` is a probability vector of matching length.
    """

    labels: tuple
    nu: tuple
    P: RatMatrix

    def __post_init__(self):
        P = self.P if isinstance(self.P, RatMatrix) else RatMatrix(self.P)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "nu", tuple(to_rational(x) for x in self.nu))
        object.__setattr__(self, "labels", tuple(self.labels))
        n = len(self.labels)
        if P.shape != (n, n):
            raise ChainError(f"P has shape {P.shape} but there are {n} labels")
        if len(self.nu) != n:
            raise ChainError(f"nu has length {len(self.nu)}, expected {n}")
        neg = P.negative_entries()
        if neg:
            i, j, x = neg[0]
            raise ChainError(f"P[{i}][{j}] = {x} is negative")
        for i, s in enumerate(P.row_sums()):
            if s != 1:
                raise ChainError(f"row {i} of P sums to {s}, not 1")
        if any(x < 0 for x in self.nu) or sum(self.nu) != 1:
            raise ChainError("nu must be a probability vector")

    @property
    def size(self) -> int:
        return len(self.labels)

    def with_nu(self, nu: Sequence) -> "Chain":
        return Chain(self.labels, tuple(nu), self.P)

    def permuted(self, order: Sequence[int]) -> "Chain":
        """Reorder states so that new state ``k`` is old state ``order[k]``."""
        rows = self.P.tolist()
        P = RatMatrix._wrap(
            tuple(tuple(rows[a][b] for b in order) for a in order), len(order)
        )
        return Chain(tuple(self.labels[a] for a in order), tuple(self.nu[a] for a in order), P)


class Kind(enum.Enum):
    ERGODIC = "ergodic"
    ABSORBING_UNIQUE = "absorbing-unique"
    OTHER = "other"


@dataclass(frozen=True)
class ChainClass:
    kind: Kind
    absorbing: int | None = None

    def __str__(self):
        if self.kind is Kind.ABSORBING_UNIQUE:
            return f"AbsorbingUnique({self.absorbing})"
        return {Kind.ERGODIC: "Ergodic", Kind.OTHER: "Other"}[self.kind]


def _digraph(P: RatMatrix):
    rows, cols = [], []
    for i, row in enumerate(P.nonzero_rows()):
        for j, _ in row:
            rows.append(i)
            cols.append(j)
    n = P.nrows
    return csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))


def _period(P: RatMatrix) -> int:
    # BFS levels from state 0; the gcd of level[u] + 1 - level[v] over all
    # edges is the period of a strongly connected digraph.
    nz = P.nonzero_rows()
    level = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v, _ in nz[u]:
                if v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u, row in enumerate(nz):
        for v, _ in row:
            g = gcd(g, abs(level[u] + 1 - level[v]))
    return g


def classify(chain: Chain) -> ChainClass:
    P = chain.P
    n = P.nrows
    ncomp, comp = connected_components(_digraph(P), directed=True, connection="strong")
    if ncomp == 1:
        if _period(P) == 1:
            return ChainClass(Kind.ERGODIC)
        return ChainClass(Kind.OTHER)
    closed = [True] * ncomp
    for i, row in enumerate(P.nonzero_rows()):
        for j, _ in row:
            if comp[i] != comp[j]:
                closed[comp[i]] = False
    closed_ids = [c for c in range(ncomp) if closed[c]]
    if len(closed_ids) == 1:
        members = [i for i in range(n) if comp[i] == closed_ids[0]]
        if len(members) == 1 and P[members[0], members[0]] == 1:
            return ChainClass(Kind.ABSORBING_UNIQUE, members[0])
    return ChainClass(Kind.OTHER)


def absorbing_state(chain: Chain) -> int:
    """Index of the unique absorbing state, or raise NotAbsorbing.

    A one-state chain counts as absorbed from the start.
    """
    if chain.size == 1:
        return 0
    cls = classify(chain)
    if cls.kind is not Kind.ABSORBING_UNIQUE:
        raise NotAbsorbing(f"chain is {cls}, not absorbing with a unique absorbing state")
    return cls.absorbing


def stationary(chain: Chain) -> tuple[Fraction, ...]:
    cls = classify(chain)
    if cls.kind is not Kind.ERGODIC:
        raise NotErgodic(f"chain is {cls}")
    n = chain.size
    # (P^T - I) pi^T = 0 with the last equation replaced by sum(pi) = 1
    A = (chain.P.T - RatMatrix.identity(n)).tolist()
    A[-1] = [Fraction(1)] * n
    b = [Fraction(0)] * (n - 1) + [Fraction(1)]
    return solve(RatMatrix(A), b)


def is_stationary(P: RatMatrix, pi: Sequence) -> bool:
    return vecmat(pi, P) == tuple(pi)


def reverse(chain: Chain, pi: Sequence) -> RatMatrix:
    """Time reversal ``diag(pi)^-1 P^T diag(pi)``."""
    pi = tuple(to_rational(x) for x in pi)
    if any(x <= 0 for x in pi):
        raise NotStationary("pi must be strictly positive")
    if not is_stationary(chain.P, pi):
        raise NotStationary("pi P != pi")
    inv = [1 / x for x in pi]
    return chain.P.T.scale_rows(inv).scale_cols(pi)


def distribution_at(chain: Chain, k: int) -> tuple[Fraction, ...]:
    """Exact ``nu P^k``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    v = chain.nu
    for _ in range(k):
        v = vecmat(v, chain.P)
    return v


def iter_distributions(chain: Chain, K: int):
    """Yield ``nu P^k`` for k = 0..K."""
    v = chain.nu
    yield v
    for _ in range(K):
        v = vecmat(v, chain.P)
        yield v


def _tail(nu: Sequence, P: RatMatrix, absorbing: int, K: int) -> list[Fraction]:
    n = P.nrows
    transient = [i for i in range(n) if i != absorbing]
    nz = P.nonzero_rows()
    mass = {i: nu[i] for i in transient if nu[i]}
    out = [sum(mass.values(), Fraction(0))]
    for _ in range(K):
        nxt: dict[int, Fraction] = {}
        for i, m in mass.items():
            for j, p in nz[i]:
                if j != absorbing:
                    nxt[j] = nxt.get(j, Fraction(0)) + m * p
        mass = {j: m for j, m in nxt.items() if m}
        out.append(sum(mass.values(), Fraction(0)))
    return out


def absorption_tail(chain: Chain, K: int) -> list[Fraction]:
    """``[P(T* > 0), ..., P(T* > K)]`` for the absorption time ``T*``."""
    a = absorbing_state(chain)
    return _tail(chain.nu, chain.P, a, K)


def is_eigenvalue(P: RatMatrix, lam) -> bool:
    lam = to_rational(lam)
    n = P.nrows
    return determinant(P - RatMatrix.identity(n).scale(lam)) == 0
