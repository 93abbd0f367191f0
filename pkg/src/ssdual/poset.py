"""Finite partial orders with zeta and Möbius matrices.

A :class:`Poset` is always stored in a topological numbering: ``zeta[i][j] == 1``
implies ``i <= j``, and the unique maximal element sits at the last index.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Hashable, Sequence

from .numerics import RatMatrix, invert, matmul

ENV_MAX_STATES = "SSDUAL_MAX_STATES"
DEFAULT_MAX_STATES = 4096

_ONE = Fraction(1)
_ZERO = Fraction(0)


def max_states() -> int:
    """State-count cap; overridable through ``SSDUAL_MAX_STATES``."""
    raw = os.environ.get(ENV_MAX_STATES)
    return int(raw) if raw else DEFAULT_MAX_STATES


class PosetError(ValueError):
    def __init__(self, message: str, pair: tuple | None = None):
        super().__init__(message)
        self.pair = pair


class NotReflexive(PosetError):
    pass


class NotAntisymmetric(PosetError):
    pass


class NotTransitive(PosetError):
    pass


class NoUniqueMax(PosetError):
    pass


class TooLarge(PosetError):
    pass


@dataclass(frozen=True)
class Poset:
    labels: tuple
    zeta: RatMatrix
    mobius: RatMatrix
    # order[k] is the position, in the caller's original labelling, of state k
    order: tuple = field(default=None)
    _up: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if self.order is None:
            object.__setattr__(self, "order", tuple(range(n)))
        ups = tuple(frozenset(j for j, x in row if x) for row in self.zeta.nonzero_rows())
        object.__setattr__(self, "_up", ups)

    def __len__(self):
        return len(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def max_index(self) -> int:
        return len(self.labels) - 1

    @property
    def min_index(self) -> int | None:
        """Index of the unique minimal element, if there is one."""
        n = len(self.labels)
        mins = [i for i in range(n) if not any(i in self._up[j] for j in range(n) if j != i)]
        return mins[0] if len(mins) == 1 else None

    def leq(self, i: int, j: int) -> bool:
        return j in self._up[i]

    def up(self, i: int) -> frozenset:
        return self._up[i]

    def down(self, j: int) -> list[int]:
        return [i for i in range(len(self.labels)) if j in self._up[i]]

    def index(self, label: Hashable) -> int:
        return self.labels.index(label)


def _from_topological(labels, up_masks, order) -> Poset:
    n = len(labels)
    rows = tuple(
        tuple(_ONE if (up_masks[i] >> j) & 1 else _ZERO for j in range(n)) for i in range(n)
    )
    zeta = RatMatrix._wrap(rows, n)
    return Poset(tuple(labels), zeta, invert(zeta), tuple(order))


def validate(labels: Sequence, zeta, cap: int | None = None) -> Poset:
    """Check that ``zeta`` encodes a partial order with a unique maximum.

    States are renumbered into a topological order when needed; the returned
    ``Poset.order`` maps new positions back to the input positions.
    """
    labels = list(labels)
    n = len(labels)
    cap = max_states() if cap is None else cap
    if n > cap:
        raise TooLarge(f"{n} states exceeds the cap of {cap}")
    rows = [list(r) for r in zeta]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise PosetError(f"zeta must be {n}x{n} to match the labels")
    up = [0] * n
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            if x not in (0, 1):
                raise PosetError(f"zeta[{i}][{j}] = {x!r} is not 0/1", (i, j))
            if x == 1:
                up[i] |= 1 << j
    for i in range(n):
        if not (up[i] >> i) & 1:
            raise NotReflexive(f"{labels[i]!r} is not related to itself", (labels[i], labels[i]))
    for i in range(n):
        for j in range(i + 1, n):
            if (up[i] >> j) & 1 and (up[j] >> i) & 1:
                raise NotAntisymmetric(
                    f"{labels[i]!r} and {labels[j]!r} are mutually related", (labels[i], labels[j])
                )
    for i in range(n):
        mask = up[i]
        for j in range(n):
            if (mask >> j) & 1:
                extra = up[j] & ~mask
                if extra:
                    k = extra.bit_length() - 1
                    raise NotTransitive(
                        f"{labels[i]!r} <= {labels[j]!r} <= {labels[k]!r} but not {labels[i]!r} <= {labels[k]!r}",
                        (labels[i], labels[k]),
                    )
    maximal = [i for i in range(n) if up[i] == 1 << i]
    if len(maximal) != 1:
        raise NoUniqueMax(
            f"expected one maximal element, found {[labels[i] for i in maximal]}",
            tuple(labels[i] for i in maximal),
        )
    if all(up[i] & ((1 << i) - 1) == 0 for i in range(n)):
        # already a linear extension: keep the caller's numbering
        return _from_topological(labels, up, range(n))
    below = [sum((up[i] >> j) & 1 for i in range(n)) for j in range(n)]
    order = sorted(range(n), key=lambda j: (below[j], j))
    pos = {old: new for new, old in enumerate(order)}
    new_up = []
    for old in order:
        mask = 0
        for j in range(n):
            if (up[old] >> j) & 1:
                mask |= 1 << pos[j]
        new_up.append(mask)
    return _from_topological([labels[i] for i in order], new_up, order)


def product_lattice(N: Sequence[int], cap: int | None = None) -> Poset:
    """Coordinate-wise order on all vectors ``0 <= i_j <= N_j``.

    Labels are tuples, enumerated lexicographically (a linear extension).
    """
    N = [int(x) for x in N]
    if not N or any(x < 1 for x in N):
        raise PosetError(f"need d >= 1 and every N_j >= 1, got {N}")
    count = prod(x + 1 for x in N)
    cap = max_states() if cap is None else cap
    if count > cap:
        raise TooLarge(f"product lattice {N} has {count} states, cap is {cap}")
    states = list(itertools.product(*(range(x + 1) for x in N)))
    index = {s: k for k, s in enumerate(states)}
    up = []
    for s in states:
        mask = 0
        for t in itertools.product(*(range(a, b + 1) for a, b in zip(s, N))):
            mask |= 1 << index[t]
        up.append(mask)
    return _from_topological(states, up, range(count))


def total_order(M: int) -> Poset:
    """The chain 1 < 2 < ... < M, labelled by the integers 1..M."""
    if M < 1:
        raise PosetError(f"M must be >= 1, got {M}")
    full = (1 << M) - 1
    up = [full & ~((1 << i) - 1) for i in range(M)]
    return _from_topological(list(range(1, M + 1)), up, range(M))


def downset_sums(f: Sequence, poset: Poset) -> tuple:
    """``(f C)(j) = sum of f(i) over i <= j``."""
    from .numerics import vecmat

    return vecmat(f, poset.zeta)


def check(poset: Poset) -> bool:
    """zeta @ mobius is the identity."""
    return matmul(poset.zeta, poset.mobius) == RatMatrix.identity(len(poset))
