"""Strong stationary duality on partially ordered state spaces.

The link used throughout is the stationary distribution truncated to
down-sets, ``Lambda(e_i, e_j) = pi(e_j) 1(e_j <= e_i) / H(e_i)`` with
``H(e) = sum_{e' <= e} pi(e')``.  In matrix form
``Lambda = diag(pi C)^-1 C^T diag(pi)`` and
``Lambda^-1 = diag(pi)^-1 (C^-1)^T diag(pi C)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .markov import (
    Chain,
    Kind,
    absorbing_state,
    classify,
    NotErgodic,
    reverse,
    stationary,
)
from .numerics import RatMatrix, format_rational, invert, matmul, to_rational, vecmat
from .poset import Poset


class DualityError(ValueError):
    pass


class ZeroMass(DualityError):
    pass


class LabelMismatch(DualityError):
    pass


class AbsorbingMismatch(DualityError):
    pass


class NotMonotone(DualityError):
    """The candidate antidual has negative entries.

    ``entries`` lists every offending ``(row_label, col_label, value)``.
    """

    def __init__(self, entries):
        self.entries = entries
        shown = ", ".join(f"({a!r}, {b!r}) = {format_rational(v)}" for a, b, v in entries[:5])
        more = f" and {len(entries) - 5} more" if len(entries) > 5 else ""
        super().__init__(f"{len(entries)} negative transition entries: {shown}{more}")


class InitialNotMonotone(DualityError):
    pass


class ReversalNotMonotone(DualityError):
    pass


class DualityInternalError(RuntimeError):
    pass


class Direction(enum.Enum):
    DOWN = "down"
    UP = "up"


def _as_pi(pi: Sequence, n: int) -> tuple[Fraction, ...]:
    pi = tuple(to_rational(x) for x in pi)
    if len(pi) != n:
        raise DualityError(f"pi has length {len(pi)}, expected {n}")
    zero = [i for i, x in enumerate(pi) if x <= 0]
    if zero:
        raise ZeroMass(f"pi must be strictly positive; state index {zero[0]} has mass {pi[zero[0]]}")
    if sum(pi) != 1:
        raise DualityError(f"pi sums to {sum(pi)}, not 1")
    return pi


@dataclass(frozen=True)
class Link:
    Lambda: RatMatrix
    LambdaInv: RatMatrix
    H: tuple
    poset: Poset = field(repr=False)
    pi: tuple = ()


def build_link(poset: Poset, pi: Sequence) -> Link:
    pi = _as_pi(pi, len(poset))
    H = vecmat(pi, poset.zeta)
    Lam = poset.zeta.T.scale_rows([1 / h for h in H]).scale_cols(pi)
    Inv = poset.mobius.T.scale_rows([1 / x for x in pi]).scale_cols(H)
    if Inv != invert(Lam):
        raise DualityInternalError("closed-form inverse of the link disagrees with elimination")
    return Link(Lam, Inv, H, poset, pi)


def function_mobius_monotone(f: Sequence, poset: Poset) -> bool:
    """Every ``sum_{e >= e_i} mu(e_i, e) f(e)`` is non-negative."""
    f = [to_rational(x) for x in f]
    return all(x >= 0 for x in vecmat(f, poset.mobius.T))


def mobius_transform(P: RatMatrix, poset: Poset, direction: Direction = Direction.DOWN) -> RatMatrix:
    if direction is Direction.DOWN:
        return matmul(matmul(poset.mobius, P), poset.zeta)
    return matmul(matmul(poset.mobius.T, P), poset.zeta.T)


def mobius_monotone(P: RatMatrix, poset: Poset, direction: Direction = Direction.DOWN) -> bool:
    """Down: ``C^-1 P C >= 0``; Up: ``(C^T)^-1 P C^T >= 0``.

    ``P`` need not be stochastic.
    """
    return mobius_transform(P, poset, Direction(direction)).is_nonnegative()


def phat(Pstar: RatMatrix, pi: Sequence, poset: Poset) -> RatMatrix:
    """``diag(pi C) P* diag(pi C)^-1``."""
    pi = _as_pi(pi, len(poset))
    H = vecmat(pi, poset.zeta)
    return Pstar.scale_rows(H).scale_cols([1 / h for h in H])


def _check_labels(chain: Chain, poset: Poset):
    if chain.labels != poset.labels:
        raise LabelMismatch(
            "chain states must be listed in the poset's topological numbering "
            "(use Chain.permuted with Poset.order)"
        )


def antidual(absorbing: Chain, pi: Sequence, poset: Poset) -> Chain:
    """Sharp antidual ``X ~ (nu* Lambda, Lambda^-1 P* Lambda)`` of an absorbing chain.

    The transition matrix is computed twice, once through the link and once
    through ``diag(pi)^-1 (C^T)^-1 Phat* C^T diag(pi)``; the two must agree.
    """
    _check_labels(absorbing, poset)
    a = absorbing_state(absorbing)
    if a != poset.max_index:
        raise AbsorbingMismatch(
            f"absorbing state {absorbing.labels[a]!r} is not the poset maximum "
            f"{poset.labels[poset.max_index]!r}"
        )
    link = build_link(poset, pi)
    P_link = matmul(matmul(link.LambdaInv, absorbing.P), link.Lambda)
    Ph = phat(absorbing.P, link.pi, poset)
    P_hat = mobius_transform(Ph, poset, Direction.UP).scale_rows(
        [1 / x for x in link.pi]
    ).scale_cols(link.pi)
    if P_link != P_hat:
        raise DualityInternalError(
            f"antidual routes disagree at {P_link.first_difference(P_hat)}"
        )
    neg = P_link.negative_entries()
    if neg:
        labels = poset.labels
        raise NotMonotone([(labels[i], labels[j], v) for i, j, v in neg])
    nu = vecmat(absorbing.nu, link.Lambda)
    return Chain(poset.labels, nu, P_link)


def ssd(ergodic: Chain, poset: Poset) -> Chain:
    """Sharp strong stationary dual ``X* ~ (nu Lambda^-1, Lambda P Lambda^-1)``."""
    _check_labels(ergodic, poset)
    cls = classify(ergodic)
    if cls.kind is not Kind.ERGODIC:
        raise NotErgodic(f"chain is {cls}")
    pi = stationary(ergodic)
    g = [x / y for x, y in zip(ergodic.nu, pi)]
    if not function_mobius_monotone(g, poset):
        raise InitialNotMonotone("nu/pi is not Mobius monotone")
    if not mobius_monotone(reverse(ergodic, pi), poset, Direction.DOWN):
        raise ReversalNotMonotone("time reversal is not Mobius monotone")
    link = build_link(poset, pi)
    Pstar = matmul(matmul(link.Lambda, ergodic.P), link.LambdaInv)
    nustar = vecmat(ergodic.nu, link.LambdaInv)
    return Chain(poset.labels, nustar, Pstar)


@dataclass
class Check:
    name: str
    ok: bool
    where: tuple | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "ok": self.ok}
        if self.where is not None:
            d["counterexample"] = list(self.where)
        return d


@dataclass
class DualityReport:
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.ok), None)

    def __getitem__(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _first_vec_diff(u, v):
    return next(((i,) for i, (x, y) in enumerate(zip(u, v)) if x != y), None)


def verify_duality(primal: Chain, dual: Chain, link: Link) -> DualityReport:
    """Check ``nu = nu* Lambda`` and ``Lambda P = P* Lambda`` plus link properties."""
    n = primal.size
    if dual.size != n or link.Lambda.shape != (n, n):
        raise DualityError("primal, dual and link dimensions differ")
    Lam, pi = link.Lambda, link.pi
    checks = []
    nu_hat = vecmat(dual.nu, Lam)
    checks.append(Check("initial", nu_hat == primal.nu, _first_vec_diff(nu_hat, primal.nu)))
    left = matmul(Lam, primal.P)
    right = matmul(dual.P, Lam)
    checks.append(Check("intertwining", left == right, left.first_difference(right)))
    bad_row = next((i for i, s in enumerate(Lam.row_sums()) if s != 1), None)
    neg = Lam.negative_entries()
    where = (bad_row,) if bad_row is not None else (neg[0][:2] if neg else None)
    if where is None and Lam[n - 1] != pi:
        where = (n - 1,)
    checks.append(Check("link", where is None, where))
    upper = next(((i, j) for i in range(n) for j in range(i + 1, n) if Lam[i, j] != 0), None)
    checks.append(Check("sharp", upper is None, upper))
    piP = vecmat(pi, primal.P)
    checks.append(Check("stationary", piP == pi, _first_vec_diff(piP, pi)))
    return DualityReport(checks)
