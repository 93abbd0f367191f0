"""Separation / total-variation profiles and separation-cutoff experiments.

Exact profiles work on :class:`~ssdual.markov.Chain` objects.  Large coupon
collectors are simulated on the process itself (see :mod:`ssdual._mc`),
never through their ``prod(N_j + 1)``-state matrices.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _mc
from .coupon import InvalidProbabilities
from .duality import ZeroMass
from .markov import Chain, absorption_tail, iter_distributions
from .numerics import to_rational

EULER_GAMMA = 0.5772156649015329


class UnknownFamily(ValueError):
    pass


def _positive_pi(pi, n):
    pi = tuple(to_rational(x) for x in pi)
    if len(pi) != n:
        raise ValueError(f"pi has length {len(pi)}, chain has {n} states")
    if any(x <= 0 for x in pi):
        raise ZeroMass("pi must be strictly positive")
    return pi


def _sep(v, pi):
    return max(1 - x / y for x, y in zip(v, pi))


def _tv(v, pi):
    return sum((abs(x - y) for x, y in zip(v, pi)), Fraction(0)) / 2


def sep_profile(chain: Chain, pi: Sequence, K: int) -> list[Fraction]:
    """``sep(nu P^k, pi) = max_e (1 - nu P^k(e) / pi(e))`` for k = 0..K."""
    pi = _positive_pi(pi, chain.size)
    return [_sep(v, pi) for v in iter_distributions(chain, K)]


def tv_profile(chain: Chain, pi: Sequence, K: int) -> list[Fraction]:
    """Total variation ``1/2 sum_e |nu P^k(e) - pi(e)|`` for k = 0..K."""
    pi = _positive_pi(pi, chain.size)
    return [_tv(v, pi) for v in iter_distributions(chain, K)]


def profiles(chain: Chain, pi: Sequence, K: int) -> tuple[list, list]:
    """Separation and total variation from a single pass over ``nu P^k``."""
    pi = _positive_pi(pi, chain.size)
    sep, tv = [], []
    for v in iter_distributions(chain, K):
        sep.append(_sep(v, pi))
        tv.append(_tv(v, pi))
    return sep, tv


def float_profiles(nu, P, pi, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Floating-point separation and total variation, for float-mode inputs."""
    v = np.asarray(nu, dtype=float)
    P = np.asarray(P, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if np.any(pi <= 0):
        raise ZeroMass("pi must be strictly positive")
    sep = np.empty(K + 1)
    tv = np.empty(K + 1)
    for k in range(K + 1):
        sep[k] = np.max(1.0 - v / pi)
        tv[k] = 0.5 * np.abs(v - pi).sum()
        v = v @ P
    return sep, tv


@dataclass
class SharpPairReport:
    ok: bool
    sep: list
    tail: list
    first_mismatch: int | None = None

    def to_dict(self) -> dict:
        d = {"name": "sharp-pair", "ok": self.ok}
        if self.first_mismatch is not None:
            d["counterexample"] = [self.first_mismatch]
        return d


def verify_sharp_pair(ergodic: Chain, absorbing: Chain, pi: Sequence, K: int) -> SharpPairReport:
    """Check ``sep(nu P^k, pi) == P(T* > k)`` exactly for k = 0..K."""
    sep = sep_profile(ergodic, pi, K)
    tail = absorption_tail(absorbing, K)
    bad = next((k for k, (s, t) in enumerate(zip(sep, tail)) if s != t), None)
    return SharpPairReport(bad is None, sep, tail, bad)


# -- Monte Carlo ------------------------------------------------------------

@dataclass
class CouponSample:
    """Absorption times of independent coupon-collector runs."""

    samples: np.ndarray
    p: np.ndarray
    N: np.ndarray
    seed: int

    @property
    def trials(self) -> int:
        return int(self.samples.size)

    @property
    def mean(self) -> float:
        return float(self.samples.mean())

    @property
    def variance(self) -> float:
        return float(self.samples.var(ddof=1)) if self.samples.size > 1 else 0.0

    def tail(self, t) -> float:
        """Empirical ``P(T > t)``."""
        return float(np.count_nonzero(self.samples > t)) / self.samples.size

    def tail_grid(self, grid: Sequence) -> list[float]:
        s = np.sort(self.samples)
        idx = np.searchsorted(s, np.asarray(grid, dtype=float), side="right")
        return list((s.size - idx) / s.size)

    def summary(self, grid: Sequence = ()) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "tail": [[float(t), q] for t, q in zip(grid, self.tail_grid(grid))] if len(grid) else [],
        }


def _as_float_p(p) -> np.ndarray:
    out = []
    for x in p:
        out.append(float(to_rational(x, allow_float=True)) if not isinstance(x, float) else x)
    arr = np.asarray(out, dtype=float)
    if arr.size == 0 or np.any(arr <= 0):
        raise InvalidProbabilities("every p_k must be positive")
    if arr.sum() > 1 + 1e-12:
        raise InvalidProbabilities(f"sum of p is {arr.sum()} > 1")
    return arr


def simulate_coupon_T(
    p: Sequence,
    N: Sequence[int] | int,
    trials: int,
    seed: int,
    method: str = "skip",
    workers: int = 1,
) -> CouponSample:
    """Simulate the absorption time of the generalized coupon collector.

    ``method="skip"`` jumps over idle steps with a geometric variable (exact
    in distribution); ``method="steps"`` draws every step from an alias table
    with "no coupon" as an explicit outcome.  Trial ``i`` always consumes the
    counter-based stream keyed ``(seed, i)``, so the output does not depend on
    ``workers``.
    """
    p = _as_float_p(p)
    d = p.size
    N = np.full(d, int(N), dtype=np.int64) if np.isscalar(N) else np.asarray(N, dtype=np.int64)
    if N.size != d or np.any(N < 1):
        raise ValueError("N must list one target >= 1 per coupon type")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    key = np.uint64(seed % (1 << 64))
    out = np.empty(trials, dtype=np.int64)

    if method == "skip":
        if np.all(p == p[0]) and np.all(N == N[0]):
            def run(a, b):
                _mc.skip_uniform(d, int(N[0]), float(p[0]), key, a, b, out[a:b])
        else:
            def run(a, b):
                _mc.skip_general(p, N, key, a, b, out[a:b])
    elif method == "steps":
        prob, alias = _mc.alias_table(np.append(p, max(0.0, 1.0 - p.sum())))

        def run(a, b):
            _mc.step_by_step(prob, alias, N, key, a, b, out[a:b])
    else:
        raise ValueError(f"unknown method {method!r}")

    bounds = np.linspace(0, trials, max(1, int(workers)) + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if len(chunks) == 1:
        run(*chunks[0])
    else:
        with ThreadPoolExecutor(len(chunks)) as pool:
            list(pool.map(lambda ab: run(*ab), chunks))
    return CouponSample(out, p, N, int(seed))


# -- cutoff families --------------------------------------------------------

def gumbel_cdf(c: float) -> float:
    """Standard Gumbel distribution function ``exp(-exp(-c))``."""
    if c < -700:
        return 0.0
    return math.exp(-math.exp(-c))


def gumbel_limit(c: float) -> float:
    """Limiting separation at ``t_d + c w_d``: ``1 - exp(-exp(-c))``."""
    return 1.0 - gumbel_cdf(c)


@dataclass(frozen=True)
class Classic:
    """``p_k = 1/d``, ``N_j = 1``; cutoff at ``d log d`` with window ``d``."""

    name = "classic"

    def params(self, d: int):
        return np.full(d, 1.0 / d), 1

    def centering(self, d: int, variant: str = "stated"):
        return d * math.log(d), float(d)


@dataclass(frozen=True)
class Piecewise:
    """Probabilities from a piecewise-constant density on [0, 1].

    ``lams[j]`` is the density on ``(cuts[j-1], cuts[j]]`` with ``cuts[-1] == 1``.
    The first piece must carry the strictly smallest density.  Centering
    ``"stated"`` is ``(d/lam_1)(log d - log n_1)``; ``"limit"`` flips the sign
    of ``log n_1``, which is what the Gumbel limit of the tail requires.
    """

    lams: tuple
    cuts: tuple
    name = "piecewise"

    def __post_init__(self):
        lams = tuple(float(x) for x in self.lams)
        cuts = tuple(float(x) for x in self.cuts)
        object.__setattr__(self, "lams", lams)
        object.__setattr__(self, "cuts", cuts)
        if len(lams) != len(cuts) or not lams:
            raise ValueError("need one density value per piece")
        edges = (0.0,) + cuts
        if any(b <= a for a, b in zip(edges, edges[1:])) or abs(cuts[-1] - 1.0) > 1e-12:
            raise ValueError("cut points must increase strictly up to 1")
        if any(x <= 0 for x in lams):
            raise ValueError("densities must be positive")
        mass = sum(x * (b - a) for x, a, b in zip(lams, edges, edges[1:]))
        if abs(mass - 1.0) > 1e-9:
            raise ValueError(f"density integrates to {mass}, not 1")
        if any(x <= lams[0] for x in lams[1:]):
            raise ValueError("the first density value must be strictly the smallest")

    def params(self, d: int):
        edges = (0.0,) + self.cuts
        p = np.zeros(d)
        for k in range(d):
            lo, hi = k / d, (k + 1) / d
            for lam, a, b in zip(self.lams, edges, edges[1:]):
                overlap = min(hi, b) - max(lo, a)
                if overlap > 0:
                    p[k] += lam * overlap
        return p / p.sum(), 1

    def centering(self, d: int, variant: str = "stated"):
        lam, n1 = self.lams[0], self.cuts[0]
        w = d / lam
        if variant == "stated":
            return w * (math.log(d) - math.log(n1)), w
        if variant == "limit":
            # consistent with P(Z <= c) = exp(-n1 exp(-lam c)) for (T - d log d / lam) / d
            return w * (math.log(d) + math.log(n1)), w
        raise ValueError(f"unknown centering variant {variant!r}")


@dataclass(frozen=True)
class NCopies:
    """``p_k = 1/d``, every type collected ``N >= 2`` times.

    ``"stated"`` centering subtracts ``d (gamma - log (N-1)!)``; ``"limit"``
    drops the ``gamma`` term, matching ``P(T <= t_d + c d) -> exp(-e^-c)``.
    """

    N: int
    name = "n_copies"

    def __post_init__(self):
        if int(self.N) < 2:
            raise ValueError("N must be at least 2")

    def params(self, d: int):
        return np.full(d, 1.0 / d), int(self.N)

    def centering(self, d: int, variant: str = "stated"):
        N = int(self.N)
        base = d * math.log(d) + (N - 1) * d * math.log(math.log(d))
        logfact = math.lgamma(N)
        if variant == "stated":
            return base - d * (EULER_GAMMA - logfact), float(d)
        if variant == "limit":
            # P(T <= base + c d) -> exp(-exp(-c) / (N-1)!)
            return base - d * logfact, float(d)
        raise ValueError(f"unknown centering variant {variant!r}")


@dataclass(frozen=True)
class LogWeights:
    """``p_k`` proportional to ``1 / log(k+1)^exponent``, ``N >= 2`` copies each."""

    N: int
    exponent: float
    name = "log_weights"

    def __post_init__(self):
        if int(self.N) < 2:
            raise ValueError("N must be at least 2")
        if not 0 < float(self.exponent) < 1:
            raise ValueError("exponent must lie in (0, 1)")

    def params(self, d: int):
        w = 1.0 / np.log(np.arange(2, d + 2, dtype=float)) ** float(self.exponent)
        return w / w.sum(), int(self.N)

    def centering(self, d: int, variant: str = "stated"):
        if variant != "stated":
            raise ValueError("log_weights only has the stated centering")
        N, e = int(self.N), float(self.exponent)
        shift = EULER_GAMMA + e - math.log(e + 1) - math.lgamma(N)
        return d * math.log(d) + (N - 1) * d * math.log(math.log(d)) - d * shift, float(d)


FAMILIES = {"classic": Classic, "piecewise": Piecewise, "n_copies": NCopies, "log_weights": LogWeights}


def make_family(name: str, **kwargs):
    try:
        cls = FAMILIES[name.replace("-", "_")]
    except KeyError:
        raise UnknownFamily(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return cls(**kwargs)


@dataclass
class CutoffRow:
    c: float
    empirical_tail: float
    gumbel_limit: float
    trials: int
    d: int
    t_d: float
    w_d: float


@dataclass
class CutoffTable:
    family: str
    centering: str
    rows: list
    sample: CouponSample = field(repr=False, default=None)

    def max_abs_error(self) -> float:
        return max(abs(r.empirical_tail - r.gumbel_limit) for r in self.rows)

    def to_csv(self) -> str:
        lines = ["c,empirical,limit,d,trials,t_d,w_d"]
        for r in self.rows:
            lines.append(
                f"{r.c:.6g},{r.empirical_tail:.6g},{r.gumbel_limit:.6g},{r.d},{r.trials},"
                f"{r.t_d:.6g},{r.w_d:.6g}"
            )
        return "\n".join(lines) + "\n"


def cutoff_experiment(
    family,
    d: int,
    trials: int,
    c_grid: Sequence[float],
    seed: int,
    centering: str = "stated",
    workers: int = 1,
    method: str = "skip",
) -> CutoffTable:
    """Empirical ``P(T* > t_d + c w_d)`` next to the Gumbel limit, per ``c``.

    ``family`` is a family object or one of ``classic``, ``piecewise``,
    ``n_copies``, ``log_weights`` (the latter three need keyword parameters,
    so pass an object).
    """
    if isinstance(family, str):
        family = make_family(family)
    if not hasattr(family, "params"):
        raise UnknownFamily(f"not a cutoff family: {family!r}")
    p, N = family.params(d)
    t_d, w_d = family.centering(d, centering)
    sample = simulate_coupon_T(p, N, trials, seed, method=method, workers=workers)
    rows = [
        CutoffRow(float(c), sample.tail(t_d + c * w_d), gumbel_limit(c), trials, d, t_d, w_d)
        for c in c_grid
    ]
    return CutoffTable(family.name, centering, rows, sample)
