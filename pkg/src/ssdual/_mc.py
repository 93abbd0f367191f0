"""Numba kernels for coupon-collector absorption times.

Randomness is counter based: draw ``c`` of trial ``t`` under seed ``s`` is
``mix64(key(s, t) + (c + 1) * GOLDEN)`` where ``mix64`` is the SplitMix64
finalizer.  Each trial's stream depends only on ``(s, t)``, so any split of
the trial range over workers reproduces the same samples.
"""

from __future__ import annotations

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def trial_key(seed, trial):
    return mix64(mix64(seed) + (np.uint64(trial) + _ONE) * GOLDEN)


@njit(cache=True, nogil=True)
def uniform(key, counter):
    """Uniform on (0, 1]; 53 random bits."""
    x = mix64(key + (np.uint64(counter) + _ONE) * GOLDEN)
    return (float(x >> _S11) + 1.0) * _INV53


@njit(cache=True, nogil=True)
def geometric(u, q):
    """Number of Bernoulli(q) trials up to the first success, by inversion."""
    if q >= 1.0:
        return 1
    g = np.ceil(np.log(u) / np.log1p(-q))
    if g < 1.0:
        return 1
    return np.int64(g)


@njit(cache=True, nogil=True)
def skip_uniform(d, N, p0, seed, start, stop, out):
    """Equal probabilities ``p0`` and equal targets ``N``.

    Only the histogram of incomplete counts matters; idle steps between
    useful draws are skipped with one geometric variable.
    """
    levels = np.empty(N, np.int64)
    for t in range(start, stop):
        key = trial_key(seed, t)
        ctr = 0
        for c in range(N):
            levels[c] = 0
        levels[0] = d
        remaining = d
        total = 0
        while remaining > 0:
            total += geometric(uniform(key, ctr), p0 * remaining)
            ctr += 1
            lev = 0
            if N > 1:
                r = uniform(key, ctr) * remaining
                ctr += 1
                acc = 0.0
                for c in range(N):
                    acc += levels[c]
                    if r <= acc and levels[c] > 0:
                        lev = c
                        break
            levels[lev] -= 1
            if lev + 1 < N:
                levels[lev + 1] += 1
            else:
                remaining -= 1
        out[t - start] = total


@njit(cache=True, nogil=True)
def _fenwick_add(tree, i, v):
    n = tree.shape[0] - 1
    i += 1
    while i <= n:
        tree[i] += v
        i += i & (-i)


@njit(cache=True, nogil=True)
def _fenwick_prefix(tree, i):
    acc = 0.0
    while i > 0:
        acc += tree[i]
        i -= i & (-i)
    return acc


@njit(cache=True, nogil=True)
def _fenwick_find(tree, target, top):
    # smallest index whose prefix sum reaches target
    pos = 0
    step = top
    n = tree.shape[0] - 1
    while step > 0:
        nxt = pos + step
        if nxt <= n and tree[nxt] < target:
            pos = nxt
            target -= tree[nxt]
        step >>= 1
    return pos


@njit(cache=True, nogil=True)
def skip_general(p, N, seed, start, stop, out):
    """Arbitrary probabilities and targets; incomplete types in a Fenwick tree."""
    d = p.shape[0]
    tree = np.zeros(d + 1)
    counts = np.zeros(d, np.int64)
    top = 1
    while top * 2 <= d:
        top *= 2
    for t in range(start, stop):
        key = trial_key(seed, t)
        ctr = 0
        tree[:] = 0.0
        weight = 0.0
        for k in range(d):
            counts[k] = 0
            _fenwick_add(tree, k, p[k])
            weight += p[k]
        remaining = d
        total = 0
        while remaining > 0:
            total += geometric(uniform(key, ctr), weight)
            ctr += 1
            while True:
                k = _fenwick_find(tree, uniform(key, ctr) * weight, top)
                ctr += 1
                if k < d and counts[k] < N[k]:
                    break
            counts[k] += 1
            if counts[k] == N[k]:
                _fenwick_add(tree, k, -p[k])
                remaining -= 1
                # the tree's own total keeps search and normaliser consistent
                weight = _fenwick_prefix(tree, d)
        out[t - start] = total


def alias_table(weights):
    """Vose alias table for a probability vector."""
    w = np.asarray(weights, dtype=float)
    n = w.size
    scaled = w * n / w.sum()
    prob = np.zeros(n)
    alias = np.zeros(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = scaled[g] + scaled[s] - 1.0
        (small if scaled[g] < 1.0 else large).append(g)
    for i in large + small:
        prob[i] = 1.0
        alias[i] = i
    return prob, alias


@njit(cache=True, nogil=True)
def step_by_step(prob, alias, N, seed, start, stop, out):
    """Literal process: one categorical draw per step; outcome ``d`` is "no coupon"."""
    n = prob.shape[0]
    d = N.shape[0]
    counts = np.zeros(d, np.int64)
    for t in range(start, stop):
        key = trial_key(seed, t)
        ctr = 0
        for k in range(d):
            counts[k] = 0
        remaining = d
        total = 0
        while remaining > 0:
            x = uniform(key, ctr) * n
            ctr += 1
            col = min(np.int64(x), n - 1)
            if uniform(key, ctr) > prob[col]:
                col = alias[col]
            ctr += 1
            total += 1
            if col < d and counts[col] < N[col]:
                counts[col] += 1
                if counts[col] == N[col]:
                    remaining -= 1
        out[t - start] = total
