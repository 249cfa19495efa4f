"""Sublinear estimators for |RGMIS(pi)| under an adjacency-matrix oracle.

``alg_add_mul`` samples vertices and asks the membership oracle about each,
giving a (1+eps, eps*n/s) estimate. ``alg_mul`` first builds the greedy MIS
explicitly until it holds ceil(sqrt(n)) vertices and hands the remaining
active vertices to ``alg_add_mul``, which turns the additive error into a
multiplicative one. ``alg_mul_hp`` interleaves independent ``alg_mul`` runs
and keeps the first to finish.

Both estimators are written as step generators so that the interleaving is a
literal round-robin over query budgets rather than a simulation of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core import CountingAdjacencyOracle, InputError, Permutation, derive_seed, make_rng
from . import _backend
from .oracle import _probe_oracle

_CHUNK = 1 << 16
DEFAULT_HP_CONSTANT = 3


@dataclass
class MisEstimate:
    value: float
    exact_prefix: list[int]
    permutation: Permutation
    queries: int
    epsilon: float
    s: int = 0
    samples: int = 0
    hits: int = 0
    residual: int = 0
    exact: bool = False
    trial: int = 0
    total_queries: int = 0

    def record(self, seed=None) -> dict:
        """Flat report row: value, prefix size, queries, seed, epsilon."""
        return {
            "value": self.value,
            "exact_prefix": len(self.exact_prefix),
            "queries": self.queries,
            "seed": seed,
            "epsilon": self.epsilon,
            "exact": self.exact,
            "samples": self.samples,
        }


def sample_count(s: float, epsilon: float, n: int) -> int:
    """r = ceil(27 s ln(n) / eps^2)."""
    return math.ceil(27 * s * math.log(n) / epsilon ** 2)


def sqrt_budget(n: int) -> int:
    """ceil(sqrt(n))."""
    s = math.isqrt(n)
    return s if s * s == n else s + 1


def _check_eps(epsilon):
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")


def _add_mul_steps(adj: CountingAdjacencyOracle, pi: Permutation, s, epsilon, rng,
                   cache, chunk):
    if s <= 0:
        raise InputError(f"s must be positive, got {s}")
    _check_eps(epsilon)
    n = len(pi)
    if n < 2:
        raise InputError("alg_add_mul needs at least two vertices")
    r = sample_count(s, epsilon, n)
    before = adj.queries
    dense = adj.dense()
    kern = _backend.kernels()
    rank = pi.rank_array(adj.n)
    order = pi.order
    hits = 0
    done = 0
    while done < r:
        m = min(chunk, r - done)
        idx = rng.integers(0, n, size=m, dtype=np.uint64)
        picks = np.ascontiguousarray(order[idx.astype(np.int64)])
        if dense is None:
            for v in picks.tolist():
                hits += _probe_oracle(adj, order, rank, v, cache)[0]
        else:
            h, _, probes = kern.sample_oracle(dense, order, rank, picks, cache)
            hits += int(h)
            adj.charge(probes)
        done += m
        yield adj.queries - before
    value = (1 + epsilon / 2) * (hits / r * n + epsilon * n / (3 * s))
    return MisEstimate(value=value, exact_prefix=[], permutation=pi,
                       queries=adj.queries - before, epsilon=epsilon, s=s,
                       samples=r, hits=hits, residual=n)


def _drive(steps):
    while True:
        try:
            next(steps)
        except StopIteration as stop:
            return stop.value


def alg_add_mul(adj: CountingAdjacencyOracle, pi: Permutation, s: float, epsilon: float,
                rng, cache: np.ndarray | None = None) -> MisEstimate:
    """Sampling estimate of |RGMIS(pi)| for the graph induced by pi's vertices.

    Draws ``r = ceil(27 s ln n / eps^2)`` vertices uniformly with replacement,
    asks the membership oracle about each and returns
    ``(1 + eps/2) * (hits/r * n + eps*n/(3s))``.
    """
    return _drive(_add_mul_steps(adj, pi, s, epsilon, make_rng(rng), cache, _CHUNK))


def _greedy_prefix_probes(adj, order, active, budget):
    n = adj.n
    prefix, j = [], 0
    while j < len(order) and len(prefix) < budget:
        u = int(order[j])
        j += 1
        if active[u]:
            prefix.append(u)
            for v in range(n):
                if v == u or adj.query(u, v):
                    active[v] = 0
    return prefix


def _alg_mul_steps(adj: CountingAdjacencyOracle, n, epsilon, seed, cache, chunk):
    _check_eps(epsilon)
    if n != adj.n:
        raise InputError(f"n={n} but the oracle has {adj.n} vertices")
    if n < 2:
        raise InputError("alg_mul needs n >= 2")
    rng = make_rng(seed)
    pi = Permutation(rng.permutation(n))
    s = sqrt_budget(n)
    before = adj.queries
    active = np.ones(n, dtype=np.uint8)
    dense = adj.dense()
    if dense is None:
        prefix = _greedy_prefix_probes(adj, pi.order, active, s)
    else:
        prefix, probes, _ = _backend.kernels().greedy_prefix(dense, pi.order, active, s)
        adj.charge(probes)
    prefix = [int(u) for u in prefix]
    yield adj.queries - before

    def done(value, exact, residual=0, samples=0, hits=0):
        return MisEstimate(value=float(value), exact_prefix=prefix, permutation=pi,
                           queries=adj.queries - before, epsilon=epsilon, s=s,
                           samples=samples, hits=hits, residual=residual, exact=exact)

    if len(prefix) < s:
        return done(len(prefix), True)
    rest = np.flatnonzero(active)
    # fewer than two survivors: the greedy outcome is forced, nothing to sample
    if len(rest) < 2:
        return done(len(prefix) + len(rest), True, residual=len(rest))
    sub = _add_mul_steps(adj, pi.restrict(rest.tolist()), s, epsilon, rng,
                         cache, chunk)
    while True:
        try:
            next(sub)
        except StopIteration as stop:
            part = stop.value
            break
        yield adj.queries - before
    return done(len(prefix) + part.value, False, residual=len(rest),
                samples=part.samples, hits=part.hits)


def alg_mul(adj: CountingAdjacencyOracle, n: int, epsilon: float, seed,
            cache: bool = False) -> MisEstimate:
    """(1+eps)-multiplicative estimate of |RGMIS(pi)| for a fresh uniform pi.

    The permutation and the explicitly built prefix are kept on the result so
    callers can recompute the exact value.
    """
    memo = np.full(adj.n, -1, dtype=np.int8) if cache else None
    return _drive(_alg_mul_steps(adj, n, epsilon, seed, memo, _CHUNK))


def hp_instances(n: int, c: float = DEFAULT_HP_CONSTANT) -> int:
    return max(1, math.ceil(c * math.log(n)))


def alg_mul_hp(build: Callable[[], CountingAdjacencyOracle], n: int, epsilon: float, seed,
               instances: int | None = None, cache: bool = False,
               quantum: int | None = None) -> MisEstimate:
    """Run independent ``alg_mul`` trials round-robin; return the cheapest to finish.

    Each trial owns a fresh oracle from ``build``. Trial ``t`` uses seed
    ``seed`` for t = 0 and a derived seed otherwise, so ``instances=1``
    reproduces ``alg_mul(build(), n, epsilon, seed)``. Every round grants each
    live trial ``quantum`` further queries. Once some trial completes, the
    others may continue only up to that trial's total; any that finish
    cheaper replace it. The returned estimate carries the total queries spent
    by all trials in ``total_queries``.
    """
    if instances is None:
        instances = hp_instances(n)
    if instances < 1:
        raise InputError("instances must be >= 1")
    quantum = quantum or n
    chunk = 64
    oracles = [build() for _ in range(instances)]
    seeds = [seed] + [derive_seed(seed, t) for t in range(1, instances)]
    gens = [_alg_mul_steps(o, n, epsilon, sd, np.full(n, -1, np.int8) if cache else None, chunk)
            for o, sd in zip(oracles, seeds)]
    spent = [0] * instances
    finished: dict[int, MisEstimate] = {}
    live = set(range(instances))
    budget = 0
    best = None
    while live:
        budget = budget + quantum if best is None else finished[best].queries
        for t in sorted(live):
            while spent[t] < budget:
                try:
                    spent[t] = next(gens[t])
                except StopIteration as stop:
                    finished[t] = stop.value
                    spent[t] = stop.value.queries
                    if best is None or stop.value.queries < finished[best].queries:
                        best = t
                    live.discard(t)
                    break
        if best is not None:
            # anything still running has already spent at least the best total
            live = {t for t in live if spent[t] < finished[best].queries}
            if not live:
                break
    result = finished[best]
    result.trial = best
    result.total_queries = sum(spent)
    return result
