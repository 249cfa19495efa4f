"""Metric Steiner-Forest cost estimation from per-level MIS sizes.

After dropping short pairs and rescaling so the shortest kept pair has length
2, level i (threshold tau_i = 2^i) looks at the terminals whose partner lies
at distance >= tau_i and joins two of them when their tau_i-balls overlap
(distance < 2 tau_i). The estimate is sum_i tau_i * MIS_i with each MIS size
estimated by :func:`~sublinear_sf.mis.alg_mul`.

All threshold tests are done on raw distances against tau * dmin / 2, which
is exact in floating point because tau is a power of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    CountingDistanceOracle,
    InputError,
    MetricInstance,
    ThresholdGraphOracle,
    derive_seed,
)
from .mis import alg_mul

C_MIS_EPS = 0.01


def match_of(pairs, t: int) -> int:
    for s, u in pairs:
        if s == t:
            return u
        if u == t:
            return s
    raise InputError(f"vertex {t} is not a terminal")


@dataclass
class PreprocessedInstance:
    kept_pairs: list[tuple[int, int]]
    ignored_pairs: list[tuple[int, int]]
    X: float
    scale: Fraction
    pair_dist: dict[tuple[int, int], float]
    queries: int

    @property
    def k_eff(self) -> int:
        return len(self.kept_pairs)

    def raw_threshold(self, tau) -> float:
        """Raw distance that equals ``tau`` working units (exact)."""
        return float(Fraction(tau) / self.scale)

    @property
    def ignored_cost(self) -> float:
        return math.fsum(self.pair_dist[p] for p in self.ignored_pairs)


def preprocess(oracle: CountingDistanceOracle, pairs) -> PreprocessedInstance:
    """Read every pair distance once, drop pairs of length <= X/k, fix the scale.

    A pair attaining the maximum X is never dropped (for k = 1 the rule would
    otherwise discard the only pair). When X = 0 every pair is dropped and the
    instance is degenerate.
    """
    pairs = [tuple(p) for p in pairs]
    k = len(pairs)
    if k == 0:
        raise InputError("no terminal pairs")
    before = oracle.queries
    dist = {p: oracle.raw(*p) for p in pairs}
    X = max(dist.values())
    if X == 0:
        return PreprocessedInstance([], pairs, 0.0, Fraction(1), dist, oracle.queries - before)
    fx = Fraction(X)
    kept, ignored = [], []
    for p in pairs:
        d = dist[p]
        if Fraction(d) * k <= fx and d < X:
            ignored.append(p)
        else:
            kept.append(p)
    dmin = min(dist[p] for p in kept)
    return PreprocessedInstance(kept, ignored, X, Fraction(2) / Fraction(dmin), dist,
                                oracle.queries - before)


def levels(k_eff: int) -> list[int]:
    """tau_i = 2^i for i = 0..ceil(log2(2 k_eff^2))."""
    if k_eff < 1:
        raise InputError("levels need k_eff >= 1")
    top = (2 * k_eff * k_eff - 1).bit_length()
    return [2 ** i for i in range(top + 1)]


def ball_graph_oracle(dist: CountingDistanceOracle, pairs, tau) -> ThresholdGraphOracle:
    """Adjacency oracle of the level-``tau`` ball graph in ``dist.scale`` units.

    Activity is decided with one distance query per terminal; edges are
    evaluated lazily, one query per probe.
    """
    active_limit = float(Fraction(tau) / dist.scale)
    edge_limit = float(Fraction(2 * tau) / dist.scale)
    active = []
    for s, t in pairs:
        for a, b in ((s, t), (t, s)):
            if dist.raw(a, b) >= active_limit:
                active.append(a)
    return ThresholdGraphOracle(dist, active, edge_limit)


@dataclass
class LevelReport:
    i: int
    tau: int
    active_count: int
    mis_estimate: float
    queries: int
    exact_prefix: int = 0
    vertices: list[int] = field(default_factory=list)
    order: list[int] = field(default_factory=list)

    def row(self) -> dict:
        return {"i": self.i, "tau": self.tau, "active_count": self.active_count,
                "mis_estimate": self.mis_estimate, "queries": self.queries,
                "exact_prefix": self.exact_prefix}


@dataclass
class SfEstimateReport:
    sol_scaled: float
    sol_original: float
    levels: list[LevelReport]
    total_queries: int
    seed: int
    preprocessed: PreprocessedInstance
    epsilon_mis: float

    @property
    def scale(self) -> Fraction:
        return self.preprocessed.scale

    @property
    def L(self) -> int:
        return len(self.levels) - 1

    def summary(self) -> dict:
        pre = self.preprocessed
        return {"sol_scaled": self.sol_scaled, "sol_original": self.sol_original,
                "scale": float(pre.scale), "X": pre.X, "k_eff": pre.k_eff,
                "ignored_pairs": [list(p) for p in pre.ignored_pairs],
                "preprocessing_queries": pre.queries,
                "total_queries": self.total_queries, "seed": self.seed,
                "epsilon_mis": self.epsilon_mis}


def estimate_sf(instance: MetricInstance, epsilon: float = C_MIS_EPS, seed: int = 0,
                cache: bool = False) -> SfEstimateReport:
    """Estimate the Steiner-Forest cost within O(log k).

    Per-level MIS sizes use ``alg_mul`` with eps = min(epsilon, 0.01). The
    returned ``sol_original`` adds back the ignored pairs at their direct
    distance.
    """
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    eps_mis = min(epsilon, C_MIS_EPS)
    dist = CountingDistanceOracle(instance)
    pre = preprocess(dist, instance.pairs)
    dist.scale = pre.scale
    reports = []
    if pre.k_eff:
        for i, tau in enumerate(levels(pre.k_eff)):
            before = dist.queries
            adj = ball_graph_oracle(dist, pre.kept_pairs, tau)
            verts = adj.vertices.tolist()
            if adj.n == 0:
                reports.append(LevelReport(i, tau, 0, 0.0, dist.queries - before))
                continue
            est = alg_mul(adj, adj.n, eps_mis, derive_seed(seed, i), cache=cache)
            order = [verts[u] for u in est.permutation]
            reports.append(LevelReport(i, tau, adj.n, est.value, dist.queries - before,
                                       len(est.exact_prefix), verts, order))
    sol_scaled = math.fsum(r.mis_estimate * r.tau for r in reports)
    sol_original = float(Fraction(sol_scaled) / pre.scale) + pre.ignored_cost
    return SfEstimateReport(sol_scaled, sol_original, reports, dist.queries, seed, pre, eps_mis)
