"""Instance generators: the two tightness families, random metrics, G(n, p)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import EdgeSetOracle, InputError, MetricInstance, from_line, from_points, make_rng

KINDS = ("i1", "i2", "euclid", "gnp", "line-random")


def gen_i1(L: int) -> MetricInstance:
    """n = 2^L - 1 points spaced 2 apart; pair i with i + floor(n/2)."""
    if L < 2:
        raise InputError("I1 needs L >= 2")
    n = 2 ** L - 1
    half = n // 2
    return from_line(np.arange(n) * 2.0, [(i, i + half) for i in range(half)])


def i2_cluster_sizes(L: int) -> list[int]:
    n = 2 ** L - 1
    return [n // 2 ** i for i in range(1, L + 1)]


def gen_i2(L: int, gap: float) -> MetricInstance:
    """Clusters of floor(n/2^i) points spaced 2^(i+1), separated by ``gap``.

    Consecutive points of a cluster form the pairs, so interior points serve
    two pairs and get duplicated when the instance is built.
    """
    if L < 2:
        raise InputError("I2 needs L >= 2")
    n = 2 ** L - 1
    if gap <= n:
        raise InputError(f"gap must exceed n={n}")
    positions: list[float] = []
    pairs = []
    cursor = 0.0
    for i, size in enumerate(i2_cluster_sizes(L), start=1):
        if size == 0:
            continue
        if positions:
            cursor = positions[-1] + gap
        start = len(positions)
        positions.extend(cursor + 2 ** (i + 1) * j for j in range(size))
        pairs.extend((start + j, start + j + 1) for j in range(size - 1))
    return from_line(positions, pairs)


def gen_random_euclid(n: int, k: int, dim: int, seed) -> MetricInstance:
    """n uniform points in [0,1]^dim with k disjoint random terminal pairs."""
    if dim < 1:
        raise InputError("dim must be >= 1")
    if 2 * k > n:
        raise InputError(f"2k={2 * k} exceeds n={n}")
    rng = make_rng(seed)
    pts = rng.random((n, dim))
    ends = rng.permutation(n)[: 2 * k]
    return from_points(pts, [(int(ends[2 * j]), int(ends[2 * j + 1])) for j in range(k)])


def gen_random_line(n: int, k: int, seed, span: float = 100.0) -> MetricInstance:
    """Integer points on [0, span] with k disjoint random pairs."""
    if 2 * k > n:
        raise InputError(f"2k={2 * k} exceeds n={n}")
    rng = make_rng(seed)
    pos = rng.integers(0, int(span) + 1, size=n).astype(float)
    ends = rng.permutation(n)[: 2 * k]
    return from_line(pos, [(int(ends[2 * j]), int(ends[2 * j + 1])) for j in range(k)])


def gnp_matrix(n: int, p: float, seed) -> np.ndarray:
    """Symmetric 0/1 matrix; row i draws its upper-triangle entries in order."""
    if not 0 <= p <= 1:
        raise InputError("p must lie in [0, 1]")
    rng = make_rng(seed)
    adj = np.zeros((n, n), dtype=np.uint8)
    for i in range(n - 1):
        adj[i, i + 1:] = rng.random(n - i - 1) < p
    adj |= adj.T
    return adj


def gen_gnp(n: int, p: float, seed) -> EdgeSetOracle:
    return EdgeSetOracle(n, matrix=gnp_matrix(n, p, seed))


def line_opt(instance: MetricInstance) -> float:
    """Exact Steiner-Forest cost on a line: length of the union of pair intervals."""
    if instance.kind != "line" or instance.coords is None:
        raise InputError("line_opt needs a line instance")
    x = instance.coords[:, 0]
    spans = sorted((min(x[s], x[t]), max(x[s], x[t])) for s, t in instance.pairs)
    total = 0.0
    lo = hi = None
    for a, b in spans:
        if hi is None or a > hi:
            if hi is not None:
                total += hi - lo
            lo, hi = a, b
        else:
            hi = max(hi, b)
    if hi is not None:
        total += hi - lo
    return float(total)


@dataclass
class GenSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown kind {self.kind!r}; expected one of {KINDS}")

    def build(self):
        p = self.params
        if self.kind == "i1":
            return gen_i1(int(p["L"]))
        if self.kind == "i2":
            L = int(p["L"])
            return gen_i2(L, float(p.get("gap", 10 * (2 ** L - 1))))
        if self.kind == "euclid":
            return gen_random_euclid(int(p["n"]), int(p["k"]), int(p.get("dim", 2)), self.seed)
        if self.kind == "line-random":
            return gen_random_line(int(p["n"]), int(p["k"]), self.seed)
        return gen_gnp(int(p["n"]), float(p["p"]), self.seed)
