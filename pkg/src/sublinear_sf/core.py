"""Instance model, counting oracles and permutations.

Every distance or edge lookup performed by an estimator goes through one of
the counting oracles below; the counter is the cost metric for all
benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class InputError(ValueError):
    """Raised on malformed arguments or instances."""


def make_rng(seed) -> np.random.Generator:
    """Return a generator for ``seed`` (an int, a SeedSequence or a Generator)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic child seed for (seed, keys...), independent per key tuple."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# --------------------------------------------------------------------------
# metric instances
# --------------------------------------------------------------------------


def _pairwise(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    if coords.shape[1] == 1:
        return np.abs(diff[:, :, 0])
    return np.sqrt((diff * diff).sum(axis=2))


def check_metric(dist: np.ndarray, exhaustive_limit: int = 64, samples: int = 200_000,
                 seed=0, rtol: float = 1e-9) -> bool:
    """True iff ``dist`` is a (pseudo)metric.

    Triangle inequality is checked over all triples when n <= exhaustive_limit,
    otherwise over ``samples`` random triples. ``rtol`` absorbs float rounding of
    coordinate-derived distances only; thresholds elsewhere compare exactly.
    """
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        return False
    if np.any(d < 0) or np.any(np.diag(d) != 0) or not np.array_equal(d, d.T):
        return False
    if n <= 2:
        return True
    slack = rtol * max(1.0, float(d.max()))
    if n <= exhaustive_limit:
        for x in range(n):
            if np.any(d > d[:, x, None] + d[None, x, :] + slack):
                return False
        return True
    rng = make_rng(seed)
    u, v, x = rng.integers(0, n, size=(3, samples))
    return bool(np.all(d[u, v] <= d[u, x] + d[x, v] + slack))


@dataclass
class MetricInstance:
    """A metric Steiner-Forest instance with all 2k terminals distinct.

    ``dist`` is the full distance table (the simulated input matrix; algorithms
    read it only through :class:`CountingDistanceOracle`). ``coords`` and
    ``kind`` remember the source representation so files round-trip.
    """

    dist: np.ndarray
    pairs: list[tuple[int, int]]
    kind: str = "matrix"
    coords: np.ndarray | None = None
    origin: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.dist = np.asarray(self.dist, dtype=float)
        n = self.dist.shape[0]
        if self.dist.ndim != 2 or self.dist.shape != (n, n):
            raise InputError("distance table must be square")
        self.pairs = [(int(s), int(t)) for s, t in self.pairs]
        for s, t in self.pairs:
            if not (0 <= s < n and 0 <= t < n):
                raise InputError(f"pair ({s}, {t}) out of range for n={n}")
            if s == t:
                raise InputError(f"pair ({s}, {t}) joins a vertex to itself")
        if not self.origin:
            self.origin = list(range(n))

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def terminals(self) -> list[int]:
        return [v for pair in self.pairs for v in pair]

    def match_map(self) -> dict[int, int]:
        m = {}
        for s, t in self.pairs:
            m[s] = t
            m[t] = s
        return m

    def is_metric(self, **kw) -> bool:
        return check_metric(self.dist, **kw)


def _dedupe_terminals(dist, pairs, coords):
    """Give every pair private copies of its endpoints (distance 0 to the original)."""
    n = dist.shape[0]
    origin = list(range(n))
    seen: set[int] = set()
    new_pairs = []
    extra: list[int] = []
    for s, t in pairs:
        fixed = []
        for v in (s, t):
            if v in seen:
                extra.append(v)
                fixed.append(n + len(extra) - 1)
            else:
                seen.add(v)
                fixed.append(v)
        new_pairs.append(tuple(fixed))
    if not extra:
        return dist, list(pairs), coords, origin
    idx = np.array(origin + extra)
    origin = idx.tolist()
    if coords is not None:
        coords = coords[idx]
    return dist[np.ix_(idx, idx)], new_pairs, coords, origin


def _build(dist, pairs, kind, coords, validate):
    n = dist.shape[0]
    pairs = [(int(s), int(t)) for s, t in pairs]
    if len(pairs) > n:
        raise InputError(f"k={len(pairs)} exceeds n={n}")
    dist, pairs, coords, origin = _dedupe_terminals(dist, pairs, coords)
    inst = MetricInstance(dist, pairs, kind=kind, coords=coords, origin=origin)
    if validate and not inst.is_metric():
        raise InputError("distances violate the metric axioms")
    return inst


def from_matrix(matrix, pairs, validate: bool = True) -> MetricInstance:
    d = np.array(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InputError("distance table must be square")
    return _build(d, pairs, "matrix", None, validate)


def from_line(positions, pairs) -> MetricInstance:
    c = np.asarray(positions, dtype=float).reshape(-1, 1)
    return _build(_pairwise(c), pairs, "line", c, validate=False)


def from_points(points, pairs) -> MetricInstance:
    c = np.asarray(points, dtype=float)
    if c.ndim == 1:
        c = c.reshape(-1, 1)
    return _build(_pairwise(c), pairs, "euclid", c, validate=False)


# --------------------------------------------------------------------------
# counting oracles
# --------------------------------------------------------------------------


class CountingDistanceOracle:
    """Pay-per-lookup access to a metric; ``scale`` multiplies returned values."""

    def __init__(self, instance: MetricInstance, scale=1):
        self.instance = instance
        self.scale = Fraction(scale)
        if self.scale <= 0:
            raise InputError("scale must be positive")
        self._count = 0

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def queries(self) -> int:
        return self._count

    def _check(self, u, v):
        n = self.instance.n
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"vertex out of range: ({u}, {v}) with n={n}")

    def raw(self, u: int, v: int) -> float:
        """Unscaled distance; counted exactly like :meth:`query`."""
        self._check(u, v)
        self._count += 1
        return float(self.instance.dist[u, v])

    def query(self, u: int, v: int) -> float:
        w = self.raw(u, v)
        if self.scale == 1:
            return w
        return float(self.scale * Fraction(w))

    def charge(self, count: int) -> None:
        """Account for ``count`` lookups performed by a compiled kernel."""
        if count < 0:
            raise InputError("negative charge")
        self._count += int(count)


class CountingAdjacencyOracle:
    """Pay-per-lookup edge membership over vertices 0..n-1.

    Subclasses provide ``_edge`` and, when the edge relation can be laid out as
    a dense 0/1 table, ``dense()``. Kernels that read the dense table report
    how many probes they made and the oracle is charged for exactly that many.
    """

    n: int

    def _edge(self, u: int, v: int) -> bool:
        raise NotImplementedError

    def _tick(self, count: int) -> None:
        raise NotImplementedError

    def dense(self) -> np.ndarray | None:
        return None

    @property
    def queries(self) -> int:
        raise NotImplementedError

    def query(self, u: int, v: int) -> bool:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise InputError(f"vertex out of range: ({u}, {v}) with n={self.n}")
        if u == v:
            raise InputError("adjacency query on a self-pair")
        self._tick(1)
        return self._edge(u, v)

    def charge(self, count: int) -> None:
        if count < 0:
            raise InputError("negative charge")
        self._tick(int(count))


class EdgeSetOracle(CountingAdjacencyOracle):
    """Adjacency oracle over an explicit simple graph."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] | None = None,
                 matrix: np.ndarray | None = None):
        self.n = int(n)
        if matrix is not None:
            adj = np.ascontiguousarray(matrix, dtype=np.uint8)
            if adj.shape != (self.n, self.n):
                raise InputError("adjacency matrix has the wrong shape")
            if np.any(np.diag(adj)) or not np.array_equal(adj, adj.T):
                raise InputError("adjacency matrix must be symmetric with empty diagonal")
        else:
            adj = np.zeros((self.n, self.n), dtype=np.uint8)
            for u, v in edges or ():
                if u == v:
                    raise InputError(f"self-loop at {u}")
                adj[u, v] = adj[v, u] = 1
        self._adj = adj
        self._count = 0

    def _edge(self, u, v):
        return bool(self._adj[u, v])

    def _tick(self, count):
        self._count += count

    def dense(self):
        return self._adj

    @property
    def queries(self) -> int:
        return self._count

    @property
    def m(self) -> int:
        return int(self._adj.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self._adj, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def fresh(self) -> "EdgeSetOracle":
        """Same graph, zeroed counter."""
        clone = EdgeSetOracle.__new__(EdgeSetOracle)
        clone.n, clone._adj, clone._count = self.n, self._adj, 0
        return clone


class ThresholdGraphOracle(CountingAdjacencyOracle):
    """Graph on a vertex subset of a metric: (a, b) is an edge iff w(a, b) < limit.

    Local vertex ``i`` is ``vertices[i]`` of the underlying metric. ``limit`` is
    in raw (unscaled) distance units. Every probe is one distance lookup on the
    shared distance oracle, so counting is delegated to it.
    """

    def __init__(self, dist: CountingDistanceOracle, vertices: Sequence[int], limit: float):
        self.dist = dist
        self.vertices = np.asarray(vertices, dtype=np.int64)
        self.n = len(self.vertices)
        self.limit = float(limit)
        self._dense = None

    def _edge(self, u, v):
        # _tick already paid for this lookup; read the table directly
        return bool(self.dist.instance.dist[self.vertices[u], self.vertices[v]] < self.limit)

    def _tick(self, count):
        self.dist.charge(count)

    def dense(self):
        if self._dense is None:
            sub = self.dist.instance.dist[np.ix_(self.vertices, self.vertices)]
            adj = (sub < self.limit).astype(np.uint8)
            np.fill_diagonal(adj, 0)
            self._dense = adj
        return self._dense

    @property
    def queries(self) -> int:
        return self.dist.queries


# --------------------------------------------------------------------------
# permutations
# --------------------------------------------------------------------------


class Permutation:
    """Bijection between ranks 0..len-1 and a set of vertex ids."""

    __slots__ = ("order", "_rank")

    def __init__(self, order: Iterable[int]):
        self.order = np.asarray(list(order) if not isinstance(order, np.ndarray) else order,
                                dtype=np.int64)
        if self.order.ndim != 1:
            raise InputError("permutation order must be one-dimensional")
        if len(np.unique(self.order)) != len(self.order):
            raise InputError("permutation repeats a vertex")
        self._rank = {int(v): i for i, v in enumerate(self.order)}

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order.tolist())

    def __getitem__(self, i):
        return int(self.order[i])

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.order, other.order)

    def __repr__(self):
        return f"Permutation({self.order.tolist()})"

    def __contains__(self, v):
        return int(v) in self._rank

    def rank(self, v: int) -> int:
        """0-based rank of ``v``."""
        try:
            return self._rank[int(v)]
        except KeyError:
            raise InputError(f"vertex {v} not in permutation") from None

    def rank_array(self, size: int) -> np.ndarray:
        """Dense rank table of length ``size``; -1 marks absent vertices."""
        r = np.full(size, -1, dtype=np.int64)
        r[self.order] = np.arange(len(self.order), dtype=np.int64)
        return r

    def restrict(self, subset: Iterable[int]) -> "Permutation":
        sub = {int(v) for v in subset}
        foreign = sub.difference(self._rank)
        if foreign:
            raise InputError(f"vertices {sorted(foreign)} not in permutation")
        if len(sub) == len(self.order):
            return self
        mask = np.fromiter((int(v) in sub for v in self.order), dtype=bool, count=len(self.order))
        return Permutation(self.order[mask])


def random_permutation(n: int, seed) -> Permutation:
    """Uniform permutation of 0..n-1 drawn from a seeded generator."""
    if n < 1:
        raise InputError("random_permutation needs n >= 1")
    return Permutation(make_rng(seed).permutation(n))


def restrict_permutation(pi: Permutation, subset: Iterable[int]) -> Permutation:
    return pi.restrict(subset)


def distance_query(oracle: CountingDistanceOracle, u: int, v: int) -> float:
    return oracle.query(u, v)


def adjacency_query(oracle: CountingAdjacencyOracle, u: int, v: int) -> bool:
    return oracle.query(u, v)


def query_count(oracle) -> int:
    return oracle.queries
