"""Exact baselines and explicit certificates for the level-sum bound.

Everything here reads the full distance table directly: these are test
oracles, not part of the query-bounded estimator.

The certificate follows the two-stage construction behind
OPT <= 6 * sum_i M_i tau_i: F-edges make every level's clusters internally
connected (cost of F_{l+1} <= 4 M_l tau_l), then J-edges join each level's
target terminals to their partners (cost of J_i <= 2 M_i tau_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import CountingDistanceOracle, InputError, MetricInstance, Permutation, random_permutation
from .mis import rgmis_mask
from .steiner import PreprocessedInstance, levels, preprocess

OPT_MAX_N = 14
OPT_MAX_K = 5


class CertificationError(RuntimeError):
    """A construction precondition does not hold on this instance."""


class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


# --------------------------------------------------------------------------
# exact optimum
# --------------------------------------------------------------------------


def _pair_partitions_min(k: int, block_cost) -> float:
    """min over set partitions of range(k) of the sum of block_cost(bitmask)."""
    full = (1 << k) - 1
    best = [math.inf] * (1 << k)
    best[0] = 0.0
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        while True:
            block = sub | low
            cand = block_cost(block) + best[mask ^ block]
            if cand < best[mask]:
                best[mask] = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
    return best[full]


def steiner_tree_table(dist: np.ndarray, terminals: list[int]) -> np.ndarray:
    """Dreyfus-Wagner: cost of a minimum Steiner tree for every terminal subset."""
    d = np.asarray(dist, dtype=float)
    t = len(terminals)
    dp = np.full((1 << t, d.shape[0]), np.inf)
    for i, x in enumerate(terminals):
        dp[1 << i] = d[x]
    for mask in range(1, 1 << t):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        rest = mask ^ low
        acc = np.full(d.shape[0], np.inf)
        # blocks containing the lowest terminal, excluding the whole mask
        sub = (rest - 1) & rest
        while True:
            block = sub | low
            np.minimum(acc, dp[block] + dp[mask ^ block], out=acc)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        # distances already form a metric closure, so one relaxation suffices
        dp[mask] = (acc[:, None] + d).min(axis=0)
    return dp.min(axis=1)


def exact_opt_sf(instance: MetricInstance, pairs=None) -> float:
    """Minimum Steiner-Forest cost by partitioning pairs into Steiner-tree blocks."""
    pairs = list(instance.pairs if pairs is None else pairs)
    if instance.n > OPT_MAX_N or len(pairs) > OPT_MAX_K:
        raise InputError(f"exact_opt_sf supports n <= {OPT_MAX_N} and k <= {OPT_MAX_K}; "
                         f"got n={instance.n}, k={len(pairs)}")
    if not pairs:
        return 0.0
    terms = [v for p in pairs for v in p]
    table = steiner_tree_table(instance.dist, terms)

    def block_cost(block):
        tmask = 0
        for j in range(len(pairs)):
            if block >> j & 1:
                tmask |= 0b11 << (2 * j)
        return float(table[tmask])

    return _pair_partitions_min(len(pairs), block_cost)


def _mst_cost(d: np.ndarray, verts: list[int]) -> float:
    if len(verts) < 2:
        return 0.0
    inside = {verts[0]}
    best = {v: d[verts[0], v] for v in verts[1:]}
    total = 0.0
    while best:
        v = min(best, key=best.get)
        total += best.pop(v)
        inside.add(v)
        for u in best:
            if d[v, u] < best[u]:
                best[u] = d[v, u]
    return total


def opt_by_enumeration(instance: MetricInstance, pairs=None) -> float:
    """Second OPT oracle: every tree of a forest is the MST of the vertex set it spans.

    Enumerates all vertex subsets (n <= 8) and all pair partitions.
    """
    pairs = list(instance.pairs if pairs is None else pairs)
    n = instance.n
    if n > 8:
        raise InputError("opt_by_enumeration supports n <= 8")
    if not pairs:
        return 0.0
    mst = [_mst_cost(instance.dist, [v for v in range(n) if m >> v & 1]) for m in range(1 << n)]
    # tree[m] = cheapest tree spanning at least the vertices of m
    tree = mst[:]
    for bit in range(n):
        for m in range(1 << n):
            if not m >> bit & 1:
                tree[m] = min(tree[m], tree[m | 1 << bit])

    def block_cost(block):
        m = 0
        for j, (s, t) in enumerate(pairs):
            if block >> j & 1:
                m |= 1 << s | 1 << t
        return tree[m]

    return _pair_partitions_min(len(pairs), block_cost)


# --------------------------------------------------------------------------
# level structure
# --------------------------------------------------------------------------


def _active(dist, pairs, tau, scale) -> list[int]:
    limit = float(Fraction(tau) / scale)
    return [x for s, t in pairs for x in (s, t) if dist[s, t] >= limit]


@dataclass
class LevelDecomposition:
    i: int
    tau: int
    active: list[int]
    U: list[int]
    center_of: dict[int, int]
    clusters: dict[int, list[int]]
    targets: list[int]

    @property
    def M(self) -> int:
        return len(self.U)


def level_decomposition(dist, pairs, tau, tau_next, pi: Permutation, scale=1,
                        i: int = 0) -> LevelDecomposition:
    """MIS of the level's ball graph under ``pi`` plus nearest-centre clusters.

    ``pi`` is a permutation of all instance vertices; it is restricted to the
    active terminals. Centre ties go to the lowest vertex id.
    """
    d = np.asarray(dist, dtype=float)
    scale = Fraction(scale)
    act = _active(d, pairs, tau, scale)
    if not act:
        return LevelDecomposition(i, tau, [], [], {}, {}, [])
    edge_limit = float(Fraction(2 * tau) / scale)
    sub = pi.restrict(act)
    adj = (d < edge_limit).astype(np.uint8)
    np.fill_diagonal(adj, 0)
    mask = np.zeros(d.shape[0], dtype=np.uint8)
    mask[act] = 1
    adj = np.ascontiguousarray(adj * mask[:, None] * mask[None, :])
    in_mis = rgmis_mask(adj, sub.order)
    U = sorted(np.flatnonzero(in_mis).tolist())
    center_of = {}
    clusters: dict[int, list[int]] = {u: [] for u in U}
    Ua = np.array(U)
    for v in act:
        row = d[v, Ua]
        best = row.min()
        c = int(Ua[np.flatnonzero(row == best)].min())
        center_of[v] = c
        clusters[c].append(v)
    nxt = set(_active(d, pairs, tau_next, scale))
    targets = [v for v in act if v not in nxt]
    return LevelDecomposition(i, tau, act, U, center_of, clusters, targets)


def _closest_pair(d, A, B):
    best = None
    for a in A:
        for b in B:
            key = (d[a, b], min(a, b), max(a, b))
            if best is None or key < best:
                best = key
    return (best[1], best[2])


def _forest(nodes, edges):
    uf = UnionFind(nodes)
    return [(a, b) for a, b in sorted(set(edges)) if uf.union(a, b)]


BASES = ("cluster-mst", "empty")


def _mst_edges(d, verts) -> list[tuple[int, int]]:
    verts = sorted(verts)
    edges = sorted((d[a, b], a, b) for a, b in combinations(verts, 2))
    uf = UnionFind(verts)
    return [(a, b) for _, a, b in edges if uf.union(a, b)]


def build_connectivity_forest(decomps: list[LevelDecomposition], dist,
                              base: str = "cluster-mst") -> list[list[tuple[int, int]]]:
    """F_{l+1} links level-l clusters whose members share a level-(l+1) centre.

    The induction needs every level-0 cluster to be connected already. That
    holds with F_0 = {} only when the level-0 ball graph has no edges, which
    is not true in general: only partners are guaranteed to be 2 apart, other
    active terminals can be arbitrarily close. ``base="cluster-mst"`` puts a
    minimum spanning tree of each level-0 cluster into F_0; ``base="empty"``
    keeps F_0 = {} and lets the target-link step report the gap.
    """
    if base not in BASES:
        raise InputError(f"base must be one of {BASES}")
    d = np.asarray(dist, dtype=float)
    for a, b in zip(decomps, decomps[1:]):
        if b.i != a.i + 1 or not set(b.active) <= set(a.active):
            raise InputError("decompositions must be consecutive levels with nested active sets")
    F0 = []
    if base == "cluster-mst" and decomps:
        for u in decomps[0].U:
            F0.extend(_mst_edges(d, decomps[0].clusters[u]))
    F: list[list[tuple[int, int]]] = [F0]
    for lo, hi in zip(decomps, decomps[1:]):
        links = []
        for v, u in hi.center_of.items():
            u1, u2 = lo.center_of[v], lo.center_of[u]
            if u1 != u2:
                links.append((min(u1, u2), max(u1, u2)))
        F.append([_closest_pair(d, lo.clusters[a], lo.clusters[b])
                  for a, b in _forest(lo.U, links)])
    return F


def build_target_links(decomp: LevelDecomposition, F_edges, dist, pairs) -> list[tuple[int, int]]:
    """J_i: join clusters holding opposite ends of a target pair.

    Raises :class:`CertificationError` when some cluster of this level is not
    yet connected by ``F_edges``, since the construction relies on it.
    """
    d = np.asarray(dist, dtype=float)
    uf = UnionFind()
    for a, b in F_edges:
        uf.union(a, b)
    for u, members in decomp.clusters.items():
        roots = {uf.find(v) for v in members}
        if len(roots) > 1:
            raise CertificationError(
                f"level {decomp.i}: cluster of {u} ({len(members)} terminals) is not "
                f"connected by F")
    if not decomp.targets:
        return []
    match = {}
    for s, t in pairs:
        match[s], match[t] = t, s
    links = []
    for s in decomp.targets:
        u1, u2 = decomp.center_of[s], decomp.center_of[match[s]]
        if u1 != u2:
            links.append((min(u1, u2), max(u1, u2)))
    return [_closest_pair(d, decomp.clusters[a], decomp.clusters[b])
            for a, b in _forest(decomp.U, links)]


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------


def full_preprocess(instance: MetricInstance) -> PreprocessedInstance:
    """Preprocessing with an uncounted private oracle."""
    return preprocess(CountingDistanceOracle(instance), instance.pairs)


@dataclass
class Certificate:
    taus: list[int]
    M: list[int]
    F_levels: list[list[tuple[int, int]]]
    J_levels: list[list[tuple[int, int]]]
    pairs: list[tuple[int, int]]
    scale: Fraction
    costs: list[dict] = field(default_factory=list)
    verdict: dict = field(default_factory=dict)
    problems: list[str] = field(default_factory=list)
    base: str = "cluster-mst"

    def edges(self):
        for group in (*self.F_levels, *self.J_levels):
            yield from group


def decompositions(instance: MetricInstance, pre: PreprocessedInstance, pi: Permutation):
    if not pre.k_eff:
        return []
    taus = levels(pre.k_eff)
    return [level_decomposition(instance.dist, pre.kept_pairs, tau, 2 * tau, pi, pre.scale, i)
            for i, tau in enumerate(taus)]


def build_certificate(instance: MetricInstance, seed: int = 0, pi: Permutation | None = None,
                      pre: PreprocessedInstance | None = None,
                      base: str = "cluster-mst") -> Certificate:
    pre = pre or full_preprocess(instance)
    if pi is None:
        pi = random_permutation(instance.n, seed)
    decs = decompositions(instance, pre, pi)
    cert = Certificate([dc.tau for dc in decs], [dc.M for dc in decs], [], [],
                       list(pre.kept_pairs), pre.scale, base=base)
    if not decs:
        return cert
    cert.F_levels = build_connectivity_forest(decs, instance.dist, base)
    for dc in decs:
        F_upto = [e for group in cert.F_levels[: dc.i + 1] for e in group]
        try:
            cert.J_levels.append(build_target_links(dc, F_upto, instance.dist, pre.kept_pairs))
        except CertificationError as exc:
            cert.problems.append(str(exc))
            cert.J_levels.append([])
    return cert


def _cost(d, edges) -> float:
    return math.fsum(float(d[a, b]) for a, b in edges)


def verify_certificate(instance: MetricInstance, cert: Certificate) -> dict:
    """Recompute costs, check every per-level bound and pair connectivity."""
    d = instance.dist
    scale = cert.scale
    rows = []
    ok = not cert.problems
    total_raw = 0.0
    budget = Fraction(0)
    for i, tau in enumerate(cert.taus):
        cf = _cost(d, cert.F_levels[i]) if i < len(cert.F_levels) else 0.0
        cj = _cost(d, cert.J_levels[i]) if i < len(cert.J_levels) else 0.0
        # F_0 carries no per-level bound; it only enters the total
        f_bound = 4 * cert.M[i - 1] * cert.taus[i - 1] if i else None
        j_bound = 2 * cert.M[i] * tau
        f_ok = i == 0 or Fraction(cf) * scale <= f_bound
        j_ok = Fraction(cj) * scale <= j_bound
        ok &= f_ok and j_ok
        total_raw += cf + cj
        budget += cert.M[i] * tau
        rows.append({"i": i, "tau_i": tau, "M_i": cert.M[i], "cost_F": float(Fraction(cf) * scale),
                     "cost_J": float(Fraction(cj) * scale), "bound_F": f_bound, "bound_J": j_bound,
                     "bound_ok": bool(f_ok and j_ok)})
    total = Fraction(math.fsum([total_raw])) * scale
    total_ok = total <= 6 * budget
    uf = UnionFind()
    for a, b in cert.edges():
        uf.union(a, b)
    connected = {f"{s}-{t}": uf.find(s) == uf.find(t) for s, t in cert.pairs}
    ok = bool(ok and total_ok and all(connected.values()))
    return {"levels": rows, "total_cost": float(total), "level_sum": float(budget),
            "total_ok": bool(total_ok), "base": cert.base, "connected": connected, "problems": list(cert.problems),
            "passed": ok}


# --------------------------------------------------------------------------
# exact level sums
# --------------------------------------------------------------------------


def level_mis_sizes(instance: MetricInstance, perms, raw_units: bool = False,
                    pre: PreprocessedInstance | None = None) -> list[tuple[int, int]]:
    """(tau_i, exact |RGMIS|) for each level's ball graph.

    ``perms`` is one permutation of all vertices (restricted per level) or a
    list with one permutation per level. With ``raw_units`` the distances are
    used unscaled and no pair is dropped.
    """
    if raw_units:
        pairs, scale = list(instance.pairs), Fraction(1)
    else:
        pre = pre or full_preprocess(instance)
        pairs, scale = pre.kept_pairs, pre.scale
    if not pairs:
        return []
    taus = levels(len(pairs))
    if isinstance(perms, Permutation):
        perms = [perms] * len(taus)
    out = []
    for i, tau in enumerate(taus):
        dc = level_decomposition(instance.dist, pairs, tau, 2 * tau, perms[i], scale, i)
        out.append((tau, dc.M))
    return out


def exact_level_mis_sum(instance: MetricInstance, perms, raw_units: bool = False) -> Fraction:
    """sum_i tau_i * |RGMIS_i| in working units (exact integer arithmetic)."""
    return Fraction(sum(tau * m for tau, m in level_mis_sizes(instance, perms, raw_units)))


def level_zero_edgeless(instance: MetricInstance) -> bool:
    """Whether the level-0 ball graph of the preprocessed instance has no edges."""
    pre = full_preprocess(instance)
    if not pre.k_eff:
        return True
    act = _active(instance.dist, pre.kept_pairs, 1, pre.scale)
    limit = float(Fraction(2) / pre.scale)
    sub = instance.dist[np.ix_(act, act)]
    np.fill_diagonal(sub, np.inf)
    return bool((sub >= limit).all())
