"""Membership oracles for the random-greedy MIS and the exact baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import CountingAdjacencyOracle, InputError, Permutation, make_rng
from . import _backend


@dataclass(frozen=True)
class OracleCallStats:
    recursive_calls: int
    matrix_queries: int
    max_depth: int


def _as_matrix(graph) -> np.ndarray:
    """Full-access 0/1 matrix for an oracle or a raw array (never counted)."""
    if isinstance(graph, CountingAdjacencyOracle):
        adj = graph.dense()
        if adj is None:
            adj = np.zeros((graph.n, graph.n), dtype=np.uint8)
            for u in range(graph.n):
                for v in range(u + 1, graph.n):
                    adj[u, v] = adj[v, u] = graph._edge(u, v)
        return adj
    return np.ascontiguousarray(graph, dtype=np.uint8)


def rgmis_mask(graph, order) -> np.ndarray:
    """0/1 membership of the greedy MIS of the subgraph induced by ``order``'s vertices."""
    adj = _as_matrix(graph)
    order = np.ascontiguousarray(order.order if isinstance(order, Permutation) else order,
                                 dtype=np.int64)
    return _backend.kernels().rgmis_mask(adj, order)


def rgmis_exact(graph, pi: Permutation) -> set[int]:
    """RGMIS(pi) computed with free access to the whole adjacency matrix."""
    adj = _as_matrix(graph)
    if len(pi) != adj.shape[0]:
        raise InputError(f"permutation has length {len(pi)}, graph has {adj.shape[0]} vertices")
    return set(np.flatnonzero(rgmis_mask(adj, pi)).tolist())


def new_cache(n: int) -> np.ndarray:
    """Memo table for :func:`mis_vertex_oracle` (-1 unknown, 0/1 resolved)."""
    return np.full(n, -1, dtype=np.int8)


def _probe_oracle(adj: CountingAdjacencyOracle, order, rank, v, cache):
    """Oracle through ``adj.query`` one probe at a time (oracles without a dense view)."""
    calls, depth = 1, 1
    if cache is not None and cache[v] >= 0:
        return bool(cache[v]), calls, depth
    frames = [[v, 0]]
    result, have_child = True, False
    while frames:
        frame = frames[-1]
        u, i = frame
        if have_child:
            have_child = False
            if result:
                if cache is not None:
                    cache[u] = 0
                result = False
                frames.pop()
                have_child = True
                continue
            i += 1
        action = 0
        while i < rank[u]:
            w = int(order[i])
            if adj.query(w, u):
                if cache is not None and cache[w] >= 0:
                    calls += 1
                    if cache[w]:
                        action = 2
                        break
                    i += 1
                    continue
                frame[1] = i
                frames.append([w, 0])
                calls += 1
                depth = max(depth, len(frames))
                action = 1
                break
            i += 1
        if action == 1:
            continue
        result = action == 0
        if cache is not None:
            cache[u] = int(result)
        frames.pop()
        have_child = True
    return result, calls, depth


def mis_vertex_oracle(adj: CountingAdjacencyOracle, pi: Permutation, v: int,
                      cache: np.ndarray | None = None) -> tuple[bool, OracleCallStats]:
    """Is ``v`` in RGMIS(pi)?  Scans lower ranks of ``pi`` probing the adjacency matrix.

    ``pi`` may cover a subset of the oracle's vertices, in which case the answer
    is for the induced subgraph. Every probe is charged to ``adj``.
    """
    if v not in pi:
        raise InputError(f"vertex {v} not in permutation")
    rank = pi.rank_array(adj.n)
    before = adj.queries
    dense = adj.dense()
    if dense is None:
        ans, calls, depth = _probe_oracle(adj, pi.order, rank, int(v), cache)
        return ans, OracleCallStats(calls, adj.queries - before, depth)
    ans, calls, probes, depth = _backend.kernels().vertex_oracle(
        dense, pi.order, rank, int(v), cache)
    adj.charge(probes)
    return bool(ans), OracleCallStats(int(calls), int(probes), int(depth))


def _csr(adj: np.ndarray):
    rows, cols = np.nonzero(adj)
    indptr = np.zeros(adj.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=adj.shape[0]), out=indptr[1:])
    return indptr, np.ascontiguousarray(cols, dtype=np.int64)


def abstract_oracle_reference(graph, pi: Permutation, v: int) -> tuple[bool, OracleCallStats]:
    """Neighbour-list oracle (validation only; adjacency reads are free).

    ``matrix_queries`` is reported as 0 because no matrix probes are made.
    """
    adj = _as_matrix(graph)
    indptr, indices = _csr(adj)
    rank = pi.rank_array(adj.shape[0])
    ans, calls, depth = _backend.kernels().abstract_oracle(indptr, indices, pi.order, rank, int(v))
    return bool(ans), OracleCallStats(int(calls), 0, int(depth))


def sample_call_stats(graph, samples: int, seed, which: str = "matrix"):
    """Monte-Carlo (v, pi) draws: per-sample answers, recursive calls and probes.

    ``which`` selects the matrix oracle ("matrix") or the neighbour-list oracle
    ("abstract"). A fresh uniform permutation and vertex are drawn per sample.
    Probes are not charged anywhere; this is a measurement helper.
    """
    adj = _as_matrix(graph)
    n = adj.shape[0]
    rng = make_rng(seed)
    k = _backend.kernels()
    ans = np.empty(samples, dtype=np.uint8)
    calls = np.empty(samples, dtype=np.int64)
    probes = np.zeros(samples, dtype=np.int64)
    if which == "abstract":
        indptr, indices = _csr(adj)
    for j in range(samples):
        order = rng.permutation(n).astype(np.int64)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n, dtype=np.int64)
        v = int(rng.integers(n))
        if which == "abstract":
            a, c, _ = k.abstract_oracle(indptr, indices, order, rank, v)
            ans[j], calls[j] = a, c
        else:
            a, c, p, _ = k.vertex_oracle(adj, order, rank, v)
            ans[j], calls[j], probes[j] = a, c, p
    return ans, calls, probes
