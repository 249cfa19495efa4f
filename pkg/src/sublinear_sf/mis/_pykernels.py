"""Pure-Python versions of the compiled oracle loops (same signatures)."""

import numpy as np


def _run_oracle(adj, order, rank, v, cache, stats):
    # stats = [calls, probes, depth]
    stats[0] += 1
    if stats[2] < 1:
        stats[2] = 1
    if cache is not None and cache[v] >= 0:
        return bool(cache[v])
    frames = [[v, 0]]
    result = True
    have_child = False
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
        k = rank[u]
        row = adj[:, u]
        action = 0
        while i < k:
            w = order[i]
            stats[1] += 1
            if row[w]:
                if cache is not None and cache[w] >= 0:
                    stats[0] += 1
                    if cache[w]:
                        action = 2
                        break
                    i += 1
                    continue
                frame[1] = i
                frames.append([w, 0])
                stats[0] += 1
                if len(frames) > stats[2]:
                    stats[2] = len(frames)
                action = 1
                break
            i += 1
        if action == 1:
            continue
        result = action == 0
        if cache is not None:
            cache[u] = 1 if result else 0
        frames.pop()
        have_child = True
    return result


def _lists(adj, order, rank):
    return adj.tolist(), order.tolist(), rank.tolist()


def vertex_oracle(adj, order, rank, v, cache=None):
    stats = [0, 0, 0]
    ans = _run_oracle(adj, order.tolist(), rank.tolist(), int(v), cache, stats)
    return ans, stats[0], stats[1], stats[2]


def sample_oracle(adj, order, rank, samples, cache=None):
    a, o, r = _lists(adj, order, rank)
    cols = _Cols(a)
    stats = [0, 0, 0]
    hits = 0
    for v in samples.tolist():
        hits += _run_oracle(cols, o, r, v, cache, stats)
    return hits, stats[0], stats[1]


def sample_oracle_stats(adj, order, rank, samples):
    a, o, r = _lists(adj, order, rank)
    cols = _Cols(a)
    m = len(samples)
    ans = np.empty(m, dtype=np.uint8)
    calls = np.empty(m, dtype=np.int64)
    probes = np.empty(m, dtype=np.int64)
    for j, v in enumerate(samples.tolist()):
        stats = [0, 0, 0]
        ans[j] = _run_oracle(cols, o, r, v, None, stats)
        calls[j] = stats[0]
        probes[j] = stats[1]
    return ans, calls, probes


class _Cols:
    """``adj[:, u]`` on a nested list (the matrix is symmetric, so a row will do)."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = rows

    def __getitem__(self, key):
        return self.rows[key[1]]


def abstract_oracle(indptr, indices, order, rank, v):
    ip, ix, r = indptr.tolist(), indices.tolist(), rank.tolist()
    o = order.tolist()

    def lower(u):
        ru = r[u]
        return sorted(r[w] for w in ix[ip[u]:ip[u + 1]] if r[w] < ru)

    calls, depth = 1, 1
    frames = [[lower(int(v)), 0]]
    result, have_child = True, False
    while frames:
        frame = frames[-1]
        if have_child:
            have_child = False
            if result:
                result = False
                frames.pop()
                have_child = True
                continue
            frame[1] += 1
        ranks, pos = frame
        if pos < len(ranks):
            frames.append([lower(o[ranks[pos]]), 0])
            calls += 1
            depth = max(depth, len(frames))
        else:
            result = True
            frames.pop()
            have_child = True
    return result, calls, depth


def rgmis_mask(adj, order):
    n = adj.shape[0]
    mask = np.zeros(n, dtype=np.uint8)
    blocked = np.zeros(n, dtype=bool)
    for u in order.tolist():
        if blocked[u]:
            continue
        mask[u] = 1
        blocked |= adj[u].astype(bool)
    return mask


def greedy_prefix(adj, order, active, budget):
    n = adj.shape[0]
    prefix = []
    probes = 0
    j = 0
    m = len(order)
    while j < m and len(prefix) < budget:
        u = int(order[j])
        j += 1
        if active[u]:
            prefix.append(u)
            probes += n - 1
            active[adj[u].astype(bool)] = 0
            active[u] = 0
    return prefix, probes, j
