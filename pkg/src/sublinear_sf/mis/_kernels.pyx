# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the RGMIS vertex oracles.

Signatures and return values match ``_pykernels`` exactly; the two modules
are interchangeable and the test suite runs against both.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, qsort
from libc.stdint cimport int64_t

cnp.import_array()


cdef int _cmp_i64(const void* a, const void* b) noexcept nogil:
    cdef int64_t x = (<int64_t*>a)[0]
    cdef int64_t y = (<int64_t*>b)[0]
    return (x > y) - (x < y)


cdef inline int _run_oracle(const unsigned char[:, ::1] adj, const int64_t[::1] order,
                            const int64_t[::1] rank, int64_t v, signed char* cache,
                            int64_t* frame_v, int64_t* frame_i,
                            int64_t* calls, int64_t* probes, int64_t* depth) noexcept nogil:
    """Algorithm-2 oracle with an explicit (vertex, next scan index) stack."""
    cdef int64_t sp = 0, u, w, i, k
    cdef int result = 1, have_child = 0, action
    calls[0] += 1
    if depth[0] < 1:
        depth[0] = 1
    if cache != NULL and cache[v] >= 0:
        return cache[v]
    frame_v[0] = v
    frame_i[0] = 0
    while sp >= 0:
        u = frame_v[sp]
        i = frame_i[sp]
        if have_child:
            have_child = 0
            if result:
                # a lower-ranked neighbour is in the MIS
                if cache != NULL:
                    cache[u] = 0
                result = 0
                sp -= 1
                have_child = 1
                continue
            i += 1
        k = rank[u]
        # 0: no MIS neighbour below u, 1: descended into a neighbour, 2: cached MIS neighbour
        action = 0
        while i < k:
            w = order[i]
            probes[0] += 1
            if adj[w, u]:
                if cache != NULL and cache[w] >= 0:
                    calls[0] += 1
                    if cache[w]:
                        action = 2
                        break
                    i += 1
                    continue
                frame_i[sp] = i
                sp += 1
                frame_v[sp] = w
                frame_i[sp] = 0
                calls[0] += 1
                if sp + 1 > depth[0]:
                    depth[0] = sp + 1
                action = 1
                break
            i += 1
        if action == 1:
            continue
        result = action == 0
        if cache != NULL:
            cache[u] = result
        sp -= 1
        have_child = 1
    return result


def vertex_oracle(const unsigned char[:, ::1] adj, const int64_t[::1] order,
                  const int64_t[::1] rank, int64_t v, signed char[::1] cache=None):
    """Return (in_mis, calls, probes, max_depth) for vertex ``v``."""
    cdef Py_ssize_t n = order.shape[0]
    cdef int64_t calls = 0, probes = 0, depth = 0
    cdef int64_t* fv = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* fi = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef signed char* cp = NULL
    cdef int ans
    if cache is not None:
        cp = &cache[0]
    try:
        with nogil:
            ans = _run_oracle(adj, order, rank, v, cp, fv, fi, &calls, &probes, &depth)
    finally:
        free(fv)
        free(fi)
    return bool(ans), calls, probes, depth


def sample_oracle(const unsigned char[:, ::1] adj, const int64_t[::1] order,
                  const int64_t[::1] rank, const int64_t[::1] samples,
                  signed char[::1] cache=None):
    """Run the oracle on every vertex in ``samples``; return (hits, calls, probes)."""
    cdef Py_ssize_t n = order.shape[0], j, r = samples.shape[0]
    cdef int64_t calls = 0, probes = 0, depth = 0, hits = 0
    cdef int64_t* fv = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* fi = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef signed char* cp = NULL
    if cache is not None:
        cp = &cache[0]
    try:
        with nogil:
            for j in range(r):
                hits += _run_oracle(adj, order, rank, samples[j], cp, fv, fi,
                                    &calls, &probes, &depth)
    finally:
        free(fv)
        free(fi)
    return hits, calls, probes


def sample_oracle_stats(const unsigned char[:, ::1] adj, const int64_t[::1] order,
                        const int64_t[::1] rank, const int64_t[::1] samples):
    """Per-sample (answer, calls, probes) arrays for uncached oracle runs."""
    cdef Py_ssize_t n = order.shape[0], j, r = samples.shape[0]
    cdef int64_t calls, probes, depth
    ans_arr = np.empty(r, dtype=np.uint8)
    calls_arr = np.empty(r, dtype=np.int64)
    probes_arr = np.empty(r, dtype=np.int64)
    cdef unsigned char[::1] a = ans_arr
    cdef int64_t[::1] c = calls_arr
    cdef int64_t[::1] p = probes_arr
    cdef int64_t* fv = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* fi = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    try:
        with nogil:
            for j in range(r):
                calls = 0
                probes = 0
                depth = 0
                a[j] = _run_oracle(adj, order, rank, samples[j], NULL, fv, fi,
                                   &calls, &probes, &depth)
                c[j] = calls
                p[j] = probes
    finally:
        free(fv)
        free(fi)
    return ans_arr, calls_arr, probes_arr


def abstract_oracle(const int64_t[::1] indptr, const int64_t[::1] indices,
                    const int64_t[::1] order, const int64_t[::1] rank, int64_t v):
    """Algorithm-1 oracle over neighbour lists; return (in_mis, calls, max_depth).

    Each frame materialises the ranks of its lower-ranked neighbours in
    increasing order; frames live on one flat buffer since a vertex appears at
    most once on the stack.
    """
    cdef Py_ssize_t n = rank.shape[0]
    cdef Py_ssize_t total = indices.shape[0] + 1
    cdef int64_t* fv = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* fpos = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* fend = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* buf = <int64_t*>malloc(total * sizeof(int64_t))
    cdef int64_t sp = 0, top = 0, u, e, ru, calls = 1, depth = 1, start
    cdef int result = 1, have_child = 0
    try:
        with nogil:
            fv[0] = v
            start = top
            ru = rank[v]
            for e in range(indptr[v], indptr[v + 1]):
                if rank[indices[e]] < ru:
                    buf[top] = rank[indices[e]]
                    top += 1
            qsort(&buf[start], top - start, sizeof(int64_t), _cmp_i64)
            fpos[0] = start
            fend[0] = top
            while sp >= 0:
                if have_child:
                    have_child = 0
                    if result:
                        result = 0
                        top = fend[sp - 1] if sp > 0 else 0
                        sp -= 1
                        have_child = 1
                        continue
                    fpos[sp] += 1
                if fpos[sp] < fend[sp]:
                    u = order[buf[fpos[sp]]]
                    sp += 1
                    calls += 1
                    if sp + 1 > depth:
                        depth = sp + 1
                    fv[sp] = u
                    start = top
                    ru = rank[u]
                    for e in range(indptr[u], indptr[u + 1]):
                        if rank[indices[e]] < ru:
                            buf[top] = rank[indices[e]]
                            top += 1
                    qsort(&buf[start], top - start, sizeof(int64_t), _cmp_i64)
                    fpos[sp] = start
                    fend[sp] = top
                else:
                    result = 1
                    top = fend[sp - 1] if sp > 0 else 0
                    sp -= 1
                    have_child = 1
    finally:
        free(fv)
        free(fpos)
        free(fend)
        free(buf)
    return bool(result), calls, depth


def rgmis_mask(const unsigned char[:, ::1] adj, const int64_t[::1] order):
    """Membership mask of the random-greedy MIS along ``order``."""
    cdef Py_ssize_t n = adj.shape[0], m = order.shape[0], j, t
    cdef int64_t u
    mask_arr = np.zeros(n, dtype=np.uint8)
    blocked_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] mask = mask_arr
    cdef unsigned char[::1] blocked = blocked_arr
    with nogil:
        for j in range(m):
            u = order[j]
            if blocked[u]:
                continue
            mask[u] = 1
            for t in range(n):
                if adj[u, t]:
                    blocked[t] = 1
    return mask_arr


def greedy_prefix(const unsigned char[:, ::1] adj, const int64_t[::1] order,
                  unsigned char[::1] active, int64_t budget):
    """Explicit greedy loop: add active vertices in order until ``budget`` are chosen.

    Each chosen vertex deactivates its closed neighbourhood with one probe per
    other vertex. Returns (prefix, probes, positions_scanned); ``active`` is
    updated in place.
    """
    cdef Py_ssize_t n = adj.shape[0], m = order.shape[0], j = 0, t
    cdef int64_t u, probes = 0, count = 0
    prefix = []
    while j < m and count < budget:
        u = order[j]
        j += 1
        if active[u]:
            count += 1
            prefix.append(u)
            with nogil:
                for t in range(n):
                    if t == u:
                        active[t] = 0
                        continue
                    probes += 1
                    if adj[u, t]:
                        active[t] = 0
    return prefix, probes, j
