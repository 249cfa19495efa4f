"""Good permutations of the layered auxiliary graph.

The auxiliary graph has layers V (n vertices), V2 (2n) and V3 (n). A
permutation of its 4n vertices is good when it starts in V3 and every prefix
holds at least as many V2 vertices as V vertices. Goodness lets the cost of
the matrix oracle on the original graph be charged to the neighbour-list
oracle on the auxiliary one.
"""

from __future__ import annotations

from collections import Counter
from itertools import permutations
from typing import Mapping

import numpy as np

from ..core import InputError, Permutation, make_rng

LAYERS = ("V", "V2", "V3")
_CODE = {"V": 1, "V2": 2, "V3": 3, 1: 1, 2: 2, 3: 3}


def _codes(order, layer_of: Mapping) -> np.ndarray:
    try:
        return np.array([_CODE[layer_of[int(v)]] for v in order], dtype=np.int8)
    except KeyError as exc:
        raise InputError(f"unknown vertex or layer: {exc}") from None


def _good_rows(codes: np.ndarray) -> np.ndarray:
    """Goodness of each row of a (trials, 4n) layer-code array."""
    step = (codes == 2).astype(np.int32) - (codes == 1).astype(np.int32)
    lead = np.cumsum(step, axis=1)
    return (codes[:, 0] == 3) & (lead.min(axis=1) >= 0)


def is_good_permutation(pi_h: Permutation | list, layer_of: Mapping) -> bool:
    order = pi_h.order if isinstance(pi_h, Permutation) else np.asarray(pi_h)
    codes = _codes(order, layer_of)
    counts = Counter(codes.tolist())
    n = counts.get(1, 0)
    if n < 1 or counts.get(2, 0) != 2 * n or counts.get(3, 0) != n or len(codes) != 4 * n:
        raise InputError(f"layer sizes must be (n, 2n, n); got {dict(counts)}")
    return bool(_good_rows(codes[None, :])[0])


def layer_labels(n: int) -> np.ndarray:
    """Layer codes for vertex ids 0..4n-1: V first, then V2, then V3."""
    return np.concatenate([np.full(n, 1), np.full(2 * n, 2), np.full(n, 3)]).astype(np.int8)


def exhaustive_good_rate(n: int) -> float:
    """Exact fraction of good permutations by enumerating all (4n)! orders."""
    if 4 * n > 10:
        raise InputError("exhaustive enumeration limited to n <= 2")
    labels = layer_labels(n)
    rows = np.array(list(permutations(range(4 * n))), dtype=np.int64)
    return float(_good_rows(labels[rows]).mean())


def _batches(trials, size=10_000):
    while trials > 0:
        yield min(size, trials)
        trials -= size


def good_permutation_rate(n: int, trials: int, seed) -> float:
    """Monte-Carlo fraction of uniform permutations of 4n elements that are good."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    rng = make_rng(seed)
    labels = layer_labels(n)
    good = 0
    for m in _batches(trials):
        rows = rng.permuted(np.tile(np.arange(4 * n), (m, 1)), axis=1)
        good += int(_good_rows(labels[rows]).sum())
    return good / trials


def good_restriction_first_counts(n: int, trials: int, seed) -> tuple[np.ndarray, int]:
    """Which V vertex comes first in pi_H[V], counted over good samples only.

    Returns (counts per V vertex, number of good samples). Uniformity of the
    restricted permutation implies these counts are uniform.
    """
    rng = make_rng(seed)
    labels = layer_labels(n)
    counts = np.zeros(n, dtype=np.int64)
    total = 0
    for m in _batches(trials):
        rows = rng.permuted(np.tile(np.arange(4 * n), (m, 1)), axis=1)
        codes = labels[rows]
        good = rows[_good_rows(codes)]
        if len(good) == 0:
            continue
        in_v = good < n
        first = good[np.arange(len(good)), in_v.argmax(axis=1)]
        counts += np.bincount(first, minlength=n)
        total += len(good)
    return counts, total
