"""Compare the compiled and pure-Python MIS kernels on G(n, 1/2).

Both backends answer the same seeded samples, so the hit counts and query
counts must agree exactly; only wall time differs.

    python3 benchmarks/bench_backends.py --sizes 100,200,400 --samples 2000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sublinear_sf.core import make_rng, random_permutation
from sublinear_sf.gen import gnp_matrix
from sublinear_sf.mis import _backend


def run(backend: str, adj, order, rank, picks, prefix_budget):
    prev = _backend.set_backend(backend)
    try:
        kern = _backend.kernels()
        t0 = time.perf_counter()
        hits, calls, probes = kern.sample_oracle(adj, order, rank, picks, None)
        t_sample = time.perf_counter() - t0
        active = np.ones(adj.shape[0], dtype=np.uint8)
        t0 = time.perf_counter()
        _, gp, _ = kern.greedy_prefix(adj, order, active, prefix_budget)
        t_prefix = time.perf_counter() - t0
    finally:
        _backend.set_backend(prev)
    return {"hits": int(hits), "calls": int(calls), "probes": int(probes) + int(gp),
            "sample_ms": t_sample * 1e3, "prefix_ms": t_prefix * 1e3}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100,200,400,800")
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    backends = _backend.available()
    print(f"backends available: {', '.join(backends)}")
    print(f"{'n':>6} {'backend':>8} {'probes':>10} {'sample ms':>10} {'prefix ms':>10} {'speedup':>8}")
    for n in [int(x) for x in args.sizes.split(",")]:
        adj = gnp_matrix(n, args.p, args.seed)
        pi = random_permutation(n, args.seed + 1)
        rank = pi.rank_array(n)
        picks = np.ascontiguousarray(pi.order[make_rng(args.seed + 2).integers(0, n, args.samples)])
        budget = int(np.ceil(np.sqrt(n)))
        res = {b: run(b, adj, pi.order, rank, picks, budget) for b in backends}
        if len(res) == 2:
            a, b = res["cython"], res["python"]
            assert (a["hits"], a["calls"], a["probes"]) == (b["hits"], b["calls"], b["probes"])
        base = res.get("python")
        for b, r in res.items():
            speed = (base["sample_ms"] + base["prefix_ms"]) / max(r["sample_ms"] + r["prefix_ms"], 1e-9) if base else float("nan")
            print(f"{n:>6} {b:>8} {r['probes']:>10} {r['sample_ms']:>10.2f} {r['prefix_ms']:>10.2f} {speed:>8.1f}")


if __name__ == "__main__":
    main()
