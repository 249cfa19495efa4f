"""Benchmark harness: seeded trial tables, CSV/JSON-lines output, scaling fits."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

import numpy as np

from .certify import OPT_MAX_K, OPT_MAX_N, exact_opt_sf, level_decomposition
from .core import InputError, MetricInstance, Permutation, derive_seed
from .gen import GenSpec, gen_gnp, line_opt
from .mis import alg_mul, rgmis_exact
from .steiner import estimate_sf

EXACT_MIS_LIMIT = 2000


@dataclass
class BenchRow:
    n: int
    k_or_p: float
    epsilon: float
    seed: int
    trial: int
    estimate: float
    exact_reference: float | None
    queries: int
    wall_time_ms: float
    opt: float | None = None
    detail: str = ""


COLUMNS = [f.name for f in fields(BenchRow)]


def _map(fn, jobs, workers):
    """Apply ``fn`` to ``jobs`` in order; a pool is used only when workers > 1."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _mis_trial(job) -> BenchRow:
    n, p, epsilon, seed, trial, cache = job
    adj = gen_gnp(n, p, derive_seed(seed, n, trial, 0))
    t0 = time.perf_counter()
    est = alg_mul(adj, n, epsilon, derive_seed(seed, n, trial, 1), cache=cache)
    wall = (time.perf_counter() - t0) * 1000
    exact = None
    if n <= EXACT_MIS_LIMIT:
        exact = float(len(rgmis_exact(adj, est.permutation)))
    return BenchRow(n, p, epsilon, seed, trial, est.value, exact, adj.queries, wall,
                    detail="exact" if est.exact else "sampled")


def run_mis_bench(sizes, p: float, epsilon: float, trials: int, seed: int,
                  workers: int = 1, cache: bool = False) -> list[BenchRow]:
    """One row per (n, trial); the exact |RGMIS(pi)| is attached for n <= 2000."""
    sizes = list(sizes)
    if not sizes:
        raise InputError("sizes must be nonempty")
    if trials < 1:
        raise InputError("trials must be >= 1")
    jobs = [(int(n), float(p), float(epsilon), int(seed), t, cache) for n in sizes for t in range(trials)]
    return _map(_mis_trial, jobs, workers)


def _as_instance(item) -> tuple[MetricInstance, str]:
    if isinstance(item, MetricInstance):
        return item, "instance"
    if isinstance(item, GenSpec):
        return item.build(), item.kind
    from .io import read_instance
    return read_instance(item), str(item)


def reference_opt(instance: MetricInstance, pairs=None) -> float | None:
    """Analytic OPT on lines, exact OPT on small instances, otherwise None."""
    if instance.kind == "line" and pairs is None:
        return line_opt(instance)
    pairs = instance.pairs if pairs is None else pairs
    if instance.n <= OPT_MAX_N and len(pairs) <= OPT_MAX_K:
        return exact_opt_sf(instance, pairs)
    return None


def exact_sum_for_report(instance: MetricInstance, report) -> Fraction:
    """sum_i tau_i |RGMIS_i| under the permutations the estimator drew."""
    pre = report.preprocessed
    total = Fraction(0)
    for lv in report.levels:
        if not lv.active_count:
            continue
        dc = level_decomposition(instance.dist, pre.kept_pairs, lv.tau, 2 * lv.tau,
                                 Permutation(lv.order), pre.scale, lv.i)
        total += lv.tau * dc.M
    return total


def _sf_trial(job) -> BenchRow:
    instance, label, epsilon, seed, trial, cache = job
    t0 = time.perf_counter()
    rep = estimate_sf(instance, epsilon, derive_seed(seed, trial), cache=cache)
    wall = (time.perf_counter() - t0) * 1000
    exact = float(exact_sum_for_report(instance, rep))
    opt = reference_opt(instance)
    opt_scaled = None if opt is None else float(Fraction(opt) * rep.scale)
    detail = json.dumps({"source": label, "scale": float(rep.scale), "sol_original": rep.sol_original,
                         "opt_scaled": opt_scaled, "levels": [lv.row() for lv in rep.levels]},
                        sort_keys=True)
    return BenchRow(instance.n, instance.k, epsilon, seed, trial, rep.sol_scaled, exact,
                    rep.total_queries, wall, opt, detail)


def run_sf_bench(items, epsilon: float, trials: int, seed: int, workers: int = 1,
                 cache: bool = False) -> list[BenchRow]:
    """Rows for each instance (object, GenSpec or file path) and trial.

    ``estimate`` and ``exact_reference`` are in scaled units; ``opt`` is in the
    instance's own units (analytic on lines, exact when small).
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    jobs = []
    for item in items:
        inst, label = _as_instance(item)
        jobs += [(inst, label, float(epsilon), int(seed), t, cache) for t in range(trials)]
    return _map(_sf_trial, jobs, workers)


def mean_queries_by_n(rows) -> list[tuple[int, float]]:
    by: dict[int, list[int]] = {}
    for r in rows:
        by.setdefault(r.n, []).append(r.queries)
    return [(n, float(np.mean(q))) for n, q in sorted(by.items())]


def fit_scaling_exponent(points) -> float:
    """Least-squares slope of log(queries) against log(n).

    Repeated n values are averaged first; at least three distinct n are needed.
    """
    by: dict[float, list[float]] = {}
    for n, q in points:
        if n <= 0 or q <= 0:
            raise InputError("points must be positive")
        by.setdefault(float(n), []).append(float(q))
    if len(by) < 3:
        raise InputError(f"need at least 3 distinct n values, got {len(by)}")
    xs = np.log(sorted(by))
    ys = np.log([np.mean(by[n]) for n in sorted(by)])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def rows_to_csv(rows, wall_time: bool = True) -> str:
    cols = COLUMNS if wall_time else [c for c in COLUMNS if c != "wall_time_ms"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        d = asdict(r)
        w.writerow([_cell(d[c]) for c in cols])
    return buf.getvalue()


def rows_to_jsonl(rows, wall_time: bool = True) -> str:
    out = []
    for r in rows:
        d = asdict(r)
        if not wall_time:
            d.pop("wall_time_ms")
        out.append(json.dumps(d, sort_keys=True))
    return "".join(line + "\n" for line in out)


def format_rows(rows, fmt: str = "csv", wall_time: bool = True) -> str:
    if fmt == "csv":
        return rows_to_csv(rows, wall_time)
    if fmt == "json":
        return rows_to_jsonl(rows, wall_time)
    raise InputError(f"unknown format {fmt!r}")


def read_rows(text: str) -> list[BenchRow]:
    """Parse CSV or JSON-lines rows written by :func:`format_rows`."""
    text = text.strip()
    if not text:
        return []
    if text.startswith("{"):
        recs = [json.loads(line) for line in text.splitlines() if line.strip()]
    else:
        recs = list(csv.DictReader(io.StringIO(text)))
    out = []
    for rec in recs:
        def get(name, conv, default=None):
            v = rec.get(name, default)
            return default if v in ("", None) else conv(v)
        out.append(BenchRow(get("n", int), get("k_or_p", float), get("epsilon", float),
                            get("seed", int, 0), get("trial", int, 0), get("estimate", float),
                            get("exact_reference", float), get("queries", int),
                            get("wall_time_ms", float, 0.0), get("opt", float),
                            rec.get("detail") or ""))
    return out


def gnuplot_data(points) -> str:
    """Two-column "n value" data for plotting."""
    return "".join(f"{n} {q!r}\n" for n, q in points)


def log_ratio(estimate: float, exact: float | None) -> float | None:
    if exact in (None, 0) or estimate <= 0:
        return None
    return math.log(estimate / exact)
