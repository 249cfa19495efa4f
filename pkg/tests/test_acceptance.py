"""Acceptance criteria, one test each; every test prints one PASS/FAIL line.

Seeds and tolerances are pinned below. Exact comparisons use Fractions in
the working units of the preprocessed instance.
"""

import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from conftest import complete_graph, edgeless_graph, record
from sublinear_sf.bench import fit_scaling_exponent, mean_queries_by_n, run_mis_bench
from sublinear_sf.certify import (
    build_certificate,
    exact_opt_sf,
    full_preprocess,
    level_mis_sizes,
    verify_certificate,
)
from sublinear_sf.core import derive_seed, random_permutation
from sublinear_sf.gen import gen_gnp, gen_i1, gen_i2, gen_random_euclid, line_opt
from sublinear_sf.mis import (
    abstract_oracle_reference,
    alg_add_mul,
    alg_mul,
    exhaustive_good_rate,
    good_permutation_rate,
    good_restriction_first_counts,
    mis_vertex_oracle,
    rgmis_exact,
    sample_call_stats,
)
from sublinear_sf.steiner import estimate_sf

SEED = 2024
TRIAL_PASS_RATE = 0.95
SE_MULT = 3.0
LINEAR_SLOPE_MAX = 1.15
EXPONENT_WINDOW = (1.0, 1.65)
C_MIS = Fraction(101, 100)
TIGHT_SLOPE_MIN = 0.3
TIGHT_I2_MAX = 8.0
TIGHT_PERMS = 1000
CHI2_ALPHA = 0.01


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def corpus(size=100):
    """Random Euclidean instances with n <= 12 and k <= 4."""
    out = []
    for i in range(size):
        rng = np.random.default_rng(derive_seed(SEED, i))
        n = int(rng.integers(6, 13))
        k = int(rng.integers(1, min(4, n // 2) + 1))
        out.append(gen_random_euclid(n, k, 2, derive_seed(SEED, i, 1)))
    return out


CORPUS = corpus()


def test_01_oracle_equivalence():
    def run():
        bad = total = 0
        for g_i in range(200):
            rng = np.random.default_rng(derive_seed(SEED, 1, g_i))
            n = int(rng.integers(2, 11))
            g = gen_gnp(n, float(rng.random()), derive_seed(SEED, 1, g_i, 0))
            for t in range(100):
                pi = random_permutation(n, derive_seed(SEED, 1, g_i, t + 1))
                exact = rgmis_exact(g, pi)
                for v in range(n):
                    ans, st = mis_vertex_oracle(g, pi, v)
                    ref, rst = abstract_oracle_reference(g, pi, v)
                    total += 1
                    bad += not (ans == ref == (v in exact) and st.recursive_calls == rst.recursive_calls)
        return bad, total
    (bad, total), secs = timed(run)
    ok = bad == 0 and secs < 60
    record(1, ok, f"oracle equivalence: {total - bad}/{total} queries match (required 100%), {secs:.1f}s")
    assert ok


def test_02_yyi_bound():
    def run():
        rows = []
        for p in (0.1, 0.5, 0.9):
            g = gen_gnp(100, p, derive_seed(SEED, 2, int(p * 10)))
            _, calls, _ = sample_call_stats(g, 100_000, derive_seed(SEED, 2, int(p * 10), 1),
                                            which="abstract")
            se = calls.std(ddof=1) / np.sqrt(len(calls))
            rows.append((p, calls.mean(), 1 + g.m / g.n, se))
        return rows
    rows, secs = timed(run)
    ok = all(mean <= bound + SE_MULT * se for _, mean, bound, se in rows) and secs < 120
    detail = "; ".join(f"p={p}: {mean:.3f} <= {bound:.2f}+3SE" for p, mean, bound, se in rows)
    record(2, ok, f"mean recursive calls within 1+|M|/|V|: {detail}, {secs:.1f}s")
    assert ok


def test_03_linear_oracle_cost():
    sizes = [100, 200, 400, 800, 1600, 3200]

    def run():
        means = []
        for n in sizes:
            g = gen_gnp(n, 0.5, derive_seed(SEED, 3, n))
            _, _, probes = sample_call_stats(g, 1000, derive_seed(SEED, 3, n, 1), which="matrix")
            means.append(float(probes.mean()))
        return means
    means, secs = timed(run)
    slope = fit_scaling_exponent(list(zip(sizes, means)))
    ok = slope <= LINEAR_SLOPE_MAX and secs < 600
    record(3, ok, f"oracle matrix-query slope {slope:.3f} (required <= {LINEAR_SLOPE_MAX}), {secs:.1f}s")
    assert ok


def test_04_add_mul_sandwich():
    n, s, eps, trials = 500, 22, 0.3, 200

    def run():
        g = gen_gnp(n, 0.3, derive_seed(SEED, 4))
        good = 0
        for t in range(trials):
            pi = random_permutation(n, derive_seed(SEED, 4, t))
            exact = len(rgmis_exact(g, pi))
            v = alg_add_mul(g, pi, s, eps, derive_seed(SEED, 4, t, 1)).value
            good += exact <= v <= (1 + eps) * exact + eps * n / s
        return good
    good, secs = timed(run)
    ok = good >= TRIAL_PASS_RATE * trials and secs < 300
    record(4, ok, f"AlgAddMul sandwich on G(500,0.3): {good}/{trials} trials (required >= 95%), {secs:.1f}s")
    assert ok


def test_05_alg_mul_multiplicative():
    eps, trials = 0.2, 100

    def run():
        rates, extremes = {}, True
        for n in (500, 1000, 2000):
            good = 0
            for t in range(trials):
                g = gen_gnp(n, 0.5, derive_seed(SEED, 5, n, t))
                est = alg_mul(g, n, eps, derive_seed(SEED, 5, n, t, 1))
                exact = len(rgmis_exact(g, est.permutation))
                good += exact <= est.value <= (1 + eps) * exact
                extremes &= alg_mul(complete_graph(n), n, eps, t).value == 1
                if t < 20:
                    v = alg_mul(edgeless_graph(n), n, eps, t).value
                    extremes &= n <= v <= (1 + eps) * n
            rates[n] = good
        return rates, extremes
    (rates, extremes), secs = timed(run)
    ok = all(g >= TRIAL_PASS_RATE * trials for g in rates.values()) and extremes and secs < 900
    detail = ", ".join(f"n={n}: {g}/{trials}" for n, g in rates.items())
    record(5, ok, f"AlgMul within [M, 1.2M]: {detail}; complete=1 and edgeless in [n,1.2n]: "
                  f"{extremes}, {secs:.1f}s")
    assert ok


def test_06_alg_mul_query_scaling():
    sizes = [400, 800, 1600, 3200, 6400]
    rows, secs = timed(lambda: run_mis_bench(sizes, 0.5, 0.2, 20, derive_seed(SEED, 6)))
    pts = mean_queries_by_n(rows)
    expo = fit_scaling_exponent(pts)
    top = dict(pts)[6400]
    lo, hi = EXPONENT_WINDOW
    ok = lo <= expo <= hi and top < 6400 ** 2 / 4 and secs < 1800
    record(6, ok, f"AlgMul query exponent {expo:.3f} (window [{lo}, {hi}]), mean queries at "
                  f"n=6400 {top:.0f} < {6400 ** 2 // 4}, {secs:.1f}s")
    assert ok


def level_sums(inst, pre, pi):
    sizes = level_mis_sizes(inst, pi, pre=pre)
    return max(t * m for t, m in sizes), sum(t * m for t, m in sizes)


def test_07_steiner_sandwich_exact():
    def run():
        good = 0
        for i, inst in enumerate(CORPUS):
            pre = full_preprocess(inst)
            lower, total = level_sums(inst, pre, random_permutation(inst.n, derive_seed(SEED, 7, i)))
            opt = Fraction(exact_opt_sf(inst, pre.kept_pairs)) * pre.scale
            good += lower <= opt <= 6 * total
        return good
    good, secs = timed(run)
    ok = good == len(CORPUS) and secs < 300
    record(7, ok, f"max M_i tau_i <= OPT <= 6 sum M_i tau_i: {good}/{len(CORPUS)} instances "
                  f"(required 100%), {secs:.1f}s")
    assert ok


def test_08_certificates():
    def run():
        good = literal = 0
        for i, inst in enumerate(CORPUS):
            pi = random_permutation(inst.n, derive_seed(SEED, 7, i))
            good += verify_certificate(inst, build_certificate(inst, pi=pi))["passed"]
            literal += verify_certificate(inst, build_certificate(inst, pi=pi, base="empty"))["passed"]
        return good, literal
    (good, literal), secs = timed(run)
    ok = good == len(CORPUS) and secs < 300
    record(8, ok, f"certificates verified: {good}/{len(CORPUS)} (required 100%); with F_0 empty "
                  f"{literal}/{len(CORPUS)} (information only), {secs:.1f}s")
    assert ok


def test_09_end_to_end():
    def run():
        good = 0
        for i, inst in enumerate(CORPUS):
            rep = estimate_sf(inst, 0.01, derive_seed(SEED, 9, i))
            pre = rep.preprocessed
            opt = Fraction(exact_opt_sf(inst, pre.kept_pairs)) * pre.scale
            sol = Fraction(rep.sol_scaled)
            good += opt <= 6 * sol and sol <= C_MIS * (rep.L + 1) * opt
        return good
    good, secs = timed(run)
    ok = good >= TRIAL_PASS_RATE * len(CORPUS) and secs < 600
    record(9, ok, f"OPT <= 6 SOL and SOL <= 1.01 (L+1) OPT: {good}/{len(CORPUS)} runs "
                  f"(required >= 95%), {secs:.1f}s")
    assert ok


def raw_ratios(inst, L):
    opt = line_opt(inst)
    out = []
    for t in range(TIGHT_PERMS):
        sizes = level_mis_sizes(inst, random_permutation(inst.n, derive_seed(SEED, 10, L, t)),
                                raw_units=True)
        out.append(sum(tau * m for tau, m in sizes) / opt)
    return np.array(out)


def test_10_tightness():
    Ls = [3, 4, 5, 6]

    def run():
        i1 = [raw_ratios(gen_i1(L), L).mean() for L in Ls]
        i2 = [raw_ratios(gen_i2(L, 10 * (2 ** L - 1)), L).max() for L in Ls]
        return i1, i2
    (i1, i2), secs = timed(run)
    slope = float(np.polyfit(Ls, i1, 1)[0])
    increasing = all(b > a for a, b in zip(i1, i1[1:]))
    ok = increasing and slope >= TIGHT_SLOPE_MIN and max(i2) <= TIGHT_I2_MAX and secs < 120
    record(10, ok, f"I1 mean ratios {[round(float(x), 3) for x in i1]} increasing={increasing}, slope "
                   f"{slope:.3f} (required >= {TIGHT_SLOPE_MIN}); I2 max ratio {max(i2):.3f} "
                   f"(required <= {TIGHT_I2_MAX}), {secs:.1f}s")
    assert ok


def test_11_good_permutations():
    def run():
        exact = exhaustive_good_rate(1)
        trials = 100_000
        rate = good_permutation_rate(50, trials, derive_seed(SEED, 11))
        sigma = np.sqrt(rate * (1 - rate) / trials)
        counts, total = good_restriction_first_counts(50, trials, derive_seed(SEED, 11, 1))
        pval = chisquare(counts).pvalue
        return exact, rate, sigma, pval, total
    (exact, rate, sigma, pval, total), secs = timed(run)
    ok = exact >= 1 / 12 and rate >= 1 / 12 - 3 * sigma and pval > CHI2_ALPHA and secs < 60
    record(11, ok, f"good-permutation rate n=1 exact {exact:.4f}, n=50 {rate:.4f} (required >= "
                   f"1/12 - 3 sigma); restriction chi-square p={pval:.3f} over {total} good samples "
                   f"(required > {CHI2_ALPHA}), {secs:.1f}s")
    assert ok
