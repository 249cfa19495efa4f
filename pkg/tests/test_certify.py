import math
from fractions import Fraction

import numpy as np
import pytest

from sublinear_sf.certify import (
    CertificationError,
    LevelDecomposition,
    UnionFind,
    build_certificate,
    build_connectivity_forest,
    build_target_links,
    decompositions,
    exact_level_mis_sum,
    exact_opt_sf,
    full_preprocess,
    level_decomposition,
    level_mis_sizes,
    opt_by_enumeration,
    verify_certificate,
)
from sublinear_sf.core import InputError, Permutation, from_line, from_matrix, random_permutation
from sublinear_sf.gen import gen_i1, gen_i2, gen_random_euclid, line_opt


def test_union_find():
    uf = UnionFind(range(4))
    assert uf.union(0, 1) and uf.union(2, 3) and not uf.union(1, 0)
    assert uf.find(1) == uf.find(0) != uf.find(2)


def test_opt_single_pair():
    assert exact_opt_sf(from_line([0, 3.5], [(0, 1)])) == 3.5


def test_opt_two_segments_beat_merged_tree():
    inst = from_line([0, 4, 6, 10, 5], [(0, 1), (2, 3)])
    assert exact_opt_sf(inst) == pytest.approx(8)
    assert opt_by_enumeration(inst) == pytest.approx(8)


def test_opt_merged_tree_wins_with_steiner_point():
    # three pairs meeting at a hub: the shared star costs 6, direct pairs 3 * 2 * sqrt(3)
    pts = [(0, 2), (math.sqrt(3), -1), (-math.sqrt(3), -1), (0, 0)]
    d = np.array([[math.dist(a, b) for b in pts] for a in pts])
    inst = from_matrix(d, [(0, 1)])
    assert exact_opt_sf(inst) == pytest.approx(d[0, 1])


def test_opt_size_limits():
    with pytest.raises(InputError, match="n <= 14"):
        exact_opt_sf(gen_random_euclid(16, 2, 2, 0))
    with pytest.raises(InputError):
        exact_opt_sf(gen_random_euclid(14, 6, 2, 0))
    with pytest.raises(InputError):
        opt_by_enumeration(gen_random_euclid(9, 2, 2, 0))


@pytest.mark.parametrize("seed", range(50))
def test_opt_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    k = int(rng.integers(1, n // 2 + 1))
    inst = gen_random_euclid(n, k, int(rng.integers(1, 3)), seed)
    a, b = exact_opt_sf(inst), opt_by_enumeration(inst)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)
    assert a <= sum(inst.dist[s, t] for s, t in inst.pairs) + 1e-12


def far_pairs(positions, far=1000.0):
    """Terminals at ``positions`` whose partners sit far to the right."""
    n = len(positions)
    pos = list(positions) + [far + 10 * i for i in range(n)]
    return from_line(pos, [(i, n + i) for i in range(n)])


def test_decomposition_no_active():
    inst = from_line([0, 1], [(0, 1)])
    dc = level_decomposition(inst.dist, inst.pairs, 4, 8, Permutation([0, 1]))
    assert dc.U == [] and dc.clusters == {} and dc.targets == []


def test_decomposition_edgeless_singletons():
    inst = far_pairs([0, 10, 20])
    dc = level_decomposition(inst.dist, inst.pairs, 2, 4, random_permutation(inst.n, 1))
    assert all(len(c) == 1 for c in dc.clusters.values())
    assert all(dc.center_of[v] == v for v in dc.active)


def test_decomposition_hand_trace():
    inst = far_pairs([0, 3])
    u, v = 0, 1
    order = [u, v] + [x for x in range(inst.n) if x not in (u, v)]
    dc = level_decomposition(inst.dist, inst.pairs, 2, 4, Permutation(order))
    assert u in dc.U and v not in dc.U
    assert dc.center_of[v] == u and sorted(dc.clusters[u]) == [u, v]
    assert inst.dist[u, v] == 3 < 4


@pytest.mark.parametrize("seed", range(10))
def test_decomposition_invariants(seed):
    inst = gen_random_euclid(12, 4, 2, seed)
    pre = full_preprocess(inst)
    for dc in decompositions(inst, pre, random_permutation(inst.n, seed)):
        limit = float(Fraction(2 * dc.tau) / pre.scale)
        assert sorted(v for c in dc.clusters.values() for v in c) == sorted(dc.active)
        assert all(inst.dist[v, dc.center_of[v]] < limit for v in dc.active)
        for t in dc.targets:
            assert t in dc.clusters[dc.center_of[t]]


def test_forest_all_singletons_is_empty():
    inst = far_pairs([0, 100, 200])
    pi = random_permutation(inst.n, 0)
    decs = [level_decomposition(inst.dist, inst.pairs, t, 2 * t, pi, 1, i)
            for i, t in enumerate([1, 2, 4])]
    assert build_connectivity_forest(decs, inst.dist) == [[], [], []]


def test_forest_one_supernode_per_level():
    # pairs 0-1 and 2-3; vertex 2 sits within 2 tau = 4 of every terminal
    inst = from_line([0, 3.9, 2, 5.9], [(0, 1), (2, 3)])
    pi = Permutation([2, 0, 1, 3])
    decs = [level_decomposition(inst.dist, inst.pairs, t, 2 * t, pi, 1, i)
            for i, t in enumerate([2, 4])]
    assert [d.M for d in decs] == [1, 0]
    assert build_connectivity_forest(decs, inst.dist, base="empty") == [[], []]


def test_forest_rejects_inconsistent_levels():
    inst = far_pairs([0, 10])
    pi = random_permutation(inst.n, 0)
    a = level_decomposition(inst.dist, inst.pairs, 1, 2, pi, 1, 0)
    b = level_decomposition(inst.dist, inst.pairs, 4, 8, pi, 1, 2)
    with pytest.raises(InputError):
        build_connectivity_forest([a, b], inst.dist)
    with pytest.raises(InputError):
        build_connectivity_forest([a], inst.dist, base="star")


def test_i1_forest_connects_clusters():
    inst = gen_i1(4)
    pre = full_preprocess(inst)
    decs = decompositions(inst, pre, random_permutation(inst.n, 3))
    F = build_connectivity_forest(decs, inst.dist)
    uf = UnionFind()
    for e in (e for g in F for e in g):
        uf.union(*e)
    for dc in decs:
        for members in dc.clusters.values():
            assert len({uf.find(v) for v in members}) == 1
    cost = Fraction(sum(inst.dist[a, b] for g in F for a, b in g)) * pre.scale
    assert cost <= 4 * sum(dc.M * dc.tau for dc in decs)


def test_target_links_empty_targets():
    dc = LevelDecomposition(0, 1, [0, 1], [0], {0: 0, 1: 0}, {0: [0, 1]}, [])
    assert build_target_links(dc, [(0, 1)], np.zeros((2, 2)), [(0, 1)]) == []


def test_target_links_same_cluster_no_edge():
    d = np.array([[0, 1.0], [1.0, 0]])
    dc = LevelDecomposition(0, 1, [0, 1], [0], {0: 0, 1: 0}, {0: [0, 1]}, [0, 1])
    assert build_target_links(dc, [(0, 1)], d, [(0, 1)]) == []


def test_target_links_two_clusters_one_edge():
    # target pair s-t (3.5 < 2 tau) split between centres c1 and c2 (tau = 2)
    s_, t_, c1, c2 = 0, 1, 2, 3
    inst = from_line([0, 3.5, -3, 6.5, -1000, 1000], [(s_, t_), (c1, 4), (c2, 5)])
    pi = Permutation([c1, c2, s_, t_, 4, 5])
    dc = level_decomposition(inst.dist, inst.pairs, 2, 4, pi)
    assert dc.center_of[s_] == c1 and dc.center_of[t_] == c2 and s_ in dc.targets
    J = build_target_links(dc, [(c1, s_), (c2, t_)], inst.dist, inst.pairs)
    assert J == [(s_, t_)] and inst.dist[s_, t_] <= 4


def test_target_links_reports_unconnected_cluster():
    d = np.array([[0, 1.0], [1.0, 0]])
    dc = LevelDecomposition(0, 1, [0, 1], [0], {0: 0, 1: 0}, {0: [0, 1]}, [0, 1])
    with pytest.raises(CertificationError, match="not connected"):
        build_target_links(dc, [], d, [(0, 1)])


def test_verify_degenerate_instance_passes():
    inst = from_line([0, 0], [(0, 1)])
    rep = verify_certificate(inst, build_certificate(inst))
    assert rep["passed"] and rep["connected"] == {}


def test_verify_single_pair():
    inst = from_line([0, 5], [(0, 1)])
    rep = verify_certificate(inst, build_certificate(inst, seed=1))
    assert rep["passed"] and rep["total_cost"] <= 6 * 4


@pytest.mark.parametrize("seed", range(5))
def test_verify_detects_deleted_edge(seed):
    inst = gen_random_euclid(12, 4, 2, seed)
    cert = build_certificate(inst, seed=seed)
    assert verify_certificate(inst, cert)["passed"]
    for group in (*cert.F_levels, *cert.J_levels):
        if group:
            group.pop()
            break
    rep = verify_certificate(inst, cert)
    assert not rep["passed"] and not all(rep["connected"].values())


def test_literal_empty_base_can_fail():
    inst = from_line([0, 10, 0.5, 10.5], [(0, 1), (2, 3)])
    strict = verify_certificate(inst, build_certificate(inst, seed=0, base="empty"))
    assert not strict["passed"] and strict["problems"]
    assert verify_certificate(inst, build_certificate(inst, seed=0))["passed"]


def test_level_sum_examples():
    inst = from_line([0, 9], [(0, 1)])
    assert exact_level_mis_sum(inst, Permutation([1, 0])) == 4
    assert exact_level_mis_sum(from_line([0, 0], [(0, 1)]), Permutation([0, 1])) == 0


def test_level_sum_per_level_permutations():
    inst = gen_random_euclid(10, 3, 2, 1)
    pre = full_preprocess(inst)
    n_levels = len(level_mis_sizes(inst, random_permutation(inst.n, 0)))
    perms = [random_permutation(inst.n, i) for i in range(n_levels)]
    total = exact_level_mis_sum(inst, perms)
    assert total == sum(t * m for t, m in level_mis_sizes(inst, perms))


@pytest.mark.parametrize("L", [3, 4])
def test_i2_level_sum_within_constant_of_opt(L):
    inst = gen_i2(L, 10 * (2 ** L - 1))
    pi = random_permutation(inst.n, 0)
    total = exact_level_mis_sum(inst, pi, raw_units=True)
    opt = line_opt(inst)
    if inst.n <= 14 and inst.k <= 5:
        assert exact_opt_sf(inst) == pytest.approx(opt)
    assert opt <= 6 * total and total <= 8 * opt
