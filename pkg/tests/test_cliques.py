"""Clique solvers against brute force, plus greedy and budget behavior."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numba import njit

from graphon_lab.cliques import (
    CliqueResult,
    SolveBudget,
    default_threshold,
    degree_greedy_clique,
    exact_max_clique,
    induced_subgraph,
    threshold_greedy_clique,
    verify_clique,
)
from graphon_lab.errors import PreconditionError, UnsupportedSpecError
from graphon_lab.graphons import (
    constant,
    flat_exp,
    line,
    poly_family,
    restrict,
    Interval,
    sqrt_family,
)
from graphon_lab.sampling import (
    SampleConfig,
    dense_adjacency,
    graph_from_dense,
    sample,
    sample_below_threshold,
)


@njit(cache=True)
def _brute_force_omega(nb):
    """Max clique size by subset DP over all 2^n vertex subsets."""
    n = nb.shape[0]
    full = np.int64(1) << np.int64(n)
    is_clique = np.zeros(full, dtype=np.bool_)
    is_clique[0] = True
    best = 0
    for s in range(1, full):
        v = 0
        while (s >> v) & 1 == 0:
            v += 1
        rest = s & ~(np.int64(1) << np.int64(v))
        if is_clique[rest] and (rest & ~nb[v]) == 0:
            is_clique[s] = True
            size = 0
            t = s
            while t:
                t &= t - 1
                size += 1
            if size > best:
                best = size
    return best


def brute_force_omega(graph):
    d = dense_adjacency(graph)
    nb = np.zeros(graph.n, dtype=np.int64)
    for v in range(graph.n):
        nb[v] = int(sum(1 << u for u in np.flatnonzero(d[v])))
    return int(_brute_force_omega(nb))


def complete(n):
    d = np.ones((n, n), dtype=bool)
    np.fill_diagonal(d, False)
    return graph_from_dense(d)


def test_exact_on_complete_graph():
    res = exact_max_clique(complete(5))
    assert res.size == 5 and res.status == "optimal"
    assert res.vertices == (0, 1, 2, 3, 4)


def test_exact_on_path():
    d = np.zeros((3, 3), dtype=bool)
    d[0, 1] = d[1, 0] = d[1, 2] = d[2, 1] = True
    res = exact_max_clique(graph_from_dense(d))
    assert res.size == 2 and res.status == "optimal"


def test_exact_on_empty_and_trivial_graphs():
    assert exact_max_clique(graph_from_dense(np.zeros((0, 0), bool))).size == 0
    assert exact_max_clique(graph_from_dense(np.zeros((1, 1), bool))).size == 1
    assert exact_max_clique(graph_from_dense(np.zeros((3, 3), bool))).size == 1


def test_exact_matches_brute_force_er20():
    g = sample(SampleConfig(constant(0.5), 20, seed=123))
    assert exact_max_clique(g).size == brute_force_omega(g)


def test_brute_force_oracle_agrees_with_networkx():
    # defense in depth: the DP oracle itself is checked once against an
    # unrelated implementation
    import networkx as nx

    g = sample(SampleConfig(constant(0.5), 16, seed=7))
    nxg = nx.from_numpy_array(dense_adjacency(g))
    assert brute_force_omega(g) == max(len(c) for c in nx.find_cliques(nxg))


@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=14),
       st.sampled_from([0.2, 0.5, 0.8]))
@settings(max_examples=60, deadline=None)
def test_exact_matches_brute_force_property(seed, n, p):
    g = sample(SampleConfig(constant(p), n, seed=seed))
    res = exact_max_clique(g)
    assert res.size == brute_force_omega(g)
    assert verify_clique(g, res.vertices)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_exact_invariant_under_vertex_relabeling(seed):
    rng = np.random.default_rng(seed)
    d = rng.random((18, 18)) < 0.6
    d = np.triu(d, 1)
    d = d | d.T
    base = graph_from_dense(d)
    perm = rng.permutation(18)
    shuffled = graph_from_dense(d[np.ix_(perm, perm)])
    assert exact_max_clique(base).size == exact_max_clique(shuffled).size


def test_verify_clique_cases():
    g5 = complete(5)
    assert verify_clique(g5, (0, 1, 2, 3, 4))
    assert verify_clique(g5, (2,))
    assert verify_clique(g5, ())
    empty = graph_from_dense(np.zeros((2, 2), bool))
    assert not verify_clique(empty, (0, 1))


def test_exact_result_is_deterministic():
    g = sample(SampleConfig(sqrt_family(1.0), 120, seed=77))
    a = exact_max_clique(g)
    b = exact_max_clique(g)
    assert a.vertices == b.vertices and a.size == b.size


def test_budget_abort_returns_verified_incumbent():
    g = sample(SampleConfig(line(), 256, seed=5))
    res = exact_max_clique(g, SolveBudget(max_nodes=10, max_millis=0))
    assert res.status == "budget_exceeded"
    assert res.size >= 2
    assert verify_clique(g, res.vertices)
    full = exact_max_clique(g, SolveBudget(max_nodes=0, max_millis=300_000))
    assert full.status == "optimal"
    assert full.size >= res.size


def test_degree_greedy_is_a_lower_bound():
    assert degree_greedy_clique(complete(5)).size == 5
    assert degree_greedy_clique(graph_from_dense(np.zeros((3, 3), bool))).size == 1
    for seed in range(10):
        g = sample(SampleConfig(constant(0.5), 100, seed=seed))
        lo = degree_greedy_clique(g)
        assert lo.size <= exact_max_clique(g).size
        assert verify_clique(g, lo.vertices)


def test_threshold_greedy_keeps_clique_window():
    # all of S mutually adjacent: nothing is deleted
    g = complete(8)
    res = threshold_greedy_clique(g, 0.5, 1.0)
    assert res.size == 8 and res.stats["deleted"] == 0


def test_threshold_greedy_single_repair():
    # 4 vertices, one missing edge: exactly one deletion
    d = np.ones((4, 4), bool)
    np.fill_diagonal(d, False)
    d[0, 3] = d[3, 0] = False
    res = threshold_greedy_clique(graph_from_dense(d), 0.5, 1.0)
    assert res.size == 3
    assert res.stats["missing_edges"] == 1 and res.stats["deleted"] == 1


def test_threshold_greedy_lower_bounds_window_minus_misses():
    for seed in range(5):
        g = sample(SampleConfig(sqrt_family(1.0), 400, seed=seed))
        c, t = default_threshold(sqrt_family(1.0), 400)
        res = threshold_greedy_clique(g, c, t)
        assert res.size >= res.stats["window_size"] - res.stats["missing_edges"]
        assert verify_clique(g, res.vertices)


def test_threshold_greedy_on_window_sample_needs_no_arguments():
    cfg = SampleConfig(sqrt_family(1.0), 10**6, seed=0)
    c, t = default_threshold(sqrt_family(1.0), 10**6)
    g = sample_below_threshold(cfg, c, t)
    res = threshold_greedy_clique(g)
    assert res.size > 0
    full = sample(SampleConfig(sqrt_family(1.0), 100, seed=0))
    with pytest.raises(PreconditionError):
        threshold_greedy_clique(full)


def test_threshold_greedy_empty_window_warns():
    g = sample(SampleConfig(constant(0.5), 50, seed=1))
    res = threshold_greedy_clique(g, 2.0, 1e-9)
    assert res.size == 0 and res.warning is not None


def test_window_construction_beats_sqrt_lower_bound():
    # kernel (1-x)(1-y), center 0, threshold (3e)^{-1/2} n^{-1/2}: the
    # repaired window clique reaches (12e)^{-1/2} sqrt(n) almost always
    n = 10**6
    target = math.sqrt(n / (12.0 * math.e))
    c, t = default_threshold(sqrt_family(1.0), n)
    hits = 0
    for seed in range(100):
        g = sample_below_threshold(SampleConfig(sqrt_family(1.0), n, seed=seed), c, t)
        hits += threshold_greedy_clique(g).size >= target
    assert hits >= 95


def test_default_threshold_values():
    c, t = default_threshold(sqrt_family(1.0), 10**6)
    assert c == 0.0 and t == pytest.approx((3 * math.e) ** -0.5 * 1e-3, rel=1e-12)
    c, t = default_threshold(poly_family(2.0), 10**6)
    assert c == 0.0 and t == pytest.approx(math.exp(-2.0 / 3.0) * 1e-2, rel=1e-12)
    c, t = default_threshold(line(), 10**4)
    assert c == 0.5 and t == pytest.approx(math.log(10**4) / 100.0, rel=1e-12)
    assert t == pytest.approx(0.0921, abs=5e-5)
    c, t = default_threshold(flat_exp(), 4096)
    assert c == 0.0 and t == pytest.approx(1.0 / math.sqrt(math.log(4096)), rel=1e-12)
    with pytest.raises(UnsupportedSpecError):
        default_threshold(restrict(line(), Interval(0.0, 0.5)), 100)


def test_induced_subgraph_of_clique_is_complete():
    g = sample(SampleConfig(constant(0.7), 60, seed=3))
    res = exact_max_clique(g)
    sub = induced_subgraph(g, res.vertices)
    assert sub.n == res.size
    assert sub.edges == res.size * (res.size - 1) // 2
