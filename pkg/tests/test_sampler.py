import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from posa.graph import Graph, edgelist_text, read_edgelist, write_edgelist
from posa.numeric import solve_lambda
from posa.numeric.special import AT_LEAST_3
from posa.sampler import (DegreeSequenceError, Pairing, TooManyRejections, project_and_check,
                          random_pairing, sample_degrees, sample_min3_graph, trial_rng)


def labelled_cubic_six():
    """Enumerate all labelled 3-regular graphs on 6 vertices, split by type."""
    pairs = list(itertools.combinations(range(6), 2))
    k33 = nx.complete_bipartite_graph(3, 3)
    out = {"k33": 0, "prism": 0}
    for sub in itertools.combinations(pairs, 9):
        g = nx.Graph(sub)
        if g.number_of_nodes() == 6 and all(d == 3 for _, d in g.degree()):
            out["k33" if nx.is_isomorphic(g, k33) else "prism"] += 1
    return out


# (3!)^4 pairings of four 3-point cells give K4, out of 11!! = 10395
K4_ACCEPT = 1296 / 10395


# -- graph container -----------------------------------------------------------

def test_graph_basics():
    g = Graph(4, [(2, 1), (0, 1), (3, 0)])
    assert g.edge_list() == [(0, 1), (0, 3), (1, 2)]
    assert g.degree(0) == 2 and g.min_degree == 1
    assert g.neighbors(0).tolist() == [1, 3]
    assert g.has_edge(1, 0) and not g.has_edge(2, 3)
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])


def test_named_graphs():
    assert Graph.complete(4).m == 6
    assert Graph.prism().m == 9 and set(Graph.prism().degrees) == {3}
    assert Graph.complete_bipartite(3, 3).m == 9
    assert Graph.cycle(5).min_degree == 2


def test_edgelist_round_trip(tmp_path):
    g = sample_min3_graph(30, 50, trial_rng(3, 30, 50))
    p = write_edgelist(g, tmp_path / "g.txt", seed=3)
    text = p.read_text()
    assert text.splitlines()[0] == "30 50 3"
    assert text == edgelist_text(g, 3)
    h, seed = read_edgelist(p)
    assert h == g and seed == 3


# -- degree sequences ----------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(5, 300), st.floats(3.05, 8.0), st.integers(0, 2**32 - 1))
def test_degree_sum_exact(n, c, seed):
    m = int(round(c * n / 2))
    if 2 * m <= 3 * n:
        m = (3 * n) // 2 + 1
    deg = sample_degrees(n, m, None, np.random.default_rng(seed))
    assert deg.sum() == 2 * m
    assert deg.min() >= 3 and len(deg) == n


def test_degree_sum_infeasible():
    with pytest.raises(DegreeSequenceError):
        sample_degrees(10, 14, None, np.random.default_rng(0))
    with pytest.raises(DegreeSequenceError):
        sample_degrees(10, 21, None, np.random.default_rng(0), support="3,4")


def test_degree_histogram_chi_square():
    n, m = 10_000, 27_000
    lam = solve_lambda(2 * m / n)
    degs, probs = AT_LEAST_3.pmf_table(lam)
    rng = trial_rng(11, n, m)
    counts = np.zeros(len(degs))
    for _ in range(50):
        d = sample_degrees(n, m, lam, rng)
        counts += np.bincount(d, minlength=degs[-1] + 1)[degs]
    exp = probs * counts.sum()
    # pool the sparse upper tail
    keep = exp >= 5
    obs = np.append(counts[keep], counts[~keep].sum())
    ex = np.append(exp[keep], exp[~keep].sum())
    ex *= obs.sum() / ex.sum()
    p = stats.chisquare(obs, ex).pvalue
    assert p > 1e-3


# -- pairings ------------------------------------------------------------------

def test_pairing_cardinality():
    p = random_pairing([3, 4, 5, 6], np.random.default_rng(0))
    assert p.m == 9
    assert sorted(p.pairs.ravel().tolist()) == list(range(18))
    with pytest.raises(ValueError):
        random_pairing([3, 4], np.random.default_rng(0))


def test_two_cells_never_simple():
    rng = np.random.default_rng(1)
    for _ in range(200):
        assert project_and_check(random_pairing([3, 3], rng)) is None


def test_loop_rejected():
    owner = np.array([0, 0, 1, 1])
    assert project_and_check(Pairing(owner=owner, pairs=np.array([[0, 1], [2, 3]]), n=2)) is None


def test_pair_marginals_uniform():
    # every point is matched to each of the other 11 with probability 1/11
    rng = np.random.default_rng(2024)
    draws = 100_000
    counts = np.zeros((12, 12))
    for _ in range(draws):
        pr = random_pairing([3, 3, 3, 3], rng).pairs
        counts[pr[:, 0], pr[:, 1]] += 1
    counts = counts + counts.T
    p = stats.chisquare(counts[0, 1:]).pvalue
    assert p > 1e-3
    off = counts[~np.eye(12, dtype=bool)]
    assert np.allclose(off / draws, 1 / 11, atol=5 * math.sqrt((1 / 11) / draws))


def test_k4_acceptance_rate():
    draws = 20_000
    for seed in (1, 2):
        rng = np.random.default_rng(seed)
        ok = 0
        for _ in range(draws):
            g = project_and_check(random_pairing([3, 3, 3, 3], rng))
            if g is not None:
                ok += 1
                assert g == Graph.complete(4)
        sd = math.sqrt(K4_ACCEPT * (1 - K4_ACCEPT) / draws)
        assert abs(ok / draws - K4_ACCEPT) < 4 * sd


# -- the sampler ---------------------------------------------------------------

def test_k4_always():
    k4 = Graph.complete(4)
    for trial in range(50):
        assert sample_min3_graph(4, 6, trial_rng(0, 4, 6, trial)) == k4


def test_cubic_six_split():
    oracle = labelled_cubic_six()
    assert oracle == {"k33": 10, "prism": 60}
    frac = oracle["k33"] / 70
    k33 = nx.complete_bipartite_graph(3, 3)
    draws = 10_000
    rng = trial_rng(5, 6, 9)
    hits = 0
    for _ in range(draws):
        g = sample_min3_graph(6, 9, rng)
        hits += nx.is_isomorphic(nx.Graph(g.edge_list()), k33)
    sd = math.sqrt(frac * (1 - frac) / draws)
    assert abs(hits / draws - frac) < 3 * sd


def test_exact_uniform_small():
    # n=5, m=8: K5 minus a 2-edge matching, 15 labelled graphs.
    # With one pairing try per degree draw the law is exactly uniform.
    graphs = {}
    rng = trial_rng(9, 5, 8)
    for _ in range(3000):
        g = sample_min3_graph(5, 8, rng, pairing_retries=1)
        graphs[tuple(g.edge_list())] = graphs.get(tuple(g.edge_list()), 0) + 1
    pairs = list(itertools.combinations(range(5), 2))
    valid = 0
    for sub in itertools.combinations(pairs, 8):
        deg = np.bincount(np.array(sub).ravel(), minlength=5)
        valid += deg.min() >= 3
    assert valid == 15 and len(graphs) == valid
    assert stats.chisquare(list(graphs.values())).pvalue > 1e-3


def test_sampler_properties_n10k():
    n, m = 10_000, 27_000
    for trial in range(3):
        g = sample_min3_graph(n, m, trial_rng(1, n, m, trial))
        assert g.n == n and g.m == m and g.min_degree >= 3


@settings(max_examples=25, deadline=None)
@given(st.integers(12, 120), st.floats(3.2, 5.5), st.integers(0, 10**6))
def test_sampler_invariants(n, c, seed):
    m = max(int(round(c * n / 2)), (3 * n) // 2 + 1)
    g = sample_min3_graph(n, m, trial_rng(seed, n, m))
    assert g.m == m and g.min_degree >= 3
    assert len(set(map(tuple, g.edges.tolist()))) == m
    assert np.all(g.edges[:, 0] < g.edges[:, 1])
    h = sample_min3_graph(n, m, trial_rng(seed, n, m))
    assert edgelist_text(h, seed) == edgelist_text(g, seed)


def test_too_many_rejections():
    # K5 is the only 4-regular graph on 5 vertices; few pairings produce it
    with pytest.raises(TooManyRejections) as ei:
        sample_min3_graph(5, 10, trial_rng(0, 5, 10), max_rejects=5, support=">=4")
    assert ei.value.attempts == 5


def test_rng_streams_differ():
    a = trial_rng(1, 100, 200, 0).random(4)
    b = trial_rng(1, 100, 200, 1).random(4)
    c = trial_rng(1, 100, 201, 0).random(4)
    assert not np.allclose(a, b) and not np.allclose(a, c)
    assert np.array_equal(a, trial_rng(1, 100, 200, 0).random(4))
