import random
from dataclasses import replace

import networkx as nx
import numpy as np
import pytest

from csd.igraph import (
    NeighborRelations,
    build_relations,
    build_subgraphs,
    cue_neighbors,
    due_neighbors,
    enumerate_cliques,
    maximal_cliques,
)
from csd.radio import build_noise, build_powers
from csd.scenario import generate_drop


def _random_graph(rng: random.Random, n: int, density: float) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                adj[i, j] = adj[j, i] = True
    return adj


def _brute_force(adj: np.ndarray):
    n = adj.shape[0]
    nbr = [sum(1 << j for j in range(n) if adj[i, j]) for i in range(n)]
    out = []
    for s in range(1, 1 << n):
        members = [v for v in range(n) if s >> v & 1]
        if any((s & ~(1 << v)) & ~nbr[v] for v in members):
            continue
        if any(not s >> v & 1 and s & nbr[v] == s for v in range(n)):
            continue
        out.append(tuple(members))
    return sorted(out)


def test_cliques_match_brute_force_and_networkx():
    rng = random.Random(2024)
    for k in range(500):
        n = rng.randint(1, 12)
        density = (0.2, 0.5, 0.8)[k % 3]
        adj = _random_graph(rng, n, density)
        got = maximal_cliques(list(range(n)), adj)
        assert got == _brute_force(adj)

        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from(zip(*np.nonzero(np.triu(adj))))
        assert got == sorted(tuple(sorted(int(v) for v in c)) for c in nx.find_cliques(g))


def test_cliques_use_vertex_labels():
    adj = np.array([[False, True], [True, False]])
    assert maximal_cliques([4, 9], adj) == [(4, 9)]


def test_complete_graph_single_clique():
    adj = ~np.eye(5, dtype=bool)
    assert maximal_cliques(range(5), adj) == [(0, 1, 2, 3, 4)]


def test_edgeless_and_empty():
    assert maximal_cliques([2, 5, 7], np.zeros((3, 3), dtype=bool)) == [(2,), (5,), (7,)]
    assert maximal_cliques([], np.zeros((0, 0), dtype=bool)) == []


def test_fixture_subgraphs_and_cliques(fig1):
    subgraphs = build_subgraphs(fig1.relations)
    cliques = enumerate_cliques(subgraphs)
    exp = fig1.expected
    assert [list(g.vertices) for g in subgraphs.shared] == exp["shared_subgraphs"]
    assert [list(g.vertices) for g in subgraphs.dedicated] == exp["dedicated_subgraphs"]
    assert [[list(c) for c in cl] for cl in cliques.shared] == exp["shared_cliques"]
    assert [[list(c) for c in cl] for cl in cliques.dedicated] == exp["dedicated_cliques"]
    # {1} and {4} under CUE 1, {2} and {3,4} under pair 2 (1-based)
    assert cliques.shared[0] == [(0,), (3,)]
    assert cliques.dedicated[1] == [(1,), (2, 3)]
    assert cliques.nmc_dedicated == [2, 2, 2, 2]


def test_owner_isolated_in_dedicated_subgraph(small_config):
    for k in range(5):
        s = generate_drop(small_config, k)
        noise = build_noise(small_config, s)
        powers = build_powers(small_config, s, noise)
        rel = build_relations(s, powers, noise, small_config.gamma_min_db, -10.0)
        for g in build_subgraphs(rel).dedicated:
            pos = g.vertices.index(g.owner)
            assert not g.adjacency[pos].any()


def test_due_neighbors_symmetric(small_config):
    s = generate_drop(small_config, 0)
    noise = build_noise(small_config, s)
    powers = build_powers(small_config, s, noise)
    adj = due_neighbors(s, powers, noise, -10.0)
    assert np.array_equal(adj, adj.T)
    assert not np.diag(adj).any()


def test_due_neighbors_threshold_extremes(small_config):
    s = generate_drop(small_config, 0)
    noise = build_noise(small_config, s)
    powers = build_powers(small_config, s, noise)
    D = s.num_pairs
    assert due_neighbors(s, powers, noise, 300.0).sum() == D * (D - 1)
    assert due_neighbors(s, powers, noise, -300.0).sum() == 0


def test_lower_tau_means_fewer_edges(small_config):
    s = generate_drop(small_config, 1)
    noise = build_noise(small_config, s)
    powers = build_powers(small_config, s, noise)
    counts = [due_neighbors(s, powers, noise, t).sum() for t in (-30.0, -10.0, 0.0, 10.0)]
    assert counts == sorted(counts)


def test_masks_restrict_regions(fig1):
    shared_only = np.array([True, False, True, False])
    sub = build_subgraphs(fig1.relations, shared_pairs=shared_only, dedicated_pairs=~shared_only)
    assert [g.vertices for g in sub.shared] == [(0,), (), (0,)]
    assert sub.dedicated[0].vertices == ()
    assert sub.dedicated[1].vertices == (1, 3)
    assert sub.dedicated[3].vertices == (1, 3)


def test_relations_validate_rejects_asymmetric():
    adj = np.array([[False, True], [False, False]])
    rel = NeighborRelations(cue_neighbor=np.zeros((1, 2), dtype=bool), due_adjacency=adj)
    with pytest.raises(ValueError):
        rel.validate()


def test_cue_neighbors_hand_cases(hand_scenario, hand_config):
    # pair 0: vanishing direct link; pair 1: 3 m link.
    # CUE 0 sits on pair 1's receiver, CUE 1 is in the far corner.
    s = hand_scenario(
        gain_cue_enb=[1e-11, 1e-11, 1e-11],
        gain_due_enb=[1e-12, 1e-12],
        gain_txi_rxj=[[1e-30, 1e-12], [1e-12, 2e-5]],
        gain_cue_rxj=[[1e-14, 1.0], [1e-14, 1e-14], [1e-14, 1e-12]],
    )
    noise = build_noise(hand_config, s)
    powers = build_powers(hand_config, s, noise)
    got = cue_neighbors(s, powers, noise, hand_config.gamma_min_db)
    assert got.tolist() == [[True, True], [True, False], [True, False]]


def test_cue_neighbors_grow_with_cue_power(small_config):
    for k in range(5):
        s = generate_drop(small_config, k)
        noise = build_noise(small_config, s)
        powers = build_powers(small_config, s, noise)
        prev = None
        for p_cue in (1e-4, 1e-3, 1e-2, 1e-1, 1.0):
            nb = cue_neighbors(s, replace(powers, p_cue=p_cue), noise, small_config.gamma_min_db)
            if prev is not None:
                assert not (prev & ~nb).any()
            prev = nb
