import math
import random

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from kgexplore.errors import HopIndexBudgetError, UnknownIdError
from kgexplore.graph import load_graph
from kgexplore.hops import UNREACHABLE, KHopIndex, build_hop_map, build_khop_index


def _random_instance_graph(rng: random.Random, n: int, mean_degree: float):
    nodes = [f"v{i}" for i in range(n)]
    node_lines = [f"{v}\tinstance" for v in nodes]
    edge_lines = []
    for _ in range(int(n * mean_degree / 2)):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edge_lines.append(f"{nodes[a]}\t{nodes[b]}\tinstance")
    return load_graph(node_lines, edge_lines)


def _floyd_warshall_clipped(graph, radius):
    n = len(graph.instance_ids)
    rows, cols = [], []
    for h, neighbors in enumerate(graph.adjacency):
        for m in neighbors:
            rows.append(h)
            cols.append(m)
    matrix = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    dist = shortest_path(matrix, method="FW", unweighted=True)
    clipped = {}
    for v in range(n):
        clipped[v] = {
            u: int(dist[u, v]) for u in range(n) if dist[u, v] <= radius
        }
    return clipped


def test_chain_hop_map(chain_graph):
    hm = build_hop_map(chain_graph, "c", 2)
    assert hm.distances == {"c": 0, "b": 1, "a": 2}
    assert hm.hop("c") == 0
    assert hm.hop("a") == 2


def test_radius_zero(chain_graph):
    hm = build_hop_map(chain_graph, "b", 0)
    assert hm.distances == {"b": 0}
    assert hm.hop("a") == UNREACHABLE
    assert math.isinf(hm.hop("a"))


def test_unknown_target(chain_graph):
    with pytest.raises(UnknownIdError):
        build_hop_map(chain_graph, "zz", 2)


def test_hop_map_triangle_consistency(synth_graph):
    for target in list(synth_graph.instance_ids)[:10]:
        hm = build_hop_map(synth_graph, target, 3)
        handle = {e: synth_graph.instance_handle(e) for e in hm.distances}
        for entity, d in hm.distances.items():
            if d == 0:
                assert entity == target
                continue
            neighbor_dists = [
                hm.distances.get(synth_graph.instance_ids[m])
                for m in synth_graph.adjacency[handle[entity]]
            ]
            assert (d - 1) in neighbor_dists


def test_against_floyd_warshall_oracle():
    rng = random.Random(17)
    for n in (60, 200, 500):
        graph = _random_instance_graph(rng, n, mean_degree=4.0)
        radius = 3
        expected = _floyd_warshall_clipped(graph, radius)
        for target_handle in rng.sample(range(n), 8):
            target = graph.instance_ids[target_handle]
            hm = build_hop_map(graph, target, radius)
            got = {
                graph.instance_handle(e): d for e, d in hm.distances.items()
            }
            assert got == expected[target_handle]


def test_khop_index_equals_per_target_bfs():
    rng = random.Random(5)
    graph = _random_instance_graph(rng, 1000, mean_degree=5.0)
    index = build_khop_index(graph, radius=2)
    for target in rng.sample(graph.instance_ids, 25):
        assert index.hop_map(target).distances == build_hop_map(graph, target, 2).distances
    # spot-check the scalar query path too
    for target in rng.sample(graph.instance_ids, 5):
        hm = build_hop_map(graph, target, 2)
        for entity in rng.sample(graph.instance_ids, 20):
            assert index.hop(entity, target) == hm.hop(entity)


def test_khop_index_radius_zero(chain_graph):
    index = build_khop_index(chain_graph, radius=0)
    assert index.hop("a", "a") == 0
    assert index.hop("b", "a") == UNREACHABLE


def test_khop_index_edgeless():
    graph = load_graph(["a\tinstance", "b\tinstance", "c\tinstance"], [])
    index = build_khop_index(graph, radius=3)
    for n in ("b", "c"):
        assert index.hop(n, "a") == UNREACHABLE
    assert index.hop("a", "a") == 0


def test_radius_monotonicity(synth_graph):
    rng = random.Random(2)
    targets = rng.sample(synth_graph.instance_ids, 6)
    for target in targets:
        small = build_hop_map(synth_graph, target, 1)
        large = build_hop_map(synth_graph, target, 3)
        for entity, d in small.distances.items():
            assert large.distances[entity] == d


def test_lru_capacity_evicts(synth_graph):
    index = KHopIndex(synth_graph, radius=2, capacity=2)
    a, b, c = synth_graph.instance_ids[:3]
    index.hop_map(a)
    index.hop_map(b)
    index.hop_map(c)
    assert len(index._cache) == 2
    # answers stay correct after eviction
    assert index.hop_map(a).distances == build_hop_map(synth_graph, a, 2).distances


def test_memory_budget_error(synth_graph):
    with pytest.raises(HopIndexBudgetError, match="per-target"):
        build_khop_index(synth_graph, radius=3, memory_budget_mb=0.001)
    # a capacity cap sidesteps the budget check
    index = build_khop_index(synth_graph, radius=3, memory_budget_mb=0.001, capacity=4)
    assert index.capacity == 4


def test_prefill_reports_build_stats(chain_graph):
    index = build_khop_index(chain_graph, radius=2, prefill=True)
    assert len(index._cache) == 3
    assert index.build_seconds >= 0.0
    assert index.memory_estimate_bytes() > 0
