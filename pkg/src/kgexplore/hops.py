"""Bounded-hop distance queries over the instance space.

The random-walk estimator needs `hop(n, v) <= budget` checks for one fixed
target and many candidate neighbors, so the default oracle is a per-target
BFS truncated at a small radius, built on demand and kept in an LRU-capped
cache.  A full precomputation over all targets is available for small graphs
(`build_khop_index` with `prefill=True`).
"""

from __future__ import annotations

import math
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass

from .errors import HopIndexBudgetError
from .graph import KnowledgeGraph

UNREACHABLE = math.inf

# rough per-entry cost of a python int->int dict slot, used for the budget check
_BYTES_PER_ENTRY = 100


@dataclass(frozen=True)
class HopMap:
    """BFS distances from every node within `radius` hops of `target`.

    Nodes absent from `distances` are more than `radius` hops away.
    """

    target: str
    radius: int
    distances: dict[str, int]

    def hop(self, entity_id: str) -> float:
        """Hop distance to the target, or an infinity sentinel beyond the radius."""
        d = self.distances.get(entity_id)
        return UNREACHABLE if d is None else d


def _bfs_handles(graph: KnowledgeGraph, target_handle: int, radius: int) -> dict[int, int]:
    distances = {target_handle: 0}
    frontier = [target_handle]
    adjacency = graph.adjacency
    for level in range(1, radius + 1):
        nxt = []
        for h in frontier:
            for n in adjacency[h]:
                if n not in distances:
                    distances[n] = level
                    nxt.append(n)
        if not nxt:
            break
        frontier = nxt
    return distances


def build_hop_map(graph: KnowledgeGraph, target: str, radius: int) -> HopMap:
    """Exact truncated BFS distances from `target` over instance edges."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    handle = graph.instance_handle(target)
    by_handle = _bfs_handles(graph, handle, radius)
    ids = graph.instance_ids
    return HopMap(target=target, radius=radius, distances={ids[h]: d for h, d in by_handle.items()})


class KHopIndex:
    """Radius-bounded hop table, one BFS neighborhood per queried target.

    Neighborhoods are built lazily and evicted LRU once `capacity` targets
    are cached (None = unbounded).  Answers are identical to `build_hop_map`
    for every target; concurrent build-or-get is safe, with last-writer-wins
    on duplicate builds.
    """

    def __init__(self, graph: KnowledgeGraph, radius: int, capacity: int | None = None):
        if radius < 0:
            raise ValueError("radius must be >= 0")
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.graph = graph
        self.radius = radius
        self.capacity = capacity
        self.build_seconds = 0.0
        self._cache: OrderedDict[int, dict[int, int]] = OrderedDict()
        self._lock = threading.Lock()

    def distances_for_handle(self, target_handle: int) -> dict[int, int]:
        """Handle-keyed distance map for a target; the estimator's hot path."""
        with self._lock:
            cached = self._cache.get(target_handle)
            if cached is not None:
                self._cache.move_to_end(target_handle)
                return cached
        started = time.perf_counter()
        built = _bfs_handles(self.graph, target_handle, self.radius)
        with self._lock:
            self.build_seconds += time.perf_counter() - started
            self._cache[target_handle] = built
            self._cache.move_to_end(target_handle)
            while self.capacity is not None and len(self._cache) > self.capacity:
                self._cache.popitem(last=False)
        return built

    def hop(self, entity_id: str, target: str) -> float:
        """hop(n, v): distance if within the radius, else infinity."""
        n = self.graph.instance_handle(entity_id)
        v = self.graph.instance_handle(target)
        d = self.distances_for_handle(v).get(n)
        return UNREACHABLE if d is None else d

    def hop_map(self, target: str) -> HopMap:
        handle = self.graph.instance_handle(target)
        by_handle = self.distances_for_handle(handle)
        ids = self.graph.instance_ids
        return HopMap(
            target=target,
            radius=self.radius,
            distances={ids[h]: d for h, d in by_handle.items()},
        )

    def memory_estimate_bytes(self) -> int:
        with self._lock:
            return sum(len(d) for d in self._cache.values()) * _BYTES_PER_ENTRY


def build_khop_index(
    graph: KnowledgeGraph,
    radius: int,
    capacity: int | None = None,
    memory_budget_mb: float | None = None,
    prefill: bool = False,
) -> KHopIndex:
    """Precomputed-variant constructor with an up-front memory budget check.

    The budget check estimates the fully populated table from a handful of
    sample neighborhoods; exceeding it raises instead of silently thrashing,
    advising per-target mode (a `capacity` cap) instead.
    """
    index = KHopIndex(graph, radius, capacity=capacity)
    n = len(graph.instance_ids)
    if memory_budget_mb is not None and capacity is None and n > 0:
        step = max(1, n // 32)
        sampled = [len(_bfs_handles(graph, h, radius)) for h in range(0, n, step)]
        estimate = n * (sum(sampled) / len(sampled)) * _BYTES_PER_ENTRY
        if estimate > memory_budget_mb * 1e6:
            raise HopIndexBudgetError(
                f"estimated hop index size {estimate / 1e6:.1f} MB exceeds budget "
                f"{memory_budget_mb:.1f} MB; use per-target mode (set a cache capacity)"
            )
    if prefill:
        for h in range(n):
            index.distances_for_handle(h)
    return index
