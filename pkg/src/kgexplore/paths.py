"""Exact connectivity ground truth: bounded-length simple-path counting.

Deliberately obvious depth-first enumeration with a work cap; this module is
the reference the sampling estimator is validated against, so it favors
readability over speed and is meant for small graphs only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EnumerationCapError
from .graph import KnowledgeGraph

DEFAULT_WORK_CAP = 10_000_000


@dataclass(frozen=True)
class ConnParams:
    """Hop limit and per-hop damping for the connectivity score."""

    tau: int = 2
    beta: float = 0.5

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")


class _WorkBudget:
    __slots__ = ("remaining", "results")

    def __init__(self, cap: int):
        self.remaining = cap
        self.results = 0

    def spend(self):
        self.remaining -= 1
        if self.remaining < 0:
            raise EnumerationCapError(
                f"path enumeration exceeded its work cap ({self.results} paths found)",
                partial_count=self.results,
            )


def count_simple_paths(
    graph: KnowledgeGraph, u: str, v: str, length: int, work_cap: int = DEFAULT_WORK_CAP
) -> int:
    """Number of node-simple paths with exactly `length` edges from u to v."""
    if length < 1:
        raise ValueError("length must be >= 1")
    start = graph.instance_handle(u)
    goal = graph.instance_handle(v)
    if start == goal:
        raise ValueError("endpoints must differ")
    budget = _WorkBudget(work_cap)
    adjacency = graph.adjacency
    visited = {start}

    def extend(node: int, remaining: int) -> int:
        budget.spend()
        if remaining == 1:
            found = 1 if goal in adjacency[node] and goal not in visited else 0
            budget.results += found
            return found
        total = 0
        for n in adjacency[node]:
            if n in visited:
                continue
            visited.add(n)
            total += extend(n, remaining - 1)
            visited.discard(n)
        return total

    return extend(start, length)


def enumerate_paths(
    graph: KnowledgeGraph, u: str, v: str, max_hops: int, work_cap: int = DEFAULT_WORK_CAP
) -> list[list[str]]:
    """All node-simple paths u -> v with 1..max_hops edges.

    Ordered lexicographically by interned node handles, so output order is
    the graph's load order, not string order.
    """
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    start = graph.instance_handle(u)
    goal = graph.instance_handle(v)
    if start == goal:
        raise ValueError("endpoints must differ")
    budget = _WorkBudget(work_cap)
    adjacency = graph.adjacency
    ids = graph.instance_ids
    found: list[list[str]] = []
    trail = [start]
    visited = {start}

    def extend(node: int):
        budget.spend()
        for n in adjacency[node]:
            if n in visited:
                continue
            trail.append(n)
            if n == goal:
                found.append([ids[h] for h in trail])
                budget.results += 1
            elif len(trail) <= max_hops:
                visited.add(n)
                extend(n)
                visited.discard(n)
            trail.pop()

    extend(start)
    return found


def _path_counts_from(
    graph: KnowledgeGraph, source: int, tau: int, budget: _WorkBudget
) -> dict[int, list[float]]:
    """counts[target][l] = number of simple paths of exactly l edges from source."""
    adjacency = graph.adjacency
    counts: dict[int, list[float]] = {}
    visited = {source}

    def extend(node: int, depth: int):
        budget.spend()
        for n in adjacency[node]:
            if n in visited:
                continue
            per_length = counts.get(n)
            if per_length is None:
                per_length = [0.0] * (tau + 1)
                counts[n] = per_length
            per_length[depth] += 1
            budget.results += 1
            if depth < tau:
                visited.add(n)
                extend(n, depth + 1)
                visited.discard(n)

    extend(source, 1)
    return counts


def exact_conn(
    graph: KnowledgeGraph,
    concept: str,
    context: set[str],
    params: ConnParams,
    work_cap: int = DEFAULT_WORK_CAP,
) -> float:
    """Damped simple-path count from the concept's instances to the context set,
    averaged over context entities.

    Contributions from all mapped instances are summed unnormalized; only the
    context average divides.
    """
    if not context:
        raise ValueError("context must be non-empty")
    sources = graph.concept_instances[graph.concept_handle(concept)]
    targets = {graph.instance_handle(e) for e in context}
    if targets & sources:
        raise ValueError("context entities must be disjoint from the concept's instances")
    weights = [0.0] + [params.beta**l for l in range(1, params.tau + 1)]
    budget = _WorkBudget(work_cap)
    total = 0.0
    for u in sorted(sources):
        counts = _path_counts_from(graph, u, params.tau, budget)
        for v in targets:
            per_length = counts.get(v)
            if per_length is None:
                continue
            for l in range(1, params.tau + 1):
                total += weights[l] * per_length[l]
    return total / len(targets)
