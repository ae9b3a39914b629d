"""Two-space knowledge graph: instance entities, concept entities, and the
ontology mapping between them.

The graph is loaded from two line-delimited files (see `load_graph`),
validated, and frozen.  Identifiers are interned to dense integer handles in
first-appearance order; all traversals run on handles and public operations
translate at the boundary.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .errors import GraphFormatError, UnknownIdError

INSTANCE = "instance"
CONCEPT = "concept"

EDGE_INSTANCE = "instance"
EDGE_BROADER = "broader"
EDGE_ONTOLOGY = "ontology"


@dataclass(frozen=True)
class GraphStats:
    instance_count: int
    concept_count: int
    instance_edge_count: int
    broader_edge_count: int
    ontology_pair_count: int
    degree_histogram: dict[int, int]


@dataclass(frozen=True)
class KnowledgeGraph:
    """Immutable bidirected graph over instance and concept spaces.

    Instance edges are undirected and deduplicated; `adjacency[h]` is the
    sorted tuple of distinct instance neighbors of handle `h`.  Broader edges
    run in the concept space: `broader_parents[h]` are the more general
    concepts of `h`, `narrower_children[h]` the inverse.  The ontology maps
    concept handles to instance handle sets (`concept_instances`) and back (`entity_concepts`).
    """

    instance_ids: tuple[str, ...]
    concept_ids: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...]
    broader_parents: tuple[tuple[int, ...], ...]
    narrower_children: tuple[tuple[int, ...], ...]
    concept_instances: tuple[frozenset[int], ...]
    entity_concepts: tuple[frozenset[int], ...]
    self_loops_dropped: int = 0
    _instance_handles: dict[str, int] = field(default_factory=dict, repr=False)
    _concept_handles: dict[str, int] = field(default_factory=dict, repr=False)

    # -- handle translation ------------------------------------------------

    def instance_handle(self, entity_id: str) -> int:
        try:
            return self._instance_handles[entity_id]
        except KeyError:
            raise UnknownIdError(f"unknown instance entity {entity_id!r}") from None

    def concept_handle(self, concept_id: str) -> int:
        try:
            return self._concept_handles[concept_id]
        except KeyError:
            raise UnknownIdError(f"unknown concept {concept_id!r}") from None

    def has_instance(self, entity_id: str) -> bool:
        return entity_id in self._instance_handles

    def has_concept(self, concept_id: str) -> bool:
        return concept_id in self._concept_handles

    # -- ontology ----------------------------------------------------------

    def instances_of(self, concept_id: str) -> set[str]:
        """Instance entities the concept maps to (possibly empty)."""
        handles = self.concept_instances[self.concept_handle(concept_id)]
        return {self.instance_ids[h] for h in handles}

    def concepts_of(self, entity_id: str) -> set[str]:
        """Concepts mapping to the given instance entity (possibly empty)."""
        handles = self.entity_concepts[self.instance_handle(entity_id)]
        return {self.concept_ids[h] for h in handles}

    def instance_set_size(self, concept_id: str) -> int:
        return len(self.concept_instances[self.concept_handle(concept_id)])

    # -- concept-space traversal --------------------------------------------

    def broadened_concepts(self, concept_id: str, depth: int) -> set[str]:
        """The concept plus ancestors reachable via at most `depth` broader edges."""
        if depth < 0:
            raise ValueError("depth must be >= 0")
        reached = self._concept_bfs(self.concept_handle(concept_id), depth, self.broader_parents)
        return {self.concept_ids[h] for h in reached}

    def narrower_descendants(self, concept_id: str, depth: int) -> set[str]:
        """The concept plus descendants reachable via at most `depth` narrower edges."""
        if depth < 0:
            raise ValueError("depth must be >= 0")
        reached = self._concept_bfs(self.concept_handle(concept_id), depth, self.narrower_children)
        return {self.concept_ids[h] for h in reached}

    def _concept_bfs(
        self, start: int, depth: int, edges: tuple[tuple[int, ...], ...]
    ) -> set[int]:
        seen = {start}
        frontier = [start]
        for _ in range(depth):
            if not frontier:
                break
            nxt = []
            for h in frontier:
                for m in edges[h]:
                    if m not in seen:
                        seen.add(m)
                        nxt.append(m)
            frontier = nxt
        return seen

    # -- bookkeeping ---------------------------------------------------------

    def stats(self) -> GraphStats:
        degree_histogram: dict[int, int] = {}
        for neighbors in self.adjacency:
            d = len(neighbors)
            degree_histogram[d] = degree_histogram.get(d, 0) + 1
        return GraphStats(
            instance_count=len(self.instance_ids),
            concept_count=len(self.concept_ids),
            instance_edge_count=sum(len(n) for n in self.adjacency) // 2,
            broader_edge_count=sum(len(p) for p in self.broader_parents),
            ontology_pair_count=sum(len(s) for s in self.concept_instances),
            degree_histogram=degree_histogram,
        )

    def fingerprint(self) -> str:
        """Stable content hash used to pair an index file with its graph."""
        h = hashlib.sha256()
        for ids in (self.instance_ids, self.concept_ids):
            for identifier in ids:
                h.update(identifier.encode())
                h.update(b"\n")
            h.update(b"--\n")
        for neighbors in self.adjacency:
            h.update(",".join(map(str, neighbors)).encode())
            h.update(b"\n")
        for parents in self.broader_parents:
            h.update(",".join(map(str, parents)).encode())
            h.update(b"\n")
        for instances in self.concept_instances:
            h.update(",".join(map(str, sorted(instances))).encode())
            h.update(b"\n")
        return h.hexdigest()


def graph_stats(graph: KnowledgeGraph) -> GraphStats:
    return graph.stats()


def _records(source: Iterable[str]) -> Iterable[tuple[int, str]]:
    for line_number, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield line_number, line


def load_graph(nodes_source: Iterable[str], edges_source: Iterable[str]) -> KnowledgeGraph:
    """Build a validated graph from node and edge record streams.

    Nodes: ``id<TAB>space`` with space in {instance, concept}.  Edges:
    ``src<TAB>dst<TAB>kind`` with kind in {instance, broader, ontology}.
    Instance edges are symmetrized and collapsed to a simple adjacency;
    self-loops are dropped and counted.  Ontology records pair one instance
    entity with one concept (either field order) and install both directions
    of the mapping.
    """
    instance_handles: dict[str, int] = {}
    concept_handles: dict[str, int] = {}
    instance_ids: list[str] = []
    concept_ids: list[str] = []

    for line_number, line in _records(nodes_source):
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'id<TAB>space', got {line!r}", line_number)
        identifier, space = parts[0].strip(), parts[1].strip()
        if not identifier:
            raise GraphFormatError("empty node id", line_number)
        if space == INSTANCE:
            if identifier in concept_handles:
                raise GraphFormatError(
                    f"node {identifier!r} redeclared as instance, was concept", line_number
                )
            if identifier not in instance_handles:
                instance_handles[identifier] = len(instance_ids)
                instance_ids.append(identifier)
        elif space == CONCEPT:
            if identifier in instance_handles:
                raise GraphFormatError(
                    f"node {identifier!r} redeclared as concept, was instance", line_number
                )
            if identifier not in concept_handles:
                concept_handles[identifier] = len(concept_ids)
                concept_ids.append(identifier)
        else:
            raise GraphFormatError(f"unknown node space {space!r}", line_number)

    adjacency_sets: list[set[int]] = [set() for _ in instance_ids]
    parent_sets: list[set[int]] = [set() for _ in concept_ids]
    child_sets: list[set[int]] = [set() for _ in concept_ids]
    concept_instance_sets: list[set[int]] = [set() for _ in concept_ids]
    entity_concept_sets: list[set[int]] = [set() for _ in instance_ids]
    self_loops = 0

    def space_of(identifier: str, line_number: int) -> str:
        if identifier in instance_handles:
            return INSTANCE
        if identifier in concept_handles:
            return CONCEPT
        raise GraphFormatError(f"edge endpoint {identifier!r} not declared", line_number)

    for line_number, line in _records(edges_source):
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(f"expected 'src<TAB>dst<TAB>kind', got {line!r}", line_number)
        src, dst, kind = (p.strip() for p in parts)
        src_space = space_of(src, line_number)
        dst_space = space_of(dst, line_number)
        if kind == EDGE_INSTANCE:
            if src_space != INSTANCE or dst_space != INSTANCE:
                raise GraphFormatError(
                    f"space partition violation: instance edge {src!r}-{dst!r} touches the concept space",
                    line_number,
                )
            a, b = instance_handles[src], instance_handles[dst]
            if a == b:
                self_loops += 1
                continue
            adjacency_sets[a].add(b)
            adjacency_sets[b].add(a)
        elif kind == EDGE_BROADER:
            if src_space != CONCEPT or dst_space != CONCEPT:
                raise GraphFormatError(
                    f"space partition violation: broader edge {src!r}-{dst!r} touches the instance space",
                    line_number,
                )
            child, parent = concept_handles[src], concept_handles[dst]
            if child == parent:
                self_loops += 1
                continue
            parent_sets[child].add(parent)
            child_sets[parent].add(child)
        elif kind == EDGE_ONTOLOGY:
            if {src_space, dst_space} != {INSTANCE, CONCEPT}:
                raise GraphFormatError(
                    f"space partition violation: ontology record {src!r}-{dst!r} must pair one "
                    "instance entity with one concept",
                    line_number,
                )
            if src_space == INSTANCE:
                instance, concept = instance_handles[src], concept_handles[dst]
            else:
                instance, concept = instance_handles[dst], concept_handles[src]
            concept_instance_sets[concept].add(instance)
            entity_concept_sets[instance].add(concept)
        else:
            raise GraphFormatError(f"unknown edge kind {kind!r}", line_number)

    return KnowledgeGraph(
        instance_ids=tuple(instance_ids),
        concept_ids=tuple(concept_ids),
        adjacency=tuple(tuple(sorted(s)) for s in adjacency_sets),
        broader_parents=tuple(tuple(sorted(s)) for s in parent_sets),
        narrower_children=tuple(tuple(sorted(s)) for s in child_sets),
        concept_instances=tuple(frozenset(s) for s in concept_instance_sets),
        entity_concepts=tuple(frozenset(s) for s in entity_concept_sets),
        self_loops_dropped=self_loops,
        _instance_handles=instance_handles,
        _concept_handles=concept_handles,
    )


def load_graph_files(nodes_path: str, edges_path: str) -> KnowledgeGraph:
    with open(nodes_path, encoding="utf-8") as nodes, open(edges_path, encoding="utf-8") as edges:
        return load_graph(nodes, edges)
