"""Synthetic graph/corpus generation with a ground-truth ledger.

Documents are planted around a positive concept: a couple of its instances
appear as matched entities and, with the configured affinity, the remaining
entities are drawn from the concept's bounded-hop neighborhood, so planted
concepts are measurably better connected to their documents' context than
random negatives.  Everything is a pure function of the params (seed
included), and the ledger records what was planted for test oracles.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field

from .graph import KnowledgeGraph, load_graph


@dataclass(frozen=True)
class SynthParams:
    instance_count: int = 800
    concept_count: int = 30
    ontology_fanout_min: int = 4
    ontology_fanout_max: int = 10
    mean_degree: float = 5.0
    broader_depth: int = 3
    broader_root_fraction: float = 0.2
    cluster_edge_fraction: float = 0.9
    doc_count: int = 60
    doc_entities_min: int = 4
    doc_entities_max: int = 8
    cluster_affinity: float = 0.95
    affinity_radius: int = 1
    mention_count_max: int = 4
    seed: int = 0

    def __post_init__(self):
        for name in ("instance_count", "concept_count", "doc_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("broader_root_fraction", "cluster_edge_fraction", "cluster_affinity"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.ontology_fanout_min < 1 or self.ontology_fanout_max < self.ontology_fanout_min:
            raise ValueError("ontology fanout bounds must satisfy 1 <= min <= max")
        if self.ontology_fanout_max > self.instance_count:
            raise ValueError("ontology fanout cannot exceed the instance count")
        if self.doc_entities_min < 2 or self.doc_entities_max < self.doc_entities_min:
            raise ValueError("entities-per-doc bounds must satisfy 2 <= min <= max")
        if self.doc_entities_max > self.instance_count:
            raise ValueError("entities per document cannot exceed the instance count")
        if self.mean_degree <= 0:
            raise ValueError("mean_degree must be positive")


@dataclass(frozen=True)
class GeneratorLedger:
    """What the generator planted, for use as a test oracle."""

    concept_instances: dict[str, list[str]]
    clusters: dict[str, list[str]]
    doc_positive_concepts: dict[str, str]
    seed: int

    def to_dict(self) -> dict:
        return {
            "concept_instances": self.concept_instances,
            "clusters": self.clusters,
            "doc_positive_concepts": self.doc_positive_concepts,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SynthBundle:
    node_lines: list[str]
    edge_lines: list[str]
    doc_records: list[dict]
    ledger: GeneratorLedger
    params: SynthParams = field(repr=False, default=None)

    def build_graph(self) -> KnowledgeGraph:
        return load_graph(self.node_lines, self.edge_lines)

    def doc_lines(self) -> list[str]:
        return [json.dumps(r, sort_keys=True) for r in self.doc_records]


def _neighborhood(adjacency: dict[int, set[int]], seeds: set[int], radius: int) -> set[int]:
    reached = set(seeds)
    frontier = set(seeds)
    for _ in range(radius):
        nxt = set()
        for h in frontier:
            nxt |= adjacency.get(h, set()) - reached
        reached |= nxt
        frontier = nxt
    return reached


def generate(params: SynthParams) -> SynthBundle:
    """Produce node/edge/document records plus the ledger, deterministically."""
    rng = random.Random(params.seed)
    n = params.instance_count
    instances = [f"i{idx:05d}" for idx in range(n)]
    concepts = [f"c{idx:03d}" for idx in range(params.concept_count)]

    # broader forest over concepts, bounded depth
    depth_of = {0: 0}
    broader_edges: list[tuple[int, int]] = []
    for idx in range(1, params.concept_count):
        eligible = [p for p in range(idx) if depth_of[p] < params.broader_depth - 1]
        if not eligible or rng.random() < params.broader_root_fraction:
            depth_of[idx] = 0
            continue
        parent = rng.choice(eligible)
        depth_of[idx] = depth_of[parent] + 1
        broader_edges.append((idx, parent))

    # uniform sparse background at exactly the target edge count
    target_edges = round(n * params.mean_degree / 2)
    edges: set[tuple[int, int]] = set()
    attempts = 0
    while len(edges) < target_edges and attempts < 100 * target_edges:
        attempts += 1
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))

    def rebuild_adjacency() -> dict[int, set[int]]:
        built: dict[int, set[int]] = {}
        for a, b in edges:
            built.setdefault(a, set()).add(b)
            built.setdefault(b, set()).add(a)
        return built

    adjacency = rebuild_adjacency()

    # concepts map to graph-local instance balls (BFS around a seed node),
    # mirroring how ontology categories group related entities
    planted: dict[int, list[int]] = {}
    for c in range(params.concept_count):
        fanout = rng.randint(params.ontology_fanout_min, params.ontology_fanout_max)
        start = rng.randrange(n)
        members = [start]
        chosen = {start}
        frontier = [start]
        while frontier and len(members) < fanout:
            nxt = []
            for h in frontier:
                for m in sorted(adjacency.get(h, ())):
                    if m not in chosen:
                        chosen.add(m)
                        members.append(m)
                        nxt.append(m)
                        if len(members) == fanout:
                            break
                if len(members) == fanout:
                    break
            frontier = nxt
        while len(members) < fanout:  # isolated seed: pad uniformly
            pick = rng.randrange(n)
            if pick not in chosen:
                chosen.add(pick)
                members.append(pick)
        planted[c] = sorted(members)

    # densify each ball with intra-member edges, removing an equal number of
    # background edges so the mean degree stays on target
    cluster_edges: set[tuple[int, int]] = set()
    for c in range(params.concept_count):
        members = planted[c]
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                pair = (min(a, b), max(a, b))
                if pair not in edges and rng.random() < params.cluster_edge_fraction:
                    cluster_edges.add(pair)
    edges |= cluster_edges
    removable = sorted(edges - cluster_edges)
    for pair in rng.sample(removable, min(len(cluster_edges), len(removable))):
        edges.discard(pair)
    adjacency = rebuild_adjacency()

    cluster_of = {
        c: sorted(_neighborhood(adjacency, set(planted[c]), params.affinity_radius))
        for c in range(params.concept_count)
    }

    plantable = [c for c in range(params.concept_count) if len(planted[c]) >= 2]
    doc_records: list[dict] = []
    doc_positive: dict[str, str] = {}
    for j in range(params.doc_count):
        c = rng.choice(plantable)
        doc_id = f"d{j:04d}"
        total = rng.randint(params.doc_entities_min, params.doc_entities_max)
        matched = rng.sample(planted[c], rng.randint(1, 2))
        members = set(planted[c])
        pool = [h for h in cluster_of[c] if h not in members]
        chosen = set(matched)
        stalls = 0
        while len(chosen) < total:
            if pool and rng.random() < params.cluster_affinity:
                pick = rng.choice(pool)
            else:
                pick = rng.randrange(n)
            if pick not in chosen and pick not in members:
                chosen.add(pick)
            else:
                stalls += 1
                if stalls > 1000 * total:
                    raise ValueError(
                        "infeasible params: not enough instance entities outside "
                        f"concept {concepts[c]} to fill a {total}-entity document"
                    )
        context = sorted(chosen - set(matched))
        entities = [
            {"id": instances[h], "count": rng.randint(1, params.mention_count_max)}
            for h in sorted(matched) + context
        ]
        doc_records.append(
            {
                "id": doc_id,
                "title": f"synthetic document {j} about {concepts[c]}",
                "entities": entities,
            }
        )
        doc_positive[doc_id] = concepts[c]

    node_lines = [f"{i}\tinstance\n" for i in instances] + [
        f"{c}\tconcept\n" for c in concepts
    ]
    edge_lines = [f"{instances[a]}\t{instances[b]}\tinstance\n" for a, b in sorted(edges)]
    edge_lines += [
        f"{concepts[child]}\t{concepts[parent]}\tbroader\n" for child, parent in broader_edges
    ]
    edge_lines += [
        f"{instances[h]}\t{concepts[c]}\tontology\n"
        for c in range(params.concept_count)
        for h in planted[c]
    ]
    ledger = GeneratorLedger(
        concept_instances={
            concepts[c]: [instances[h] for h in planted[c]]
            for c in range(params.concept_count)
        },
        clusters={
            concepts[c]: [instances[h] for h in cluster_of[c]]
            for c in range(params.concept_count)
        },
        doc_positive_concepts=doc_positive,
        seed=params.seed,
    )
    return SynthBundle(
        node_lines=node_lines,
        edge_lines=edge_lines,
        doc_records=doc_records,
        ledger=ledger,
        params=params,
    )


def gen_synthetic(params: SynthParams, out_dir: str) -> dict[str, str]:
    """Write nodes.tsv, edges.tsv, docs.jsonl, and ledger.json under out_dir.

    Returns the written paths; identical params produce byte-identical files.
    """
    bundle = generate(params)
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "nodes": os.path.join(out_dir, "nodes.tsv"),
        "edges": os.path.join(out_dir, "edges.tsv"),
        "docs": os.path.join(out_dir, "docs.jsonl"),
        "ledger": os.path.join(out_dir, "ledger.json"),
    }
    with open(paths["nodes"], "w", encoding="utf-8", newline="\n") as f:
        f.writelines(bundle.node_lines)
    with open(paths["edges"], "w", encoding="utf-8", newline="\n") as f:
        f.writelines(bundle.edge_lines)
    with open(paths["docs"], "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(bundle.doc_lines()) + "\n")
    with open(paths["ledger"], "w", encoding="utf-8", newline="\n") as f:
        json.dump(bundle.ledger.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    return paths
