"""Concept-document relevance scoring.

A concept is relevant to a document along two multiplied dimensions:
ontology relevance (how specifically the concept categorizes the document's
strongest matching entity) and context relevance (how well the concept's
instances connect to the document's remaining entities in the instance
graph).  Context relevance comes from the connectivity score, computed
exactly or by the sampling estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .corpus import CorpusStats, Document
from .estimator import estimate_conn
from .graph import KnowledgeGraph
from .hops import KHopIndex
from .paths import ConnParams, exact_conn


@dataclass(frozen=True)
class ScoringParams:
    """Indexing-time knobs; defaults follow the system-wide defaults
    (tau=2, beta=0.5, theta=50)."""

    conn: ConnParams = field(default_factory=ConnParams)
    theta: int = 50
    broaden_depth: int = 2
    use_exact_conn: bool = False
    empty_context_cdr_c: float = 1.0

    def __post_init__(self):
        if self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.broaden_depth < 0:
            raise ValueError("broaden_depth must be >= 0")
        if not 0.0 <= self.empty_context_cdr_c <= 1.0:
            raise ValueError("empty_context_cdr_c must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "tau": self.conn.tau,
            "beta": self.conn.beta,
            "theta": self.theta,
            "broaden_depth": self.broaden_depth,
            "use_exact_conn": self.use_exact_conn,
            "empty_context_cdr_c": self.empty_context_cdr_c,
            "log_base": "e",
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScoringParams":
        return cls(
            conn=ConnParams(tau=data["tau"], beta=data["beta"]),
            theta=data["theta"],
            broaden_depth=data["broaden_depth"],
            use_exact_conn=data["use_exact_conn"],
            empty_context_cdr_c=data["empty_context_cdr_c"],
        )


@dataclass(frozen=True)
class IndexEntry:
    """One persisted concept-document pairing with its score breakdown."""

    concept: str
    document: str
    cdr: float
    cdr_o: float
    cdr_c: float
    pivot_entity: str
    matched_entities: tuple[str, ...]
    estimate_meta: tuple[int, int] | None = None  # (theta, seed) when cdr_c was sampled


class OntologyScore(NamedTuple):
    score: float
    pivot_entity: str
    anchor_concept: str


def term_weight(stats: CorpusStats, entity: str, document: Document) -> float:
    """Mention count times log inverse document frequency."""
    count = document.mentions.get(entity)
    if count is None:
        raise ValueError(f"entity {entity!r} is not mentioned in document {document.id!r}")
    return count * math.log(stats.doc_count / stats.doc_frequency[entity])


def matched_context_split(
    graph: KnowledgeGraph, concept: str, document: Document, broaden_depth: int
) -> tuple[set[str], set[str]]:
    """Partition the document's entities into matched and context sets.

    Matching uses the concept's instances unioned over its narrower
    descendants within `broaden_depth`; depth 0 is the plain ontology match.
    """
    matched_pool: set[str] = set()
    for descendant in graph.narrower_descendants(concept, broaden_depth):
        matched_pool |= graph.instances_of(descendant)
    entities = document.entities()
    matched = entities & matched_pool
    return matched, entities - matched


def ontology_relevance(
    graph: KnowledgeGraph,
    stats: CorpusStats,
    concept: str,
    document: Document,
    params: ScoringParams,
) -> OntologyScore:
    """Specificity-weighted term weight of the best matching entity.

    A concept whose own instances match the document scores directly; a
    broad concept matched only through narrower descendants takes the best
    directly-scored descendant instead, and that descendant's pivot.
    """
    instance_count = len(graph.instance_ids)
    direct = document.entities() & graph.instances_of(concept)
    if direct:
        return _direct_score(graph, stats, concept, document, direct, instance_count)
    best: OntologyScore | None = None
    for descendant in sorted(graph.narrower_descendants(concept, params.broaden_depth)):
        if descendant == concept:
            continue
        matched = document.entities() & graph.instances_of(descendant)
        if not matched:
            continue
        candidate = _direct_score(graph, stats, descendant, document, matched, instance_count)
        if best is None or candidate.score > best.score:
            best = candidate
    if best is None:
        raise ValueError(
            f"unmatchable concept {concept!r}: no direct or descendant match in "
            f"document {document.id!r}"
        )
    return best


def _direct_score(
    graph: KnowledgeGraph,
    stats: CorpusStats,
    concept: str,
    document: Document,
    matched: set[str],
    instance_count: int,
) -> OntologyScore:
    specificity = math.log(instance_count / graph.instance_set_size(concept))
    pivot, best_weight = None, -1.0
    for entity in sorted(matched):
        weight = term_weight(stats, entity, document)
        if weight > best_weight:
            pivot, best_weight = entity, weight
    return OntologyScore(score=specificity * best_weight, pivot_entity=pivot, anchor_concept=concept)


def context_relevance(conn_value: float) -> float:
    """Squash a connectivity score into [0, 1): conn / (1 + conn)."""
    if conn_value < 0:
        raise ValueError("connectivity score must be >= 0")
    return conn_value / (1.0 + conn_value)


def concept_document_rank(
    graph: KnowledgeGraph,
    stats: CorpusStats,
    hop_index: KHopIndex,
    concept: str,
    document: Document,
    params: ScoringParams,
    seed: int = 0,
) -> IndexEntry:
    """Full two-factor score for one concept-document pair.

    Context relevance uses the exact oracle or the sampling estimator per
    `params.use_exact_conn`.  An empty context set falls back to the
    configured policy value; a concept with no instances of its own gets a
    zero connectivity score outright (no sources, no paths).
    """
    matched, context = matched_context_split(graph, concept, document, params.broaden_depth)
    if not matched:
        raise ValueError(
            f"concept {concept!r} does not match document {document.id!r} "
            f"at broaden depth {params.broaden_depth}"
        )
    ontology = ontology_relevance(graph, stats, concept, document, params)
    estimate_meta = None
    if not context:
        cdr_c = params.empty_context_cdr_c
    elif not graph.instances_of(concept):
        cdr_c = context_relevance(0.0)
    elif params.use_exact_conn:
        cdr_c = context_relevance(exact_conn(graph, concept, context, params.conn))
    else:
        estimate = estimate_conn(
            graph,
            hop_index,
            concept,
            context,
            params.conn,
            theta=params.theta,
            seed=seed,
            pruned=True,
        )
        cdr_c = context_relevance(estimate.mean)
        estimate_meta = (params.theta, seed)
    return IndexEntry(
        concept=concept,
        document=document.id,
        cdr=ontology.score * cdr_c,
        cdr_o=ontology.score,
        cdr_c=cdr_c,
        pivot_entity=ontology.pivot_entity,
        matched_entities=tuple(sorted(matched)),
        estimate_meta=estimate_meta,
    )
