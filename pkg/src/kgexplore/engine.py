"""Roll-up queries and drill-down subtopic ranking over a built index.

All operations are pure reads.  A document matches a concept-pattern query
when it has an index entry for every concept in the pattern; results are
ranked by the summed per-concept scores and every result carries the
per-concept explanation (score, pivot, matched entities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import KnowledgeGraph
from .index import InvertedIndex
from .scoring import IndexEntry


@dataclass(frozen=True)
class ConceptQuery:
    """Ordered, duplicate-free concept pattern plus a result budget."""

    concepts: tuple[str, ...]
    k: int = 10

    def __post_init__(self):
        if not self.concepts:
            raise ValueError("query must name at least one concept")
        if len(set(self.concepts)) != len(self.concepts):
            raise ValueError("query concepts must be distinct")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    def augmented(self, concept: str) -> "ConceptQuery":
        return ConceptQuery(concepts=self.concepts + (concept,), k=self.k)


@dataclass(frozen=True)
class ConceptMatch:
    cdr: float
    pivot_entity: str
    matched_entities: tuple[str, ...]


@dataclass(frozen=True)
class RankedDocument:
    document: str
    rel: float
    per_concept: dict[str, ConceptMatch] = field(default_factory=dict)


@dataclass(frozen=True)
class SubtopicSuggestion:
    concept: str
    sbr: float
    coverage: float
    specificity: float
    diversity: float
    support_docs: int


@dataclass(frozen=True)
class MatchResult:
    """Matched documents with their per-concept entries, plus any warnings
    (e.g. a concept the index has never seen)."""

    documents: dict[str, dict[str, IndexEntry]]
    warnings: tuple[str, ...] = ()

    def document_ids(self) -> set[str]:
        return set(self.documents)


def match_documents(index: InvertedIndex, query: ConceptQuery) -> MatchResult:
    """Documents holding an index entry for every concept of the query."""
    warnings = tuple(
        f"concept {c!r} is not in the index; no document can match"
        for c in query.concepts
        if not index.has_concept(c)
    )
    if warnings:
        return MatchResult(documents={}, warnings=warnings)
    ordered = sorted(query.concepts, key=lambda c: len(index.entries_for_concept(c)))
    matched: dict[str, dict[str, IndexEntry]] = {
        e.document: {ordered[0]: e} for e in index.entries_for_concept(ordered[0])
    }
    for concept in ordered[1:]:
        entries = {e.document: e for e in index.entries_for_concept(concept)}
        surviving = {}
        for doc, per_concept in matched.items():
            entry = entries.get(doc)
            if entry is not None:
                per_concept[concept] = entry
                surviving[doc] = per_concept
        matched = surviving
        if not matched:
            break
    return MatchResult(documents=matched)


def rollup_query(index: InvertedIndex, query: ConceptQuery) -> tuple[list[RankedDocument], tuple[str, ...]]:
    """Top-k matched documents by summed per-concept score, ties by id."""
    match = match_documents(index, query)
    ranked = []
    for doc, per_concept in match.documents.items():
        rel = sum(per_concept[c].cdr for c in query.concepts)
        ranked.append(
            RankedDocument(
                document=doc,
                rel=rel,
                per_concept={
                    c: ConceptMatch(
                        cdr=per_concept[c].cdr,
                        pivot_entity=per_concept[c].pivot_entity,
                        matched_entities=per_concept[c].matched_entities,
                    )
                    for c in query.concepts
                },
            )
        )
    ranked.sort(key=lambda r: (-r.rel, r.document))
    return ranked[: query.k], match.warnings


def rollup_candidates(graph: KnowledgeGraph, entity: str, depth: int) -> list[str]:
    """Concept menu for one entity: its concepts plus their broader ancestors,
    most specific (smallest instance set) first."""
    menu: set[str] = set()
    for concept in graph.concepts_of(entity):
        menu |= graph.broadened_concepts(concept, depth)
    return sorted(menu, key=lambda c: (graph.instance_set_size(c), c))


def candidate_subtopics(index: InvertedIndex, query: ConceptQuery) -> set[str]:
    """Concepts appearing in some matched document, excluding the query's own
    concepts and concepts with no instances (nothing to drill into)."""
    match = match_documents(index, query)
    candidates: set[str] = set()
    for doc in match.documents:
        for entry in index.entries_for_document(doc):
            candidates.add(entry.concept)
    candidates -= set(query.concepts)
    return {c for c in candidates if index.concept_sizes.get(c, 0) > 0}


def _components_over(
    index: InvertedIndex, concept: str, matched_docs: dict[str, dict[str, IndexEntry]]
) -> SubtopicSuggestion:
    size = index.concept_sizes.get(concept, 0)
    support_entries = [
        entry for doc in matched_docs if (entry := index.entry(concept, doc)) is not None
    ]
    if not support_entries or size == 0:
        raise ValueError(f"concept {concept!r} is not a candidate subtopic of this query")
    coverage = sum(e.cdr for e in support_entries)
    specificity = math.log(index.instance_count / size)
    distinct_entities: set[str] = set()
    for entry in support_entries:
        distinct_entities.update(entry.matched_entities)
    diversity = len(distinct_entities) / len(support_entries)
    return SubtopicSuggestion(
        concept=concept,
        sbr=coverage * specificity * diversity,
        coverage=coverage,
        specificity=specificity,
        diversity=diversity,
        support_docs=len(support_entries),
    )


def subtopic_components(
    index: InvertedIndex, concept: str, query: ConceptQuery
) -> tuple[float, float, float]:
    """(coverage, specificity, diversity) of a candidate subtopic.

    Coverage sums the concept's scores over the query's matched documents;
    specificity is the log inverse fraction of instances the concept maps
    to; diversity is the number of distinct matched entities averaged over
    the documents matching the augmented query.
    """
    match = match_documents(index, query)
    if not match.documents:
        raise ValueError("query matches no documents; no subtopic candidates exist")
    suggestion = _components_over(index, concept, match.documents)
    return suggestion.coverage, suggestion.specificity, suggestion.diversity


def subtopic_rank(index: InvertedIndex, query: ConceptQuery) -> list[SubtopicSuggestion]:
    """Top-k subtopics by the product of coverage, specificity, and diversity."""
    match = match_documents(index, query)
    suggestions = []
    for concept in sorted(candidate_subtopics(index, query)):
        suggestions.append(_components_over(index, concept, match.documents))
    suggestions.sort(key=lambda s: (-s.sbr, s.concept))
    return suggestions[: query.k]


def drilldown(
    index: InvertedIndex, query: ConceptQuery, subtopic: str
) -> tuple[list[RankedDocument], tuple[str, ...]]:
    """Roll-up on the query augmented with the chosen subtopic."""
    return rollup_query(index, query.augmented(subtopic))
