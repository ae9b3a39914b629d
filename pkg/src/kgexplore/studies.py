"""Desk-scale evaluation studies: estimator convergence and the
negative-concept context-relevance check.

Both studies are pure functions of their inputs and a seed, and both emit
plot-ready row tables (see `plots` for the figure rendering).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .corpus import Document, ingest_documents
from .estimator import ErrorProfile, estimator_error_profile
from .graph import KnowledgeGraph
from .index import InvertedIndex
from .paths import ConnParams, exact_conn
from .scoring import context_relevance, matched_context_split
from .synth import GeneratorLedger, SynthParams, generate


@dataclass(frozen=True)
class ConvergenceRow:
    theta: int
    mode: str
    mean_relative_error: float
    ci95: float
    samples: int


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: tuple[ConvergenceRow, ...]
    excluded: tuple[tuple[str, str], ...]
    profile: ErrorProfile

    def row(self, theta: int, mode: str) -> ConvergenceRow:
        for r in self.rows:
            if r.theta == theta and r.mode == mode:
                return r
        raise KeyError((theta, mode))


def convergence_study(
    graph: KnowledgeGraph,
    pairs: list[tuple[str, set[str]]],
    params: ConnParams,
    theta_grid: list[int],
    seeds: int,
    seed: int = 0,
    modes: tuple[str, ...] = ("pruned", "unpruned"),
    hop_cache_capacity: int | None = None,
) -> ConvergenceStudy:
    """Mean relative estimation error per (theta, mode), with a normal 95% CI."""
    profile = estimator_error_profile(
        graph,
        pairs,
        params,
        theta_grid,
        repeats=seeds,
        seed=seed,
        modes=modes,
        hop_cache_capacity=hop_cache_capacity,
    )
    rows = []
    for theta, mode, mean_error, count in profile.table():
        errors = [
            s.relative_error
            for s in profile.samples
            if s.theta == theta and s.mode == mode
        ]
        if count > 1:
            variance = sum((e - mean_error) ** 2 for e in errors) / (count - 1)
            ci95 = 1.96 * math.sqrt(variance / count)
        else:
            ci95 = 0.0
        rows.append(ConvergenceRow(theta, mode, mean_error, ci95, count))
    return ConvergenceStudy(rows=tuple(rows), excluded=profile.excluded, profile=profile)


def pairs_from_documents(
    graph: KnowledgeGraph,
    documents: list[Document],
    params: ConnParams,
    count: int,
    seed: int = 0,
    broaden_depth: int = 0,
    min_exact: float = 0.05,
) -> list[tuple[str, set[str]]]:
    """Draw (concept, context) evaluation pairs from real document structure.

    Candidates pair a concept directly matching the document with that
    document's context entities; pairs with negligible exact connectivity
    are skipped so relative error stays meaningful.
    """
    rng = random.Random(seed)
    order = list(range(len(documents)))
    rng.shuffle(order)
    pairs: list[tuple[str, set[str]]] = []
    seen: set[str] = set()
    for doc_index in order:
        if len(pairs) >= count:
            break
        document = documents[doc_index]
        concepts = sorted(
            {c for e in document.entities() for c in graph.concepts_of(e)}
        )
        rng.shuffle(concepts)
        for concept in concepts:
            if concept in seen:
                continue
            matched, context = matched_context_split(graph, concept, document, broaden_depth)
            if not matched or not context:
                continue
            if exact_conn(graph, concept, context, params) < min_exact:
                continue
            pairs.append((concept, context))
            seen.add(concept)
            break
    return pairs


def pairs_from_ledger(
    graph: KnowledgeGraph,
    documents: list[Document],
    ledger: GeneratorLedger,
    params: ConnParams,
    count: int,
    min_exact: float = 0.05,
) -> list[tuple[str, set[str]]]:
    """Evaluation pairs built from the generator's planted concepts: each
    pairs a document's planted concept with that document's context set."""
    by_id = {d.id: d for d in documents}
    pairs: list[tuple[str, set[str]]] = []
    seen: set[str] = set()
    for doc_id, concept in sorted(ledger.doc_positive_concepts.items()):
        if len(pairs) >= count:
            break
        if concept in seen:
            continue
        document = by_id.get(doc_id)
        if document is None:
            continue
        matched, context = matched_context_split(graph, concept, document, 0)
        if not matched or not context:
            continue
        if exact_conn(graph, concept, context, params) < min_exact:
            continue
        pairs.append((concept, context))
        seen.add(concept)
    return pairs


def default_convergence_suite(
    params: ConnParams, pair_count: int = 12, synth_seed: int = 7
) -> tuple[KnowledgeGraph, list[tuple[str, set[str]]]]:
    """The built-in synthetic suite used when no graph/corpus is supplied.

    Pairs come from the generator's ledger (planted concept vs its document's
    context), the closest desk-scale analog of measuring real index entries.
    """
    bundle = generate(SynthParams(seed=synth_seed))
    graph = bundle.build_graph()
    documents, _ = ingest_documents(bundle.doc_lines(), graph)
    pairs = pairs_from_ledger(graph, documents, bundle.ledger, params, pair_count)
    return graph, pairs


@dataclass(frozen=True)
class NegativeStudyRow:
    tau: int
    trials: int
    wins: int
    losses: int
    ties: int
    win_fraction: float
    mean_gap: float
    positive_zero_fraction: float
    p_value: float


@dataclass(frozen=True)
class NegativeStudy:
    rows: tuple[NegativeStudyRow, ...]

    def row(self, tau: int) -> NegativeStudyRow:
        for r in self.rows:
            if r.tau == tau:
                return r
        raise KeyError(tau)


def sign_test_p(wins: int, losses: int) -> float:
    """One-sided exact sign test: P(X >= wins) for X ~ Binomial(wins+losses, 1/2)."""
    n = wins + losses
    if n == 0:
        return 1.0
    total = sum(math.comb(n, k) for k in range(wins, n + 1))
    return total / 2.0**n


def negative_concept_study(
    graph: KnowledgeGraph,
    index: InvertedIndex,
    documents: list[Document],
    trials: int,
    seed: int = 0,
    taus: tuple[int, ...] = (1, 2, 3),
    beta: float = 0.5,
) -> NegativeStudy:
    """Does the context-relevance score separate indexed concepts from random
    negatives?

    Each trial samples an index entry (c, d) with a non-empty context and a
    uniform negative concept c' that has instances but none of them in d,
    then compares the exact context-relevance scores at each tau.
    """
    rng = random.Random(seed)
    docs_by_id = {d.id: d for d in documents}
    depth = index.params.broaden_depth
    eligible_entries = []
    for entry in index.all_entries():
        document = docs_by_id.get(entry.document)
        if document is None:
            continue
        if len(entry.matched_entities) < len(document.mentions):
            eligible_entries.append(entry)
    if not eligible_entries:
        raise ValueError("index has no entries with context entities")
    all_concepts = [
        c for c in graph.concept_ids if graph.concept_instances[graph.concept_handle(c)]
    ]

    outcomes: dict[int, list[tuple[float, float]]] = {tau: [] for tau in taus}
    for _ in range(trials):
        entry = rng.choice(eligible_entries)
        document = docs_by_id[entry.document]
        entities = document.entities()
        negatives = [
            c
            for c in all_concepts
            if c != entry.concept and not (graph.instances_of(c) & entities)
        ]
        if not negatives:
            raise ValueError(
                "corpus too small to draw disjoint negative concepts for "
                f"document {document.id!r}"
            )
        negative = rng.choice(negatives)
        for tau in taus:
            params = ConnParams(tau=tau, beta=beta)
            positive_score = _context_score(graph, entry.concept, document, depth, params)
            negative_score = _context_score(graph, negative, document, depth, params)
            outcomes[tau].append((positive_score, negative_score))

    rows = []
    for tau in taus:
        scored = outcomes[tau]
        wins = sum(1 for p, q in scored if p > q)
        losses = sum(1 for p, q in scored if p < q)
        ties = len(scored) - wins - losses
        gap = sum(p - q for p, q in scored) / len(scored)
        zero_fraction = sum(1 for p, _ in scored if p == 0.0) / len(scored)
        rows.append(
            NegativeStudyRow(
                tau=tau,
                trials=len(scored),
                wins=wins,
                losses=losses,
                ties=ties,
                win_fraction=wins / len(scored),
                mean_gap=gap,
                positive_zero_fraction=zero_fraction,
                p_value=sign_test_p(wins, losses),
            )
        )
    return NegativeStudy(rows=tuple(rows))


def _context_score(
    graph: KnowledgeGraph,
    concept: str,
    document: Document,
    depth: int,
    params: ConnParams,
) -> float:
    _, context = matched_context_split(graph, concept, document, depth)
    if not context:
        return 0.0
    if not graph.instances_of(concept):
        return 0.0
    return context_relevance(exact_conn(graph, concept, context, params))
