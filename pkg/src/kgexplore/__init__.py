"""Knowledge-graph backed document exploration.

Concept roll-up retrieval and drill-down subtopic suggestion over a
two-space knowledge graph, with connectivity scoring computed exactly or by
a pruned random-walk estimator.
"""

from .corpus import CorpusStats, Document, ingest_documents, load_documents_file
from .engine import (
    ConceptQuery,
    RankedDocument,
    SubtopicSuggestion,
    candidate_subtopics,
    drilldown,
    match_documents,
    rollup_candidates,
    rollup_query,
    subtopic_components,
    subtopic_rank,
)
from .estimator import ConnEstimate, WalkOutcome, estimate_conn, estimator_error_profile, single_walk
from .graph import KnowledgeGraph, graph_stats, load_graph, load_graph_files
from .hops import HopMap, KHopIndex, build_hop_map, build_khop_index
from .index import InvertedIndex, build_index, load_index, save_index
from .paths import ConnParams, count_simple_paths, enumerate_paths, exact_conn
from .scoring import (
    IndexEntry,
    ScoringParams,
    concept_document_rank,
    context_relevance,
    matched_context_split,
    ontology_relevance,
    term_weight,
)
from .synth import GeneratorLedger, SynthParams, gen_synthetic, generate

__version__ = "0.1.0"

__all__ = [
    "ConceptQuery",
    "ConnEstimate",
    "ConnParams",
    "CorpusStats",
    "Document",
    "GeneratorLedger",
    "HopMap",
    "IndexEntry",
    "InvertedIndex",
    "KHopIndex",
    "KnowledgeGraph",
    "RankedDocument",
    "ScoringParams",
    "SubtopicSuggestion",
    "SynthParams",
    "WalkOutcome",
    "build_hop_map",
    "build_index",
    "build_khop_index",
    "candidate_subtopics",
    "concept_document_rank",
    "context_relevance",
    "count_simple_paths",
    "drilldown",
    "enumerate_paths",
    "estimate_conn",
    "estimator_error_profile",
    "exact_conn",
    "gen_synthetic",
    "generate",
    "graph_stats",
    "ingest_documents",
    "load_documents_file",
    "load_graph",
    "load_graph_files",
    "load_index",
    "match_documents",
    "matched_context_split",
    "ontology_relevance",
    "rollup_candidates",
    "rollup_query",
    "save_index",
    "single_walk",
    "subtopic_components",
    "subtopic_rank",
    "term_weight",
]
