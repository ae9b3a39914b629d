"""Read-only JSON-over-HTTP query service over a built index.

Everything is loaded once at startup and validated (the index must carry the
loaded graph's fingerprint); request handling is pure reads over shared
immutable state, and responses serialize engine outputs without reordering.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .corpus import Document, load_documents_file
from .engine import (
    ConceptQuery,
    match_documents,
    rollup_candidates,
    rollup_query,
    subtopic_rank,
)
from .errors import IndexFormatError, UnknownIdError
from .graph import KnowledgeGraph, load_graph_files
from .index import InvertedIndex, load_index

logger = logging.getLogger("kgexplore.service")


@dataclass(frozen=True)
class ServiceConfig:
    nodes_path: str
    edges_path: str
    docs_path: str
    index_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    max_k: int = 100
    max_query_size: int = 10
    rollup_depth: int = 2
    max_rollup_depth: int = 4
    # optional scoring-params echo; startup fails if the index header differs
    expected_params: dict | None = None


@dataclass
class ServiceState:
    config: ServiceConfig
    graph: KnowledgeGraph
    index: InvertedIndex
    documents: dict[str, Document] = field(default_factory=dict)


def build_state(config: ServiceConfig) -> ServiceState:
    graph = load_graph_files(config.nodes_path, config.edges_path)
    index = load_index(config.index_path)
    fingerprint = graph.fingerprint()
    if index.graph_fingerprint != fingerprint:
        raise IndexFormatError(
            f"index was built against graph {index.graph_fingerprint}, "
            f"loaded graph is {fingerprint}"
        )
    if config.expected_params is not None:
        echoed = index.params.to_dict()
        if config.expected_params != echoed:
            differing = sorted(
                k
                for k in set(config.expected_params) | set(echoed)
                if config.expected_params.get(k) != echoed.get(k)
            )
            raise IndexFormatError(
                f"index params differ from the configured echo on {differing}"
            )
    documents, _ = load_documents_file(config.docs_path, graph)
    logger.info(
        "loaded graph (%d instances, %d concepts), index (%d concepts), corpus (%d docs)",
        len(graph.instance_ids),
        len(graph.concept_ids),
        len(index.concepts()),
        len(documents),
    )
    return ServiceState(
        config=config, graph=graph, index=index, documents={d.id: d for d in documents}
    )


class QueryRequest(BaseModel):
    concepts: list[str] = Field(min_length=1)
    k: int = 10


def _concept_menu(state: ServiceState, entity: str, depth: int) -> list[dict]:
    menu = []
    for concept in rollup_candidates(state.graph, entity, depth):
        size = state.graph.instance_set_size(concept)
        specificity = (
            math.log(len(state.graph.instance_ids) / size) if size else None
        )
        menu.append(
            {"concept": concept, "instance_count": size, "specificity": specificity}
        )
    return menu


def _validated_query(state: ServiceState, request: QueryRequest) -> ConceptQuery:
    config = state.config
    if len(request.concepts) > config.max_query_size:
        raise HTTPException(
            status_code=400,
            detail=f"query names {len(request.concepts)} concepts, limit {config.max_query_size}",
        )
    if not 1 <= request.k <= config.max_k:
        raise HTTPException(status_code=400, detail=f"k must be in [1, {config.max_k}]")
    try:
        return ConceptQuery(concepts=tuple(request.concepts), k=request.k)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from None


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="kgexplore", docs_url=None, redoc_url=None)
    # read-only API consumed by the browser client from another origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/meta")
    def meta():
        return {
            "params": state.index.params.to_dict(),
            "graph_fingerprint": state.index.graph_fingerprint,
            "instance_count": state.index.instance_count,
            "document_count": len(state.documents),
            "indexed_concepts": len(state.index.concepts()),
            "limits": {
                "max_k": state.config.max_k,
                "max_query_size": state.config.max_query_size,
            },
        }

    @app.get("/api/documents/{doc_id}")
    def document(doc_id: str):
        doc = state.documents.get(doc_id)
        if doc is None:
            raise HTTPException(status_code=404, detail=f"unknown document {doc_id!r}")
        return {
            "id": doc.id,
            "title": doc.title,
            "body": doc.body,
            "mentions": [
                {
                    "entity": entity,
                    "count": count,
                    "concepts": _concept_menu(state, entity, state.config.rollup_depth),
                }
                for entity, count in sorted(doc.mentions.items())
            ],
        }

    @app.get("/api/entities/{entity_id}/rollups")
    def rollups(entity_id: str, depth: int = 2):
        if not 0 <= depth <= state.config.max_rollup_depth:
            raise HTTPException(
                status_code=400,
                detail=f"depth must be in [0, {state.config.max_rollup_depth}]",
            )
        try:
            menu = _concept_menu(state, entity_id, depth)
        except UnknownIdError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        return {"entity": entity_id, "depth": depth, "concepts": menu}

    @app.post("/api/query")
    def query(request: QueryRequest):
        concept_query = _validated_query(state, request)
        results, warnings = rollup_query(state.index, concept_query)
        return {
            "concepts": list(concept_query.concepts),
            "k": concept_query.k,
            "match_count": _match_count(concept_query),
            "warnings": list(warnings),
            "results": [
                {
                    "document": r.document,
                    "title": _title(r.document),
                    "rel": r.rel,
                    "per_concept": {
                        c: {
                            "cdr": m.cdr,
                            "pivot": m.pivot_entity,
                            "matched_entities": list(m.matched_entities),
                        }
                        for c, m in r.per_concept.items()
                    },
                }
                for r in results
            ],
        }

    @app.post("/api/subtopics")
    def subtopics(request: QueryRequest):
        concept_query = _validated_query(state, request)
        suggestions = subtopic_rank(state.index, concept_query)
        return {
            "concepts": list(concept_query.concepts),
            "k": concept_query.k,
            "suggestions": [
                {
                    "concept": s.concept,
                    "sbr": s.sbr,
                    "coverage": s.coverage,
                    "specificity": s.specificity,
                    "diversity": s.diversity,
                    "support_docs": s.support_docs,
                }
                for s in suggestions
            ],
        }

    def _title(doc_id: str) -> str | None:
        doc = state.documents.get(doc_id)
        return doc.title if doc else None

    def _match_count(concept_query: ConceptQuery) -> int:
        return len(match_documents(state.index, concept_query).documents)

    return app


def serve(config: ServiceConfig):
    """Load, validate, and serve until shutdown."""
    import uvicorn

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    state = build_state(config)
    app = create_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_config=None)
