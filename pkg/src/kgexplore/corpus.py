"""Pre-linked document ingestion and corpus-level term statistics.

Documents arrive as line-delimited JSON with entity mentions already linked
to instance entities; there is no text processing here.  Mentions that the
graph does not know are dropped with a per-document warning count, and
documents left with no mentions are excluded from the corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .errors import CorpusFormatError
from .graph import KnowledgeGraph


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    mentions: dict[str, int]
    body: str | None = None
    unknown_dropped: int = 0

    def entities(self) -> set[str]:
        return set(self.mentions)


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    doc_frequency: dict[str, int] = field(default_factory=dict)


def parse_document_record(line: str, line_number: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as e:
        raise CorpusFormatError(f"line {line_number}: invalid JSON ({e.msg})") from None
    if not isinstance(record, dict):
        raise CorpusFormatError(f"line {line_number}: document record must be an object")
    for key in ("id", "title", "entities"):
        if key not in record:
            raise CorpusFormatError(f"line {line_number}: missing field {key!r}")
    if not isinstance(record["id"], str) or not record["id"]:
        raise CorpusFormatError(f"line {line_number}: document id must be a non-empty string")
    if not isinstance(record["entities"], list):
        raise CorpusFormatError(f"line {line_number}: 'entities' must be a list")
    return record


def ingest_documents(
    source: Iterable[str], graph: KnowledgeGraph
) -> tuple[list[Document], CorpusStats]:
    """Parse and filter a document stream against the graph's instance space.

    Returns surviving documents (original order) and stats computed over
    them; document frequency counts each mentioning document once.
    """
    documents: list[Document] = []
    seen_ids: set[str] = set()
    doc_frequency: dict[str, int] = {}
    for line_number, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        record = parse_document_record(line, line_number)
        doc_id = record["id"]
        if doc_id in seen_ids:
            raise CorpusFormatError(f"line {line_number}: duplicate document id {doc_id!r}")
        seen_ids.add(doc_id)
        mentions: dict[str, int] = {}
        dropped = 0
        for mention in record["entities"]:
            if (
                not isinstance(mention, dict)
                or not isinstance(mention.get("id"), str)
                or not isinstance(mention.get("count"), int)
                or mention["count"] < 1
            ):
                raise CorpusFormatError(
                    f"line {line_number}: entity mentions must be "
                    '{"id": str, "count": positive int}'
                )
            if graph.has_instance(mention["id"]):
                mentions[mention["id"]] = mentions.get(mention["id"], 0) + mention["count"]
            else:
                dropped += 1
        if not mentions:
            continue
        for entity in mentions:
            doc_frequency[entity] = doc_frequency.get(entity, 0) + 1
        documents.append(
            Document(
                id=doc_id,
                title=str(record["title"]),
                mentions=mentions,
                body=record.get("body"),
                unknown_dropped=dropped,
            )
        )
    return documents, CorpusStats(doc_count=len(documents), doc_frequency=doc_frequency)


def load_documents_file(path: str, graph: KnowledgeGraph) -> tuple[list[Document], CorpusStats]:
    with open(path, encoding="utf-8") as f:
        return ingest_documents(f, graph)
