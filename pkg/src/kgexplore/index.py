"""Inverted concept-document index: build, persist, load.

The on-disk format is a UTF-8 text file: a magic/version line, a JSON header
(params echo, graph fingerprint, concept sizes), one canonical-JSON entry
per line, and a trailing SHA-256 checksum over everything above it.  Builds
are deterministic for a given graph, corpus, params, and seed, so rebuilds
are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from .corpus import CorpusStats, Document
from .errors import IndexFormatError, KGExploreError
from .graph import KnowledgeGraph
from .hops import KHopIndex
from .rng import keyed_seed
from .scoring import IndexEntry, ScoringParams, concept_document_rank

MAGIC = "NCEX"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class BuildFailure:
    concept: str
    document: str
    error: str


@dataclass
class InvertedIndex:
    """Immutable-after-build index with concept- and document-keyed views."""

    params: ScoringParams
    graph_fingerprint: str
    instance_count: int
    seed: int
    concept_sizes: dict[str, int] = field(default_factory=dict)
    failures: tuple[BuildFailure, ...] = ()
    _by_concept: dict[str, list[IndexEntry]] = field(default_factory=dict)
    _by_document: dict[str, list[IndexEntry]] = field(default_factory=dict)
    _by_pair: dict[tuple[str, str], IndexEntry] = field(default_factory=dict)

    @classmethod
    def from_entries(
        cls,
        entries: Iterable[IndexEntry],
        params: ScoringParams,
        graph_fingerprint: str,
        instance_count: int,
        seed: int,
        concept_sizes: dict[str, int],
        failures: tuple[BuildFailure, ...] = (),
    ) -> "InvertedIndex":
        index = cls(
            params=params,
            graph_fingerprint=graph_fingerprint,
            instance_count=instance_count,
            seed=seed,
            concept_sizes=dict(concept_sizes),
            failures=failures,
        )
        for entry in entries:
            key = (entry.concept, entry.document)
            if key in index._by_pair:
                raise KGExploreError(f"duplicate index entry for {key}")
            index._by_pair[key] = entry
            index._by_concept.setdefault(entry.concept, []).append(entry)
            index._by_document.setdefault(entry.document, []).append(entry)
        for entries_of_concept in index._by_concept.values():
            entries_of_concept.sort(key=lambda e: (-e.cdr, e.document))
        for entries_of_document in index._by_document.values():
            entries_of_document.sort(key=lambda e: e.concept)
        return index

    def has_concept(self, concept: str) -> bool:
        return concept in self._by_concept

    def concepts(self) -> list[str]:
        return sorted(self._by_concept)

    def documents(self) -> list[str]:
        return sorted(self._by_document)

    def entries_for_concept(self, concept: str) -> list[IndexEntry]:
        """Entries sorted by cdr descending, then document id ascending."""
        return list(self._by_concept.get(concept, ()))

    def entries_for_document(self, document: str) -> list[IndexEntry]:
        return list(self._by_document.get(document, ()))

    def entry(self, concept: str, document: str) -> IndexEntry | None:
        return self._by_pair.get((concept, document))

    def all_entries(self) -> list[IndexEntry]:
        """Every entry, sorted by (concept, document)."""
        return [self._by_pair[key] for key in sorted(self._by_pair)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return (
            self.params == other.params
            and self.graph_fingerprint == other.graph_fingerprint
            and self.instance_count == other.instance_count
            and self.seed == other.seed
            and self.concept_sizes == other.concept_sizes
            and self.failures == other.failures
            and self._by_pair == other._by_pair
        )


def candidate_concepts(
    graph: KnowledgeGraph, document: Document, broaden_depth: int
) -> list[str]:
    """Concepts the document can be indexed under: every concept of every
    mentioned entity, rolled up through broader edges to the given depth."""
    candidates: set[str] = set()
    for entity in document.entities():
        for concept in graph.concepts_of(entity):
            candidates |= graph.broadened_concepts(concept, broaden_depth)
    return sorted(candidates)


def build_index(
    graph: KnowledgeGraph,
    documents: list[Document],
    stats: CorpusStats,
    params: ScoringParams,
    seed: int = 0,
    hop_cache_capacity: int | None = None,
) -> InvertedIndex:
    """Score every candidate concept of every document and assemble the index.

    Per-entry sampling seeds are derived from the master seed and the entry
    key, so the build is order-independent and reproducible.  Entries whose
    scoring raises are recorded as failures and skipped.
    """
    if not documents:
        raise ValueError("corpus must be non-empty")
    hop_index = KHopIndex(graph, radius=params.conn.tau, capacity=hop_cache_capacity)
    entries: list[IndexEntry] = []
    failures: list[BuildFailure] = []
    touched_concepts: set[str] = set()
    for document in documents:
        for concept in candidate_concepts(graph, document, params.broaden_depth):
            entry_seed = keyed_seed(seed, concept, document.id)
            try:
                entry = concept_document_rank(
                    graph, stats, hop_index, concept, document, params, seed=entry_seed
                )
            except (ValueError, KGExploreError) as e:
                failures.append(BuildFailure(concept, document.id, str(e)))
                continue
            entries.append(entry)
            touched_concepts.add(concept)
    return InvertedIndex.from_entries(
        entries,
        params=params,
        graph_fingerprint=graph.fingerprint(),
        instance_count=len(graph.instance_ids),
        seed=seed,
        concept_sizes={c: graph.instance_set_size(c) for c in sorted(touched_concepts)},
        failures=tuple(failures),
    )


def _canonical(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _entry_record(entry: IndexEntry) -> dict:
    return {
        "concept": entry.concept,
        "document": entry.document,
        "cdr": entry.cdr,
        "cdr_o": entry.cdr_o,
        "cdr_c": entry.cdr_c,
        "pivot": entry.pivot_entity,
        "matched": list(entry.matched_entities),
        "estimate_meta": list(entry.estimate_meta) if entry.estimate_meta else None,
    }


def _entry_from_record(record: dict) -> IndexEntry:
    meta = record["estimate_meta"]
    return IndexEntry(
        concept=record["concept"],
        document=record["document"],
        cdr=record["cdr"],
        cdr_o=record["cdr_o"],
        cdr_c=record["cdr_c"],
        pivot_entity=record["pivot"],
        matched_entities=tuple(record["matched"]),
        estimate_meta=(meta[0], meta[1]) if meta else None,
    )


def save_index(index: InvertedIndex, sink: IO[str] | str):
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8", newline="\n") as f:
            save_index(index, f)
        return
    entries = index.all_entries()
    header = {
        "params": index.params.to_dict(),
        "graph_fingerprint": index.graph_fingerprint,
        "instance_count": index.instance_count,
        "seed": index.seed,
        "concept_sizes": index.concept_sizes,
        "entry_count": len(entries),
        "failures": [
            {"concept": f.concept, "document": f.document, "error": f.error}
            for f in index.failures
        ],
    }
    body = [f"{MAGIC} {FORMAT_VERSION}\n", _canonical(header) + "\n"]
    body.extend(_canonical(_entry_record(e)) + "\n" for e in entries)
    payload = "".join(body)
    digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    sink.write(payload)
    sink.write(f"checksum {digest}\n")


def load_index(source: IO[str] | str) -> InvertedIndex:
    if isinstance(source, str):
        with open(source, encoding="utf-8", newline="\n") as f:
            return load_index(f)
    lines = source.readlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise IndexFormatError("not an index file (bad magic bytes)")
    magic_line = lines[0].split()
    if len(magic_line) != 2 or magic_line[0] != MAGIC:
        raise IndexFormatError("malformed magic/version line")
    version = int(magic_line[1])
    if version != FORMAT_VERSION:
        raise IndexFormatError(
            f"index format version {version} not supported (expected {FORMAT_VERSION})"
        )
    if len(lines) < 3 or not lines[-1].startswith("checksum "):
        raise IndexFormatError("truncated index file (missing checksum line)")
    payload = "".join(lines[:-1])
    expected = lines[-1].split()[1]
    actual = hashlib.sha256(payload.encode("utf-8")).hexdigest()
    if actual != expected:
        raise IndexFormatError(f"checksum mismatch: file says {expected}, content is {actual}")
    try:
        header = json.loads(lines[1])
    except json.JSONDecodeError as e:
        raise IndexFormatError(f"unreadable header: {e.msg}") from None
    entry_lines = lines[2:-1]
    if len(entry_lines) != header["entry_count"]:
        raise IndexFormatError(
            f"truncated index file: header says {header['entry_count']} entries, "
            f"found {len(entry_lines)}"
        )
    entries = [_entry_from_record(json.loads(line)) for line in entry_lines]
    failures = tuple(
        BuildFailure(f["concept"], f["document"], f["error"]) for f in header["failures"]
    )
    return InvertedIndex.from_entries(
        entries,
        params=ScoringParams.from_dict(header["params"]),
        graph_fingerprint=header["graph_fingerprint"],
        instance_count=header["instance_count"],
        seed=header["seed"],
        concept_sizes=header["concept_sizes"],
        failures=failures,
    )
