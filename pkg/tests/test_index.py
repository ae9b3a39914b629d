import io
import json

import pytest

from kgexplore.corpus import ingest_documents
from kgexplore.errors import IndexFormatError
from kgexplore.graph import load_graph
from kgexplore.index import InvertedIndex, build_index, candidate_concepts, load_index, save_index
from kgexplore.scoring import ScoringParams


def _single_doc_fixture():
    graph = load_graph(
        ["a\tinstance", "C1\tconcept"], ["a\tC1\tontology"]
    )
    docs, stats = ingest_documents(
        [json.dumps({"id": "d1", "title": "t", "entities": [{"id": "a", "count": 1}]})],
        graph,
    )
    return graph, docs, stats


def test_single_doc_single_entry():
    graph, docs, stats = _single_doc_fixture()
    index = build_index(graph, docs, stats, ScoringParams(broaden_depth=0), seed=1)
    entries = index.all_entries()
    assert len(entries) == 1
    assert (entries[0].concept, entries[0].document) == ("C1", "d1")
    assert index.concept_sizes == {"C1": 1}
    assert index.instance_count == 1


def test_entry_count_matches_brute_force_candidates(hierarchy_graph):
    lines = [
        json.dumps({"id": "d1", "title": "t", "entities": [
            {"id": "x", "count": 1}, {"id": "z", "count": 1}]}),
        json.dumps({"id": "d2", "title": "t", "entities": [{"id": "y", "count": 2}]}),
        json.dumps({"id": "d3", "title": "t", "entities": [
            {"id": "x", "count": 1}, {"id": "y", "count": 1}]}),
    ]
    docs, stats = ingest_documents(lines, hierarchy_graph)
    params = ScoringParams(broaden_depth=1, use_exact_conn=True)
    index = build_index(hierarchy_graph, docs, stats, params, seed=0)
    # brute force: every (concept, doc) whose broadened instance pool hits the doc
    expected = set()
    for doc in docs:
        for concept in hierarchy_graph.concept_ids:
            pool = set()
            for descendant in hierarchy_graph.narrower_descendants(concept, 1):
                pool |= hierarchy_graph.instances_of(descendant)
            if doc.entities() & pool:
                expected.add((concept, doc.id))
    got = {(e.concept, e.document) for e in index.all_entries()}
    assert got == expected
    assert candidate_concepts(hierarchy_graph, docs[0], 1) == sorted(
        c for c, d in expected if d == "d1"
    )


def test_entries_for_concept_ordering(fixture_50docs):
    _, _, _, index = fixture_50docs
    for concept in index.concepts():
        entries = index.entries_for_concept(concept)
        keys = [(-e.cdr, e.document) for e in entries]
        assert keys == sorted(keys)


def test_rebuild_same_seed_byte_identical(fixture_50docs):
    graph, documents, stats, index = fixture_50docs
    rebuilt = build_index(graph, documents, stats, index.params, seed=index.seed)
    first, second = io.StringIO(), io.StringIO()
    save_index(index, first)
    save_index(rebuilt, second)
    assert first.getvalue() == second.getvalue()


def test_different_seed_changes_sampled_scores(fixture_50docs):
    graph, documents, stats, index = fixture_50docs
    other = build_index(graph, documents, stats, index.params, seed=index.seed + 1)
    assert any(
        a.cdr_c != b.cdr_c
        for a, b in zip(index.all_entries(), other.all_entries())
    )


def test_save_load_round_trip(fixture_50docs):
    _, _, _, index = fixture_50docs
    buffer = io.StringIO()
    save_index(index, buffer)
    loaded = load_index(io.StringIO(buffer.getvalue()))
    assert loaded == index
    assert loaded.all_entries() == index.all_entries()
    for concept in index.concepts():
        assert loaded.entries_for_concept(concept) == index.entries_for_concept(concept)


def test_file_round_trip(tmp_path, fixture_50docs):
    _, _, _, index = fixture_50docs
    path = str(tmp_path / "fixture.ncex")
    save_index(index, path)
    assert load_index(path) == index


def test_corrupted_byte_fails_checksum(fixture_50docs):
    _, _, _, index = fixture_50docs
    buffer = io.StringIO()
    save_index(index, buffer)
    text = buffer.getvalue()
    position = text.index('"cdr":') + 8
    corrupted = text[:position] + ("1" if text[position] != "1" else "2") + text[position + 1:]
    with pytest.raises(IndexFormatError, match="checksum"):
        load_index(io.StringIO(corrupted))


def test_truncated_file(fixture_50docs):
    _, _, _, index = fixture_50docs
    buffer = io.StringIO()
    save_index(index, buffer)
    lines = buffer.getvalue().splitlines(keepends=True)
    with pytest.raises(IndexFormatError, match="checksum line"):
        load_index(io.StringIO("".join(lines[:-1])))
    with pytest.raises(IndexFormatError, match="truncated|checksum"):
        load_index(io.StringIO("".join(lines[:2] + [lines[-1]])))


def test_bad_magic_and_version():
    with pytest.raises(IndexFormatError, match="magic"):
        load_index(io.StringIO("WHAT 1\n"))
    graph, docs, stats = _single_doc_fixture()
    index = build_index(graph, docs, stats, ScoringParams(broaden_depth=0), seed=1)
    buffer = io.StringIO()
    save_index(index, buffer)
    bumped = buffer.getvalue().replace("NCEX 1", "NCEX 9", 1)
    with pytest.raises(IndexFormatError, match="version"):
        load_index(io.StringIO(bumped))


def test_empty_index_round_trip():
    empty = InvertedIndex.from_entries(
        [],
        params=ScoringParams(),
        graph_fingerprint="abc",
        instance_count=0,
        seed=0,
        concept_sizes={},
    )
    buffer = io.StringIO()
    save_index(empty, buffer)
    loaded = load_index(io.StringIO(buffer.getvalue()))
    assert loaded == empty
    assert loaded.all_entries() == []


def test_params_echo_round_trip(fixture_50docs):
    _, _, _, index = fixture_50docs
    assert ScoringParams.from_dict(index.params.to_dict()) == index.params


def test_build_requires_documents():
    graph, _, stats = _single_doc_fixture()
    with pytest.raises(ValueError, match="non-empty"):
        build_index(graph, [], stats, ScoringParams(), seed=0)
