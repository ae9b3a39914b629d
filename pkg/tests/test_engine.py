import math
import random

import pytest

from kgexplore.engine import (
    ConceptQuery,
    candidate_subtopics,
    drilldown,
    match_documents,
    rollup_candidates,
    rollup_query,
    subtopic_components,
    subtopic_rank,
)
from kgexplore.index import InvertedIndex
from kgexplore.scoring import IndexEntry, ScoringParams


def _entry(concept, document, cdr, matched, pivot=None):
    return IndexEntry(
        concept=concept,
        document=document,
        cdr=cdr,
        cdr_o=cdr,
        cdr_c=1.0,
        pivot_entity=pivot or matched[0],
        matched_entities=tuple(matched),
    )


def _hand_index(entries, concept_sizes, instance_count):
    return InvertedIndex.from_entries(
        entries,
        params=ScoringParams(),
        graph_fingerprint="hand",
        instance_count=instance_count,
        seed=0,
        concept_sizes=concept_sizes,
    )


def _brute_force_matches(graph, documents, concepts, depth):
    """Independent matcher: a document matches a concept when any mention
    falls in the concept's broadened instance pool."""
    pools = {}
    for concept in concepts:
        pool = set()
        for descendant in graph.narrower_descendants(concept, depth):
            pool |= graph.instances_of(descendant)
        pools[concept] = pool
    return {
        doc.id
        for doc in documents
        if all(doc.entities() & pools[c] for c in concepts)
    }


def test_query_validation():
    with pytest.raises(ValueError):
        ConceptQuery(concepts=())
    with pytest.raises(ValueError):
        ConceptQuery(concepts=("A", "A"))
    with pytest.raises(ValueError):
        ConceptQuery(concepts=("A",), k=0)


def test_single_concept_match():
    index = _hand_index(
        [_entry("C1", "d1", 0.7, ["a"])], {"C1": 3}, instance_count=10
    )
    result = match_documents(index, ConceptQuery(concepts=("C1",)))
    assert result.document_ids() == {"d1"}
    ranked, warnings = rollup_query(index, ConceptQuery(concepts=("C1",)))
    assert warnings == ()
    assert len(ranked) == 1
    assert ranked[0].rel == 0.7
    assert ranked[0].per_concept["C1"].cdr == 0.7


def test_disjoint_concepts_match_nothing():
    index = _hand_index(
        [_entry("C1", "d1", 0.7, ["a"]), _entry("C2", "d2", 0.2, ["b"])],
        {"C1": 3, "C2": 3},
        instance_count=10,
    )
    assert match_documents(index, ConceptQuery(concepts=("C1", "C2"))).documents == {}


def test_unknown_concept_warns_not_raises():
    index = _hand_index([_entry("C1", "d1", 0.7, ["a"])], {"C1": 3}, 10)
    result = match_documents(index, ConceptQuery(concepts=("C1", "Cmissing")))
    assert result.documents == {}
    assert any("Cmissing" in w for w in result.warnings)
    ranked, warnings = rollup_query(index, ConceptQuery(concepts=("Cmissing",)))
    assert ranked == [] and len(warnings) == 1


def test_matching_equivalence_against_brute_force(fixture_50docs):
    graph, documents, _, index = fixture_50docs
    assert not index.failures, "oracle requires a complete index"
    depth = index.params.broaden_depth
    rng = random.Random(99)
    concepts = index.concepts()
    for _ in range(100):
        query_concepts = tuple(rng.sample(concepts, rng.randint(1, 3)))
        query = ConceptQuery(concepts=query_concepts, k=1000)
        got = match_documents(index, query).document_ids()
        expected = _brute_force_matches(graph, documents, query_concepts, depth)
        assert got == expected


def test_rollup_ordering_and_rel_sum(fixture_50docs):
    _, _, _, index = fixture_50docs
    rng = random.Random(7)
    concepts = index.concepts()
    for _ in range(25):
        query = ConceptQuery(concepts=tuple(rng.sample(concepts, 2)), k=1000)
        ranked, _ = rollup_query(index, query)
        keys = [(-r.rel, r.document) for r in ranked]
        assert keys == sorted(keys)
        for result in ranked:
            expected_rel = sum(
                index.entry(c, result.document).cdr for c in query.concepts
            )
            assert result.rel == pytest.approx(expected_rel, abs=1e-9)


def test_k_larger_than_match_count():
    entries = [_entry("C1", f"d{i}", 0.1 * (i + 1), ["a"]) for i in range(3)]
    index = _hand_index(entries, {"C1": 3}, 10)
    ranked, _ = rollup_query(index, ConceptQuery(concepts=("C1",), k=50))
    assert [r.document for r in ranked] == ["d2", "d1", "d0"]


def test_rollup_candidates_menu(hierarchy_graph):
    assert rollup_candidates(hierarchy_graph, "x", 0) == ["Ca"]
    # Croot has no instances: sorts first (most specific key is size 0)
    assert rollup_candidates(hierarchy_graph, "x", 1) == ["Croot", "Ca"]


def test_rollup_candidates_ordering_by_specificity(synth_graph):
    rng = random.Random(4)
    for entity in rng.sample(synth_graph.instance_ids, 20):
        menu = rollup_candidates(synth_graph, entity, 2)
        expected = set()
        for concept in synth_graph.concepts_of(entity):
            expected |= synth_graph.broadened_concepts(concept, 2)
        assert set(menu) == expected
        keys = [(synth_graph.instance_set_size(c), c) for c in menu]
        assert keys == sorted(keys)


def test_candidate_subtopics_excludes_query():
    entries = [
        _entry("Q", "d1", 0.5, ["a"]),
        _entry("X", "d1", 0.4, ["b"]),
        _entry("Y", "d2", 0.3, ["c"]),
    ]
    index = _hand_index(entries, {"Q": 2, "X": 2, "Y": 2}, 10)
    assert candidate_subtopics(index, ConceptQuery(concepts=("Q",))) == {"X"}


def test_candidate_subtopics_empty_when_no_match():
    index = _hand_index([_entry("Q", "d1", 0.5, ["a"])], {"Q": 2}, 10)
    assert candidate_subtopics(index, ConceptQuery(concepts=("Q", "Zmissing"))) == set()


def test_subtopic_components_one_doc_pin():
    entries = [
        _entry("Q", "d1", 0.9, ["q1"]),
        _entry("C", "d1", 0.5, ["e1"]),
    ]
    index = _hand_index(entries, {"Q": 2, "C": 4}, instance_count=100)
    coverage, specificity, diversity = subtopic_components(
        index, "C", ConceptQuery(concepts=("Q",))
    )
    assert coverage == 0.5
    assert specificity == pytest.approx(math.log(100 / 4), abs=1e-12)
    assert diversity == 1.0


def test_subtopic_diversity_penalizes_single_popular_entity():
    entries = [_entry("Q", f"d{i}", 0.5, ["q1"]) for i in range(4)]
    entries += [_entry("C", f"d{i}", 0.5, ["star"]) for i in range(4)]
    index = _hand_index(entries, {"Q": 2, "C": 4}, instance_count=100)
    _, _, diversity = subtopic_components(index, "C", ConceptQuery(concepts=("Q",)))
    assert diversity == 1 / 4


def test_subtopic_non_candidate_rejected():
    index = _hand_index([_entry("Q", "d1", 0.5, ["a"])], {"Q": 2}, 10)
    with pytest.raises(ValueError, match="not a candidate"):
        subtopic_components(index, "Nope", ConceptQuery(concepts=("Q",)))


def _twenty_doc_fixture():
    """Hand fixture: 20 documents, one query concept, four candidates, one of
    them specificity-zero."""
    instance_count = 64
    sizes = {"Q0": 4, "A": 2, "B": 8, "R": 16, "Z": 64}
    entries = []
    for i in range(20):
        doc = f"d{i:02d}"
        entries.append(_entry("Q0", doc, 0.30 + 0.01 * i, [f"q{i % 3}"]))
        entries.append(_entry("Z", doc, 0.05, ["z0"]))
    for i in range(0, 10):
        entries.append(_entry("A", f"d{i:02d}", 0.40 + 0.02 * i, [f"a{i % 2}"]))
    for i in range(5, 15):
        entries.append(_entry("B", f"d{i:02d}", 0.20 + 0.03 * i, [f"b{i % 4}"]))
    for i in range(10, 20):
        entries.append(_entry("R", f"d{i:02d}", 0.10 + 0.01 * i, [f"r{i % 2}"]))
    return _hand_index(entries, sizes, instance_count), sizes, instance_count


def test_sbr_matches_spreadsheet_recomputation():
    index, sizes, instance_count = _twenty_doc_fixture()
    query = ConceptQuery(concepts=("Q0",), k=10)
    suggestions = {s.concept: s for s in subtopic_rank(index, query)}
    assert set(suggestions) == {"A", "B", "R", "Z"}

    matched_docs = [f"d{i:02d}" for i in range(20)]
    for concept in ("A", "B", "R", "Z"):
        rows = [
            index.entry(concept, doc) for doc in matched_docs
            if index.entry(concept, doc) is not None
        ]
        coverage = sum(e.cdr for e in rows)
        specificity = math.log(instance_count / sizes[concept])
        entity_union = set()
        for e in rows:
            entity_union.update(e.matched_entities)
        diversity = len(entity_union) / len(rows)
        suggestion = suggestions[concept]
        assert suggestion.coverage == pytest.approx(coverage, abs=1e-9)
        assert suggestion.specificity == pytest.approx(specificity, abs=1e-9)
        assert suggestion.diversity == pytest.approx(diversity, abs=1e-9)
        assert suggestion.sbr == pytest.approx(coverage * specificity * diversity, abs=1e-9)
        assert suggestion.support_docs == len(rows)

    # hand-checked spot values
    assert suggestions["A"].specificity == pytest.approx(math.log(32), abs=1e-12)
    assert suggestions["A"].diversity == 1 / 5  # two distinct entities over ten docs
    assert suggestions["A"].coverage == pytest.approx(sum(0.40 + 0.02 * i for i in range(10)))
    assert suggestions["Z"].sbr == 0.0  # specificity log(64/64) = 0
    # the specificity-zero concept ranks behind every positive-sbr candidate
    order = [s.concept for s in subtopic_rank(index, query)]
    assert order[-1] == "Z"
    positive = [c for c in order if suggestions[c].sbr > 0]
    assert order[: len(positive)] == positive


def test_subtopic_rank_deterministic(fixture_50docs):
    _, _, _, index = fixture_50docs
    concepts = index.concepts()
    query = ConceptQuery(concepts=(concepts[0],), k=10)
    assert subtopic_rank(index, query) == subtopic_rank(index, query)


def test_subtopic_rank_on_built_index(fixture_50docs):
    _, _, _, index = fixture_50docs
    query = ConceptQuery(concepts=(index.concepts()[0],), k=5)
    suggestions = subtopic_rank(index, query)
    assert suggestions
    sbrs = [s.sbr for s in suggestions]
    assert sbrs == sorted(sbrs, reverse=True)
    for s in suggestions:
        assert s.sbr == pytest.approx(s.coverage * s.specificity * s.diversity, abs=1e-9)
        assert s.support_docs >= 1


def test_drilldown_narrows_and_equals_augmented_query(fixture_50docs):
    _, _, _, index = fixture_50docs
    rng = random.Random(13)
    concepts = index.concepts()
    checked = 0
    for _ in range(60):
        base = ConceptQuery(concepts=(rng.choice(concepts),), k=1000)
        matched = match_documents(index, base).document_ids()
        candidates = sorted(candidate_subtopics(index, base))
        if not candidates:
            continue
        subtopic = rng.choice(candidates)
        narrowed, _ = drilldown(index, base, subtopic)
        narrowed_ids = {r.document for r in narrowed}
        assert narrowed_ids, "drill-down on a candidate cannot be empty"
        assert narrowed_ids <= matched
        direct, _ = rollup_query(index, base.augmented(subtopic))
        assert narrowed == direct
        checked += 1
    assert checked >= 30
