import pytest

from kgexplore.corpus import ingest_documents
from kgexplore.graph import load_graph
from kgexplore.index import build_index
from kgexplore.paths import ConnParams
from kgexplore.scoring import ScoringParams
from kgexplore.synth import SynthParams, generate

CHAIN_NODES = ["a\tinstance", "b\tinstance", "c\tinstance", "C1\tconcept"]
CHAIN_EDGES = ["a\tb\tinstance", "b\tc\tinstance", "a\tC1\tontology"]


@pytest.fixture
def chain_graph():
    """a - b - c with C1 mapping to a."""
    return load_graph(CHAIN_NODES, CHAIN_EDGES)


@pytest.fixture
def triangle_graph():
    nodes = ["a\tinstance", "b\tinstance", "c\tinstance"]
    edges = ["a\tb\tinstance", "b\tc\tinstance", "c\ta\tinstance"]
    return load_graph(nodes, edges)


@pytest.fixture
def hierarchy_graph():
    """Croot above Ca/Cb; Ca maps to x, Cb to y, Croot itself to nothing."""
    nodes = [
        "x\tinstance",
        "y\tinstance",
        "z\tinstance",
        "Ca\tconcept",
        "Cb\tconcept",
        "Croot\tconcept",
    ]
    edges = [
        "x\ty\tinstance",
        "y\tz\tinstance",
        "Ca\tCroot\tbroader",
        "Cb\tCroot\tbroader",
        "x\tCa\tontology",
        "y\tCb\tontology",
    ]
    return load_graph(nodes, edges)


@pytest.fixture(scope="session")
def synth_bundle():
    return generate(SynthParams(seed=11))


@pytest.fixture(scope="session")
def synth_graph(synth_bundle):
    return synth_bundle.build_graph()


@pytest.fixture(scope="session")
def synth_corpus(synth_bundle, synth_graph):
    return ingest_documents(synth_bundle.doc_lines(), synth_graph)


@pytest.fixture(scope="session")
def fixture_50docs():
    """50-document planted corpus with its graph, corpus, and built index."""
    bundle = generate(SynthParams(doc_count=50, seed=23))
    graph = bundle.build_graph()
    documents, stats = ingest_documents(bundle.doc_lines(), graph)
    params = ScoringParams(conn=ConnParams(tau=2, beta=0.5), theta=50, broaden_depth=2)
    index = build_index(graph, documents, stats, params, seed=5)
    return graph, documents, stats, index
