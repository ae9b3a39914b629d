"""Operator command line: graph validation, synthetic data, index builds,
queries, evaluation reports, and the query service.

Report commands write a header-rowed delimited table and render a matching
figure next to it.  Every command exits 0 on success and prints a single
``error: ...`` line to stderr otherwise.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click

from . import service as service_module
from .corpus import load_documents_file
from .engine import ConceptQuery, rollup_query, subtopic_rank
from .errors import KGExploreError
from .graph import load_graph_files
from .index import build_index, load_index, save_index
from .paths import ConnParams
from .scoring import ScoringParams
from .studies import (
    convergence_study,
    default_convergence_suite,
    negative_concept_study,
    pairs_from_documents,
)
from .synth import SynthParams, gen_synthetic

GRAPH_HELP = "nodes and edges files (two paths)"


def _fail_cleanly(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (KGExploreError, ValueError, OSError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(1)

    return wrapper


def _load_graph_pair(graph_paths):
    nodes_path, edges_path = graph_paths
    return load_graph_files(nodes_path, edges_path)


def _parse_concepts(raw: str) -> tuple[str, ...]:
    concepts = tuple(c.strip() for c in raw.split(",") if c.strip())
    if not concepts:
        raise ValueError("no concepts given")
    return concepts


def _write_table(path: str, header: list[str], rows: list[list]):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\t".join(header) + "\n")
        for row in rows:
            f.write("\t".join(str(cell) for cell in row) + "\n")


def _figure_path(table_path: str) -> str:
    base, _ = os.path.splitext(table_path)
    return base + ".png"


@click.group()
def main():
    """Knowledge-graph document exploration toolkit."""


@main.command("validate-graph")
@click.option("--graph", nargs=2, required=True, metavar="NODES EDGES", help=GRAPH_HELP)
@_fail_cleanly
def validate_graph(graph):
    """Load and validate a graph, printing its summary counts."""
    g = _load_graph_pair(graph)
    stats = g.stats()
    click.echo(
        f"ok: {stats.instance_count} instances, {stats.concept_count} concepts, "
        f"{stats.instance_edge_count} instance edges, {stats.broader_edge_count} broader edges, "
        f"{stats.ontology_pair_count} ontology pairs"
        + (f" ({g.self_loops_dropped} self-loops dropped)" if g.self_loops_dropped else "")
    )


@main.command("gen-synth")
@click.option("--out", required=True, type=click.Path(), help="output directory")
@click.option("--seed", default=0, show_default=True)
@click.option("--instances", default=300, show_default=True)
@click.option("--concepts", default=30, show_default=True)
@click.option("--docs", default=60, show_default=True)
@click.option("--mean-degree", default=6.0, show_default=True)
@click.option("--affinity", default=0.85, show_default=True)
@_fail_cleanly
def gen_synth(out, seed, instances, concepts, docs, mean_degree, affinity):
    """Generate a synthetic graph + corpus with a ground-truth ledger."""
    params = SynthParams(
        instance_count=instances,
        concept_count=concepts,
        doc_count=docs,
        mean_degree=mean_degree,
        cluster_affinity=affinity,
        seed=seed,
    )
    paths = gen_synthetic(params, out)
    for name, path in paths.items():
        click.echo(f"{name}\t{path}")


def _scoring_params(tau, beta, theta, broaden_depth, exact_conn, empty_context_cdr_c):
    return ScoringParams(
        conn=ConnParams(tau=tau, beta=beta),
        theta=theta,
        broaden_depth=broaden_depth,
        use_exact_conn=exact_conn,
        empty_context_cdr_c=empty_context_cdr_c,
    )


@main.command("build-index")
@click.option("--graph", nargs=2, required=True, metavar="NODES EDGES", help=GRAPH_HELP)
@click.option("--docs", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.option("--tau", default=2, show_default=True)
@click.option("--beta", default=0.5, show_default=True)
@click.option("--theta", default=50, show_default=True)
@click.option("--broaden-depth", default=2, show_default=True)
@click.option("--exact-conn", is_flag=True, help="use the exact oracle instead of sampling")
@click.option("--empty-context-cdr-c", default=1.0, show_default=True)
@click.option("--hop-cache-capacity", default=None, type=int)
@_fail_cleanly
def build_index_cmd(
    graph, docs, out, seed, tau, beta, theta, broaden_depth, exact_conn,
    empty_context_cdr_c, hop_cache_capacity,
):
    """Score every candidate concept-document pair and persist the index."""
    g = _load_graph_pair(graph)
    documents, stats = load_documents_file(docs, g)
    params = _scoring_params(tau, beta, theta, broaden_depth, exact_conn, empty_context_cdr_c)
    index = build_index(
        g, documents, stats, params, seed=seed, hop_cache_capacity=hop_cache_capacity
    )
    save_index(index, out)
    click.echo(
        f"indexed {len(index.all_entries())} entries over {len(index.concepts())} concepts "
        f"and {len(index.documents())} documents -> {out}"
        + (f" ({len(index.failures)} entries skipped)" if index.failures else "")
    )


@main.command("query")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--concepts", required=True, help="comma-separated concept ids")
@click.option("--k", default=10, show_default=True)
@_fail_cleanly
def query_cmd(index_path, concepts, k):
    """Roll-up query: one row per result document per concept."""
    index = load_index(index_path)
    query = ConceptQuery(concepts=_parse_concepts(concepts), k=k)
    results, warnings = rollup_query(index, query)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo("rank\tdocument\trel\tconcept\tcdr\tpivot\tmatched_entities")
    for rank, result in enumerate(results, start=1):
        for concept in query.concepts:
            match = result.per_concept[concept]
            click.echo(
                f"{rank}\t{result.document}\t{result.rel:.10g}\t{concept}\t"
                f"{match.cdr:.10g}\t{match.pivot_entity}\t{','.join(match.matched_entities)}"
            )


@main.command("subtopics")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--concepts", required=True, help="comma-separated concept ids")
@click.option("--k", default=10, show_default=True)
@_fail_cleanly
def subtopics_cmd(index_path, concepts, k):
    """Drill-down suggestions for a query, with score components."""
    index = load_index(index_path)
    query = ConceptQuery(concepts=_parse_concepts(concepts), k=k)
    suggestions = subtopic_rank(index, query)
    click.echo("rank\tconcept\tsbr\tcoverage\tspecificity\tdiversity\tsupport_docs")
    for rank, s in enumerate(suggestions, start=1):
        click.echo(
            f"{rank}\t{s.concept}\t{s.sbr:.10g}\t{s.coverage:.10g}\t"
            f"{s.specificity:.10g}\t{s.diversity:.10g}\t{s.support_docs}"
        )


@main.command("eval-sampling")
@click.option("--graph", nargs=2, default=None, metavar="NODES EDGES", help=GRAPH_HELP)
@click.option("--docs", default=None, type=click.Path(exists=True))
@click.option("--pairs", "pair_count", default=12, show_default=True)
@click.option("--theta-grid", default="1,5,10,20,50,100", show_default=True)
@click.option("--seeds", default=20, show_default=True)
@click.option("--mode", default="both", type=click.Choice(["both", "pruned", "unpruned"]))
@click.option("--tau", default=2, show_default=True)
@click.option("--beta", default=0.5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--plot/--no-plot", default=True, show_default=True)
@click.option("--hop-cache-capacity", default=None, type=int)
@_fail_cleanly
def eval_sampling(
    graph, docs, pair_count, theta_grid, seeds, mode, tau, beta, seed, out, plot,
    hop_cache_capacity,
):
    """Estimator convergence report: relative error per sample count and mode.

    Runs on the given graph/corpus, or on the built-in synthetic suite when
    none is supplied.
    """
    params = ConnParams(tau=tau, beta=beta)
    thetas = [int(t) for t in theta_grid.split(",") if t.strip()]
    if graph and docs:
        g = _load_graph_pair(graph)
        documents, _ = load_documents_file(docs, g)
        eval_pairs = pairs_from_documents(g, documents, params, pair_count, seed=seed)
    elif graph or docs:
        raise ValueError("--graph and --docs must be supplied together")
    else:
        g, eval_pairs = default_convergence_suite(params, pair_count)
    if not eval_pairs:
        raise ValueError("no usable (concept, context) pairs found")
    modes = ("pruned", "unpruned") if mode == "both" else (mode,)
    study = convergence_study(
        g, eval_pairs, params, thetas, seeds, seed=seed, modes=modes,
        hop_cache_capacity=hop_cache_capacity,
    )
    _write_table(
        out,
        ["theta", "mode", "mean_relative_error", "ci95", "samples"],
        [
            [r.theta, r.mode, f"{r.mean_relative_error:.6f}", f"{r.ci95:.6f}", r.samples]
            for r in study.rows
        ],
    )
    click.echo(f"wrote {out} ({len(study.rows)} rows, {len(eval_pairs)} pairs)")
    for concept, reason in study.excluded:
        click.echo(f"note: excluded pair {concept}: {reason}", err=True)
    if plot:
        from .plots import plot_convergence

        figure = _figure_path(out)
        plot_convergence(study, figure)
        click.echo(f"wrote {figure}")


@main.command("eval-negative")
@click.option("--graph", nargs=2, required=True, metavar="NODES EDGES", help=GRAPH_HELP)
@click.option("--docs", required=True, type=click.Path(exists=True))
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--trials", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--taus", default="1,2,3", show_default=True)
@click.option("--beta", default=0.5, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--plot/--no-plot", default=True, show_default=True)
@_fail_cleanly
def eval_negative(graph, docs, index_path, trials, seed, taus, beta, out, plot):
    """Negative-concept report: indexed pairs vs random disjoint concepts."""
    g = _load_graph_pair(graph)
    documents, _ = load_documents_file(docs, g)
    index = load_index(index_path)
    tau_values = tuple(int(t) for t in taus.split(",") if t.strip())
    study = negative_concept_study(
        g, index, documents, trials=trials, seed=seed, taus=tau_values, beta=beta
    )
    _write_table(
        out,
        [
            "tau", "trials", "wins", "losses", "ties", "win_fraction",
            "mean_gap", "positive_zero_fraction", "p_value",
        ],
        [
            [
                r.tau, r.trials, r.wins, r.losses, r.ties,
                f"{r.win_fraction:.6f}", f"{r.mean_gap:.6f}",
                f"{r.positive_zero_fraction:.6f}", f"{r.p_value:.3e}",
            ]
            for r in study.rows
        ],
    )
    click.echo(f"wrote {out} ({len(study.rows)} rows)")
    if plot:
        from .plots import plot_negative_study

        figure = _figure_path(out)
        plot_negative_study(study, figure)
        click.echo(f"wrote {figure}")


@main.command("serve")
@click.option("--graph", nargs=2, required=True, metavar="NODES EDGES", help=GRAPH_HELP)
@click.option("--docs", required=True, type=click.Path(exists=True))
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@_fail_cleanly
def serve_cmd(graph, docs, index_path, host, port):
    """Serve the query API over the given graph, corpus, and index.

    KGEXPLORE_LISTEN (host:port) overrides --host/--port.
    """
    listen = os.environ.get("KGEXPLORE_LISTEN")
    if listen:
        host, _, port_text = listen.rpartition(":")
        if not host or not port_text.isdigit():
            raise ValueError(f"KGEXPLORE_LISTEN must look like host:port, got {listen!r}")
        port = int(port_text)
    nodes_path, edges_path = graph
    config = service_module.ServiceConfig(
        nodes_path=nodes_path,
        edges_path=edges_path,
        docs_path=docs,
        index_path=index_path,
        host=host,
        port=port,
    )
    service_module.serve(config)


@main.command("graph-stats")
@click.option("--graph", nargs=2, required=True, metavar="NODES EDGES", help=GRAPH_HELP)
@_fail_cleanly
def graph_stats_cmd(graph):
    """Print graph summary counts as JSON."""
    g = _load_graph_pair(graph)
    stats = g.stats()
    click.echo(
        json.dumps(
            {
                "instance_count": stats.instance_count,
                "concept_count": stats.concept_count,
                "instance_edge_count": stats.instance_edge_count,
                "broader_edge_count": stats.broader_edge_count,
                "ontology_pair_count": stats.ontology_pair_count,
                "degree_histogram": {
                    str(k): v for k, v in sorted(stats.degree_histogram.items())
                },
                "self_loops_dropped": g.self_loops_dropped,
            }
        )
    )


if __name__ == "__main__":
    main()
