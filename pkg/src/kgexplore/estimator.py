"""Single random-walk estimator for the connectivity score.

Each walk starts at a uniform instance of the concept, targets a uniform
context entity, and advances by scanning the current node's neighbors once,
keeping one eligible neighbor via reservoir selection.  Eligible means not
yet visited, and in pruned mode also able to reach the target within the
remaining hop budget.  A walk that reaches the target contributes the
inverse of its sampling probability, damped by path length; dead ends and
exhausted budgets contribute zero but still count toward the sample size,
which is what keeps the estimate unbiased.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterable, Sequence

from .graph import KnowledgeGraph
from .hops import KHopIndex
from .paths import ConnParams, exact_conn
from .rng import keyed_seed, substream


@dataclass(frozen=True)
class WalkOutcome:
    """One walk's result: reached the target or not, and the bookkeeping
    needed for its inverse-probability contribution.

    `nodes_sampled` counts the source; `inverse_probability` is the product
    of eligible-neighbor counts over the steps taken, including the step
    that sampled the target itself.
    """

    success: bool
    nodes_sampled: int
    inverse_probability: float
    contribution: float
    path: tuple[str, ...]


@dataclass(frozen=True)
class ConnEstimate:
    mean: float
    theta: int
    success_count: int
    sample_variance: float
    seed: int

    @property
    def std_error(self) -> float:
        return (self.sample_variance / self.theta) ** 0.5


def _run_walk(
    adjacency: Sequence[Sequence[int]],
    sources: Sequence[int],
    target: int,
    tau: int,
    rng: Random,
    dist: dict[int, int] | None,
    trail: list[int] | None,
) -> tuple[bool, int, float]:
    """Walk core on integer handles; `dist` None means unpruned mode."""
    random_ = rng.random
    u = sources[rng.randrange(len(sources))] if len(sources) > 1 else sources[0]
    if trail is not None:
        trail.append(u)
    visited = {u}
    inverse_probability = 1.0
    current = u
    nodes = 1
    for step in range(1, tau + 1):
        budget = tau - step
        count = 0
        chosen = -1
        if dist is None:
            for n in adjacency[current]:
                if n in visited:
                    continue
                count += 1
                if count == 1 or random_() * count < 1.0:
                    chosen = n
        else:
            lookup = dist.get
            for n in adjacency[current]:
                if n in visited:
                    continue
                d = lookup(n)
                if d is None or d > budget:
                    continue
                count += 1
                if count == 1 or random_() * count < 1.0:
                    chosen = n
        if count == 0:
            return False, nodes, inverse_probability
        inverse_probability *= count
        current = chosen
        nodes += 1
        visited.add(current)
        if trail is not None:
            trail.append(current)
        if current == target:
            return True, nodes, inverse_probability
    return False, nodes, inverse_probability


def single_walk(
    graph: KnowledgeGraph,
    hop_index: KHopIndex,
    sources: Iterable[str],
    target: str,
    params: ConnParams,
    rng: Random,
    pruned: bool = True,
) -> WalkOutcome:
    """Run one walk from a uniform source toward `target`."""
    source_handles = sorted(graph.instance_handle(s) for s in sources)
    if not source_handles:
        raise ValueError("sources must be non-empty")
    target_handle = graph.instance_handle(target)
    if target_handle in source_handles:
        raise ValueError("target must not be a source")
    dist = None
    if pruned:
        _check_radius(hop_index, params)
        dist = hop_index.distances_for_handle(target_handle)
    trail: list[int] = []
    success, nodes, inverse_probability = _run_walk(
        graph.adjacency, source_handles, target_handle, params.tau, rng, dist, trail
    )
    contribution = params.beta ** (nodes - 1) * inverse_probability if success else 0.0
    ids = graph.instance_ids
    return WalkOutcome(
        success=success,
        nodes_sampled=nodes,
        inverse_probability=inverse_probability,
        contribution=contribution,
        path=tuple(ids[h] for h in trail),
    )


def _check_radius(hop_index: KHopIndex, params: ConnParams):
    if hop_index.radius < params.tau - 1:
        raise ValueError(
            f"hop index radius {hop_index.radius} cannot answer the walk's "
            f"eligibility checks (needs >= {params.tau - 1})"
        )


def estimate_conn(
    graph: KnowledgeGraph,
    hop_index: KHopIndex,
    concept: str,
    context: set[str],
    params: ConnParams,
    theta: int = 50,
    seed: int = 0,
    pruned: bool = True,
) -> ConnEstimate:
    """Aggregate `theta` walks into an estimate of the connectivity score.

    Walk j consumes its own substream of `seed`, so the result does not
    depend on execution order.  The target is resampled uniformly from the
    context for every walk.
    """
    if theta < 1:
        raise ValueError("theta must be >= 1")
    sources = sorted(graph.concept_instances[graph.concept_handle(concept)])
    if not sources:
        raise ValueError(f"concept {concept!r} maps to no instance entities")
    if not context:
        raise ValueError("context must be non-empty")
    targets = sorted(graph.instance_handle(e) for e in context)
    if set(targets) & set(sources):
        raise ValueError("context entities must be disjoint from the concept's instances")
    if pruned:
        _check_radius(hop_index, params)

    adjacency = graph.adjacency
    tau, beta = params.tau, params.beta
    scale = float(len(sources))
    n_targets = len(targets)
    total = 0.0
    total_sq = 0.0
    successes = 0
    for j in range(theta):
        rng = substream(seed, j)
        v = targets[rng.randrange(n_targets)] if n_targets > 1 else targets[0]
        dist = hop_index.distances_for_handle(v) if pruned else None
        success, nodes, inverse_probability = _run_walk(
            adjacency, sources, v, tau, rng, dist, None
        )
        if success:
            successes += 1
            value = beta ** (nodes - 1) * inverse_probability * scale
            total += value
            total_sq += value * value
    mean = total / theta
    if theta > 1:
        variance = max(0.0, (total_sq - theta * mean * mean) / (theta - 1))
    else:
        variance = 0.0
    return ConnEstimate(
        mean=mean,
        theta=theta,
        success_count=successes,
        sample_variance=variance,
        seed=seed,
    )


@dataclass(frozen=True)
class ErrorSample:
    concept: str
    theta: int
    mode: str
    repeat: int
    estimate: float
    exact: float

    @property
    def relative_error(self) -> float:
        return abs(self.estimate - self.exact) / self.exact


@dataclass(frozen=True)
class ErrorProfile:
    samples: tuple[ErrorSample, ...]
    excluded: tuple[tuple[str, str], ...]

    def mean_relative_error(self, theta: int, mode: str) -> float:
        errors = [s.relative_error for s in self.samples if s.theta == theta and s.mode == mode]
        if not errors:
            raise ValueError(f"no samples for theta={theta} mode={mode}")
        return sum(errors) / len(errors)

    def table(self) -> list[tuple[int, str, float, int]]:
        """(theta, mode, mean relative error, sample count) rows, sorted."""
        keys = sorted({(s.theta, s.mode) for s in self.samples})
        rows = []
        for theta, mode in keys:
            errors = [
                s.relative_error for s in self.samples if s.theta == theta and s.mode == mode
            ]
            rows.append((theta, mode, sum(errors) / len(errors), len(errors)))
        return rows


def estimator_error_profile(
    graph: KnowledgeGraph,
    pairs: Sequence[tuple[str, set[str]]],
    params: ConnParams,
    theta_grid: Sequence[int],
    repeats: int,
    seed: int,
    modes: Sequence[str] = ("pruned", "unpruned"),
    hop_cache_capacity: int | None = None,
) -> ErrorProfile:
    """Relative estimation error against the exact oracle over a theta grid.

    Pairs whose exact connectivity is zero are excluded (relative error is
    undefined there) and reported alongside the samples.
    """
    for mode in modes:
        if mode not in ("pruned", "unpruned"):
            raise ValueError(f"unknown mode {mode!r}")
    hop_index = KHopIndex(graph, radius=params.tau, capacity=hop_cache_capacity)
    samples: list[ErrorSample] = []
    excluded: list[tuple[str, str]] = []
    for pair_index, (concept, context) in enumerate(pairs):
        exact = exact_conn(graph, concept, context, params)
        if exact == 0.0:
            excluded.append((concept, "exact connectivity is zero; relative error undefined"))
            continue
        for repeat in range(repeats):
            for theta in theta_grid:
                for mode in modes:
                    walk_seed = keyed_seed(
                        seed, f"pair:{pair_index}", f"rep:{repeat}", f"theta:{theta}", mode
                    )
                    estimate = estimate_conn(
                        graph,
                        hop_index,
                        concept,
                        context,
                        params,
                        theta=theta,
                        seed=walk_seed,
                        pruned=(mode == "pruned"),
                    )
                    samples.append(
                        ErrorSample(
                            concept=concept,
                            theta=theta,
                            mode=mode,
                            repeat=repeat,
                            estimate=estimate.mean,
                            exact=exact,
                        )
                    )
    return ErrorProfile(samples=tuple(samples), excluded=tuple(excluded))
