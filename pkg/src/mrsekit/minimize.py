"""Greedy two-level entropy minimization.

Starting from a seed partition (singletons by default), the pair of clusters
joined by at least one arc whose merge lowers the objective the most is merged,
until no merge lowers it by more than ``threshold``. Pair deltas depend only on
the two clusters' caches and merged clusters get fresh handles, so a lazy
priority queue keyed by ``(rounded delta, a, b)`` is exact: entries mentioning
a retired handle are simply skipped.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field, replace

from .entropy import EntropyTerms, FlowModel, ObjectiveModel, objective_model
from .errors import InputError
from .graph import MultiRelationalGraph, SingleRelationalGraph, consolidate
from .surfing import SurfConfig
from .tree import EncodingTree, Partition, singleton_tree

__all__ = ["MinimizeConfig", "MergeStep", "MinimizeResult", "HierarchicalResult",
           "minimize_2d", "hierarchical_minimize", "minimize_recursive", "minimize",
           "greedy_merge"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinimizeConfig:
    objective: str = "mrse"
    strategy: str = "vanilla"
    subgraph_size: int = 100
    delta: str = "exact"
    surf: SurfConfig = SurfConfig()
    reduction: str = "presence"
    tie_decimals: int = 12
    threshold: float = 1e-12

    def __post_init__(self):
        if self.objective.lower() not in ("se", "rsse", "mrse"):
            raise InputError(f"unknown objective {self.objective!r}")
        if self.strategy not in ("vanilla", "hierarchical"):
            raise InputError(f"unknown strategy {self.strategy!r}")
        if self.delta not in ("exact", "paper"):
            raise InputError(f"unknown delta mode {self.delta!r}")
        if self.subgraph_size < 2:
            raise InputError("subgraph size must be >= 2")


@dataclass(frozen=True)
class MergeStep:
    step: int
    cluster_a: int
    cluster_b: int
    delta: float
    objective: float


@dataclass
class MinimizeResult:
    tree: EncodingTree
    trace: list
    initial: float
    objective: float
    one_d: float = float("nan")
    iterations: int = 0

    @property
    def partition(self) -> Partition:
        return self.tree.partition()


@dataclass
class PassRecord:
    subgraph_size: int
    groups: int
    merges: int
    clusters: int = 0
    traces: list = field(default_factory=list)


@dataclass
class HierarchicalResult:
    tree: EncodingTree
    passes: list
    objective: float
    one_d: float

    @property
    def partition(self) -> Partition:
        return self.tree.partition()


def greedy_merge(model: FlowModel, tree: EncodingTree, cfg: MinimizeConfig) -> MinimizeResult:
    """Run the merge loop on ``tree`` in place."""
    terms = EntropyTerms(model, tree)
    score = terms.delta_exact if cfg.delta == "exact" else terms.delta_paper
    nd = cfg.tie_decimals
    heap = []
    for a, b in terms.connected_pairs():
        d = score(a, b)
        heap.append((round(d, nd), a, b, d))
    heapq.heapify(heap)

    value = initial = terms.objective()
    trace = []
    alive = terms.occupancy
    while heap:
        _, a, b, d = heapq.heappop(heap)
        if a not in alive or b not in alive:
            continue
        if not d < -cfg.threshold:
            break
        exact = d if cfg.delta == "exact" else terms.delta_exact(a, b)
        new = tree.merge(a, b)
        neighbours = terms.apply_merge(a, b, new)
        value += exact
        trace.append(MergeStep(len(trace) + 1, a, b, d, value))
        for k in neighbours:
            lo, hi = (k, new) if k < new else (new, k)
            d = score(lo, hi)
            heapq.heappush(heap, (round(d, nd), lo, hi, d))
    return MinimizeResult(tree, trace, initial, terms.objective())


def _model(g, cfg: MinimizeConfig) -> ObjectiveModel:
    return objective_model(g, cfg.objective, cfg.surf, cfg.reduction)


def minimize_2d(g, cfg: MinimizeConfig = MinimizeConfig(), initial: Partition | None = None,
                model: ObjectiveModel | None = None) -> MinimizeResult:
    """Greedy 2D minimization of ``cfg.objective`` on ``g``.

    ``initial`` seeds the height-1 layer (singletons by default). The result's
    ``initial`` is the objective of the seed tree; ``trace`` records every
    merge with the score used to pick it and the objective afterwards.
    """
    if g.node_count < 1:
        raise InputError("empty graph")
    om = model or _model(g, cfg)
    if initial is None:
        tree = singleton_tree(g.node_count)
    else:
        if initial.node_count != g.node_count:
            raise InputError("seed partition does not match the graph")
        tree = EncodingTree.from_partition(initial)
    res = greedy_merge(om.model, tree, cfg)
    res.one_d = om.one_d
    res.iterations = om.iterations
    return res


def hierarchical_minimize(g, cfg: MinimizeConfig = MinimizeConfig()) -> HierarchicalResult:
    """Greedy minimization over consecutive groups of at most ``cfg.subgraph_size`` clusters.

    Clusters are ordered by their smallest node id. Each group's induced
    subgraph (every relation kept) gets its own stationary distributions and a
    merge loop seeded with the group's clusters. Passes repeat until one group
    covers everything; a pass without merges doubles the group size.
    """
    if g.node_count < 1:
        raise InputError("empty graph")
    om = _model(g, cfg)
    n = g.node_count
    partition = Partition.singletons(n)
    size = cfg.subgraph_size
    passes = []
    while True:
        blocks = list(partition.blocks)
        groups = [blocks[i:i + size] for i in range(0, len(blocks), size)]
        record = PassRecord(size, len(groups), 0)
        out = []
        for grp in groups:
            nodes = sorted(v for b in grp for v in b)
            sub = g.induced_subgraph(nodes)
            if len(grp) < 2 or sub.arc_count == 0:
                out.extend(grp)
                continue
            local = {v: i for i, v in enumerate(nodes)}
            seed = Partition(([local[v] for v in b] for b in grp), len(nodes))
            res = minimize_2d(sub, cfg, initial=seed)
            record.merges += len(res.trace)
            record.traces.append(res.trace)
            out.extend([nodes[i] for i in b] for b in res.partition)
        partition = Partition(out, n)
        record.clusters = len(partition)
        passes.append(record)
        log.debug("pass %d: n=%d groups=%d merges=%d clusters=%d",
                  len(passes), size, len(groups), record.merges, len(partition))
        if len(groups) == 1:
            break
        if record.merges == 0:
            size *= 2
    tree = EncodingTree.from_partition(partition)
    value = EntropyTerms(om.model, tree).objective()
    return HierarchicalResult(tree, passes, value, om.one_d)


def minimize(g, cfg: MinimizeConfig = MinimizeConfig()):
    if cfg.strategy == "hierarchical":
        return hierarchical_minimize(g, cfg)
    return minimize_2d(g, cfg)


def minimize_recursive(g, depth: int, cfg: MinimizeConfig = MinimizeConfig()) -> list:
    """Deeper hierarchies by alternating 2D minimization and community contraction.

    Returns one partition of the original nodes per level, coarsest last.
    Stops early once a level merges nothing or leaves a single community.
    """
    if depth < 1:
        raise InputError("depth must be >= 1")
    if isinstance(g, SingleRelationalGraph):
        g = g.as_multi()
    levels = []
    current: MultiRelationalGraph = g
    members = [[v] for v in range(g.node_count)]
    for _ in range(depth):
        part = minimize(current, cfg).partition
        lifted = Partition((sorted(v for c in block for v in members[c]) for block in part),
                           g.node_count)
        levels.append(lifted)
        if len(part) == current.node_count or len(part) == 1:
            break
        current = consolidate(current, part)
        members = [list(b) for b in lifted.blocks]
    return levels


def with_objective(cfg: MinimizeConfig, objective: str) -> MinimizeConfig:
    return replace(cfg, objective=objective)
