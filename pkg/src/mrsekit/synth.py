"""Synthetic graphs: Barabasi-Albert growth, sparsity dropout, planted partitions.

Every generator is a pure function of its configuration and seed. Randomness
is drawn from named sub-streams of the seed (:func:`substream`) so that, for
example, relation 2 of a sweep point does not change when relation 3 is added.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .graph import MultiRelationalGraph, SingleRelationalGraph, stack

__all__ = ["SynthConfig", "substream", "generate_ba", "generate_multi_ba",
           "dropout_to_sparsity", "stack_relations", "planted_partition",
           "planted_hierarchy"]


def substream(seed: int, *names) -> np.random.Generator:
    """Independent generator for the sub-stream ``names`` of ``seed``."""
    keys = [zlib.crc32(str(n).encode()) for n in names]
    return np.random.default_rng(np.random.SeedSequence([int(seed), *keys]))


@dataclass(frozen=True)
class SynthConfig:
    node_count: int = 100
    m: int = 3
    sparsity: float | None = None
    relation_count: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise InputError("BA attachment count m must be >= 1")
        if self.m >= self.node_count:
            raise InputError("BA attachment count m must be below the node count")
        if self.sparsity is not None and not 0 <= self.sparsity < 1:
            raise InputError("target sparsity must lie in [0, 1)")
        if self.relation_count < 1:
            raise InputError("relation count must be >= 1")


def generate_ba(cfg: SynthConfig, rng: np.random.Generator | None = None) -> SingleRelationalGraph:
    """Undirected Barabasi-Albert graph grown from a complete graph on ``m`` nodes.

    Each arriving node attaches ``m`` edges to distinct existing nodes picked
    with probability proportional to their current degree (uniformly while all
    degrees are zero, i.e. for ``m = 1`` at the first step).
    """
    n, m = cfg.node_count, cfg.m
    if rng is None:
        rng = substream(cfg.seed, "ba")
    src, dst = [], []
    for i in range(m):
        for j in range(i + 1, m):
            src.append(i)
            dst.append(j)
    deg = np.zeros(n)
    deg[:m] = m - 1
    for v in range(m, n):
        p = deg[:v]
        total = p.sum()
        targets = rng.choice(v, size=m, replace=False, p=p / total if total > 0 else None)
        for t in targets.tolist():
            src.append(t)
            dst.append(v)
        deg[targets] += 1
        deg[v] = m
    return SingleRelationalGraph.from_arcs(n, src, dst, directed=False)


def dropout_to_sparsity(g: SingleRelationalGraph, target: float, seed=0,
                        rng: np.random.Generator | None = None) -> SingleRelationalGraph:
    """Remove uniformly chosen edges until the sparsity is within one edge of ``target``.

    Edges (both arc directions) are removed as a unit; exactly
    ``ceil((1 - target) * |V|(|V|-1)/2)`` of them are kept, so the result may
    fall short of ``target`` by less than one pair. Self-loops are untouched.
    """
    if not 0 <= target < 1:
        raise InputError("target sparsity must lie in [0, 1)")
    current = g.sparsity()
    if target < current - 1e-12:
        raise InputError(f"target sparsity {target} is below the current sparsity {current:.6f}")
    n = g.node_count
    pairs = n * (n - 1) // 2
    keep = min(math.ceil((1.0 - target) * pairs - 1e-9), g.edge_count())
    lo, hi = np.minimum(g.src, g.dst), np.maximum(g.src, g.dst)
    key = lo * n + hi
    edges = np.unique(key[lo != hi])
    if keep >= len(edges):
        return g
    if rng is None:
        rng = substream(seed, "dropout")
    kept = np.sort(rng.choice(edges, size=keep, replace=False))
    mask = np.isin(key, kept) | (g.src == g.dst)
    # a subset of canonical arcs is still canonical
    return SingleRelationalGraph(n, g.src[mask], g.dst[mask], g.weight[mask], g.directed,
                                 g.node_labels)


def stack_relations(graphs: Sequence[SingleRelationalGraph], relation_names=None) -> MultiRelationalGraph:
    return stack(list(graphs), relation_names)


def generate_multi_ba(cfg: SynthConfig) -> MultiRelationalGraph:
    """``cfg.relation_count`` independent BA graphs, each dropped to ``cfg.sparsity``."""
    out = []
    for r in range(cfg.relation_count):
        g = generate_ba(cfg, substream(cfg.seed, "ba", r))
        if cfg.sparsity is not None and cfg.sparsity > g.sparsity():
            g = dropout_to_sparsity(g, cfg.sparsity, rng=substream(cfg.seed, "dropout", r))
        out.append(g)
    return stack_relations(out)


def _community_sizes(communities):
    if isinstance(communities, (int, np.integer)):
        raise InputError("give community sizes as a sequence, e.g. [25] * 4")
    sizes = [int(s) for s in communities]
    if not sizes or min(sizes) < 1:
        raise InputError("community sizes must be positive")
    return sizes


def _bernoulli_relations(prob_of_pair, n, relation_count, seed, stream):
    iu, ju = np.triu_indices(n, k=1)
    p = prob_of_pair(iu, ju)
    graphs = []
    for r in range(relation_count):
        rng = substream(seed, stream, r)
        hit = rng.random(len(iu)) < p
        graphs.append(SingleRelationalGraph.from_arcs(n, iu[hit], ju[hit], directed=False))
    return stack_relations(graphs)


def planted_partition(communities: Sequence[int], intra_p: float, inter_p: float,
                      relation_count: int = 1, seed=0):
    """Independent Bernoulli edges per relation, denser inside communities.

    Returns the undirected graph and the ground-truth label of every node.
    """
    sizes = _community_sizes(communities)
    if not (0 <= inter_p <= 1 and 0 <= intra_p <= 1):
        raise InputError("edge probabilities must lie in [0, 1]")
    if intra_p < inter_p:
        raise InputError("intra-community probability must not be below the inter-community one")
    if relation_count < 1:
        raise InputError("relation count must be >= 1")
    labels = np.repeat(np.arange(len(sizes)), sizes)
    g = _bernoulli_relations(
        lambda i, j: np.where(labels[i] == labels[j], intra_p, inter_p),
        len(labels), relation_count, seed, "planted")
    return g, labels


def planted_hierarchy(branching: Sequence[int], leaf_size: int, probs: Sequence[float],
                      relation_count: int = 1, seed=0):
    """Nested planted communities.

    ``branching[k]`` is the number of children per group at depth ``k``;
    groups at the deepest level hold ``leaf_size`` nodes. ``probs[k]`` is the
    edge probability of a pair whose deepest common group is at depth ``k``
    (``probs[0]`` for pairs sharing only the root). Returns the graph and one
    label array per level, finest first.
    """
    depth = len(branching)
    if len(probs) != depth + 1:
        raise InputError("need one probability per level plus the root")
    if leaf_size < 1 or min(branching) < 1:
        raise InputError("branching factors and leaf size must be positive")
    n = leaf_size * int(np.prod(branching))
    idx = np.arange(n) // leaf_size
    levels = []
    span = 1
    for b in reversed(branching):
        levels.append(idx // span)
        span *= b
    levels = levels[::-1]
    probs = np.asarray(probs, dtype=np.float64)

    def prob(i, j):
        shared = np.zeros(len(i), dtype=np.int64)
        for k, lab in enumerate(levels):
            shared[lab[i] == lab[j]] = k + 1
        return probs[shared]

    g = _bernoulli_relations(prob, n, relation_count, seed, "hierarchy")
    return g, levels[::-1]
