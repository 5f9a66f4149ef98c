"""Graph containers, relation reduction and community consolidation.

Both graph types store *arcs*: an undirected edge ``{u, v}`` is kept as the
two arcs ``u -> v`` and ``v -> u`` with equal weight, so every downstream
formula works on the directed convention (entry ``A[j, i]`` is the weight of
the arc leaving ``i`` and entering ``j``). A self-loop is stored once.

Arrays are canonical: zero-weight arcs are dropped, duplicate arcs are merged
by summing their weights, and arcs are sorted by ``(relation, src, dst)``.
All arrays are made read-only after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, PartitionError

__all__ = [
    "SingleRelationalGraph",
    "MultiRelationalGraph",
    "reduce_to_single",
    "consolidate",
    "stack",
]


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _canonicalize(node_count, relation_count, src, dst, rel, weight, directed):
    src = np.asarray(src, dtype=np.int64).ravel()
    dst = np.asarray(dst, dtype=np.int64).ravel()
    rel = np.asarray(rel, dtype=np.int64).ravel()
    weight = np.asarray(weight, dtype=np.float64).ravel()
    if not (len(src) == len(dst) == len(rel) == len(weight)):
        raise InputError("arc arrays have different lengths")
    if node_count < 0 or relation_count < 1:
        raise InputError("node_count must be >= 0 and relation_count >= 1")
    if len(src):
        if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= node_count:
            raise InputError("arc endpoint outside 0..node_count-1")
        if rel.min() < 0 or rel.max() >= relation_count:
            raise InputError("arc relation outside 0..relation_count-1")
    if not np.all(np.isfinite(weight)):
        raise InputError("arc weights must be finite")
    if np.any(weight < 0):
        raise InputError("negative arc weight")

    keep = weight > 0
    src, dst, rel, weight = src[keep], dst[keep], rel[keep], weight[keep]
    if not directed:
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        src, dst = lo, hi
    # aggregate duplicates
    key = (rel * node_count + src) * node_count + dst if node_count else rel
    uniq, inv = np.unique(key, return_inverse=True)
    agg = np.zeros(len(uniq))
    np.add.at(agg, inv, weight)
    first = np.full(len(uniq), -1, dtype=np.int64)
    first[inv[::-1]] = np.arange(len(inv))[::-1]
    src, dst, rel, weight = src[first], dst[first], rel[first], agg
    if not directed:
        off = src != dst
        src, dst, rel, weight = (
            np.concatenate([src, dst[off]]),
            np.concatenate([dst, src[off]]),
            np.concatenate([rel, rel[off]]),
            np.concatenate([weight, weight[off]]),
        )
    order = np.lexsort((dst, src, rel))
    return src[order], dst[order], rel[order], weight[order]


def _default_labels(labels, count, what):
    if labels is None:
        return tuple(str(i) for i in range(count))
    labels = tuple(str(s) for s in labels)
    if len(labels) != count:
        raise InputError(f"expected {count} {what} labels, got {len(labels)}")
    if len(set(labels)) != count:
        raise InputError(f"{what} labels are not unique")
    return labels


def _pair_count(n):
    return n * (n - 1) / 2


@dataclass(frozen=True, eq=False)
class MultiRelationalGraph:
    """Weighted multi-relational graph ``G' = (V, E', R)`` stored as arc arrays.

    Use :meth:`from_arcs` to build one from raw (possibly duplicated or
    one-directional) arc lists; the plain constructor expects arrays that are
    already canonical and only validates them.
    """

    node_count: int
    relation_count: int
    src: np.ndarray
    dst: np.ndarray
    rel: np.ndarray
    weight: np.ndarray
    directed: bool = True
    node_labels: tuple = None
    relation_names: tuple = None
    _by_relation: list = field(default=None, init=False, repr=False)

    def __post_init__(self):
        s, d, r, w = _canonicalize(self.node_count, self.relation_count, self.src,
                                   self.dst, self.rel, self.weight, directed=True)
        if len(s) != len(np.asarray(self.src)):
            raise InputError("arc arrays are not canonical; use from_arcs()")
        set_ = object.__setattr__
        set_(self, "src", _frozen(s, np.int64))
        set_(self, "dst", _frozen(d, np.int64))
        set_(self, "rel", _frozen(r, np.int64))
        set_(self, "weight", _frozen(w, np.float64))
        set_(self, "node_labels", _default_labels(self.node_labels, self.node_count, "node"))
        set_(self, "relation_names",
             _default_labels(self.relation_names, self.relation_count, "relation"))
        if not self.directed and not self._is_symmetric():
            raise InputError("undirected graph must store symmetric arcs")
        bounds = np.searchsorted(self.rel, np.arange(self.relation_count + 1))
        set_(self, "_by_relation", [slice(bounds[k], bounds[k + 1])
                                    for k in range(self.relation_count)])

    @classmethod
    def from_arcs(cls, node_count, relation_count, src, dst, rel, weight=None,
                  directed=True, node_labels=None, relation_names=None):
        """Build a graph from raw arcs.

        With ``directed=False`` each ``(src, dst)`` is an undirected edge and is
        mirrored; ``(a, b)`` and ``(b, a)`` then count as the same edge.
        """
        if weight is None:
            weight = np.ones(len(np.asarray(src)))
        s, d, r, w = _canonicalize(node_count, relation_count, src, dst, rel, weight, directed)
        return cls(node_count, relation_count, s, d, r, w, directed, node_labels, relation_names)

    def _is_symmetric(self):
        fwd = set(zip(self.rel.tolist(), self.src.tolist(), self.dst.tolist(), self.weight.tolist()))
        return all((r, d, s, w) in fwd for r, s, d, w in fwd)

    @property
    def arc_count(self):
        return len(self.src)

    def arcs(self):
        """Yield ``(src, dst, rel, weight)`` tuples in canonical order."""
        return zip(self.src.tolist(), self.dst.tolist(), self.rel.tolist(), self.weight.tolist())

    def relation_arcs(self, r):
        sl = self._by_relation[r]
        return self.src[sl], self.dst[sl], self.weight[sl]

    def relation(self, r) -> "SingleRelationalGraph":
        s, d, w = self.relation_arcs(r)
        return SingleRelationalGraph(self.node_count, s, d, w, self.directed, self.node_labels)

    def relation_weight(self, r):
        return float(self.relation_arcs(r)[2].sum())

    def empty_relations(self):
        return [r for r in range(self.relation_count)
                if self._by_relation[r].stop == self._by_relation[r].start]

    def validate(self, require_nonempty_slices=True):
        """Check the graph is usable for surfing; returns ``self``."""
        if self.arc_count == 0:
            raise InputError("no arcs")
        empty = self.empty_relations()
        if require_nonempty_slices and empty:
            names = ", ".join(self.relation_names[r] for r in empty)
            raise InputError(f"empty relation slice(s): {names}")
        return self

    def edge_count(self, r):
        """Number of distinct unordered node pairs (no self-loops) joined under ``r``."""
        s, d, _ = self.relation_arcs(r)
        off = s != d
        pairs = np.unique(np.minimum(s[off], d[off]) * self.node_count + np.maximum(s[off], d[off]))
        return len(pairs)

    def sparsity(self, r):
        """``1 - edges / (|V|(|V|-1)/2)`` for relation ``r``."""
        pairs = _pair_count(self.node_count)
        return 1.0 - self.edge_count(r) / pairs if pairs else 0.0

    def dense(self):
        """Adjacency tensor ``A[i, j, r]`` = weight of arc ``j -> i`` under ``r``.

        Materializes ``|V|^2 |R|`` floats; meant for small graphs and checks.
        """
        a = np.zeros((self.node_count, self.node_count, self.relation_count))
        np.add.at(a, (self.dst, self.src, self.rel), self.weight)
        return a

    def induced_subgraph(self, nodes: Sequence[int]) -> "MultiRelationalGraph":
        """Subgraph on ``nodes`` (kept in the given order) with every relation retained."""
        nodes = np.asarray(nodes, dtype=np.int64)
        local = np.full(self.node_count, -1, dtype=np.int64)
        local[nodes] = np.arange(len(nodes))
        keep = (local[self.src] >= 0) & (local[self.dst] >= 0)
        return MultiRelationalGraph.from_arcs(
            len(nodes), self.relation_count, local[self.src[keep]], local[self.dst[keep]],
            self.rel[keep], self.weight[keep], directed=True,
            node_labels=[self.node_labels[i] for i in nodes],
            relation_names=self.relation_names,
        )._with_directed(self.directed)

    def _with_directed(self, directed):
        if directed == self.directed:
            return self
        return MultiRelationalGraph(self.node_count, self.relation_count, self.src, self.dst,
                                    self.rel, self.weight, directed, self.node_labels,
                                    self.relation_names)

    def node_index(self):
        return {label: i for i, label in enumerate(self.node_labels)}

    def same_as(self, other) -> bool:
        """Structural equality, labels included."""
        return (
            self.node_count == other.node_count
            and self.relation_count == other.relation_count
            and self.directed == other.directed
            and self.node_labels == other.node_labels
            and self.relation_names == other.relation_names
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.rel, other.rel)
            and np.array_equal(self.weight, other.weight)
        )


@dataclass(frozen=True, eq=False)
class SingleRelationalGraph:
    """Weighted single-relational graph ``G = (V, E)`` stored as arc arrays."""

    node_count: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    directed: bool = True
    node_labels: tuple = None

    def __post_init__(self):
        m = self.as_multi()
        set_ = object.__setattr__
        set_(self, "src", m.src)
        set_(self, "dst", m.dst)
        set_(self, "weight", m.weight)
        set_(self, "node_labels", m.node_labels)

    @classmethod
    def from_arcs(cls, node_count, src, dst, weight=None, directed=True, node_labels=None):
        if weight is None:
            weight = np.ones(len(np.asarray(src)))
        s, d, _, w = _canonicalize(node_count, 1, src, dst, np.zeros(len(np.asarray(src))),
                                   weight, directed)
        return cls(node_count, s, d, w, directed, node_labels)

    @classmethod
    def from_edges(cls, node_count, edges: Iterable, directed=False, node_labels=None):
        """Convenience constructor from ``(u, v)`` or ``(u, v, w)`` tuples."""
        edges = [tuple(e) for e in edges]
        src = [e[0] for e in edges]
        dst = [e[1] for e in edges]
        w = [e[2] if len(e) > 2 else 1.0 for e in edges]
        return cls.from_arcs(node_count, src, dst, w, directed, node_labels)

    def as_multi(self, relation_name="0") -> MultiRelationalGraph:
        return MultiRelationalGraph(self.node_count, 1, self.src, self.dst,
                                    np.zeros(len(self.src), dtype=np.int64), self.weight,
                                    self.directed, self.node_labels, (relation_name,))

    @property
    def arc_count(self):
        return len(self.src)

    def arcs(self):
        return zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist())

    def in_strength(self):
        """Weighted in-degree of every node (self-loops included)."""
        return np.bincount(self.dst, weights=self.weight, minlength=self.node_count)

    def out_strength(self):
        return np.bincount(self.src, weights=self.weight, minlength=self.node_count)

    def edge_count(self):
        return self.as_multi().edge_count(0)

    def sparsity(self):
        return self.as_multi().sparsity(0)

    def dense(self):
        """Adjacency matrix ``A[j, i]`` = weight of arc ``i -> j``."""
        return self.as_multi().dense()[:, :, 0]

    def induced_subgraph(self, nodes):
        return self.as_multi().induced_subgraph(nodes).relation(0)

    def node_index(self):
        return {label: i for i, label in enumerate(self.node_labels)}

    def same_as(self, other) -> bool:
        return self.as_multi().same_as(other.as_multi())


def reduce_to_single(g: MultiRelationalGraph, mode="presence") -> SingleRelationalGraph:
    """Collapse all relations into one.

    ``presence`` gives weight 1 to every ordered pair joined under any relation;
    ``weight-sum`` adds the weights across relations.
    """
    if mode not in ("presence", "weight-sum"):
        raise InputError(f"unknown reduction mode {mode!r}")
    w = np.ones(g.arc_count) if mode == "presence" else g.weight
    s, d, _, w = _canonicalize(g.node_count, 1, g.src, g.dst, np.zeros(g.arc_count), w, True)
    if mode == "presence":
        w = np.ones(len(s))
    return SingleRelationalGraph(g.node_count, s, d, w, g.directed, g.node_labels)


def _check_partition(node_count, partition):
    seen = np.zeros(node_count, dtype=np.int64)
    for block in partition:
        block = np.asarray(list(block), dtype=np.int64)
        if len(block) == 0:
            raise PartitionError("empty community")
        if block.min() < 0 or block.max() >= node_count:
            raise PartitionError("community member outside the node range")
        np.add.at(seen, block, 1)
    if np.any(seen != 1):
        raise PartitionError("communities overlap or leave nodes uncovered")


def consolidate(g: MultiRelationalGraph, partition) -> MultiRelationalGraph:
    """Contract each community of ``partition`` into a single node.

    Arc weights between communities are summed per relation; arcs inside a
    community become self-arcs of the contracted node.
    """
    blocks = [sorted(b) for b in partition]
    _check_partition(g.node_count, blocks)
    comm = np.empty(g.node_count, dtype=np.int64)
    for k, block in enumerate(blocks):
        comm[block] = k
    return MultiRelationalGraph.from_arcs(
        len(blocks), g.relation_count, comm[g.src], comm[g.dst], g.rel, g.weight,
        directed=True, relation_names=g.relation_names,
    )._with_directed(g.directed)


def stack(graphs: Sequence[SingleRelationalGraph], relation_names=None) -> MultiRelationalGraph:
    """Concatenate single-relational graphs along the relation axis."""
    if not graphs:
        raise InputError("nothing to stack")
    n = graphs[0].node_count
    if any(h.node_count != n for h in graphs):
        raise InputError("graphs to stack have different node counts")
    directed = any(h.directed for h in graphs)
    src = np.concatenate([h.src for h in graphs])
    dst = np.concatenate([h.dst for h in graphs])
    rel = np.concatenate([np.full(h.arc_count, k) for k, h in enumerate(graphs)])
    w = np.concatenate([h.weight for h in graphs])
    return MultiRelationalGraph.from_arcs(
        n, len(graphs), src, dst, rel, w, directed=True,
        node_labels=graphs[0].node_labels, relation_names=relation_names,
    )._with_directed(directed)
