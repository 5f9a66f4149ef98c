"""Entropy functionals over encoding trees and their merge deltas.

All logarithms are base 2.

Two evaluation routes exist on purpose:

* :func:`se`, :func:`rsse` and :func:`mrse` evaluate the tree sum directly,
  node by node, from cut weights or from the adjusted transition operator.
* :class:`EntropyTerms` decomposes the same quantity into per-cluster caches
  (occupancy, entering probability, summed leaf entering probability) over a
  :class:`FlowModel`. The greedy minimizer works on this form because merging
  two clusters only touches their own caches.

For a height-2 tree with singleton leaves the cluster ``C`` contributes::

    -E_C log p_C - sum_{v in C} e_v log(q_v / p_C)
        = (S_C - E_C) log p_C - sum_{v in C} e_v log q_v

with ``q`` the node occupancy, ``e`` the leaf entering probability,
``E_C`` the cluster entering probability and ``S_C = sum_{v in C} e_v``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import MultiRelationalGraph, SingleRelationalGraph, reduce_to_single
from .surfing import (
    MultiRankResult,
    MultiRelTransition,
    StationaryDistribution,
    SurfConfig,
    TransitionMatrix,
    build_multirel_transitions,
    build_transition,
    multirank,
    power_method,
)
from .tree import EncodingTree

__all__ = [
    "OBJECTIVES",
    "shannon",
    "se", "se_1d", "rsse", "rsse_1d", "mrse", "mrse_1d",
    "FlowModel", "degree_model", "surfing_model", "multirel_model", "objective_model",
    "EntropyTerms", "DegreeStats",
    "delta_mrse_paper", "delta_mrse_exact", "delta_se", "decoded_fraction",
]

OBJECTIVES = ("se", "rsse", "mrse")


def _xlog2(coef, val):
    """``coef * log2(val)`` with the convention ``0 * log 0 = 0``."""
    coef = np.asarray(coef, dtype=np.float64)
    val = np.asarray(val, dtype=np.float64)
    out = np.zeros(np.broadcast(coef, val).shape)
    nz = np.broadcast_to(coef != 0, out.shape)
    out[nz] = np.broadcast_to(coef, out.shape)[nz] * np.log2(np.broadcast_to(val, out.shape)[nz])
    return out


def _xl(coef, val):
    return 0.0 if coef == 0 else coef * math.log2(val)


def shannon(p) -> float:
    """Shannon entropy in bits of a probability vector."""
    p = np.asarray(p, dtype=np.float64)
    return float(-_xlog2(p, p).sum())


def _as_single(g):
    if isinstance(g, MultiRelationalGraph):
        if g.relation_count != 1:
            raise InputError("expected a single-relational graph; reduce it first")
        return g.relation(0)
    return g


def _check_tree(t: EncodingTree, n):
    if t.node_count != n:
        raise InputError(f"tree spans {t.node_count} nodes, graph has {n}")


def _tree_sum(t: EncodingTree, occupancy, entering):
    """``-sum_{alpha != root} entering(T_alpha) log(p_alpha / p_parent)``."""
    n = t.node_count
    masks = {}

    def mask(h):
        if h not in masks:
            m = np.zeros(n, dtype=bool)
            m[t.members(h)] = True
            masks[h] = m
        return masks[h]

    total = 0.0
    for h in t.nodes():
        if h == t.root:
            continue
        m, pm = mask(h), mask(t.parent[h])
        p, pp = occupancy[m].sum(), occupancy[pm].sum()
        e = entering(m)
        if e != 0:
            total -= e * math.log2(p / pp)
    return float(total)


# --- single-relational structural entropy -------------------------------------------------

def se(g, t: EncodingTree) -> float:
    """Structural entropy from cut weights and volumes.

    The cut ``g_alpha`` is the weight of arcs entering ``T_alpha`` from outside
    (for symmetric arc storage this is the weight of edges with exactly one
    endpoint inside); volumes are in-strengths.
    """
    g = _as_single(g)
    _check_tree(t, g.node_count)
    deg = g.in_strength()
    vol = deg.sum()
    if g.arc_count == 0 or vol <= 0:
        raise InputError("structural entropy needs a graph with positive volume")

    def cut(m):
        sel = m[g.dst] & ~m[g.src]
        return g.weight[sel].sum() / vol

    return _tree_sum(t, deg / vol, cut)


def se_1d(g) -> float:
    """Shannon entropy of the (in-)degree distribution."""
    g = _as_single(g)
    deg = g.in_strength()
    if deg.sum() <= 0:
        raise InputError("structural entropy needs a graph with positive volume")
    return shannon(deg / deg.sum())


def _x_of(x):
    return x.x if isinstance(x, StationaryDistribution) else np.asarray(x, dtype=np.float64)


def rsse(g, t: EncodingTree, x, tm: TransitionMatrix) -> float:
    """Random-surfing SE: entering probabilities from the adjusted transition ``B``."""
    g = _as_single(g)
    xv = _x_of(x)
    if not (len(xv) == g.node_count == tm.node_count):
        raise InputError("dimension mismatch between graph, stationary vector and transition")
    _check_tree(t, g.node_count)

    def entering(m):
        return tm.apply(np.where(m, 0.0, xv))[m].sum()

    return _tree_sum(t, xv, entering)


def rsse_1d(x) -> float:
    return shannon(_x_of(x))


def mrse(g, t: EncodingTree, mr: MultiRankResult, mt: MultiRelTransition) -> float:
    """Multi-relational SE: entering probabilities from ``sum_r y_r V_r``."""
    n = g.node_count
    if not (len(mr.x) == n == mt.node_count and len(mr.y) == mt.relation_count):
        raise InputError("dimension mismatch between graph, MultiRank result and transition")
    _check_tree(t, n)

    def entering(m):
        return mt.apply(np.where(m, 0.0, mr.x), mr.y)[m].sum()

    return _tree_sum(t, mr.x, entering)


def mrse_1d(mr: MultiRankResult) -> float:
    return shannon(mr.x)


def decoded_fraction(one_d: float, min_two_d: float) -> float:
    """Share of the 1D entropy removed by the best 2-level tree."""
    if not one_d > 0:
        raise InputError("1D entropy must be positive")
    return (one_d - min_two_d) / one_d


# --- flow decomposition ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlowModel:
    """One step of a walk split into arc flows plus uniformly spread mass.

    ``flow[k]`` is the probability of stepping ``src[k] -> dst[k]`` along a real
    arc (``src != dst``); ``spread[i]`` is the probability of leaving ``i`` and
    landing on a uniformly random node (itself included). ``occupancy`` is the
    probability of being at each node.
    """

    occupancy: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    flow: np.ndarray
    spread: np.ndarray

    @property
    def node_count(self):
        return len(self.occupancy)

    def leaf_entering(self):
        """Probability of stepping into each node from a different node."""
        n = self.node_count
        inflow = np.bincount(self.dst, weights=self.flow, minlength=n)
        return inflow + (self.spread.sum() - self.spread) / n

    def entering(self, members) -> float:
        m = np.zeros(self.node_count, dtype=bool)
        m[list(members)] = True
        sel = m[self.dst] & ~m[self.src]
        return float(self.flow[sel].sum()
                     + m.sum() * (self.spread.sum() - self.spread[m].sum()) / self.node_count)


def _offdiag(rows, cols, vals):
    keep = rows != cols
    return rows[keep], cols[keep], vals[keep]


def degree_model(g) -> FlowModel:
    """Degree statistics normalized by the total volume."""
    g = _as_single(g)
    deg = g.in_strength()
    vol = deg.sum()
    if g.arc_count == 0 or vol <= 0:
        raise InputError("structural entropy needs a graph with positive volume")
    d, s, w = _offdiag(g.dst, g.src, g.weight)
    return FlowModel(deg / vol, s, d, w / vol, np.zeros(g.node_count))


def surfing_model(tm: TransitionMatrix, x) -> FlowModel:
    xv = _x_of(x)
    c = tm.teleport
    coo = tm.matrix.tocoo()
    d, s, w = _offdiag(coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data)
    spread = xv * (c * tm.dangling + (1.0 - c))
    return FlowModel(xv, s, d, c * xv[s] * w, spread)


def multirel_model(mt: MultiRelTransition, mr: MultiRankResult) -> FlowModel:
    w, u = mt.effective_matrix(mr.y)
    coo = w.tocoo()
    d, s, v = _offdiag(coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data)
    return FlowModel(mr.x, s, d, mr.x[s] * v, mr.x * u)


@dataclass(frozen=True, eq=False)
class ObjectiveModel:
    objective: str
    model: FlowModel
    one_d: float
    iterations: int
    stationary: object = None
    transition: object = None


def objective_model(g, objective: str, cfg: SurfConfig = SurfConfig(),
                    reduction="presence") -> ObjectiveModel:
    """Build the flow model (and 1D value) for ``objective`` on ``g``.

    SE and RSSE run on single-relational graphs; a multi-relational input is
    reduced first. MrSE accepts either kind.
    """
    objective = objective.lower()
    if objective not in OBJECTIVES:
        raise InputError(f"unknown objective {objective!r}")
    if objective == "mrse":
        if isinstance(g, SingleRelationalGraph):
            g = g.as_multi()
        mt = build_multirel_transitions(g, cfg)
        mr = multirank(mt, cfg)
        return ObjectiveModel("mrse", multirel_model(mt, mr), mrse_1d(mr), mr.iterations, mr, mt)
    if isinstance(g, MultiRelationalGraph):
        g = reduce_to_single(g, reduction) if g.relation_count > 1 else g.relation(0)
    if objective == "se":
        return ObjectiveModel("se", degree_model(g), se_1d(g), 0)
    tm = build_transition(g, cfg)
    x = power_method(tm, cfg)
    return ObjectiveModel("rsse", surfing_model(tm, x), rsse_1d(x), x.iterations, x, tm)


class EntropyTerms:
    """Per-cluster caches of a height-2 encoding tree over a :class:`FlowModel`.

    ``occupancy[h]``, ``entering[h]`` and ``child_entering[h]`` hold ``p_h``,
    ``E_h`` and ``S_h`` for every cluster handle ``h``; ``links[a][b]`` is the
    arc flow between clusters ``a`` and ``b`` in both directions and exists
    exactly when at least one arc joins them.
    """

    def __init__(self, model: FlowModel, tree: EncodingTree):
        if tree.height != 2:
            raise InputError("entropy terms need a height-2 tree")
        _check_tree(tree, model.node_count)
        self.model = model
        n = model.node_count
        self.total_spread = float(model.spread.sum())
        leaf_e = model.leaf_entering()
        self.leaf_entering = leaf_e
        self.leaf_constant = float(-_xlog2(leaf_e, model.occupancy).sum())

        clusters = tree.clusters()
        owner = np.empty(n, dtype=np.int64)
        for h in clusters:
            owner[tree.members(h)] = h
        cs, cd = owner[model.src], owner[model.dst]
        cross = cs != cd
        idx = {h: k for k, h in enumerate(clusters)}
        local = np.array([idx[h] for h in owner.tolist()], dtype=np.int64)
        k = len(clusters)
        occ = np.bincount(local, weights=model.occupancy, minlength=k)
        size = np.bincount(local, minlength=k)
        spread = np.bincount(local, weights=model.spread, minlength=k)
        child = np.bincount(local, weights=leaf_e, minlength=k)
        inflow = np.bincount(local[model.dst[cross]], weights=model.flow[cross], minlength=k)
        enter = inflow + size * (self.total_spread - spread) / n

        self.occupancy = dict(zip(clusters, occ.tolist()))
        self.size = dict(zip(clusters, size.tolist()))
        self.spread = dict(zip(clusters, spread.tolist()))
        self.child_entering = dict(zip(clusters, child.tolist()))
        self.entering = dict(zip(clusters, enter.tolist()))
        self.links: dict[int, dict[int, float]] = {h: {} for h in clusters}
        for a, b, f in zip(cs[cross].tolist(), cd[cross].tolist(), model.flow[cross].tolist()):
            la, lb = self.links[a], self.links[b]
            la[b] = la.get(b, 0.0) + f
            lb[a] = lb.get(a, 0.0) + f

    def clusters(self):
        return sorted(self.occupancy)

    def connected_pairs(self):
        """Cluster pairs ``(a, b)``, ``a < b``, joined by at least one arc."""
        return sorted((a, b) for a, nb in self.links.items() for b in nb if a < b)

    def _check(self, a, b):
        if a == b:
            raise InputError("a cluster cannot be merged with itself")
        for h in (a, b):
            if h not in self.occupancy:
                raise InputError(f"{h} is not a live cluster")

    def merged_entering(self, a, b) -> float:
        n = self.model.node_count
        between = self.links[a].get(b, 0.0)
        tele = (self.size[b] * self.spread[a] + self.size[a] * self.spread[b]) / n
        return self.entering[a] + self.entering[b] - between - tele

    def cluster_term(self, h) -> float:
        """``(S_h - E_h) log p_h``; the leaf constant is kept separately."""
        return _xl(self.child_entering[h] - self.entering[h], self.occupancy[h])

    def objective(self) -> float:
        return self.leaf_constant + sum(self.cluster_term(h) for h in self.clusters())

    def delta_exact(self, a, b) -> float:
        self._check(a, b)
        pn = self.occupancy[a] + self.occupancy[b]
        sn = self.child_entering[a] + self.child_entering[b]
        return _xl(sn - self.merged_entering(a, b), pn) - self.cluster_term(a) - self.cluster_term(b)

    def delta_paper(self, a, b) -> float:
        """The closed-form merge delta with leaf coefficients taken as occupancies."""
        self._check(a, b)
        pa, pb = self.occupancy[a], self.occupancy[b]
        pn = pa + pb
        return (-_xl(self.merged_entering(a, b), pn)
                - _xl(pa, pa / pn) - _xl(pb, pb / pn)
                + _xl(self.entering[a], pa) + _xl(self.entering[b], pb))

    def apply_merge(self, a, b, new):
        """Fold clusters ``a`` and ``b`` into ``new``; returns the new cluster's neighbours."""
        self._check(a, b)
        self.entering[new] = self.merged_entering(a, b)
        for d in (self.occupancy, self.size, self.spread, self.child_entering):
            d[new] = d.pop(a) + d.pop(b)
        del self.entering[a], self.entering[b]
        la, lb = self.links.pop(a), self.links.pop(b)
        merged = dict(la)
        for k, f in lb.items():
            merged[k] = merged.get(k, 0.0) + f
        merged.pop(a, None)
        merged.pop(b, None)
        for k, f in merged.items():
            nb = self.links[k]
            nb.pop(a, None)
            nb.pop(b, None)
            nb[new] = f
        self.links[new] = merged
        return sorted(merged)


class DegreeStats(EntropyTerms):
    """:class:`EntropyTerms` over degree statistics, with raw cut/volume accessors."""

    def __init__(self, g, tree: EncodingTree):
        g = _as_single(g)
        self.total_volume = float(g.in_strength().sum())
        super().__init__(degree_model(g), tree)

    def cut(self, h) -> float:
        return self.entering[h] * self.total_volume

    def volume(self, h) -> float:
        return self.occupancy[h] * self.total_volume


def delta_mrse_paper(terms: EntropyTerms, a, b) -> float:
    return terms.delta_paper(a, b)


def delta_mrse_exact(terms: EntropyTerms, a, b) -> float:
    return terms.delta_exact(a, b)


def delta_se(stats: EntropyTerms, a, b) -> float:
    return stats.delta_exact(a, b)
