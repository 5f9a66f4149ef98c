"""Random surfing on single- and multi-relational graphs.

Dangling columns (nodes with no outgoing arc, per relation in the
multi-relational case) are replaced by the uniform distribution, and the
teleport term ``(1 - c) / |V|`` is mixed in. Both corrections are applied
inside the matrix-vector product, so the dense adjusted matrices are never
built (except by the ``to_dense`` helpers, which exist for checks on small
graphs).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, InputError
from .graph import MultiRelationalGraph, SingleRelationalGraph

__all__ = [
    "SurfConfig",
    "TransitionMatrix",
    "StationaryDistribution",
    "MultiRelTransition",
    "MultiRankResult",
    "build_transition",
    "power_method",
    "build_multirel_transitions",
    "multirank",
    "stationary_csv_rows",
]


@dataclass(frozen=True)
class SurfConfig:
    teleport: float = 0.85
    tolerance: float = 1e-10
    max_iterations: int = 10000

    def __post_init__(self):
        if not 0 < self.teleport <= 1:
            raise InputError(f"teleport constant must lie in (0, 1], got {self.teleport}")
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")


def _surf_step(direct, dangling_mass, total, c, n):
    # direct = P z over real arcs; dangling and teleport mass are spread uniformly
    return c * (direct + dangling_mass / n) + (1.0 - c) * total / n


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Column-stochastic ``Ã`` (real arcs only) plus the dangling-column mask.

    ``apply(z)`` computes ``B z`` with ``B = c (Ã + dangling/|V|) + (1 - c) E``.
    """

    matrix: sp.csr_matrix
    dangling: np.ndarray
    teleport: float

    @property
    def node_count(self):
        return self.matrix.shape[0]

    def apply(self, z):
        d = self.dangling.astype(np.float64)
        return _surf_step(self.matrix @ z, d @ z, z.sum(), self.teleport, self.node_count)

    def to_dense(self):
        n = self.node_count
        a = self.matrix.toarray()
        a[:, self.dangling] = 1.0 / n
        return self.teleport * a + (1.0 - self.teleport) / n


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    x: np.ndarray
    iterations: int
    residual: float


def build_transition(g: SingleRelationalGraph, cfg: SurfConfig = SurfConfig()) -> TransitionMatrix:
    if g.node_count < 1:
        raise InputError("graph has no nodes")
    n = g.node_count
    out = g.out_strength()
    data = g.weight / out[g.src]
    mat = sp.csr_matrix((data, (g.dst, g.src)), shape=(n, n))
    dangling = out == 0
    dangling.setflags(write=False)
    return TransitionMatrix(mat, dangling, cfg.teleport)


def power_method(t: TransitionMatrix, cfg: SurfConfig = SurfConfig()) -> StationaryDistribution:
    """Stationary vector of ``B`` by power iteration from the uniform vector.

    Stops once the L1 step ``|Bx - x|`` is within ``cfg.tolerance``.
    """
    n = t.node_count
    x = np.full(n, 1.0 / n)
    step = np.inf
    for it in range(1, cfg.max_iterations + 1):
        nxt = t.apply(x)
        nxt /= nxt.sum()
        step = np.abs(nxt - x).sum()
        x = nxt
        if step <= cfg.tolerance:
            residual = np.abs(t.apply(x) - x).sum()
            if residual <= cfg.tolerance:
                return StationaryDistribution(x, it, float(residual))
    raise ConvergenceError("power method did not converge", cfg.max_iterations, step)


@dataclass(frozen=True, eq=False)
class MultiRelTransition:
    """Adjusted node transition tensor ``V`` and relation transition tensor ``R``.

    ``stacked`` is the ``|V| x |V||R|`` block matrix ``[P_0 | P_1 | ...]`` of
    per-relation column-normalized slices; ``dangling[r, j]`` marks sources
    with no arc under relation ``r``. The relation tensor is kept only on
    ordered pairs joined by at least one arc (``pair_dst``, ``pair_src``,
    ``pair_share[p, r]``); every other pair has the uniform fiber ``1/|R|``.
    """

    stacked: sp.csr_matrix
    dangling: np.ndarray
    pair_dst: np.ndarray
    pair_src: np.ndarray
    pair_share: np.ndarray
    teleport: float

    @property
    def node_count(self):
        return self.stacked.shape[0]

    @property
    def relation_count(self):
        return self.dangling.shape[0]

    def apply(self, z, y):
        """``sum_r y_r V_r z`` with dangling and teleport corrections."""
        n = self.node_count
        direct = self.stacked @ np.kron(y, z)
        dmass = y @ (self.dangling.astype(np.float64) @ z)
        return _surf_step(direct, dmass, z.sum() * y.sum(), self.teleport, n)

    def relation_update(self, x):
        """``y_r = sum_ij R[i, j, r] x_i x_j`` (unnormalized)."""
        prod = x[self.pair_dst] * x[self.pair_src]
        k = self.relation_count
        return prod @ self.pair_share + (x.sum() ** 2 - prod.sum()) / k

    def effective_matrix(self, y):
        """Sparse ``c * sum_r y_r P_r`` (real arcs only) and per-source spread ``u``.

        Column ``i`` of the full adjusted transition equals the sparse column
        plus ``u[i] / |V|`` in every row.
        """
        n, k = self.node_count, self.relation_count
        weights = sp.diags(np.repeat(y, n))
        blocks = (self.stacked @ weights).tocsc()
        w = sum(blocks[:, r * n:(r + 1) * n] for r in range(k))
        c = self.teleport
        u = c * (y @ self.dangling.astype(np.float64)) + (1.0 - c) * y.sum()
        return (c * w).tocsr(), u

    def to_dense_node(self):
        """Dense adjusted ``V[i, j, r]`` (destination, source, relation)."""
        n, k = self.node_count, self.relation_count
        out = np.empty((n, n, k))
        full = self.stacked.toarray()
        for r in range(k):
            a = full[:, r * n:(r + 1) * n]
            a[:, self.dangling[r]] = 1.0 / n
            out[:, :, r] = self.teleport * a + (1.0 - self.teleport) / n
        return out

    def to_dense_relation(self):
        """Dense adjusted ``R[i, j, r]`` (destination, source, relation)."""
        n, k = self.node_count, self.relation_count
        out = np.full((n, n, k), 1.0 / k)
        out[self.pair_dst, self.pair_src, :] = self.pair_share
        return out


@dataclass(frozen=True, eq=False)
class MultiRankResult:
    x: np.ndarray
    y: np.ndarray
    iterations: int
    residual_x: float
    residual_y: float


def build_multirel_transitions(g, cfg: SurfConfig = SurfConfig()) -> MultiRelTransition:
    if isinstance(g, SingleRelationalGraph):
        g = g.as_multi()
    if g.node_count < 1:
        raise InputError("graph has no nodes")
    n, k = g.node_count, g.relation_count
    out = np.zeros((k, n))
    np.add.at(out, (g.rel, g.src), g.weight)
    data = g.weight / out[g.rel, g.src]
    stacked = sp.csr_matrix((data, (g.dst, g.rel * n + g.src)), shape=(n, n * k))
    dangling = out == 0

    key = g.dst * n + g.src
    pairs, inv = np.unique(key, return_inverse=True)
    share = np.zeros((len(pairs), k))
    np.add.at(share, (inv, g.rel), g.weight)
    share /= share.sum(axis=1, keepdims=True)
    for a in (dangling, share):
        a.setflags(write=False)
    return MultiRelTransition(stacked, dangling, pairs // n, pairs % n, share, cfg.teleport)


def multirank(t: MultiRelTransition, cfg: SurfConfig = SurfConfig()) -> MultiRankResult:
    """Joint node/relation stationary distributions by alternating iteration.

    Each sweep updates ``x`` from the current ``y``, then ``y`` from the new
    ``x``; both are renormalized. Stops when both successive L1 changes and
    the node fixed-point residual are within ``cfg.tolerance``.
    """
    n, k = t.node_count, t.relation_count
    x = np.full(n, 1.0 / n)
    y = np.full(k, 1.0 / k)
    dx = dy = np.inf
    for it in range(1, cfg.max_iterations + 1):
        xn = t.apply(x, y)
        xn /= xn.sum()
        yn = t.relation_update(xn)
        yn /= yn.sum()
        dx, dy = np.abs(xn - x).sum(), np.abs(yn - y).sum()
        x, y = xn, yn
        if dx <= cfg.tolerance and dy <= cfg.tolerance:
            rx = np.abs(t.apply(x, y) - x).sum()
            ry_vec = t.relation_update(x)
            ry = np.abs(ry_vec / ry_vec.sum() - y).sum()
            if rx <= cfg.tolerance and ry <= cfg.tolerance:
                return MultiRankResult(x, y, it, float(rx), float(ry))
    raise ConvergenceError("MultiRank did not converge", cfg.max_iterations, max(dx, dy))


def stationary_csv_rows(labels, values):
    return [(label, float(v)) for label, v in zip(labels, values)]
