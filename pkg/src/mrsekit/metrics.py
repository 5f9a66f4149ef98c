"""Clustering agreement: NMI, ARI and unsupervised accuracy.

Inputs may be :class:`~mrsekit.tree.Partition` objects or label sequences of
equal length. Only the grouping matters, never the label values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InputError
from .tree import Partition

__all__ = ["ContingencyTable", "contingency", "nmi", "ari", "acc"]


def _codes(labels):
    if isinstance(labels, Partition):
        return labels.labels()
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise InputError("labels must be one-dimensional")
    _, codes = np.unique(arr, return_inverse=True)
    return codes


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """``counts[u, v]``: nodes in predicted cluster ``u`` and true class ``v``."""

    counts: np.ndarray

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def rows(self):
        return self.counts.sum(axis=1)

    @property
    def cols(self):
        return self.counts.sum(axis=0)


def contingency(pred, truth) -> ContingencyTable:
    p, t = _codes(pred), _codes(truth)
    if len(p) != len(t):
        raise InputError(f"node-set mismatch: {len(p)} predicted vs {len(t)} true labels")
    if len(p) == 0:
        raise InputError("empty labelling")
    counts = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(counts, (p, t), 1)
    return ContingencyTable(counts)


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth) -> float:
    """Mutual information over the arithmetic mean of the two entropies.

    If either labelling has zero entropy the score is 1 for identical
    groupings and 0 otherwise.
    """
    table = contingency(pred, truth)
    c, n = table.counts, table.total
    hp, ht = _entropy(table.rows, n), _entropy(table.cols, n)
    if hp == 0 or ht == 0:
        identical = c.shape[0] == c.shape[1] and np.count_nonzero(c) == c.shape[0]
        return 1.0 if identical else 0.0
    u, v = np.nonzero(c)
    nuv = c[u, v].astype(np.float64)
    mi = float((nuv / n * np.log(nuv * n / (table.rows[u] * table.cols[v]))).sum())
    return min(max(mi / ((hp + ht) / 2), 0.0), 1.0)


def _pairs(x):
    x = np.asarray(x, dtype=np.float64)
    return float((x * (x - 1) / 2).sum())


def ari(pred, truth) -> float:
    """Adjusted Rand index under the permutation model."""
    table = contingency(pred, truth)
    n = table.total
    index = _pairs(table.counts)
    a, b = _pairs(table.rows), _pairs(table.cols)
    total = n * (n - 1) / 2
    expected = a * b / total if total else 0.0
    top = (a + b) / 2
    if top == expected:
        # both labellings trivial in the same way (all one block or all singletons)
        return 1.0
    return (index - expected) / (top - expected)


def acc(pred, truth) -> float:
    """Best fraction of nodes matched under a one-to-one cluster-to-class map.

    The contingency table is zero-padded to a square so that surplus clusters
    (or classes) stay unmatched.
    """
    c = contingency(pred, truth).counts
    k = max(c.shape)
    padded = np.zeros((k, k), dtype=np.int64)
    padded[:c.shape[0], :c.shape[1]] = c
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum() / c.sum())
