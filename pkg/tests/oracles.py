"""Independent dense reference implementations used as test oracles.

Nothing here imports the solver or entropy code under test; everything is
rebuilt from plain adjacency arrays with numpy.
"""
import itertools
import math

import numpy as np


def adjacency(n, arcs, relations=1):
    """Dense ``A[r, dst, src]`` from ``(src, dst, rel, weight)`` tuples."""
    a = np.zeros((relations, n, n))
    for s, d, r, w in arcs:
        a[r, d, s] += w
    return a


def graph_adjacency(g):
    """Dense ``A[r, dst, src]`` of a package graph, read off its raw arc arrays."""
    rel = getattr(g, "rel", np.zeros(len(g.src), dtype=int))
    k = getattr(g, "relation_count", 1)
    return adjacency(g.node_count, zip(g.src.tolist(), g.dst.tolist(), rel.tolist(),
                                       g.weight.tolist()), k)


def adjusted(a, c):
    """Column-stochastic ``c (A~ + dangling) + (1 - c)/n`` of one slice ``a[dst, src]``."""
    n = a.shape[0]
    out = a.sum(axis=0)
    p = np.where(out > 0, a / np.where(out > 0, out, 1), 1.0 / n)
    return c * p + (1 - c) / n


def stationary(b):
    """Eigenvector of ``b`` for eigenvalue 1, normalized to sum 1."""
    vals, vecs = np.linalg.eig(b)
    k = np.argmin(np.abs(vals - 1))
    v = np.real(vecs[:, k])
    return v / v.sum()


def relation_tensor(a):
    """``R[dst, src, r]``: share of relation r among arcs src -> dst, uniform if none."""
    k = a.shape[0]
    tot = a.sum(axis=0)
    out = np.empty(a.shape[1:] + (k,))
    for r in range(k):
        out[:, :, r] = np.where(tot > 0, a[r] / np.where(tot > 0, tot, 1), 1.0 / k)
    return out


def dense_multirank(a, c=0.85, tol=1e-14, iters=100000):
    k, n, _ = a.shape
    v = np.stack([adjusted(a[r], c) for r in range(k)], axis=2)
    rt = relation_tensor(a)
    x, y = np.full(n, 1 / n), np.full(k, 1 / k)
    for _ in range(iters):
        xn = np.einsum("ijr,j,r->i", v, x, y)
        xn /= xn.sum()
        yn = np.einsum("ijr,i,j->r", rt, xn, xn)
        yn /= yn.sum()
        done = np.abs(xn - x).sum() < tol and np.abs(yn - y).sum() < tol
        x, y = xn, yn
        if done:
            break
    return x, y, v, rt


def tree_entropy(m, x, tree_sets):
    """``-sum_alpha P(enter T_alpha) log2(p_alpha / p_parent)`` for an explicit tree.

    ``tree_sets`` is a list of ``(members, parent_members)`` pairs for every
    non-root tree node; ``m[dst, src]`` is the one-step transition matrix.
    """
    n = len(x)
    total = 0.0
    for members, parent in tree_sets:
        inside = np.zeros(n, dtype=bool)
        inside[list(members)] = True
        enter = sum(x[i] * m[j, i] for i in range(n) if not inside[i] for j in members)
        p = x[list(members)].sum()
        pp = x[list(parent)].sum()
        if enter:
            total -= enter * math.log2(p / pp)
    return total


def se_cut_volume(a2, tree_sets):
    """Degree-form SE: ``-sum g_alpha/vol log2(vol_alpha/vol_parent)`` from dense ``a2[dst, src]``."""
    n = a2.shape[0]
    deg = a2.sum(axis=1)
    vol = deg.sum()
    total = 0.0
    for members, parent in tree_sets:
        inside = np.zeros(n, dtype=bool)
        inside[list(members)] = True
        g = a2[np.ix_(inside, ~inside)].sum()
        va, vp = deg[inside].sum(), deg[list(parent)].sum()
        if g:
            total -= g / vol * math.log2(va / vp)
    return total


def height2_sets(blocks, n):
    """Tree-node sets of the height-2 tree whose clusters are ``blocks``."""
    root = list(range(n))
    out = []
    for b in blocks:
        out.append((list(b), root))
        for v in b:
            out.append(([v], list(b)))
    return out


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def min_partition_by_subsets(n, term):
    """Exact ``min over partitions of sum_C term(C)`` by subset dynamic programming.

    ``term`` maps a bitmask to its cost. Runs in ``O(3^n)``.
    """
    full = (1 << n) - 1
    cost = [term(s) if s else 0.0 for s in range(full + 1)]
    best = [math.inf] * (full + 1)
    choice = [0] * (full + 1)
    best[0] = 0.0
    for s in range(1, full + 1):
        low = s & -s
        rest = s ^ low
        sub = rest
        while True:
            c = cost[sub | low] + best[rest ^ sub]
            if c < best[s]:
                best[s], choice[s] = c, sub | low
            if sub == 0:
                break
            sub = (sub - 1) & rest
    blocks, s = [], full
    while s:
        b = choice[s]
        blocks.append([i for i in range(n) if b >> i & 1])
        s ^= b
    return best[full], blocks


def brute_acc(pred, truth):
    """Best matched fraction over all injective cluster-to-class maps."""
    pred, truth = np.asarray(pred), np.asarray(truth)
    cl, tl = sorted(set(pred.tolist())), sorted(set(truth.tolist()))
    k = max(len(cl), len(tl))
    cl = cl + [None] * (k - len(cl))
    tl = tl + [None] * (k - len(tl))
    best = 0
    for perm in itertools.permutations(tl):
        hit = sum(int(np.sum((pred == c) & (truth == t)))
                  for c, t in zip(cl, perm) if c is not None and t is not None)
        best = max(best, hit)
    return best / len(pred)


def dense_flow(objective, a, c=0.85):
    """``(kind, m, x)`` for the dense height-2 evaluators of one objective.

    ``kind`` is ``"degree"`` (``m`` is the summed adjacency) or ``"flow"``
    (``m`` is the one-step transition matrix, ``x`` its stationary vector).
    """
    if objective == "se":
        return "degree", (a > 0).any(axis=0).astype(float) if a.shape[0] > 1 else a[0], None
    if objective == "rsse":
        a1 = (a > 0).any(axis=0).astype(float) if a.shape[0] > 1 else a[0]
        b = adjusted(a1, c)
        return "flow", b, stationary(b)
    x, y, v, _ = dense_multirank(a, c)
    return "flow", np.einsum("ijr,r->ij", v, y), x


def height2_value(kind, m, x, blocks, n):
    sets = height2_sets(blocks, n)
    return se_cut_volume(m, sets) if kind == "degree" else tree_entropy(m, x, sets)


def exhaustive_height2(kind, m, x, n):
    """Global minimum of a height-2 objective over all partitions of ``n`` nodes."""
    root = list(range(n))

    def term(mask):
        members = [i for i in range(n) if mask >> i & 1]
        sets = [(members, root)] + [([v], members) for v in members]
        return se_cut_volume(m, sets) if kind == "degree" else tree_entropy(m, x, sets)

    return min_partition_by_subsets(n, term)


def merge_delta_expansion(x, m, blocks_a, blocks_b):
    """Closed-form merge delta expanded term by term over the leaves of ``a`` and ``b``.

    Leaf coefficients are the leaf occupancies; entering flows are summed
    directly from the dense transition matrix ``m[dst, src]``.
    """
    n = len(x)

    def enter(members):
        inside = np.zeros(n, dtype=bool)
        inside[members] = True
        return float(x[~inside] @ m[np.ix_(inside, ~inside)].sum(axis=0))

    a, b = list(blocks_a), list(blocks_b)
    pa, pb = x[a].sum(), x[b].sum()
    pn = pa + pb
    lg = math.log2
    one = -sum(x[v] * lg(x[v] / pn) for v in a + b)
    two = sum(x[v] * lg(x[v] / pa) for v in a)
    three = sum(x[v] * lg(x[v] / pb) for v in b)
    en = enter(a + b)
    return (-en * lg(pn) if en else 0.0) + one + enter(a) * lg(pa) + two \
        + enter(b) * lg(pb) + three
