import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE = {}


def record(criterion, passed, detail=""):
    ACCEPTANCE[criterion] = (bool(passed), detail)


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_weighted_digraph(rng, n, p=0.3, self_loops=False):
    """Arc list ``(src, dst, weight)`` with every node on a directed cycle (strongly connected)."""
    perm = rng.permutation(n)
    arcs = {}
    for k in range(n):
        arcs[(int(perm[k]), int(perm[(k + 1) % n]))] = float(rng.uniform(0.5, 2.0))
    for i in range(n):
        for j in range(n):
            if (i != j or self_loops) and rng.random() < p:
                arcs[(i, j)] = float(rng.uniform(0.1, 3.0))
    return [(s, d, w) for (s, d), w in sorted(arcs.items())]


def random_undirected(rng, n, p=0.3):
    """Connected, non-bipartite weighted undirected edge list."""
    perm = rng.permutation(n)
    edges = {}
    for k in range(n - 1):
        a, b = sorted((int(perm[k]), int(perm[k + 1])))
        edges[(a, b)] = float(rng.uniform(0.5, 2.0))
    if n >= 3:
        edges[tuple(sorted((int(perm[0]), int(perm[2]))))] = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges[(i, j)] = float(rng.uniform(0.1, 3.0))
    return [(a, b, w) for (a, b), w in sorted(edges.items())]


def random_blocks(rng, n, k=None):
    k = k or int(rng.integers(1, n + 1))
    labels = rng.integers(0, k, size=n)
    blocks = {}
    for v, lab in enumerate(labels.tolist()):
        blocks.setdefault(lab, []).append(v)
    return list(blocks.values())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
