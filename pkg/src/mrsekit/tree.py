"""Encoding trees and partitions.

An encoding tree is stored as an arena of integer handles. Handles never get
reused: merging two clusters retires both handles and allocates a new one,
so handles held elsewhere (e.g. candidate pairs in a priority queue) stay
meaningful. Leaf ``i`` always carries graph node ``i``.
"""
from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, PartitionError

__all__ = ["Partition", "EncodingTree", "singleton_tree", "height1_tree",
           "merge", "partition_of_height1"]


class Partition:
    """Disjoint cover of ``0..node_count-1``; blocks sorted by smallest member."""

    __slots__ = ("node_count", "blocks")

    def __init__(self, blocks: Iterable[Iterable[int]], node_count: int | None = None):
        blocks = [tuple(sorted(int(v) for v in b)) for b in blocks]
        if node_count is None:
            node_count = sum(len(b) for b in blocks)
        seen = np.zeros(node_count, dtype=np.int64)
        for b in blocks:
            if not b:
                raise PartitionError("empty block")
            if b[0] < 0 or b[-1] >= node_count:
                raise PartitionError("block member outside the node range")
            seen[list(b)] += 1
        if np.any(seen != 1):
            raise PartitionError("blocks overlap or leave nodes uncovered")
        self.node_count = node_count
        self.blocks = tuple(sorted(blocks))

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        groups = {}
        for node, lab in enumerate(labels):
            groups.setdefault(lab, []).append(node)
        return cls(groups.values(), len(labels))

    @classmethod
    def singletons(cls, node_count):
        return cls(([i] for i in range(node_count)), node_count)

    def labels(self) -> np.ndarray:
        out = np.empty(self.node_count, dtype=np.int64)
        for k, b in enumerate(self.blocks):
            out[list(b)] = k
        return out

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __eq__(self, other):
        return (isinstance(other, Partition) and self.node_count == other.node_count
                and self.blocks == other.blocks)

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        shown = ", ".join(str(list(b)) for b in self.blocks[:6])
        more = ", ..." if len(self.blocks) > 6 else ""
        return f"Partition([{shown}{more}], node_count={self.node_count})"


class EncodingTree:
    """Rooted tree whose nodes carry nested subsets of the graph's node set."""

    debug = os.environ.get("MRSEKIT_DEBUG", "") not in ("", "0")

    def __init__(self, node_count: int):
        if node_count < 1:
            raise InputError("an encoding tree needs at least one graph node")
        self.node_count = node_count
        self.parent: list[int] = [-1] * node_count
        self.children: list[list[int]] = [[] for _ in range(node_count)]
        self.heights: list[int] = [0] * node_count
        self.alive: list[bool] = [True] * node_count
        self.root = -1
        self._members: dict[int, list[int]] = {}

    def _add(self, children, height):
        h = len(self.parent)
        self.parent.append(-1)
        self.children.append(list(children))
        self.heights.append(height)
        self.alive.append(True)
        for c in children:
            self.parent[c] = h
        return h

    @classmethod
    def from_partition(cls, partition: Partition) -> "EncodingTree":
        """Height-2 tree whose clusters are the blocks of ``partition``."""
        t = cls(partition.node_count)
        clusters = []
        for block in partition:
            h = t._add(block, 1)
            t._members[h] = list(block)
            clusters.append(h)
        t.root = t._add(clusters, 2)
        return t

    @property
    def height(self):
        return self.heights[self.root]

    @property
    def size(self):
        """Number of live tree nodes."""
        return sum(self.alive)

    def clusters(self) -> list[int]:
        """Handles of the live height-1 nodes, ascending."""
        return sorted(h for h in self.children[self.root] if self.heights[h] == 1) \
            if self.height == 2 else []

    def nodes(self):
        """Live handles, ascending."""
        return [h for h, a in enumerate(self.alive) if a]

    def members(self, h) -> list[int]:
        if h < self.node_count:
            return [h]
        if h in self._members:
            return self._members[h]
        out = []
        for c in self.children[h]:
            out.extend(self.members(c))
        return sorted(out)

    def merge(self, a: int, b: int) -> int:
        """Replace clusters ``a`` and ``b`` by one new cluster under the root."""
        if a == b:
            raise InputError("cannot merge a cluster with itself")
        for h in (a, b):
            if h < 0 or h >= len(self.alive) or not self.alive[h]:
                raise InputError(f"no live tree node {h}")
            if h == self.root:
                raise InputError("cannot merge the root")
            if self.heights[h] != 1 or self.parent[h] != self.root or self.height != 2:
                raise InputError(f"tree node {h} is not a height-1 cluster of a height-2 tree")
        kids = sorted(self.children[a] + self.children[b])
        new = self._add(kids, 1)
        self.parent[new] = self.root
        self._members[new] = sorted(self._members.pop(a) + self._members.pop(b))
        for h in (a, b):
            self.alive[h] = False
            self.parent[h] = -1
            self.children[h] = []
        rc = self.children[self.root]
        rc.remove(a)
        rc.remove(b)
        rc.append(new)
        if self.debug:
            self.check()
        return new

    def check(self):
        """Verify the encoding-tree axioms; raises ``AssertionError`` on violation."""
        n = self.node_count
        assert self.alive[self.root] and self.parent[self.root] == -1
        assert sorted(self.members(self.root)) == list(range(n)), "root must carry V"
        for h in self.nodes():
            kids = self.children[h]
            if h < n:
                assert not kids and self.heights[h] == 0, "leaves carry one node"
                continue
            assert kids, f"internal node {h} has no children"
            covered = []
            for c in kids:
                assert self.alive[c] and self.parent[c] == h
                assert self.heights[h] == self.heights[c] + 1, "height must step by one"
                covered.extend(self.members(c))
            assert len(covered) == len(set(covered)), "children overlap"
            assert sorted(covered) == sorted(self.members(h)), "children must cover parent"

    def partition(self) -> Partition:
        return partition_of_height1(self)

    def copy(self) -> "EncodingTree":
        t = EncodingTree.__new__(EncodingTree)
        t.node_count = self.node_count
        t.parent = list(self.parent)
        t.children = [list(c) for c in self.children]
        t.heights = list(self.heights)
        t.alive = list(self.alive)
        t.root = self.root
        t._members = {k: list(v) for k, v in self._members.items()}
        return t


def singleton_tree(node_count: int) -> EncodingTree:
    """Height-2 tree with one cluster per graph node."""
    return EncodingTree.from_partition(Partition.singletons(node_count))


def height1_tree(node_count: int) -> EncodingTree:
    """The unique height-1 tree: a root over ``node_count`` leaves."""
    t = EncodingTree(node_count)
    t.root = t._add(range(node_count), 1)
    return t


def merge(t: EncodingTree, a: int, b: int) -> int:
    return t.merge(a, b)


def partition_of_height1(t: EncodingTree) -> Partition:
    if t.height != 2:
        raise InputError(f"expected a height-2 tree, got height {t.height}")
    return Partition((t.members(h) for h in t.clusters()), t.node_count)
