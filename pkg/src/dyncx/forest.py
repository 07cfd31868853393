"""Fully dynamic forest connectivity via Euler tour trees.

Each tree's Euler tour is kept as a treap over "arcs": one self-arc (v,v)
per vertex and a directed arc pair per tree edge, so a k-vertex tree owns
3k-2 arcs. Link rotates both tours to their endpoints and concatenates;
cut splits the tour around the arc pair. All paths from a public method
touch O(depth) treap nodes; priorities come from a seeded RNG, so probe
counts are reproducible and can be held to a per-operation budget.

Treap subtrees carry the minimum self-arc vertex id, which makes "smallest
node in this component" a root lookup.
"""

from __future__ import annotations

import random

from .framework import DyncxError, ProbeMeter

INF = float("inf")


class WouldCycle(DyncxError):
    """Linking two vertices already in the same tree."""


class NotTreeEdge(DyncxError):
    """Cutting an edge the forest does not contain."""


class _Arc:
    __slots__ = ("u", "v", "prio", "left", "right", "parent", "size", "min_vertex")

    def __init__(self, u: int, v: int, prio: float):
        self.u = u
        self.v = v
        self.prio = prio
        self.left = None
        self.right = None
        self.parent = None
        self.size = 1
        self.min_vertex = u if u == v else INF

    def own_key(self):
        return self.u if self.u == self.v else INF


class DynamicForest:
    def __init__(self, n: int, seed: int = 0, op_budget: int | None = None):
        if n < 0:
            raise ValueError("n must be nonnegative")
        self.n = n
        self._rng = random.Random(seed)
        self.meter = ProbeMeter(op_budget)
        self._self_arc = [_Arc(v, v, self._rng.random()) for v in range(n)]
        self._edge_arc: dict[tuple[int, int], _Arc] = {}
        self._edges = 0

    # -- treap plumbing ----------------------------------------------------

    def _pull(self, x: _Arc):
        self.meter.charge()
        size = 1
        mn = x.own_key()
        if x.left is not None:
            size += x.left.size
            if x.left.min_vertex < mn:
                mn = x.left.min_vertex
        if x.right is not None:
            size += x.right.size
            if x.right.min_vertex < mn:
                mn = x.right.min_vertex
        x.size = size
        x.min_vertex = mn

    def _root(self, x: _Arc) -> _Arc:
        while x.parent is not None:
            self.meter.charge()
            x = x.parent
        self.meter.charge()
        return x

    def _index(self, x: _Arc) -> int:
        """In-order position of x within its treap."""
        pos = x.left.size if x.left is not None else 0
        while x.parent is not None:
            self.meter.charge()
            if x.parent.right is x:
                pos += 1 + (x.parent.left.size if x.parent.left is not None else 0)
            x = x.parent
        return pos

    def _merge(self, a: _Arc | None, b: _Arc | None) -> _Arc | None:
        if a is None:
            return b
        if b is None:
            return a
        self.meter.charge()
        if a.prio < b.prio:
            right = self._merge(a.right, b)
            a.right = right
            right.parent = a
            self._pull(a)
            a.parent = None
            return a
        left = self._merge(a, b.left)
        b.left = left
        left.parent = b
        self._pull(b)
        b.parent = None
        return b

    def _split(self, t: _Arc | None, k: int):
        """First k arcs into the left result."""
        if t is None:
            return None, None
        self.meter.charge()
        left_size = t.left.size if t.left is not None else 0
        if k <= left_size:
            a, b = self._split(t.left, k)
            t.left = b
            if b is not None:
                b.parent = t
            self._pull(t)
            t.parent = None
            if a is not None:
                a.parent = None
            return a, t
        a, b = self._split(t.right, k - left_size - 1)
        t.right = a
        if a is not None:
            a.parent = t
        self._pull(t)
        t.parent = None
        if b is not None:
            b.parent = None
        return t, b

    def _reroot(self, v: int) -> _Arc:
        """Rotate v's tour to start at its self-arc; returns the treap root."""
        arc = self._self_arc[v]
        pos = self._index(arc)
        root = self._root(arc)
        a, b = self._split(root, pos)
        return self._merge(b, a)

    # -- public interface --------------------------------------------------

    def _check(self, v: int):
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")

    @property
    def edge_count(self) -> int:
        return self._edges

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._edge_arc

    def connected(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        self.meter.start_op()
        same = self._root(self._self_arc[u]) is self._root(self._self_arc[v])
        self.meter.end_op("connected")
        return same

    def link(self, u: int, v: int):
        self._check(u)
        self._check(v)
        if u == v:
            raise WouldCycle("self-loop")
        self.meter.start_op()
        if self._root(self._self_arc[u]) is self._root(self._self_arc[v]):
            self.meter.end_op("link")
            raise WouldCycle(f"{u} and {v} already connected")
        tour_u = self._reroot(u)
        tour_v = self._reroot(v)
        arc_uv = _Arc(u, v, self._rng.random())
        arc_vu = _Arc(v, u, self._rng.random())
        self._edge_arc[(u, v)] = arc_uv
        self._edge_arc[(v, u)] = arc_vu
        self._merge(self._merge(self._merge(tour_u, arc_uv), tour_v), arc_vu)
        self._edges += 1
        self.meter.end_op("link")

    def cut(self, u: int, v: int):
        if (u, v) not in self._edge_arc:
            raise NotTreeEdge(f"({u},{v}) is not a forest edge")
        self.meter.start_op()
        first = self._edge_arc[(u, v)]
        second = self._edge_arc[(v, u)]
        i = self._index(first)
        j = self._index(second)
        if i > j:
            first, second = second, first
            i, j = j, i
        root = self._root(first)
        a, rest = self._split(root, i)
        _, rest = self._split(rest, 1)  # drop the down arc
        mid, tail = self._split(rest, j - i - 1)
        _, c = self._split(tail, 1)  # drop the up arc
        self._merge(a, c)
        # mid stays as its own tour
        del self._edge_arc[(u, v)]
        del self._edge_arc[(v, u)]
        self._edges -= 1
        self.meter.end_op("cut")

    def component_min(self, v: int) -> int:
        """Smallest vertex id in v's tree."""
        self._check(v)
        self.meter.start_op()
        mn = self._root(self._self_arc[v]).min_vertex
        self.meter.end_op("component_min")
        return int(mn)

    def component_size(self, v: int) -> int:
        self._check(v)
        self.meter.start_op()
        arcs = self._root(self._self_arc[v]).size
        self.meter.end_op("component_size")
        return (arcs + 2) // 3

    def tree_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for (u, v) in self._edge_arc if u < v]

    def copy(self) -> "DynamicForest":
        dup = object.__new__(DynamicForest)
        dup.n = self.n
        dup._rng = random.Random()
        dup._rng.setstate(self._rng.getstate())
        dup.meter = ProbeMeter(self.meter.budget)
        dup._edges = self._edges
        mapping: dict[int, _Arc] = {}

        def clone(node: _Arc | None, parent: _Arc | None):
            if node is None:
                return None
            twin = _Arc(node.u, node.v, node.prio)
            twin.size = node.size
            twin.min_vertex = node.min_vertex
            twin.parent = parent
            twin.left = clone(node.left, twin)
            twin.right = clone(node.right, twin)
            mapping[id(node)] = twin
            return twin

        roots = {}
        for arc in self._self_arc:
            node = arc
            while node.parent is not None:
                node = node.parent
            roots[id(node)] = node
        for root in roots.values():
            clone(root, None)
        dup._self_arc = [mapping[id(arc)] for arc in self._self_arc]
        dup._edge_arc = {key: mapping[id(arc)] for key, arc in self._edge_arc.items()}
        return dup
