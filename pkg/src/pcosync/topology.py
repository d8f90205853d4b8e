"""Directed interaction graphs.

An arc ``(j, i)`` means oscillator ``j`` influences oscillator ``i``. Nodes are
0-based here; the scenario loader converts from the 1-based edge lists used in
files. Every node implicitly belongs to its own in-neighbourhood.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .exceptions import InvalidArgumentError

__all__ = [
    "Topology",
    "in_neighbors",
    "strongly_connected_components",
    "isolated_source_groups",
    "roots",
    "is_rooted",
    "is_strongly_connected",
    "reachable_from",
]


@dataclass(frozen=True)
class Topology:
    n: int
    arcs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("a topology needs at least one node")
        arcs = frozenset((int(j), int(i)) for j, i in self.arcs)
        for j, i in arcs:
            if not (0 <= j < self.n and 0 <= i < self.n):
                raise InvalidArgumentError(f"arc ({j}, {i}) references a node outside 0..{self.n - 1}")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], *, one_based: bool = False) -> "Topology":
        shift = 1 if one_based else 0
        return cls(n, frozenset((j - shift, i - shift) for j, i in edges))

    @classmethod
    def complete(cls, n: int) -> "Topology":
        return cls(n, frozenset((j, i) for j in range(n) for i in range(n) if i != j))

    @classmethod
    def chain(cls, n: int) -> "Topology":
        return cls(n, frozenset((k, k + 1) for k in range(n - 1)))

    @cached_property
    def _in(self) -> tuple[frozenset, ...]:
        ins = [{i} for i in range(self.n)]
        for j, i in self.arcs:
            ins[i].add(j)
        return tuple(frozenset(s) for s in ins)

    @cached_property
    def _out(self) -> tuple[tuple[int, ...], ...]:
        outs = [set() for _ in range(self.n)]
        for j, i in self.arcs:
            if j != i:
                outs[j].add(i)
        return tuple(tuple(sorted(s)) for s in outs)

    def in_neighbors(self, i: int) -> frozenset:
        if not 0 <= i < self.n:
            raise InvalidArgumentError(f"node {i} outside 0..{self.n - 1}")
        return self._in[i]

    def out_neighbors(self, j: int) -> tuple[int, ...]:
        return self._out[j]


def in_neighbors(g: Topology, i: int) -> frozenset:
    return g.in_neighbors(i)


def strongly_connected_components(g: Topology) -> list[frozenset]:
    """Strongly connected components, via an iterative Tarjan search.

    Components come out in reverse topological order of the condensation.
    """
    index = [-1] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    stack: list[int] = []
    comps: list[frozenset] = []
    counter = 0
    for root in range(g.n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            succ = g.out_neighbors(v)
            recursed = False
            while pos < len(succ):
                w = succ[pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    recursed = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recursed:
                continue
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                comps.append(frozenset(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def isolated_source_groups(g: Topology) -> list[frozenset]:
    """Components of the condensation with no incoming arc from outside.

    Sorted by smallest member. More than one group means no node can reach
    the whole graph.
    """
    comps = strongly_connected_components(g)
    owner = {v: k for k, c in enumerate(comps) for v in c}
    has_input = [False] * len(comps)
    for j, i in g.arcs:
        if owner[j] != owner[i]:
            has_input[owner[i]] = True
    groups = [c for k, c in enumerate(comps) if not has_input[k]]
    return sorted(groups, key=min)


def roots(g: Topology) -> frozenset:
    """All nodes from which every other node is reachable."""
    groups = isolated_source_groups(g)
    return groups[0] if len(groups) == 1 else frozenset()


def is_rooted(g: Topology) -> bool:
    return len(isolated_source_groups(g)) == 1


def is_strongly_connected(g: Topology) -> bool:
    return len(strongly_connected_components(g)) == 1


def reachable_from(g: Topology, source: int) -> set[int]:
    """Nodes reachable from ``source`` along arcs (breadth-first)."""
    seen = {source}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.out_neighbors(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen
