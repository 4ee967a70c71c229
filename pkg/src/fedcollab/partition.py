"""Baseline groupings: clique covers of the non-competition graph and
strongly-connected coalitions of the benefit graph inside each clique.

A clique cover of the complement of the competition graph partitions the
participants into mutually independent groups; classic federated schemes
are then run inside each group. A minimum cover is found exactly for
small inputs (it is the chromatic number of the competition graph) and
greedily beyond that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Instance

EXACT_COVER_MAX_NODES = 16


@dataclass(frozen=True)
class Partition:
    """Disjoint node groups covering 0..n-1."""

    groups: tuple[tuple[int, ...], ...]
    kind: str  # "clique_cover" | "scc_coalitions"
    mode: str | None = None  # "exact" | "greedy" for covers

    @property
    def n(self) -> int:
        return sum(len(g) for g in self.groups)

    def group_of(self, i: int) -> tuple[int, ...]:
        for g in self.groups:
            if i in g:
                return g
        raise KeyError(i)

    def validate_cover(self, instance: Instance) -> None:
        seen: set[int] = set()
        for g in self.groups:
            for a in g:
                if a in seen:
                    raise ValueError(f"node {a} appears in two groups")
                seen.add(a)
            for a in g:
                for b in g:
                    if a < b and instance.competing[a, b]:
                        raise ValueError(f"competing pair ({a}, {b}) grouped together")
        if seen != set(range(instance.n)):
            raise ValueError("groups do not cover all nodes")


def _canonical_groups(colors: list[int]) -> tuple[tuple[int, ...], ...]:
    by_color: dict[int, list[int]] = {}
    for node, c in enumerate(colors):
        by_color.setdefault(c, []).append(node)
    groups = [tuple(sorted(g)) for g in by_color.values()]
    return tuple(sorted(groups, key=lambda g: g[0]))


def complement(instance: Instance) -> np.ndarray:
    """Adjacency of the independence graph: non-competing distinct pairs."""
    comp = ~instance.competing
    np.fill_diagonal(comp, False)
    return comp


def _color_exact(adjacency: np.ndarray) -> list[int]:
    """Minimum proper coloring, lexicographically smallest assignment.

    Iterative deepening on the color count; nodes are assigned in index
    order and a node may only open color c when colors 0..c-1 are in
    use, so the first complete assignment found for the minimal count is
    the lexicographically smallest one.
    """
    n = adjacency.shape[0]
    neighbors = [np.flatnonzero(adjacency[v]).tolist() for v in range(n)]

    def extend(colors: list[int], v: int, k: int) -> bool:
        if v == n:
            return True
        used = max(colors[:v], default=-1) + 1
        for c in range(min(used + 1, k)):
            if all(colors[u] != c for u in neighbors[v] if u < v):
                colors[v] = c
                if extend(colors, v + 1, k):
                    return True
        colors[v] = -1
        return False

    for k in range(1, n + 1):
        colors = [-1] * n
        if extend(colors, 0, k):
            return colors
    raise AssertionError("n colors always suffice")


def _color_greedy(adjacency: np.ndarray) -> list[int]:
    """First-fit coloring in largest-degree-first order, ties by index."""
    n = adjacency.shape[0]
    degrees = adjacency.sum(axis=1)
    order = sorted(range(n), key=lambda v: (-int(degrees[v]), v))
    colors = [-1] * n
    for v in order:
        taken = {colors[u] for u in np.flatnonzero(adjacency[v]).tolist() if colors[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return colors


def min_clique_cover(instance: Instance) -> Partition:
    """Partition into mutually non-competing groups, as few as possible.

    Covering the complement with cliques is coloring the competition
    graph: exact (provably minimum, deterministic tie-break) up to
    EXACT_COVER_MAX_NODES nodes, greedy first-fit beyond.
    """
    if instance.n <= EXACT_COVER_MAX_NODES:
        colors, mode = _color_exact(instance.competing), "exact"
    else:
        colors, mode = _color_greedy(instance.competing), "greedy"
    return Partition(groups=_canonical_groups(colors), kind="clique_cover", mode=mode)


def strongly_connected_components(adjacency: np.ndarray, nodes: list[int]) -> list[tuple[int, ...]]:
    """Tarjan's algorithm on the subgraph induced by `nodes` (iterative)."""
    node_set = set(nodes)
    succ = {v: [int(u) for u in np.flatnonzero(adjacency[v]).tolist() if u in node_set]
            for v in nodes}
    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[tuple[int, ...]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            for k in range(pi, len(succ[v])):
                u = succ[v][k]
                if u not in index:
                    work[-1] = (v, k + 1)
                    work.append((u, 0))
                    advanced = True
                    break
                if u in on_stack:
                    lowlink[v] = min(lowlink[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack.discard(u)
                    comp.append(u)
                    if u == v:
                        break
                sccs.append(tuple(sorted(comp)))
    return sorted(sccs, key=lambda g: g[0])


def scc_coalitions(instance: Instance, within: Partition) -> Partition:
    """Refine a clique cover into benefit-graph strongly connected coalitions.

    Only mutual (direct or transitive) benefit inside a clique keeps
    participants together; everyone else trains alone.
    """
    if within.kind != "clique_cover":
        raise ValueError(f"expected a clique_cover partition, got kind={within.kind!r}")
    within.validate_cover(instance)
    benefit_adj = instance.benefit > 0.0
    np.fill_diagonal(benefit_adj, False)
    groups: list[tuple[int, ...]] = []
    for clique in within.groups:
        groups.extend(strongly_connected_components(benefit_adj, list(clique)))
    return Partition(groups=tuple(sorted(groups, key=lambda g: g[0])),
                     kind="scc_coalitions", mode=within.mode)
