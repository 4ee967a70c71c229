"""Shared random-object generators and independent reference algorithms."""

from __future__ import annotations

import numpy as np
import pytest

from fedcollab.graphs import Instance, UsageGraph


def make_instance(rng: np.random.Generator, n: int | None = None, *,
                  edge_prob: float = 0.2, density: float = 0.5) -> Instance:
    """Random instance; resamples the competition graph if it comes out complete."""
    if n is None:
        n = int(rng.integers(2, 11))
    while True:
        s = rng.random((n, n)) < edge_prob
        s = np.triu(s, 1)
        s = s | s.T
        if n == 1 or s.sum() < n * (n - 1):
            break
    w = np.where(rng.random((n, n)) < density, rng.uniform(0.05, 1.0, (n, n)), 0.0)
    np.fill_diagonal(w, 0.0)
    return Instance(n, s, w)


def make_usage(rng: np.random.Generator, n: int, max_edges: int | None = None,
               allowed: np.ndarray | None = None) -> UsageGraph:
    """Random usage graph built by incremental edge additions.

    When `allowed` (a boolean matrix) is given, edges are drawn from its
    support only — used to respect the benefit-subset invariant.
    """
    usage = UsageGraph(n)
    if allowed is None:
        pool = [(j, i) for j in range(n) for i in range(n) if j != i]
    else:
        pool = [(int(j), int(i)) for j, i in np.transpose(np.nonzero(allowed)) if j != i]
    if not pool:
        return usage
    rng.shuffle(pool)
    limit = len(pool) if max_edges is None else min(max_edges, len(pool))
    for j, i in pool[: rng.integers(0, limit + 1)]:
        usage.add_edge(j, i)
    return usage


def closure_by_squaring(x: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure by repeated boolean matrix squaring."""
    n = x.shape[0]
    reach = x | np.eye(n, dtype=bool)
    while True:
        nxt = reach | (reach @ reach)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def closure_by_floyd_warshall(x: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure by the classic triple loop."""
    n = x.shape[0]
    reach = (x | np.eye(n, dtype=bool)).copy()
    for k in range(n):
        for a in range(n):
            if reach[a, k]:
                for b in range(n):
                    if reach[k, b]:
                        reach[a, b] = True
    return reach


def bfs_reachable(x: np.ndarray, start: int) -> set[int]:
    """Nodes reachable from start over off-diagonal x-edges, plus start."""
    seen = {start}
    frontier = [start]
    while frontier:
        u = frontier.pop()
        for v in np.flatnonzero(x[u]).tolist():
            if v != u and v not in seen:
                seen.add(v)
                frontier.append(v)
    return seen


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
