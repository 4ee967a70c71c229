#!/usr/bin/env python3
"""Benchmark the compiled reachability kernels against the numpy fallback.

Times the two primitive kernels (closure update, guard masks) and the
full collaborator-selection driver under each backend. Example:

    python benchmarks/bench_kernels.py --sizes 50,100,200 --repeats 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import fedcollab._kernels as kernels
from fedcollab._kernels import _closure_py

try:
    from fedcollab._kernels import _closure as _closure_cy
except ImportError:
    _closure_cy = None

from fedcollab.graphs import Instance
from fedcollab.selection import select_collaborators


def random_instance(rng: np.random.Generator, n: int) -> Instance:
    while True:
        s = rng.random((n, n)) < 0.2
        s = np.triu(s, 1)
        s = s | s.T
        if s.sum() < n * (n - 1):
            break
    w = np.where(rng.random((n, n)) < 0.5, rng.uniform(0.05, 1.0, (n, n)), 0.0)
    np.fill_diagonal(w, 0.0)
    return Instance(n, s, w)


def bench_update_closure(backend, n: int, repeats: int, rng) -> float:
    edges = [(int(j), int(i)) for j, i in rng.integers(0, n, (4 * n, 2)) if j != i]
    best = float("inf")
    for _ in range(repeats):
        closure = np.eye(n, dtype=bool)
        view = closure.view(np.uint8)
        start = time.perf_counter()
        for j, i in edges:
            backend.update_closure(view, j, i)
        best = min(best, time.perf_counter() - start)
    return best


def bench_guard_masks(backend, n: int, repeats: int, rng) -> float:
    s = np.triu(rng.random((n, n)) < 0.2, 1)
    s = (s | s.T).astype(bool)
    closure = np.eye(n, dtype=bool)
    for j, i in rng.integers(0, n, (2 * n, 2)):
        if j != i:
            _closure_py.update_closure(closure.view(np.uint8), int(j), int(i))
    pairs = [(int(a), int(b)) for a, b in rng.integers(0, n, (500, 2)) if a != b]
    s_view, c_view = s.view(np.uint8), closure.view(np.uint8)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for a, b in pairs:
            backend.guard_masks(s_view, c_view, a, b)
        best = min(best, time.perf_counter() - start)
    return best


def bench_selection(backend, instance: Instance, repeats: int) -> float:
    saved = (kernels.update_closure, kernels.guard_masks)
    kernels.update_closure = backend.update_closure
    kernels.guard_masks = backend.guard_masks
    try:
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            select_collaborators(instance)
            best = min(best, time.perf_counter() - start)
        return best
    finally:
        kernels.update_closure, kernels.guard_masks = saved


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="50,100,200")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = [("python", _closure_py)]
    if _closure_cy is not None:
        backends.append(("cython", _closure_cy))
    else:
        print("compiled kernel unavailable; timing the fallback only")

    rng = np.random.default_rng(0)
    header = f"{'benchmark':<28}{'n':>6}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        instance = random_instance(rng, n)
        for label, fn in (("update_closure (4n edges)", bench_update_closure),
                          ("guard_masks (500 pairs)", bench_guard_masks)):
            times = [fn(mod, n, args.repeats, np.random.default_rng(1)) for _, mod in backends]
            row = f"{label:<28}{n:>6}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)
        times = [bench_selection(mod, instance, args.repeats) for _, mod in backends]
        row = f"{'select_collaborators':<28}{n:>6}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
