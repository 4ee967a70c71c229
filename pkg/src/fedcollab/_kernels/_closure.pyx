# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled inner loops for reachability maintenance and conflict guards.

Matrices are row-major uint8 views of boolean arrays: closure[p, q] == 1
iff q is reachable from p (the diagonal is always 1), competing is the
symmetric adjacency of the competition graph.
"""

import numpy as np


def update_closure(unsigned char[:, ::1] closure, Py_ssize_t j, Py_ssize_t i):
    """Restore exact reachability after inserting the edge j -> i.

    New paths created by the edge are exactly p -> j -> i -> q, so the
    update is closure |= outer(closure[:, j], closure[i, :]).
    """
    cdef Py_ssize_t n = closure.shape[0]
    cdef Py_ssize_t p, q
    for p in range(n):
        if closure[p, j]:
            # branchless row OR; vectorizes well
            for q in range(n):
                closure[p, q] |= closure[i, q]


def guard_masks(const unsigned char[:, ::1] competing,
                const unsigned char[:, ::1] closure,
                Py_ssize_t i, Py_ssize_t j):
    """Conflict guards for the prospective edge j -> i.

    Returns (upstream, downstream) boolean masks over nodes k:
      upstream[k]:   k competes with some node that reaches j, and k is
                     already reachable from i;
      downstream[k]: k competes with some node reachable from i, and k
                     already reaches j.
    The edge is safe iff both masks are empty.
    """
    cdef Py_ssize_t n = closure.shape[0]
    upstream_arr = np.zeros(n, dtype=np.uint8)
    downstream_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] upstream = upstream_arr
    cdef unsigned char[::1] downstream = downstream_arr
    cdef Py_ssize_t k, p
    for k in range(n):
        if closure[i, k]:
            for p in range(n):
                if competing[k, p] and closure[p, j]:
                    upstream[k] = 1
                    break
        if closure[k, j]:
            # competing is symmetric, so scanning row k covers s[p, k].
            for p in range(n):
                if competing[k, p] and closure[i, p]:
                    downstream[k] = 1
                    break
    return upstream_arr.view(np.bool_), downstream_arr.view(np.bool_)
