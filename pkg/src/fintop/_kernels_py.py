"""Pure-Python search kernels.

Both kernels here have a compiled twin in ``_kernels.pyx`` with the same
signatures and the same output order; :mod:`fintop.kernels` picks one at
import time.
"""

import sys


def closed_subsets(down, up, limit=0):
    """Enumerate the subsets of ``range(len(down))`` closed under ``down``.

    ``down[i]`` is the bitmask of everything that must be present when ``i``
    is (``i`` itself included); ``up[i]`` is the bitmask of every ``j`` with
    ``i`` in ``down[j]``.  Results are bitmasks, empty set first.  With
    ``limit > 0`` the search stops after ``limit`` results.
    """
    n = len(down)
    out = []

    def rec(i, inc, exc):
        while i < n and ((inc >> i) & 1 or (exc >> i) & 1):
            i += 1
        if i == n:
            out.append(inc)
            return limit and len(out) >= limit
        if rec(i + 1, inc, exc | up[i]):
            return True
        return rec(i + 1, inc | down[i], exc)

    old = sys.getrecursionlimit()
    if old < 4 * n + 100:
        sys.setrecursionlimit(4 * n + 100)
    try:
        rec(0, 0, 0)
    finally:
        sys.setrecursionlimit(old)
    return out


def solve_functional(sizes, candidates, edges, groups, limit=0):
    """Enumerate assignments satisfying functional constraints.

    Variable ``v`` takes a value in ``candidates[v]`` (tried in that order;
    ``None`` means ``range(sizes[v])``).  Each edge ``(src, dst, table)``
    demands ``a[dst] == table[a[src]]``; a table entry of ``-1`` forbids the
    source value.  Variables sharing a non-negative ``groups`` id must take
    pairwise distinct values.  Returns a list of tuples.
    """
    n = len(sizes)
    out_edges = [[] for _ in range(n)]
    for src, dst, table in edges:
        out_edges[src].append((dst, table))
    allowed = []
    order = []
    for v in range(n):
        cand = range(sizes[v]) if candidates is None or candidates[v] is None else candidates[v]
        order.append(list(cand))
        allowed.append(set(order[-1]))
    grp = list(groups) if groups is not None else [-1] * n
    used = {}
    a = [-1] * n
    trail = []
    out = []

    def put(v, val):
        if val not in allowed[v]:
            return False
        g = grp[v]
        if g >= 0:
            key = (g, val)
            if key in used:
                return False
            used[key] = v
        a[v] = val
        trail.append(v)
        return True

    def propagate(q):
        while q < len(trail):
            u = trail[q]
            q += 1
            for dst, table in out_edges[u]:
                req = table[a[u]]
                if req < 0:
                    return False
                if a[dst] == -1:
                    if not put(dst, req):
                        return False
                elif a[dst] != req:
                    return False
        return True

    def undo(mark):
        while len(trail) > mark:
            v = trail.pop()
            if grp[v] >= 0:
                del used[(grp[v], a[v])]
            a[v] = -1

    def rec(start):
        v = start
        while v < n and a[v] != -1:
            v += 1
        if v == n:
            out.append(tuple(a))
            return limit and len(out) >= limit
        for val in order[v]:
            mark = len(trail)
            if put(v, val) and propagate(mark):
                if rec(v + 1):
                    undo(mark)
                    return True
            undo(mark)
        return False

    old = sys.getrecursionlimit()
    if old < 4 * n + 100:
        sys.setrecursionlimit(4 * n + 100)
    try:
        rec(0)
    finally:
        sys.setrecursionlimit(old)
    return out
