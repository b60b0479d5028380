# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; see ``_kernels_py`` for the reference semantics."""

from libc.stdlib cimport malloc, calloc, free
from libc.stdint cimport uint64_t

from fintop import _kernels_py


cdef struct SubsetState:
    int n
    uint64_t *down
    uint64_t *up
    Py_ssize_t limit


cdef bint _subsets_rec(SubsetState *st, int i, uint64_t inc, uint64_t exc, list out) except -1:
    cdef uint64_t one = 1
    while i < st.n and (((inc >> i) & one) or ((exc >> i) & one)):
        i += 1
    if i == st.n:
        out.append(inc)
        return st.limit > 0 and len(out) >= st.limit
    if _subsets_rec(st, i + 1, inc, exc | st.up[i], out):
        return True
    return _subsets_rec(st, i + 1, inc | st.down[i], exc, out)


def closed_subsets(down, up, Py_ssize_t limit=0):
    cdef int n = len(down)
    if n > 64:
        return _kernels_py.closed_subsets(down, up, limit)
    cdef SubsetState st
    cdef list out = []
    cdef int i
    st.n = n
    st.limit = limit
    st.down = <uint64_t *> malloc((n + 1) * sizeof(uint64_t))
    st.up = <uint64_t *> malloc((n + 1) * sizeof(uint64_t))
    if st.down == NULL or st.up == NULL:
        free(st.down)
        free(st.up)
        raise MemoryError()
    try:
        for i in range(n):
            st.down[i] = <uint64_t> down[i]
            st.up[i] = <uint64_t> up[i]
        _subsets_rec(&st, 0, 0, 0, out)
    finally:
        free(st.down)
        free(st.up)
    return out


cdef struct Csp:
    int n
    int *a
    int *grp
    int *grp_off
    char *used
    char *allowed
    int *allowed_off
    int *cand_ptr
    int *cand
    int *e_ptr
    int *e_dst
    int *e_tab
    int *tabs
    int *trail
    int trail_len
    Py_ssize_t limit


cdef inline bint _put(Csp *c, int v, int val):
    cdef int g
    if not c.allowed[c.allowed_off[v] + val]:
        return False
    g = c.grp[v]
    if g >= 0:
        if c.used[c.grp_off[g] + val]:
            return False
        c.used[c.grp_off[g] + val] = 1
    c.a[v] = val
    c.trail[c.trail_len] = v
    c.trail_len += 1
    return True


cdef inline bint _propagate(Csp *c, int q):
    cdef int u, k, d, req
    while q < c.trail_len:
        u = c.trail[q]
        q += 1
        for k in range(c.e_ptr[u], c.e_ptr[u + 1]):
            req = c.tabs[c.e_tab[k] + c.a[u]]
            if req < 0:
                return False
            d = c.e_dst[k]
            if c.a[d] == -1:
                if not _put(c, d, req):
                    return False
            elif c.a[d] != req:
                return False
    return True


cdef inline void _undo(Csp *c, int mark):
    cdef int v
    while c.trail_len > mark:
        c.trail_len -= 1
        v = c.trail[c.trail_len]
        if c.grp[v] >= 0:
            c.used[c.grp_off[c.grp[v]] + c.a[v]] = 0
        c.a[v] = -1


cdef bint _csp_rec(Csp *c, int start, list out) except -1:
    cdef int v = start
    cdef int k, mark, i
    while v < c.n and c.a[v] != -1:
        v += 1
    if v == c.n:
        out.append(tuple([c.a[i] for i in range(c.n)]))
        return c.limit > 0 and len(out) >= c.limit
    for k in range(c.cand_ptr[v], c.cand_ptr[v + 1]):
        mark = c.trail_len
        if _put(c, v, c.cand[k]) and _propagate(c, mark):
            if _csp_rec(c, v + 1, out):
                _undo(c, mark)
                return True
        _undo(c, mark)
    return False


def solve_functional(sizes, candidates, edges, groups, Py_ssize_t limit=0):
    cdef int n = len(sizes)
    cdef int v, k, i, g, total_allowed = 0, total_cand = 0, total_tab = 0
    cdef int m = len(edges), ngroups = 0, used_size = 0
    cdef Csp c
    cdef list out = []
    cand_lists = []
    for v in range(n):
        cl = range(sizes[v]) if candidates is None or candidates[v] is None else candidates[v]
        cl = list(cl)
        cand_lists.append(cl)
        total_cand += len(cl)
        total_allowed += sizes[v]
    grp_list = list(groups) if groups is not None else [-1] * n
    group_width = {}
    for v in range(n):
        g = grp_list[v]
        if g >= 0:
            group_width[g] = max(group_width.get(g, 0), sizes[v])
            ngroups = max(ngroups, g + 1)
    by_src = [[] for _ in range(n)]
    for k in range(m):
        src, dst, table = edges[k]
        by_src[src].append((dst, table))
        total_tab += len(table)

    c.n = n
    c.limit = limit
    c.trail_len = 0
    c.a = <int *> malloc((n + 1) * sizeof(int))
    c.grp = <int *> malloc((n + 1) * sizeof(int))
    c.grp_off = <int *> malloc((ngroups + 1) * sizeof(int))
    c.allowed_off = <int *> malloc((n + 1) * sizeof(int))
    c.cand_ptr = <int *> malloc((n + 1) * sizeof(int))
    c.cand = <int *> malloc((total_cand + 1) * sizeof(int))
    c.e_ptr = <int *> malloc((n + 1) * sizeof(int))
    c.e_dst = <int *> malloc((m + 1) * sizeof(int))
    c.e_tab = <int *> malloc((m + 1) * sizeof(int))
    c.tabs = <int *> malloc((total_tab + 1) * sizeof(int))
    c.trail = <int *> malloc((n + 1) * sizeof(int))
    c.allowed = <char *> calloc(total_allowed + 1, sizeof(char))
    for g in range(ngroups):
        used_size += group_width.get(g, 0)
    c.used = <char *> calloc(used_size + 1, sizeof(char))
    try:
        if (c.a == NULL or c.grp == NULL or c.grp_off == NULL or c.allowed_off == NULL
                or c.cand_ptr == NULL or c.cand == NULL or c.e_ptr == NULL
                or c.e_dst == NULL or c.e_tab == NULL or c.tabs == NULL
                or c.trail == NULL or c.allowed == NULL or c.used == NULL):
            raise MemoryError()
        i = 0
        for g in range(ngroups):
            c.grp_off[g] = i
            i += group_width.get(g, 0)
        i = 0
        k = 0
        for v in range(n):
            c.a[v] = -1
            c.grp[v] = grp_list[v]
            c.allowed_off[v] = i
            c.cand_ptr[v] = k
            for val in cand_lists[v]:
                c.cand[k] = val
                c.allowed[i + <int> val] = 1
                k += 1
            i += sizes[v]
        c.cand_ptr[n] = k
        i = 0
        k = 0
        for v in range(n):
            c.e_ptr[v] = k
            for dst, table in by_src[v]:
                c.e_dst[k] = dst
                c.e_tab[k] = i
                for val in table:
                    c.tabs[i] = val
                    i += 1
                k += 1
        c.e_ptr[n] = k
        _csp_rec(&c, 0, out)
    finally:
        free(c.a); free(c.grp); free(c.grp_off); free(c.allowed_off)
        free(c.cand_ptr); free(c.cand); free(c.e_ptr); free(c.e_dst)
        free(c.e_tab); free(c.tabs); free(c.trail); free(c.allowed); free(c.used)
    return out
