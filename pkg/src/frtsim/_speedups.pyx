# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled flood kernel; behavioral mirror of frtsim._flood_py."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def flood_arrays(frame_ids_obj, offsets_obj, eu_obj, ev_obj,
                 int n_nodes, int root, long long t0, bint intra):
    cdef cnp.int64_t[::1] frame_ids = frame_ids_obj
    cdef cnp.int64_t[::1] offsets = offsets_obj
    cdef cnp.int32_t[::1] eu = eu_obj
    cdef cnp.int32_t[::1] ev = ev_obj

    arrival_nd = np.full(n_nodes, -1, dtype=np.int64)
    parent_nd = np.full(n_nodes, -1, dtype=np.int32)
    level_nd = np.full(n_nodes, -1, dtype=np.int32)
    informed_nd = np.zeros(n_nodes, dtype=np.uint8)
    send_from_nd = np.zeros(n_nodes, dtype=np.int64)
    cand_nd = np.full(n_nodes, -1, dtype=np.int32)
    newly_nd = np.empty(n_nodes, dtype=np.int32)

    cdef cnp.int64_t[::1] arrival = arrival_nd
    cdef cnp.int32_t[::1] parent = parent_nd
    cdef cnp.int32_t[::1] level = level_nd
    cdef cnp.uint8_t[::1] informed = informed_nd
    cdef cnp.int64_t[::1] send_from = send_from_nd
    cdef cnp.int32_t[::1] cand = cand_nd
    cdef cnp.int32_t[::1] newly = newly_nd

    cdef Py_ssize_t n_stored = frame_ids.shape[0]
    cdef Py_ssize_t fi, e, i, lo_e, hi_e
    cdef long long f
    cdef int u, v, w, p, c, n_new, n_informed

    informed[root] = 1
    send_from[root] = t0
    level[root] = 0
    n_informed = 1

    # First stored frame with index >= t0.
    cdef Py_ssize_t lo = 0, hi = n_stored, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if frame_ids[mid] < t0:
            lo = mid + 1
        else:
            hi = mid

    for fi in range(lo, n_stored):
        if n_informed == n_nodes:
            break
        f = frame_ids[fi]
        lo_e = offsets[fi]
        hi_e = offsets[fi + 1]
        while True:
            n_new = 0
            for e in range(lo_e, hi_e):
                u = eu[e]
                v = ev[e]
                if informed[u] != 0:
                    if informed[v] == 0 and send_from[u] <= f:
                        c = cand[v]
                        if c == -1:
                            cand[v] = u
                            newly[n_new] = v
                            n_new += 1
                        elif u < c:
                            cand[v] = u
                elif informed[v] != 0 and send_from[v] <= f:
                    c = cand[u]
                    if c == -1:
                        cand[u] = v
                        newly[n_new] = u
                        n_new += 1
                    elif v < c:
                        cand[u] = v
            if n_new == 0:
                break
            for i in range(n_new):
                w = newly[i]
                p = cand[w]
                informed[w] = 1
                arrival[w] = f
                parent[w] = p
                level[w] = level[p] + 1
                # One hop per frame: forward from the next frame onward.
                send_from[w] = f if intra else f + 1
                cand[w] = -1
                n_informed += 1
            if not intra:
                break

    return arrival_nd, parent_nd, level_nd
