"""Pure-Python flood kernel; behavioral mirror of frtsim._speedups.

Operates on the graph's CSR arrays (stored frame ids, per-frame edge
offsets, endpoint arrays). Returns (arrival, parent, level) int arrays with
-1 for unreached nodes; the root keeps arrival -1 and level 0.
"""

from __future__ import annotations

from bisect import bisect_left

import numpy as np


def flood_arrays(frame_ids, offsets, eu, ev, n_nodes, root, t0, intra):
    arrival = [-1] * n_nodes
    parent = [-1] * n_nodes
    level = [-1] * n_nodes
    informed = bytearray(n_nodes)
    send_from = [0] * n_nodes
    cand = [-1] * n_nodes

    informed[root] = 1
    send_from[root] = t0
    level[root] = 0
    n_informed = 1

    frame_list = frame_ids.tolist()
    off = offsets.tolist()
    us = eu.tolist()
    vs = ev.tolist()

    for fi in range(bisect_left(frame_list, t0), len(frame_list)):
        if n_informed == n_nodes:
            break
        f = frame_list[fi]
        lo, hi = off[fi], off[fi + 1]
        while True:
            newly = []
            for e in range(lo, hi):
                u = us[e]
                v = vs[e]
                if informed[u]:
                    if not informed[v] and send_from[u] <= f:
                        c = cand[v]
                        if c == -1:
                            cand[v] = u
                            newly.append(v)
                        elif u < c:
                            cand[v] = u
                elif informed[v] and send_from[v] <= f:
                    c = cand[u]
                    if c == -1:
                        cand[u] = v
                        newly.append(u)
                    elif v < c:
                        cand[u] = v
            if not newly:
                break
            for w in newly:
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

    return (
        np.asarray(arrival, dtype=np.int64),
        np.asarray(parent, dtype=np.int32),
        np.asarray(level, dtype=np.int32),
    )
