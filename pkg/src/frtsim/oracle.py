"""Independent earliest-arrival reference for small temporal graphs.

Label-correcting fixpoint over all (frame, edge) records, written without
any of the frontier bookkeeping the flood simulator uses. Guarded to small
instances to prevent accidental blowup; intended for verification only.
"""

from __future__ import annotations

import math

from .graph import TemporalContactGraph
from .spreading import Message, PropagationMode

ORACLE_MAX_NODES = 15
ORACLE_MAX_FRAMES = 100

__all__ = ["OracleSizeError", "earliest_arrival_oracle", "ORACLE_MAX_NODES", "ORACLE_MAX_FRAMES"]


class OracleSizeError(ValueError):
    pass


def earliest_arrival_oracle(
    g: TemporalContactGraph,
    message: Message,
    mode: PropagationMode = PropagationMode.ONE_HOP_PER_FRAME,
) -> dict[int, int]:
    """Minimum arrival frame over all time-respecting paths from the root.

    A path may use edge (u, v) in frame f only if u could already hold the
    message: under ONE_HOP_PER_FRAME u's arrival must precede f (the root
    requires f >= t0); under INTRA_FRAME arrival at f itself suffices.
    Unreachable nodes are absent from the result; the root is never listed.
    """
    if g.node_count > ORACLE_MAX_NODES or g.n_frames > ORACLE_MAX_FRAMES:
        raise OracleSizeError(
            f"instance too large for the oracle "
            f"({g.node_count} nodes, {g.n_frames} frames; "
            f"limits {ORACLE_MAX_NODES}, {ORACLE_MAX_FRAMES})"
        )
    g._check_node(message.root)
    root = message.root
    t0 = int(message.injection_frame)
    if t0 < 0:
        raise ValueError("injection frame must be non-negative")
    intra = mode is PropagationMode.INTRA_FRAME

    edge_frames = [
        (int(f), u, v)
        for f in g.stored_frames
        for u, v in sorted(g.edges_in_frame(int(f)))
    ]
    arr: list[float] = [math.inf] * g.node_count

    changed = True
    while changed:
        changed = False
        for f, u, v in edge_frames:
            for a, b in ((u, v), (v, u)):
                if b == root:
                    continue
                if a == root:
                    can_send = f >= t0
                elif intra:
                    can_send = arr[a] <= f
                else:
                    can_send = arr[a] < f
                if can_send and f < arr[b]:
                    arr[b] = f
                    changed = True

    return {n: int(a) for n, a in enumerate(arr) if n != root and a < math.inf}
