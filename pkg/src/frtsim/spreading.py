"""Flooding simulation over temporal contact graphs.

A message injected at a node floods deterministically: whenever two nodes
share an edge, each forwards everything it holds. The first-delivery events
form a fastest-route tree per (root, injection frame); every root-to-node
path in it is an earliest-delivery route under the chosen propagation mode.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from ._kernels import flood_kernel
from .graph import TemporalContactGraph

__all__ = [
    "PropagationMode",
    "Message",
    "TreeEntry",
    "FastestRouteTree",
    "SweepSpec",
    "flood",
    "sweep",
    "out_degrees",
    "level_counts",
    "evenly_spaced_injection_frames",
    "write_tree_csv",
]


class PropagationMode(Enum):
    """How far a message may travel within a single frame.

    ONE_HOP_PER_FRAME: a node that received the message in frame f forwards
    from frame f+1 onward. INTRA_FRAME: the message additionally relays
    across the frame's static graph, so a whole connected component can be
    reached within one frame.
    """

    ONE_HOP_PER_FRAME = "one-hop"
    INTRA_FRAME = "intra-frame"


@dataclass(frozen=True)
class Message:
    root: int
    injection_frame: int

    @classmethod
    def from_seconds(cls, root: int, t0_seconds: float, delta_t: int) -> "Message":
        # A frame already in progress at generation time cannot be used.
        return cls(root, math.ceil(t0_seconds / delta_t))


@dataclass(frozen=True)
class TreeEntry:
    parent: int
    arrival: int
    level: int


@dataclass(frozen=True)
class FastestRouteTree:
    """Spreading history of one message: parent, arrival frame and tree
    level for every reached node. The root is not an entry; the first send
    frame is the minimum arrival over entries (None when nothing was
    reached)."""

    root: int
    injection_frame: int
    mode: PropagationMode
    first_send_frame: int | None
    entries: dict[int, TreeEntry]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def reached(self) -> list[int]:
        return sorted(self.entries)

    def arrivals(self) -> dict[int, int]:
        return {n: e.arrival for n, e in self.entries.items()}


def flood(
    g: TemporalContactGraph,
    message: Message,
    mode: PropagationMode = PropagationMode.ONE_HOP_PER_FRAME,
    backend: str | None = None,
) -> FastestRouteTree:
    """Simulate flooding of ``message`` over ``g`` and build its tree.

    Deterministic: parent ties (several informing neighbors in the same
    frame, at the same within-frame relay depth under INTRA_FRAME) break
    toward the smallest informing node id. An injection frame beyond the
    timeline yields an empty tree.
    """
    g._check_node(message.root)
    t0 = int(message.injection_frame)
    if t0 < 0:
        raise ValueError("injection frame must be non-negative")
    if t0 >= g.n_frames:
        return FastestRouteTree(message.root, t0, mode, None, {})
    kernel = flood_kernel(backend)
    arrival, parent, level = kernel(
        g._stored,
        g._offsets,
        g._eu,
        g._ev,
        g.node_count,
        int(message.root),
        t0,
        mode is PropagationMode.INTRA_FRAME,
    )
    entries: dict[int, TreeEntry] = {}
    first_send: int | None = None
    for n in np.nonzero(arrival >= 0)[0]:
        a = int(arrival[n])
        entries[int(n)] = TreeEntry(int(parent[n]), a, int(level[n]))
        if first_send is None or a < first_send:
            first_send = a
    return FastestRouteTree(message.root, t0, mode, first_send, entries)


@dataclass(frozen=True)
class SweepSpec:
    """A batch of floods: every (root, injection frame) pair.

    ``roots`` defaults to all nodes of the graph the sweep runs on.
    """

    injection_frames: tuple[int, ...]
    roots: tuple[int, ...] | None = None
    mode: PropagationMode = PropagationMode.ONE_HOP_PER_FRAME

    def __post_init__(self) -> None:
        if not self.injection_frames:
            raise ValueError("injection_frames must be non-empty")
        if self.roots is not None and not self.roots:
            raise ValueError("roots must be non-empty when given")

    def tasks(self, g: TemporalContactGraph) -> list[tuple[int, int]]:
        roots = self.roots if self.roots is not None else tuple(range(g.node_count))
        return [(root, t0) for t0 in self.injection_frames for root in roots]


def sweep(g: TemporalContactGraph, spec: SweepSpec) -> Iterator[FastestRouteTree]:
    """Yield one tree per (root, injection frame) pair, streamed in order."""
    for root, t0 in spec.tasks(g):
        yield flood(g, Message(root, t0), spec.mode)


def evenly_spaced_injection_frames(g: TemporalContactGraph, n: int) -> list[int]:
    """``n`` evenly spaced frames over [first non-empty, last non-empty].

    Duplicates after rounding are collapsed, so fewer than ``n`` frames may
    be returned on short timelines.
    """
    if n < 1:
        raise ValueError("need at least one injection time")
    if g.active_frame_count == 0:
        raise ValueError("graph has no contacts")
    first = int(g.stored_frames[0])
    last = int(g.stored_frames[-1])
    pts = np.unique(np.rint(np.linspace(first, last, n)).astype(np.int64))
    return [int(p) for p in pts]


def out_degrees(tree: FastestRouteTree) -> dict[int, int]:
    """Children counts over root plus entries; leaves have degree 0."""
    degrees = {tree.root: 0}
    for n in tree.entries:
        degrees[n] = 0
    for e in tree.entries.values():
        degrees[e.parent] += 1
    return degrees


def level_counts(tree: FastestRouteTree) -> dict[int, int]:
    """Number of nodes per tree level; the root alone sits at level 0."""
    counts = Counter(e.level for e in tree.entries.values())
    counts[0] = 1
    return dict(sorted(counts.items()))


def write_tree_csv(tree: FastestRouteTree, g: TemporalContactGraph, fp: TextIO) -> None:
    """Export a tree as CSV rows "child,parent,arrival_frame,level".

    A metadata comment line with root, t0_frame, t_r and mode precedes the
    header. Rows are sorted by (arrival, child id).
    """
    t_r = "none" if tree.first_send_frame is None else tree.first_send_frame
    fp.write(
        f"# root={g.label_of(tree.root)} t0_frame={tree.injection_frame} "
        f"t_r={t_r} mode={tree.mode.value}\n"
    )
    fp.write("child,parent,arrival_frame,level\n")
    for n, e in sorted(tree.entries.items(), key=lambda kv: (kv[1].arrival, kv[0])):
        fp.write(f"{g.label_of(n)},{g.label_of(e.parent)},{e.arrival},{e.level}\n")
