"""Frame-aggregated temporal contact graphs: parsing, storage, queries.

A trace is a sequence of "t i j" records meaning nodes i and j were in
contact at time t (seconds). Records are binned into frames of fixed width
``delta_t``; within a frame a contact is an undirected edge that is active
from the start of the frame to its end. A node exists only through its
contacts: there is no separate presence signal.
"""

from __future__ import annotations

import logging
from typing import Iterable, Iterator, TextIO

import numpy as np

log = logging.getLogger(__name__)

__all__ = [
    "TraceParseError",
    "UnknownNodeError",
    "TemporalContactGraph",
    "parse_contact_stream",
    "insert_empty_frames",
]


class TraceParseError(ValueError):
    """Malformed trace input; carries the offending 1-based line number."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownNodeError(KeyError):
    pass


def _label_key(label: str) -> tuple[int, int, str]:
    # Numeric labels sort numerically, everything else lexicographically after.
    try:
        return (0, int(label), "")
    except ValueError:
        return (1, 0, label)


class TemporalContactGraph:
    """Ordered sequence of contact frames over a fixed node set.

    Nodes carry dense integer ids 0..N-1 assigned by sorted original label
    (numeric labels sort numerically). Frames with no edges are semantically
    empty and not stored. Instances are immutable after construction and
    safe for concurrent reads; arrays returned by accessors are internal and
    must be treated as read-only.
    """

    def __init__(self, delta_t: int, labels: Iterable[str], frames: dict[int, frozenset[tuple[int, int]]]):
        """Low-level constructor; ``frames`` must hold normalized id pairs (u < v).

        Prefer :func:`parse_contact_stream` or :meth:`from_records`.
        """
        delta_t = int(delta_t)
        if delta_t <= 0:
            raise ValueError("delta_t must be a positive number of seconds")
        self.delta_t = delta_t
        self._labels: tuple[str, ...] = tuple(labels)
        self._label_ids: dict[str, int] = {lb: n for n, lb in enumerate(self._labels)}
        self._frames: dict[int, frozenset[tuple[int, int]]] = {
            int(f): frozenset(es) for f, es in frames.items() if es
        }
        self._build_indexes()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_records(
        cls,
        records: Iterable[tuple[float, str, str]],
        delta_t: int,
        on_self_loop: str = "error",
    ) -> "TemporalContactGraph":
        """Build a graph from (t_seconds, label_i, label_j) records.

        Records are binned to frame floor(t / delta_t); duplicate
        (frame, edge) records collapse. ``on_self_loop`` is "error" or
        "skip" (skipped records are logged).
        """
        if on_self_loop not in ("error", "skip"):
            raise ValueError("on_self_loop must be 'error' or 'skip'")
        delta_t = int(delta_t)
        if delta_t <= 0:
            raise ValueError("delta_t must be a positive number of seconds")
        label_frames: dict[int, set[tuple[str, str]]] = {}
        labels: set[str] = set()
        for rec_no, (t, li, lj) in enumerate(records, 1):
            if t < 0:
                raise TraceParseError(rec_no, f"negative timestamp {t!r}")
            if li == lj:
                if on_self_loop == "error":
                    raise TraceParseError(rec_no, f"self-loop on node {li!r}")
                log.warning("record %d: skipping self-loop on node %r", rec_no, li)
                continue
            f = int(t // delta_t)
            if _label_key(lj) < _label_key(li):
                li, lj = lj, li
            label_frames.setdefault(f, set()).add((li, lj))
            labels.add(li)
            labels.add(lj)
        ordered = sorted(labels, key=_label_key)
        ids = {lb: n for n, lb in enumerate(ordered)}
        frames = {
            f: frozenset((ids[a], ids[b]) for a, b in edges)
            for f, edges in label_frames.items()
        }
        return cls(delta_t, ordered, frames)

    def _build_indexes(self) -> None:
        # Eager index construction keeps concurrent reads lock-free.
        stored = sorted(self._frames)
        self._stored = np.asarray(stored, dtype=np.int64)
        self.n_frames = int(self._stored[-1]) + 1 if stored else 0
        eu: list[int] = []
        ev: list[int] = []
        offsets = [0]
        node_frames: list[list[int]] = [[] for _ in self._labels]
        for f in stored:
            edges = sorted(self._frames[f])
            present: set[int] = set()
            for u, v in edges:
                eu.append(u)
                ev.append(v)
                present.add(u)
                present.add(v)
            offsets.append(len(eu))
            for n in present:
                node_frames[n].append(f)
        self._eu = np.asarray(eu, dtype=np.int32)
        self._ev = np.asarray(ev, dtype=np.int32)
        self._offsets = np.asarray(offsets, dtype=np.int64)
        self._node_frames = tuple(np.asarray(fr, dtype=np.int64) for fr in node_frames)
        self.total_contacts = int(len(eu))

    # -- identity ----------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def id_of(self, label: str) -> int:
        try:
            return self._label_ids[label]
        except KeyError:
            raise UnknownNodeError(f"unknown node label {label!r}") from None

    def label_of(self, node: int) -> str:
        self._check_node(node)
        return self._labels[node]

    def _check_node(self, node: int) -> None:
        if not 0 <= node < len(self._labels):
            raise UnknownNodeError(f"unknown node id {node!r}")

    # -- queries -----------------------------------------------------------

    @property
    def stored_frames(self) -> np.ndarray:
        """Sorted indices of frames containing at least one edge (read-only)."""
        return self._stored

    @property
    def active_frame_count(self) -> int:
        return len(self._stored)

    def edges_in_frame(self, f: int) -> frozenset[tuple[int, int]]:
        if f < 0:
            raise ValueError("frame index must be non-negative")
        return self._frames.get(int(f), frozenset())

    def node_contact_frames(self, node: int) -> np.ndarray:
        """Sorted frames in which ``node`` has at least one edge (read-only)."""
        self._check_node(node)
        return self._node_frames[node]

    def first_contact_at_or_after(self, node: int, frame: int) -> int | None:
        """Smallest frame index >= ``frame`` with a contact for ``node``, if any."""
        if frame < 0:
            raise ValueError("frame index must be non-negative")
        frames = self.node_contact_frames(node)
        i = int(np.searchsorted(frames, frame, side="left"))
        if i == len(frames):
            return None
        return int(frames[i])

    def contact_density(self, window_s: int) -> list[tuple[int, int]]:
        """Edge-frame counts per consecutive window of ``window_s`` seconds.

        ``window_s`` must be a positive multiple of delta_t; windows with no
        contacts are included with count zero.
        """
        window_s = int(window_s)
        if window_s <= 0 or window_s % self.delta_t != 0:
            raise ValueError("window must be a positive multiple of delta_t")
        if self.n_frames == 0:
            return []
        frames_per_window = window_s // self.delta_t
        n_windows = -(-self.n_frames // frames_per_window)
        counts = np.zeros(n_windows, dtype=np.int64)
        per_frame = np.diff(self._offsets)
        np.add.at(counts, self._stored // frames_per_window, per_frame)
        return [(int(w * window_s), int(c)) for w, c in enumerate(counts)]

    def describe(self) -> dict:
        """Ingestion statistics; reports both active frames and timeline span."""
        return {
            "nodes": self.node_count,
            "contacts": self.total_contacts,
            "frames_active": self.active_frame_count,
            "frames_span": self.n_frames,
            "delta_t": self.delta_t,
        }

    # -- serialization -----------------------------------------------------

    def to_lines(self) -> Iterator[str]:
        """Trace lines "t i j" sorted by (t, i, j), with t = frame * delta_t."""
        for f in self._stored:
            f = int(f)
            t = f * self.delta_t
            edges = sorted(self._frames[f])
            for u, v in edges:
                yield f"{t} {self._labels[u]} {self._labels[v]}"

    def serialize(self, fp: TextIO) -> None:
        for line in self.to_lines():
            fp.write(line + "\n")

    def _canonical(self) -> dict[int, frozenset[tuple[str, str]]]:
        return {
            f: frozenset((self._labels[u], self._labels[v]) for u, v in es)
            for f, es in self._frames.items()
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TemporalContactGraph):
            return NotImplemented
        return self.delta_t == other.delta_t and self._canonical() == other._canonical()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"TemporalContactGraph(nodes={self.node_count}, "
            f"frames={self.active_frame_count}/{self.n_frames}, "
            f"contacts={self.total_contacts}, delta_t={self.delta_t})"
        )


def parse_contact_stream(
    lines: Iterable[str],
    delta_t: int,
    on_self_loop: str = "error",
) -> TemporalContactGraph:
    """Parse "t i j" trace lines into a :class:`TemporalContactGraph`.

    Lines may arrive unsorted; fields are separated by tabs or spaces and
    '#' starts a comment line. Timestamps need not be multiples of delta_t.
    Raises :class:`TraceParseError` with the line number on malformed input.
    """
    if on_self_loop not in ("error", "skip"):
        raise ValueError("on_self_loop must be 'error' or 'skip'")

    def records() -> Iterator[tuple[float, str, str]]:
        for line_no, raw in enumerate(lines, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise TraceParseError(line_no, f"expected 't i j', got {raw.rstrip()!r}")
            try:
                t = float(parts[0])
            except ValueError:
                raise TraceParseError(line_no, f"non-numeric timestamp {parts[0]!r}") from None
            if not np.isfinite(t) or t < 0:
                raise TraceParseError(line_no, f"invalid timestamp {parts[0]!r}")
            if parts[1] == parts[2]:
                if on_self_loop == "error":
                    raise TraceParseError(line_no, f"self-loop on node {parts[1]!r}")
                log.warning("line %d: skipping self-loop on node %r", line_no, parts[1])
                continue
            yield t, parts[1], parts[2]

    return TemporalContactGraph.from_records(records(), delta_t, on_self_loop="skip")


def insert_empty_frames(
    g: TemporalContactGraph,
    insertions: Iterable[tuple[int, int]],
) -> TemporalContactGraph:
    """Return a copy of ``g`` with runs of empty frames inserted.

    Each (position, count) inserts ``count`` empty frames starting at frame
    index ``position``: every original frame f >= position moves to f + count
    (insertions accumulate). Wall-clock delays stretch; contact counts do not.
    """
    ins = sorted((int(p), int(c)) for p, c in insertions)
    for p, c in ins:
        if p < 0 or c < 1:
            raise ValueError("insertions must have position >= 0 and count >= 1")
    positions = np.asarray([p for p, _ in ins], dtype=np.int64)
    counts = np.asarray([c for _, c in ins], dtype=np.int64)
    cum = np.cumsum(counts)

    def shift(f: int) -> int:
        i = int(np.searchsorted(positions, f, side="right"))
        return f + (int(cum[i - 1]) if i else 0)

    frames = {shift(f): g.edges_in_frame(f) for f in g.stored_frames}
    return TemporalContactGraph(g.delta_t, g.labels, frames)
