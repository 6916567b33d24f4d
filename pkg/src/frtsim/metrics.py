"""Delivery-delay metrics and distribution statistics for tree collections.

Four delay definitions per delivered message copy: time since injection,
time since the root's first send, time since the node's own first contact
opportunity, and the node-clock reading (frames the node spent in contact).
The node clock only advances while a node is in contact, which makes its
distributions robust to idle periods and to the choice of injection time.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import TemporalContactGraph
from .spreading import FastestRouteTree, level_counts, out_degrees

__all__ = [
    "node_clock",
    "DelayRecord",
    "delay_record",
    "delay_records",
    "Histogram",
    "log_binned_pdf",
    "linear_binned_pdf",
    "average_out_degrees",
    "avg_out_degree_density",
    "BoxStats",
    "level_boxplot",
    "SummaryStats",
    "summary",
    "ProbabilitySeries",
    "sliding_probability_series",
    "arrival_probability_series",
    "contact_probability_series",
]


def node_clock(g: TemporalContactGraph, node: int, start: int, end: int) -> int:
    """Frames in [start, end] in which ``node`` has at least one contact.

    This is the node-local clock: it ticks once per frame of contact and
    stands still while the node is isolated or absent.
    """
    if start > end:
        raise ValueError("start must not exceed end")
    frames = g.node_contact_frames(node)
    lo = int(np.searchsorted(frames, start, side="left"))
    hi = int(np.searchsorted(frames, end, side="right"))
    return hi - lo


@dataclass(frozen=True)
class DelayRecord:
    """The four delay readings for one (tree, node) delivery."""

    root: int
    injection_frame: int
    node: int
    parent: int
    arrival_frame: int
    level: int
    delay_injection_s: int
    delay_first_send_s: int
    delay_first_contact_s: int
    elapsed_contact_frames: int


def delay_record(
    g: TemporalContactGraph,
    tree: FastestRouteTree,
    node: int,
    first_contact_inclusive: bool = True,
) -> DelayRecord:
    """Compute the delay readings of ``node`` within ``tree``.

    The node's first contact opportunity is its first contact at-or-after
    the root's first send frame; with ``first_contact_inclusive=False`` the
    frame after it is used instead (clamped to the arrival frame, where the
    node is necessarily in contact).
    """
    try:
        entry = tree.entries[node]
    except KeyError:
        raise KeyError(f"node {node!r} is not in the tree") from None
    t_r = tree.first_send_frame
    if t_r is None:
        raise ValueError("tree is empty: no first send frame")
    dt = g.delta_t
    arrival = entry.arrival
    start = t_r if first_contact_inclusive else t_r + 1
    t_i0 = g.first_contact_at_or_after(node, start)
    if t_i0 is None or t_i0 > arrival:
        t_i0 = arrival
    return DelayRecord(
        root=tree.root,
        injection_frame=tree.injection_frame,
        node=node,
        parent=entry.parent,
        arrival_frame=arrival,
        level=entry.level,
        delay_injection_s=(arrival - tree.injection_frame) * dt,
        delay_first_send_s=(arrival - t_r) * dt,
        delay_first_contact_s=(arrival - t_i0) * dt,
        elapsed_contact_frames=node_clock(g, node, t_i0, arrival),
    )


def delay_records(
    g: TemporalContactGraph,
    tree: FastestRouteTree,
    first_contact_inclusive: bool = True,
) -> list[DelayRecord]:
    """Delay readings for every node reached by ``tree``, sorted by arrival.

    An empty tree yields an empty list.
    """
    if not tree.entries:
        return []
    order = sorted(tree.entries, key=lambda n: (tree.entries[n].arrival, n))
    return [delay_record(g, tree, n, first_contact_inclusive) for n in order]


# -- distributions ----------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    """Binned probability density: contiguous bins, density integrating to 1."""

    bins: tuple[tuple[float, float, float], ...]  # (left, right, density)
    sample_count: int
    binning: str

    def total_mass(self) -> float:
        return sum(d * (r - l) for l, r, d in self.bins)

    def mode_bin(self) -> tuple[float, float, float]:
        return max(self.bins, key=lambda b: b[2])


def log_binned_pdf(samples: Sequence[float], factor: float = 1.25) -> Histogram:
    """Logarithmically binned density with edges x0 * factor**k.

    ``x0`` is the smallest positive sample; zero samples fall into a
    dedicated first bin [0, x0). All-zero input degenerates to a single
    unit-width bin at zero.
    """
    if factor <= 1:
        raise ValueError("factor must be > 1")
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("no samples")
    if np.any(x < 0):
        raise ValueError("samples must be non-negative")
    n = x.size
    pos = x[x > 0]
    n_zero = n - pos.size
    if pos.size == 0:
        return Histogram(((0.0, 1.0, 1.0),), n, f"log({factor})")
    x0 = float(pos.min())
    xmax = float(pos.max())
    n_edges = 1
    while x0 * factor ** (n_edges - 1) < xmax:
        n_edges += 1
    edges = x0 * factor ** np.arange(max(n_edges, 2), dtype=float)
    counts, _ = np.histogram(pos, bins=edges)
    bins: list[tuple[float, float, float]] = []
    if n_zero:
        bins.append((0.0, x0, n_zero / (n * x0)))
    for k, c in enumerate(counts):
        width = edges[k + 1] - edges[k]
        bins.append((float(edges[k]), float(edges[k + 1]), float(c) / (n * width)))
    return Histogram(tuple(bins), n, f"log({factor})")


def linear_binned_pdf(samples: Sequence[float], width: float, origin: float = 0.0) -> Histogram:
    """Density over fixed-width bins [origin + k*w, origin + (k+1)*w)."""
    if width <= 0:
        raise ValueError("width must be positive")
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("no samples")
    k = np.floor((x - origin) / width).astype(np.int64)
    k_min = int(k.min())
    k_max = int(k.max())
    counts = np.bincount(k - k_min, minlength=k_max - k_min + 1)
    bins = tuple(
        (
            origin + (k_min + i) * width,
            origin + (k_min + i + 1) * width,
            float(c) / (x.size * width),
        )
        for i, c in enumerate(counts)
    )
    return Histogram(bins, x.size, f"linear({width})")


def average_out_degrees(trees: Iterable[FastestRouteTree]) -> dict[int, float]:
    """Per-node average of its out-degree over all trees the node appears in."""
    sums: defaultdict[int, int] = defaultdict(int)
    appearances: defaultdict[int, int] = defaultdict(int)
    for tree in trees:
        for n, d in out_degrees(tree).items():
            sums[n] += d
            appearances[n] += 1
    return {n: sums[n] / appearances[n] for n in sums}


def avg_out_degree_density(trees: Iterable[FastestRouteTree], bin_width: float = 0.25) -> Histogram:
    """Density of per-node average out-degrees; nodes in no tree are excluded."""
    averages = average_out_degrees(trees)
    if not averages:
        raise ValueError("no trees (or no nodes reached)")
    return linear_binned_pdf(list(averages.values()), bin_width)


@dataclass(frozen=True)
class BoxStats:
    level: int
    median: float
    q25: float
    q75: float
    whisker_low: float  # 10th percentile
    whisker_high: float  # 90th percentile
    outliers: tuple[float, ...]
    count: int


def level_boxplot(trees: Iterable[FastestRouteTree]) -> list[BoxStats]:
    """Box statistics of the per-tree node counts at each level.

    Counts N(root, level) are pooled over all trees; percentiles use linear
    interpolation between order statistics. Whiskers sit at the 10th/90th
    percentiles and outliers are the values beyond them.
    """
    pooled: defaultdict[int, list[int]] = defaultdict(list)
    for tree in trees:
        for level, count in level_counts(tree).items():
            pooled[level].append(count)
    stats = []
    for level in sorted(pooled):
        vals = np.asarray(pooled[level], dtype=float)
        p10, q25, med, q75, p90 = np.percentile(vals, [10, 25, 50, 75, 90])
        outliers = tuple(sorted(float(v) for v in vals[(vals < p10) | (vals > p90)]))
        stats.append(
            BoxStats(level, float(med), float(q25), float(q75), float(p10), float(p90), outliers, vals.size)
        )
    return stats


@dataclass(frozen=True)
class SummaryStats:
    average: float
    standard_deviation: float
    dispersion_ratio: float
    count: int


def summary(samples: Sequence[float]) -> SummaryStats:
    """Population mean, population standard deviation and their ratio."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    mean = float(np.mean(x))
    std = float(np.std(x))  # population (ddof=0), fixed for reproducibility
    if std == 0.0:
        ratio = 0.0
    elif mean == 0.0:
        ratio = math.inf
    else:
        ratio = std / mean
    return SummaryStats(mean, std, ratio, x.size)


# -- time-localized probability series --------------------------------------


@dataclass(frozen=True)
class ProbabilitySeries:
    """P(event within +-half_window of t), evaluated on a regular time grid."""

    times: np.ndarray  # seconds
    probability: np.ndarray
    sample_count: int
    half_window_s: int


def sliding_probability_series(
    event_times_s: Sequence[float],
    half_window_s: int,
    eval_times_s: Sequence[float],
    weights: Sequence[int] | None = None,
) -> ProbabilitySeries:
    events = np.asarray(event_times_s, dtype=float)
    eval_t = np.asarray(eval_times_s, dtype=float)
    order = np.argsort(events, kind="stable")
    events = events[order]
    if weights is None:
        csum = np.arange(events.size + 1, dtype=float)
    else:
        w = np.asarray(weights, dtype=float)[order]
        csum = np.concatenate([[0.0], np.cumsum(w)])
    total = csum[-1] if events.size else 0.0
    if total == 0:
        probs = np.zeros(eval_t.size)
    else:
        hi = np.searchsorted(events, eval_t + half_window_s, side="right")
        lo = np.searchsorted(events, eval_t - half_window_s, side="left")
        probs = (csum[hi] - csum[lo]) / total
    return ProbabilitySeries(eval_t, probs, int(total), int(half_window_s))


def arrival_probability_series(
    trees: Iterable[FastestRouteTree],
    level: int,
    half_window_s: int,
    delta_t: int,
    n_frames: int,
    step_s: int | None = None,
) -> ProbabilitySeries:
    """Probability that a level-``level`` arrival falls within the window.

    Arrival times are pooled over all trees; the series is evaluated at
    every ``step_s`` (default delta_t) across the ``n_frames`` timeline. No
    arrivals at the level yields an all-zero series, not an error.
    """
    if half_window_s <= 0 or half_window_s % delta_t != 0:
        raise ValueError("half window must be a positive multiple of delta_t")
    step = step_s or delta_t
    arrivals = [
        e.arrival * delta_t
        for tree in trees
        for e in tree.entries.values()
        if e.level == level
    ]
    eval_t = np.arange(max(n_frames, 1), dtype=float) * delta_t if step == delta_t else np.arange(
        0.0, max(n_frames, 1) * delta_t, step
    )
    return sliding_probability_series(arrivals, half_window_s, eval_t)


def contact_probability_series(
    g: TemporalContactGraph,
    half_window_s: int,
    step_s: int | None = None,
) -> ProbabilitySeries:
    """Companion series over all contacts: P(a contact falls in the window)."""
    if half_window_s <= 0 or half_window_s % g.delta_t != 0:
        raise ValueError("half window must be a positive multiple of delta_t")
    step = step_s or g.delta_t
    frame_times = g.stored_frames.astype(float) * g.delta_t
    per_frame = np.diff(g._offsets)
    eval_t = np.arange(max(g.n_frames, 1), dtype=float) * g.delta_t if step == g.delta_t else np.arange(
        0.0, max(g.n_frames, 1) * g.delta_t, step
    )
    return sliding_probability_series(frame_times, half_window_s, eval_t, weights=per_frame)
