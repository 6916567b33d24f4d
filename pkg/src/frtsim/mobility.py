"""Synthetic proximity traces from random-waypoint and truncated Levy walk
mobility.

Both models move point nodes inside a rectangular area, sample positions on
a fixed grid, and convert sampled positions into contact records whenever
two nodes are within detection range. Trajectory generation is per-node
deterministic given (seed, node id), so runs reproduce bit-exactly and
nodes can be generated independently.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from .graph import TemporalContactGraph

__all__ = [
    "RwpParams",
    "TlwParams",
    "MobilityConfig",
    "Trajectory",
    "sample_truncated_power_law",
    "truncated_power_law_cdf",
    "simulate_rwp",
    "simulate_tlw",
    "simulate",
    "trajectories_to_contacts",
    "generate_contact_graph",
]


def sample_truncated_power_law(exponent: float, x_min: float, x_max: float, u):
    """Inverse-CDF sample(s) with density ~ x**-(1+exponent) on [x_min, x_max].

    ``u`` is a uniform deviate in [0, 1) (scalar or array); u=0 maps to
    x_min and u -> 1 approaches x_max.
    """
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    if not 0 < x_min < x_max:
        raise ValueError("need 0 < x_min < x_max")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0) or np.any(u_arr >= 1):
        raise ValueError("u must lie in [0, 1)")
    a = exponent
    lo = x_min**-a
    hi = x_max**-a
    x = (lo - u_arr * (lo - hi)) ** (-1.0 / a)
    return float(x) if np.isscalar(u) or np.ndim(u) == 0 else x


def truncated_power_law_cdf(x, exponent: float, x_min: float, x_max: float):
    """CDF of the truncated power law, clipped outside [x_min, x_max]."""
    a = exponent
    lo = x_min**-a
    hi = x_max**-a
    x_arr = np.clip(np.asarray(x, dtype=float), x_min, x_max)
    return (lo - x_arr**-a) / (lo - hi)


@dataclass(frozen=True)
class RwpParams:
    speed_min: float = 0.01
    speed_max: float = 0.1
    pause_s: float = 0.0


@dataclass(frozen=True)
class TlwParams:
    alpha: float = 1.6  # flight-length exponent
    beta: float = 0.8  # pause-time exponent
    l_min: float = 1.0
    l_max: float = 40.0
    t_min: float = 20.0
    t_max: float = 3600.0
    coupling: str = "power_law"  # or "constant"
    coupling_k: float = 1.0  # flight duration = k * l**(1-rho)
    coupling_rho: float = 0.5
    constant_speed: float = 1.0  # used by the "constant" coupling


@dataclass(frozen=True)
class MobilityConfig:
    model: str  # "rwp" | "tlw"
    node_count: int = 100
    area: tuple[float, float] = (40.0, 40.0)
    detection_range: float = 2.0
    sample_interval: float = 20.0
    duration: float = 86400.0
    rng_seed: int = 0
    warmup_s: float | None = None  # default: 3600 for tlw, 0 for rwp
    rwp: RwpParams = field(default_factory=RwpParams)
    tlw: TlwParams = field(default_factory=TlwParams)

    def validate(self) -> None:
        if self.model not in ("rwp", "tlw"):
            raise ValueError(f"unknown mobility model {self.model!r}")
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        w, h = self.area
        if w <= 0 or h <= 0:
            raise ValueError("area dimensions must be positive")
        if not 0 < self.detection_range < min(w, h):
            raise ValueError("detection_range must be positive and smaller than the area")
        if self.sample_interval <= 0:
            raise ValueError("sample_interval must be positive")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.warmup_s is not None and self.warmup_s < 0:
            raise ValueError("warmup must be non-negative")
        if not 0 < self.rwp.speed_min <= self.rwp.speed_max:
            raise ValueError("need 0 < speed_min <= speed_max")
        if self.rwp.pause_s < 0:
            raise ValueError("pause must be non-negative")
        t = self.tlw
        if t.alpha <= 0 or t.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if not 0 < t.l_min < t.l_max:
            raise ValueError("need 0 < l_min < l_max")
        if not 0 < t.t_min < t.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if t.coupling not in ("power_law", "constant"):
            raise ValueError(f"unknown speed coupling {t.coupling!r}")
        if t.coupling_k <= 0 or not 0 <= t.coupling_rho <= 1:
            raise ValueError("need coupling_k > 0 and 0 <= coupling_rho <= 1")
        if t.constant_speed <= 0:
            raise ValueError("constant_speed must be positive")

    @property
    def warmup(self) -> float:
        if self.warmup_s is not None:
            return float(self.warmup_s)
        return 3600.0 if self.model == "tlw" else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["area"] = list(self.area)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MobilityConfig":
        d = dict(d)
        for key in d:
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"unknown mobility config key {key!r}")
        if "area" in d:
            d["area"] = tuple(float(v) for v in d["area"])
        if "rwp" in d:
            d["rwp"] = RwpParams(**d["rwp"])
        if "tlw" in d:
            d["tlw"] = TlwParams(**d["tlw"])
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def with_seed(self, seed: int) -> "MobilityConfig":
        return replace(self, rng_seed=int(seed))


@dataclass(frozen=True)
class Trajectory:
    """Sampled positions of one node on the common time grid."""

    node: int
    times: np.ndarray  # seconds, multiples of the sample interval
    xy: np.ndarray  # shape (len(times), 2), inside the area


def _node_rng(seed: int, node: int) -> np.random.Generator:
    # Independent, reproducible stream per (seed, node).
    return np.random.default_rng((int(seed) & 0xFFFFFFFFFFFFFFFF, int(node)))


def iter_rwp_legs(
    rng: np.random.Generator, area: tuple[float, float], params: RwpParams
) -> Iterator[tuple[tuple[float, float], float]]:
    """Endless (waypoint, speed) draws; one tuple per travel leg."""
    w, h = area
    while True:
        dest = (rng.uniform(0.0, w), rng.uniform(0.0, h))
        speed = rng.uniform(params.speed_min, params.speed_max)
        yield dest, speed


def iter_tlw_steps(
    rng: np.random.Generator, params: TlwParams
) -> Iterator[tuple[float, float, float, float]]:
    """Endless (length, angle, flight_duration, pause) draws per walk step."""
    while True:
        length = sample_truncated_power_law(params.alpha, params.l_min, params.l_max, rng.random())
        angle = rng.uniform(0.0, 2.0 * math.pi)
        if params.coupling == "power_law":
            flight_dur = params.coupling_k * length ** (1.0 - params.coupling_rho)
        else:
            flight_dur = length / params.constant_speed
        pause = sample_truncated_power_law(params.beta, params.t_min, params.t_max, rng.random())
        yield length, angle, flight_dur, pause


def _fold(value: float, size: float) -> float:
    # Specular reflection at 0 and size (billiard fold onto [0, size]).
    y = value % (2.0 * size)
    return 2.0 * size - y if y > size else y


def simulate_rwp(config: MobilityConfig) -> list[Trajectory]:
    """Random waypoint trajectories: straight legs to uniform waypoints at
    per-leg speeds drawn uniformly, with an optional pause at each waypoint."""
    config.validate()
    if config.model != "rwp":
        raise ValueError("config.model must be 'rwp'")
    dt = config.sample_interval
    k_max = int(config.duration // dt)
    times = np.arange(k_max + 1) * dt
    warm = config.warmup
    out = []
    for node in range(config.node_count):
        rng = _node_rng(config.rng_seed, node)
        w, h = config.area
        pos = np.array([rng.uniform(0.0, w), rng.uniform(0.0, h)])
        legs = iter_rwp_legs(rng, config.area, config.rwp)
        samples = np.empty((k_max + 1, 2))
        k = 0
        t = 0.0
        while k <= k_max:
            dest_t, speed = next(legs)
            dest = np.array(dest_t)
            dist = float(np.hypot(dest[0] - pos[0], dest[1] - pos[1]))
            leg_end = t + dist / speed
            while k <= k_max and warm + k * dt <= leg_end:
                ts = warm + k * dt
                frac = (ts - t) * speed / dist if dist > 0 else 1.0
                samples[k] = pos + (dest - pos) * frac
                k += 1
            t = leg_end
            pos = dest
            if config.rwp.pause_s > 0:
                pause_end = t + config.rwp.pause_s
                while k <= k_max and warm + k * dt <= pause_end:
                    samples[k] = pos
                    k += 1
                t = pause_end
        out.append(Trajectory(node, times, samples))
    return out


def simulate_tlw(config: MobilityConfig) -> list[Trajectory]:
    """Truncated Levy walk trajectories: power-law flight lengths and pause
    times (both upper-truncated), uniform turning angles, speed coupled to
    flight length, specular reflection at the area boundary."""
    config.validate()
    if config.model != "tlw":
        raise ValueError("config.model must be 'tlw'")
    dt = config.sample_interval
    k_max = int(config.duration // dt)
    times = np.arange(k_max + 1) * dt
    warm = config.warmup
    w, h = config.area
    out = []
    for node in range(config.node_count):
        rng = _node_rng(config.rng_seed, node)
        ux = rng.uniform(0.0, w)
        uy = rng.uniform(0.0, h)
        steps = iter_tlw_steps(rng, config.tlw)
        samples = np.empty((k_max + 1, 2))
        k = 0
        t = 0.0
        while k <= k_max:
            length, angle, flight_dur, pause = next(steps)
            dx = length * math.cos(angle)
            dy = length * math.sin(angle)
            flight_end = t + flight_dur
            while k <= k_max and warm + k * dt <= flight_end:
                frac = (warm + k * dt - t) / flight_dur
                samples[k, 0] = _fold(ux + dx * frac, w)
                samples[k, 1] = _fold(uy + dy * frac, h)
                k += 1
            ux += dx
            uy += dy
            t = flight_end
            pause_end = t + pause
            while k <= k_max and warm + k * dt <= pause_end:
                samples[k, 0] = _fold(ux, w)
                samples[k, 1] = _fold(uy, h)
                k += 1
            t = pause_end
        out.append(Trajectory(node, times, samples))
    return out


def simulate(config: MobilityConfig) -> list[Trajectory]:
    config.validate()
    return simulate_rwp(config) if config.model == "rwp" else simulate_tlw(config)


def trajectories_to_contacts(
    trajectories: Sequence[Trajectory],
    detection_range: float,
    delta_t: int,
) -> TemporalContactGraph:
    """Contact graph from sampled positions: frame f holds edge (i, j) iff
    the nodes are within ``detection_range`` at sample time f * delta_t.

    All trajectories must share the sampling grid and the grid step must
    equal ``delta_t``.
    """
    if not trajectories:
        raise ValueError("no trajectories")
    if detection_range <= 0:
        raise ValueError("detection_range must be positive")
    delta_t = int(delta_t)
    ref = trajectories[0].times
    for traj in trajectories[1:]:
        if not np.array_equal(traj.times, ref):
            raise ValueError("trajectories use mismatched sampling grids")
    if len(ref) > 1 and ref[1] - ref[0] != delta_t:
        raise ValueError("delta_t must equal the trajectory sample interval")
    n = len(trajectories)
    labels = [str(traj.node) for traj in trajectories]
    if len(set(labels)) != n:
        raise ValueError("duplicate node ids in trajectories")
    positions = np.stack([traj.xy for traj in trajectories])  # (n, T, 2)
    iu, ju = np.triu_indices(n, 1)
    r2 = detection_range * detection_range
    records: list[tuple[float, str, str]] = []
    for f in range(len(ref)):
        diff = positions[iu, f] - positions[ju, f]
        hits = np.nonzero(diff[:, 0] ** 2 + diff[:, 1] ** 2 <= r2)[0]
        t = f * delta_t
        for p in hits:
            records.append((t, labels[iu[p]], labels[ju[p]]))
    # Nodes exist only through contacts, so never-in-range nodes are absent.
    return TemporalContactGraph.from_records(records, delta_t)


def generate_contact_graph(config: MobilityConfig) -> TemporalContactGraph:
    """Simulate the configured model and extract its contact graph."""
    config.validate()
    if not float(config.sample_interval).is_integer():
        raise ValueError("sample_interval must be an integer number of seconds")
    return trajectories_to_contacts(
        simulate(config), config.detection_range, int(config.sample_interval)
    )
