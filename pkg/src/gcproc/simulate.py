"""Event-driven sampling of counting-process paths and empirical summaries.

The generative representation is a marked Poisson clock: event epochs arrive
at the total rate Lambda and each epoch carries an independent size mark
drawn with probabilities lambda_j / Lambda.  This is distributionally
identical to superposing k independent single-size streams but needs one
time draw per event.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import RateVector
from .stats import EmpiricalDistribution

__all__ = [
    "SeedSpec",
    "SamplePath",
    "sample_path",
    "sample_paths",
    "sample_counts",
    "count_at",
    "increments",
    "empirical_distribution",
    "path_to_text",
    "path_from_text",
]

_UINT64 = 1 << 64


@dataclass(frozen=True)
class SeedSpec:
    """Counter-based substream address: (master seed, stream id).

    Streams are Philox generators keyed by the two ids, so distinct
    stream_ids give statistically independent substreams and the same spec
    reproduces the same draws regardless of parallel schedule.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed < _UINT64:
            raise ValueError("master_seed must fit in 64 bits")
        if not 0 <= self.stream_id < _UINT64:
            raise ValueError("stream_id must fit in 64 bits")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def offset(self, i: int) -> "SeedSpec":
        """The substream i slots after this one."""
        return SeedSpec(self.master_seed, self.stream_id + i)


@dataclass(frozen=True)
class SamplePath:
    """One realized trajectory: time-ordered (time, size) events on a horizon."""

    horizon: float
    k: int
    events: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        if not self.horizon > 0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        events = tuple((float(tm), int(sz)) for tm, sz in self.events)
        object.__setattr__(self, "events", events)
        prev = 0.0
        for tm, sz in events:
            if not 0.0 < tm <= self.horizon:
                raise ValueError(f"event time {tm!r} outside (0, horizon]")
            if tm <= prev and prev > 0.0:
                raise ValueError("event times must be strictly increasing")
            if not 1 <= sz <= self.k:
                raise ValueError(f"event size {sz} outside 1..{self.k}")
            prev = tm

    @property
    def total(self) -> int:
        """Sum of all event sizes, i.e. the count at the horizon."""
        return sum(sz for _, sz in self.events)


def _size_cdf(rates: RateVector) -> np.ndarray:
    cdf = np.cumsum(np.asarray(rates.rates)) / rates.total
    cdf[-1] = 1.0  # guard against cumulative rounding below 1
    return cdf


def sample_path(rates: RateVector, horizon: float, seed: SeedSpec) -> SamplePath:
    """Draw one trajectory; deterministic given the seed.

    Epoch count is Poisson(Lambda*horizon), epochs are iid uniform on
    (0, horizon] (sorted), and sizes are independent categorical marks.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    rng = seed.generator()
    n = int(rng.poisson(rates.total * horizon))
    times = np.sort((1.0 - rng.random(n)) * horizon)
    sizes = np.searchsorted(_size_cdf(rates), rng.random(n), side="right") + 1
    events = tuple(zip(times.tolist(), (int(s) for s in sizes)))
    return SamplePath(horizon=float(horizon), k=rates.k, events=events)


def sample_paths(
    rates: RateVector, horizon: float, n_paths: int, seed: SeedSpec
) -> list[SamplePath]:
    """n_paths independent trajectories on streams seed, seed+1, ..."""
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    return [sample_path(rates, horizon, seed.offset(i)) for i in range(n_paths)]


def sample_counts(
    rates: RateVector, t: float, n_paths: int, seed: SeedSpec
) -> np.ndarray:
    """Replicated draws of M(t) from the per-size Poisson representation.

    M(t) = sum_j j * N_j(t) with independent N_j ~ Poisson(lambda_j t), the
    same law as counting sample_path events by time t but vectorized; the
    Monte Carlo checks use this wherever only counts matter.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    rng = seed.generator()
    out = np.zeros(n_paths, dtype=np.int64)
    for j, lam in enumerate(rates.rates, start=1):
        if lam > 0.0:
            out += j * rng.poisson(lam * t, size=n_paths)
    return out


def count_at(path: SamplePath, t: float) -> int:
    """Count value at time t: sum of sizes of events with time <= t."""
    if not 0 <= t <= path.horizon:
        raise ValueError(f"t={t!r} outside [0, horizon={path.horizon!r}]")
    return sum(sz for tm, sz in path.events if tm <= t)


def increments(path: SamplePath, grid: Sequence[float]) -> list[int]:
    """Successive count differences over an ascending grid of times."""
    if len(grid) < 2:
        raise ValueError("grid needs at least two points")
    for a, b in zip(grid, grid[1:]):
        if not a < b:
            raise ValueError("grid must be strictly ascending")
    counts = [count_at(path, g) for g in grid]
    return [b - a for a, b in zip(counts, counts[1:])]


def empirical_distribution(
    paths: Iterable[SamplePath], t: float
) -> EmpiricalDistribution:
    """Histogram of count_at(path, t) over a collection of paths."""
    return EmpiricalDistribution.from_samples(count_at(p, t) for p in paths)


def path_to_text(path: SamplePath) -> str:
    """Line-oriented serialization: header, then one time,size pair per line.

    Times use repr so the round trip is bit-exact.
    """
    lines = [f"horizon={path.horizon!r} k={path.k}"]
    lines.extend(f"{tm!r},{sz}" for tm, sz in path.events)
    return "\n".join(lines) + "\n"


def path_from_text(text: str) -> SamplePath:
    """Inverse of path_to_text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("horizon="):
        raise ValueError("missing path header line 'horizon=<real> k=<int>'")
    header = lines[0].split()
    if len(header) != 2 or not header[1].startswith("k="):
        raise ValueError(f"malformed path header: {lines[0]!r}")
    horizon = float(header[0][len("horizon="):])
    k = int(header[1][len("k="):])
    events = []
    for ln in lines[1:]:
        tm_str, sz_str = ln.split(",")
        events.append((float(tm_str), int(sz_str)))
    return SamplePath(horizon=horizon, k=k, events=tuple(events))
