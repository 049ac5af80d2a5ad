"""Final candidate selection by 1-D Wasserstein distance on shot timings.

Distances are computed on raw nanosecond samples (outlier-filtered, never
z-scored) by exact integration of the absolute CDF gap over the merged
sample grid. The ranking is purely ordinal; no distance threshold exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyDistribution, MissingReference
from .infer import CandidateSet


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted latency samples from one source (circuit/run)."""

    samples: tuple[float, ...]
    source: str

    @classmethod
    def from_samples(cls, samples: Iterable[float],
                     source: str) -> "EmpiricalDistribution":
        ordered = tuple(sorted(float(s) for s in samples))
        if not ordered:
            raise EmptyDistribution(f"no samples from {source!r}")
        return cls(samples=ordered, source=source)


@dataclass(frozen=True)
class MatchRanking:
    """Candidates ordered by ascending distance to the probe."""

    entries: tuple[tuple[str, float], ...]
    probe_source: str

    @property
    def top1(self) -> str | None:
        return self.entries[0][0] if self.entries else None


def wasserstein_1d(p: EmpiricalDistribution,
                   q: EmpiricalDistribution) -> float:
    """Exact W1 between two empirical distributions, in sample units.

    Merges the two sorted sample sets and sums segment width times the
    absolute CDF gap; sample counts may differ.
    """
    xs = np.asarray(p.samples, dtype=np.float64)
    ys = np.asarray(q.samples, dtype=np.float64)
    if xs.size == 0 or ys.size == 0:
        raise EmptyDistribution("both distributions must be non-empty")
    merged = np.concatenate([xs, ys])
    merged.sort(kind="mergesort")
    widths = np.diff(merged)
    if widths.size == 0:
        return 0.0
    cdf_p = np.searchsorted(xs, merged[:-1], side="right") / xs.size
    cdf_q = np.searchsorted(ys, merged[:-1], side="right") / ys.size
    return float(np.sum(np.abs(cdf_p - cdf_q) * widths))


def wasserstein_equal_size(p: EmpiricalDistribution,
                           q: EmpiricalDistribution) -> float:
    """Equal-count shortcut: mean absolute gap of sorted sample pairs."""
    if len(p.samples) != len(q.samples):
        raise ValueError(
            f"sample counts differ: {len(p.samples)} vs {len(q.samples)}")
    xs = np.asarray(p.samples, dtype=np.float64)
    ys = np.asarray(q.samples, dtype=np.float64)
    return float(np.mean(np.abs(xs - ys)))


def rank_candidates(probe: EmpiricalDistribution,
                    refs: Mapping[str, EmpiricalDistribution],
                    candidates: CandidateSet) -> MatchRanking:
    """One distance per candidate, ascending; ties break by circuit name."""
    scored = []
    for name in sorted(candidates.members):
        if name not in refs:
            raise MissingReference(
                f"candidate {name!r} has no prerecorded reference trace")
        scored.append((wasserstein_1d(probe, refs[name]), name))
    scored.sort(key=lambda pair: (pair[0], pair[1]))
    return MatchRanking(
        entries=tuple((name, distance) for distance, name in scored),
        probe_source=probe.source,
    )
