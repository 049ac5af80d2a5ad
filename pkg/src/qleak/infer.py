"""KNN range estimation in z-space and candidate intersection filtering.

Distances are unweighted Euclidean over the 8 z-scored features, summed in
feature order with plain float arithmetic so results are reproducible down
to tie-break order. Ties at the k-th neighbor break by ascending
(distance, circuit_name, run_id).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import AbstractSet, Mapping, Sequence

import numpy as np

from .errors import InsufficientNeighbors
from .features import NormalizedMatrix

LABEL_KINDS = ("qubits", "gates")


@dataclass(frozen=True)
class LabelRange:
    """[lo, hi] interval spanned by the k nearest neighbors' labels."""

    lo: int
    hi: int
    label_kind: str
    neighbor_ids: tuple[tuple[str, str], ...]
    neighbor_distances: tuple[float, ...]

    def covers(self, label: int) -> bool:
        return self.lo <= label <= self.hi

    @property
    def width(self) -> int:
        return self.hi - self.lo


@dataclass(frozen=True)
class CandidateSet:
    """Circuits satisfying both the qubit and the gate interval."""

    members: frozenset[str]
    qubit_range: LabelRange
    gate_range: LabelRange


def _euclidean(row: np.ndarray, probe: np.ndarray) -> float:
    total = 0.0
    for a, b in zip(row, probe):
        diff = float(a) - float(b)
        total += diff * diff
    return math.sqrt(total)


def _sorted_neighbors(
    probe_z: np.ndarray,
    db: NormalizedMatrix,
    labels: Sequence[int],
    k: int,
    exclude: AbstractSet[str],
) -> list[tuple[float, str, str, int]]:
    """All non-excluded rows as (distance, circuit, run, label), sorted."""
    if len(labels) != db.n_rows:
        raise ValueError(
            f"{len(labels)} labels for {db.n_rows} database rows")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    rows = []
    for i, (circuit_name, run_id) in enumerate(db.row_ids):
        if run_id in exclude:
            continue
        distance = _euclidean(db.values[i], probe_z)
        rows.append((distance, circuit_name, run_id, int(labels[i])))
    if len(rows) < k:
        raise InsufficientNeighbors(
            f"need {k} neighbors, only {len(rows)} rows after exclusion")
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


def knn_range(probe_z: np.ndarray, db: NormalizedMatrix,
              labels: Sequence[int], k: int, label_kind: str,
              exclude: AbstractSet[str] = frozenset()) -> LabelRange:
    """Interval spanning the labels of the k nearest database rows."""
    neighbors = _sorted_neighbors(probe_z, db, labels, k, exclude)[:k]
    neighbor_labels = [label for _, _, _, label in neighbors]
    return LabelRange(
        lo=min(neighbor_labels),
        hi=max(neighbor_labels),
        label_kind=label_kind,
        neighbor_ids=tuple((name, run) for _, name, run, _ in neighbors),
        neighbor_distances=tuple(d for d, _, _, _ in neighbors),
    )


def knn_point_estimate(probe_z: np.ndarray, db: NormalizedMatrix,
                       labels: Sequence[int], k: int, label_kind: str,
                       exclude: AbstractSet[str] = frozenset()) -> int:
    """Mode of the k neighbor labels; ties go to the nearer neighbor."""
    neighbors = _sorted_neighbors(probe_z, db, labels, k, exclude)[:k]
    counts: dict[int, int] = {}
    for _, _, _, label in neighbors:
        counts[label] = counts.get(label, 0) + 1
    best = max(counts.values())
    for _, _, _, label in neighbors:  # nearest-first order
        if counts[label] == best:
            return label
    raise AssertionError("unreachable: k >= 1 guarantees a mode")


def intersect_filter(db_labels: Mapping[str, tuple[int, int]],
                     qubit_range: LabelRange,
                     gate_range: LabelRange) -> CandidateSet:
    """Keep circuits inside both intervals; empty is a legal outcome."""
    members = frozenset(
        name for name, (n_qubits, n_gates) in db_labels.items()
        if qubit_range.covers(n_qubits) and gate_range.covers(n_gates))
    return CandidateSet(members=members, qubit_range=qubit_range,
                        gate_range=gate_range)
