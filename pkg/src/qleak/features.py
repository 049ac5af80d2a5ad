"""Summary feature vectors and z-score normalization.

Every statistic is a population statistic (divide by N): the victim-side
summary and the attacker-side normalizer must agree on the estimator, and
at 100 shots the difference is noise anyway. Labels ride on the profile but
never enter the z-vector; only the 8 side-channel features do.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus, QleakError, TooFewSamples
from .trace import ShotTrace

FEATURE_NAMES: tuple[str, ...] = (
    "avg_shot_time_ns",
    "median_shot_time_ns",
    "min_shot_time_ns",
    "max_shot_time_ns",
    "std_shot_time_ns",
    "timing_variance",
    "avg_memory_delta_bytes",
    "max_memory_delta_bytes",
)

CSV_HEADER: tuple[str, ...] = (
    "circuit_name", "run_id", "n_qubits", "total_gates") + FEATURE_NAMES


@dataclass(frozen=True)
class TimingProfile:
    """One collection run reduced to the 8 summary features plus labels."""

    circuit_name: str
    run_id: str
    n_qubits: int | None
    total_gates: int | None
    avg_shot_time_ns: float
    median_shot_time_ns: float
    min_shot_time_ns: float
    max_shot_time_ns: float
    std_shot_time_ns: float
    timing_variance: float
    avg_memory_delta_bytes: float
    max_memory_delta_bytes: float

    def feature_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES],
                        dtype=np.float64)


@dataclass(frozen=True)
class NormalizedMatrix:
    """Z-scored feature matrix plus the fitted column statistics.

    Columns with zero standard deviation are scaled with divisor 1, which
    leaves them all-zero. raw_values is retained so probes can optionally
    be normalized with a probe-inclusive refit.
    """

    feature_names: tuple[str, ...]
    row_ids: tuple[tuple[str, str], ...]
    values: np.ndarray
    col_means: np.ndarray
    col_stds: np.ndarray
    raw_values: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]


def summarize(trace: ShotTrace,
              labels: tuple[int, int] | None = None) -> TimingProfile:
    """Reduce a trace to its TimingProfile.

    Statistics are computed over kept_ns (post outlier removal); memory
    statistics over the full per-shot delta series. labels defaults to the
    (n_qubits, total_gates) carried by the trace, which may be absent for
    an unlabeled probe.
    """
    kept = np.asarray(trace.kept_ns, dtype=np.float64)
    if kept.size < 2:
        raise TooFewSamples(
            f"need at least 2 kept samples, got {kept.size}")
    if labels is None:
        labels = (trace.n_qubits, trace.total_gates)
    variance = float(np.var(kept))
    std = math.sqrt(variance)
    mem = np.asarray(trace.mem_deltas_bytes, dtype=np.float64)
    return TimingProfile(
        circuit_name=trace.circuit_name,
        run_id=trace.run_id,
        n_qubits=labels[0],
        total_gates=labels[1],
        avg_shot_time_ns=float(np.mean(kept)),
        median_shot_time_ns=float(np.median(kept)),
        min_shot_time_ns=float(np.min(kept)),
        max_shot_time_ns=float(np.max(kept)),
        std_shot_time_ns=std,
        timing_variance=variance,
        avg_memory_delta_bytes=float(np.mean(mem)) if mem.size else 0.0,
        max_memory_delta_bytes=float(np.max(mem)) if mem.size else 0.0,
    )


def _divisors(col_stds: np.ndarray) -> np.ndarray:
    return np.where(col_stds == 0.0, 1.0, col_stds)


def fit_normalizer(profiles: Sequence[TimingProfile]) -> NormalizedMatrix:
    """Fit per-column mean/std over the corpus and z-score it."""
    if len(profiles) < 2:
        raise EmptyCorpus(
            f"normalizer needs at least 2 profiles, got {len(profiles)}")
    raw = np.stack([p.feature_vector() for p in profiles])
    col_means = raw.mean(axis=0)
    col_stds = raw.std(axis=0)
    values = (raw - col_means) / _divisors(col_stds)
    return NormalizedMatrix(
        feature_names=FEATURE_NAMES,
        row_ids=tuple((p.circuit_name, p.run_id) for p in profiles),
        values=values,
        col_means=col_means,
        col_stds=col_stds,
        raw_values=raw,
    )


def transform(probe: TimingProfile, norm: NormalizedMatrix,
              include_probe: bool = False) -> np.ndarray:
    """Z-score a probe with the fitted statistics.

    Default uses the stored corpus parameters (the database is fixed before
    the probe arrives). include_probe=True refits mean/std over corpus plus
    probe first; both readings of corpus-wide normalization are available.
    """
    vector = probe.feature_vector()
    if include_probe:
        combined = np.vstack([norm.raw_values, vector])
        col_means = combined.mean(axis=0)
        col_stds = combined.std(axis=0)
        return (vector - col_means) / _divisors(col_stds)
    return (vector - norm.col_means) / _divisors(norm.col_stds)


def _format_real(value: float) -> str:
    return f"{value:.17g}"


def write_profiles_csv(profiles: Iterable[TimingProfile],
                       path: str | Path) -> Path:
    """Write the summary CSV; reals carry 17 significant digits."""
    path = Path(path)
    rows = []
    for p in profiles:
        if p.n_qubits is None or p.total_gates is None:
            raise QleakError(
                f"profile {p.circuit_name}.{p.run_id} has no labels; "
                "the summary CSV requires labeled rows")
        rows.append([p.circuit_name, p.run_id, str(p.n_qubits),
                     str(p.total_gates)]
                    + [_format_real(getattr(p, name))
                       for name in FEATURE_NAMES])
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
    return path


def read_profiles_csv(path: str | Path) -> list[TimingProfile]:
    """Read a summary CSV back into profiles, preserving row order."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise QleakError(f"empty summary CSV {path}") from None
        if tuple(header) != CSV_HEADER:
            raise QleakError(
                f"unexpected CSV header in {path}: {header}")
        profiles = []
        for row in reader:
            if len(row) != len(CSV_HEADER):
                raise QleakError(
                    f"row with {len(row)} fields in {path}: {row}")
            try:
                profiles.append(TimingProfile(
                    circuit_name=row[0],
                    run_id=row[1],
                    n_qubits=int(row[2]),
                    total_gates=int(row[3]),
                    **{name: float(row[4 + i])
                       for i, name in enumerate(FEATURE_NAMES)},
                ))
            except ValueError as exc:
                raise QleakError(f"bad value in {path}: {exc}") from exc
    return profiles
