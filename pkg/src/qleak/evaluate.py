"""Identification harness: per-probe pipeline runs, metrics, random circuits.

Probes are evaluated leave-own-run-out: the probe's run is excluded from
the neighbor search and from its own circuit's reference distribution,
while other runs of the same circuit stay eligible. Failure modes follow
the pipeline's stage order: qubit range first, then gate range, then empty
candidate set, then Wasserstein mis-ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import MissingReference, QleakError, UncoveredLabel
from .features import (NormalizedMatrix, TimingProfile, fit_normalizer,
                       transform)
from .infer import LabelRange, intersect_filter, knn_range
from .match import EmpiricalDistribution, MatchRanking, rank_candidates
from .qasm import (GATE_PARAMS, GATE_QUBITS, UNITARY_KINDS, Circuit, Gate,
                   make_circuit)
from .trace import ShotTrace

FAILURE_MODES = ("none", "qubit_range_miss", "gate_range_miss",
                 "empty_candidates", "wasserstein_miss")

DEFAULT_STRATA: tuple[tuple[str, int, int], ...] = (
    ("small", 2, 10),
    ("medium", 11, 27),
)


@dataclass(frozen=True)
class EvalConfig:
    k: int = 5
    strata: tuple[tuple[str, int, int], ...] = DEFAULT_STRATA


def stratify(n_qubits: int,
             bounds: Sequence[tuple[str, int, int]] = DEFAULT_STRATA) -> str:
    """Map a qubit count to its stratum name."""
    for name, lo, hi in bounds:
        if lo <= n_qubits <= hi:
            return name
    raise UncoveredLabel(
        f"{n_qubits} qubits outside every stratum "
        f"{[(name, lo, hi) for name, lo, hi in bounds]}")


@dataclass(frozen=True)
class ProfileDatabase:
    """The attacker's prerecorded corpus: labeled profiles plus raw traces."""

    profiles: tuple[TimingProfile, ...]
    traces: Mapping[tuple[str, str], ShotTrace]
    norm: NormalizedMatrix
    qubit_labels: tuple[int, ...]
    gate_labels: tuple[int, ...]
    circuit_labels: dict[str, tuple[int, int]]


def build_database(profiles: Sequence[TimingProfile],
                   traces: Sequence[ShotTrace]) -> ProfileDatabase:
    """Assemble and validate the database; labels must be per-circuit unique."""
    circuit_labels: dict[str, tuple[int, int]] = {}
    for p in profiles:
        if p.n_qubits is None or p.total_gates is None:
            raise QleakError(
                f"database profile {p.circuit_name}.{p.run_id} is unlabeled")
        labels = (p.n_qubits, p.total_gates)
        previous = circuit_labels.setdefault(p.circuit_name, labels)
        if previous != labels:
            raise QleakError(
                f"conflicting labels for circuit {p.circuit_name!r}: "
                f"{previous} vs {labels}")
    norm = fit_normalizer(profiles)
    return ProfileDatabase(
        profiles=tuple(profiles),
        traces={(t.circuit_name, t.run_id): t for t in traces},
        norm=norm,
        qubit_labels=tuple(p.n_qubits for p in profiles),
        gate_labels=tuple(p.total_gates for p in profiles),
        circuit_labels=circuit_labels,
    )


def reference_distribution(db: ProfileDatabase, circuit_name: str,
                           exclude_run: str | None = None
                           ) -> EmpiricalDistribution | None:
    """Concatenated kept_ns of a circuit's reference runs, probe run excluded."""
    samples: list[float] = []
    for (name, run_id), trace in db.traces.items():
        if name != circuit_name or run_id == exclude_run:
            continue
        samples.extend(trace.kept_ns)
    if not samples:
        return None
    return EmpiricalDistribution.from_samples(samples, source=circuit_name)


@dataclass(frozen=True)
class IdentificationReport:
    """Outcome of one probe through the full pipeline."""

    probe_circuit: str
    probe_run: str
    true_n_qubits: int | None
    true_total_gates: int | None
    qubit_range: LabelRange
    gate_range: LabelRange
    qubit_covered: bool | None
    gate_covered: bool | None
    candidate_count: int
    candidates: tuple[str, ...]
    ranking: MatchRanking
    top1_correct: bool | None
    failure_mode: str | None


def _failure_mode(qubit_covered: bool, gate_covered: bool,
                  candidate_count: int, top1_correct: bool) -> str:
    if top1_correct:
        return "none"
    if not qubit_covered:
        return "qubit_range_miss"
    if not gate_covered:
        return "gate_range_miss"
    if candidate_count == 0:
        return "empty_candidates"
    return "wasserstein_miss"


def identify_probe(db: ProfileDatabase, probe: TimingProfile,
                   probe_samples: Sequence[int | float],
                   cfg: EvalConfig = EvalConfig(),
                   include_probe_in_norm: bool = False
                   ) -> IdentificationReport:
    """Run transform -> knn_range x2 -> intersect_filter -> rank_candidates.

    The probe's run_id is always excluded from the neighbor search and from
    its circuit's reference distribution, so probing a database run yields
    the leave-own-run-out protocol. Correctness flags stay None when the
    probe carries no labels.
    """
    probe_z = transform(probe, db.norm, include_probe=include_probe_in_norm)
    exclude = frozenset({probe.run_id})
    qubit_range = knn_range(probe_z, db.norm, db.qubit_labels, cfg.k,
                            "qubits", exclude)
    gate_range = knn_range(probe_z, db.norm, db.gate_labels, cfg.k,
                           "gates", exclude)
    candidates = intersect_filter(db.circuit_labels, qubit_range, gate_range)

    ranking = MatchRanking(entries=(), probe_source=probe.run_id)
    if candidates.members:
        refs = {}
        for name in candidates.members:
            ref = reference_distribution(db, name, exclude_run=probe.run_id)
            if ref is None:
                raise MissingReference(
                    f"candidate {name!r} has no reference samples after "
                    f"excluding run {probe.run_id!r}")
            refs[name] = ref
        probe_dist = EmpiricalDistribution.from_samples(
            probe_samples, source=f"{probe.circuit_name}.{probe.run_id}")
        ranking = rank_candidates(probe_dist, refs, candidates)

    if probe.n_qubits is None or probe.total_gates is None:
        qubit_covered = gate_covered = top1_correct = None
        failure = None
    else:
        qubit_covered = qubit_range.covers(probe.n_qubits)
        gate_covered = gate_range.covers(probe.total_gates)
        top1_correct = ranking.top1 == probe.circuit_name
        failure = _failure_mode(qubit_covered, gate_covered,
                                len(candidates.members), top1_correct)

    return IdentificationReport(
        probe_circuit=probe.circuit_name,
        probe_run=probe.run_id,
        true_n_qubits=probe.n_qubits,
        true_total_gates=probe.total_gates,
        qubit_range=qubit_range,
        gate_range=gate_range,
        qubit_covered=qubit_covered,
        gate_covered=gate_covered,
        candidate_count=len(candidates.members),
        candidates=tuple(sorted(candidates.members)),
        ranking=ranking,
        top1_correct=top1_correct,
        failure_mode=failure,
    )


@dataclass(frozen=True)
class MetricsSummary:
    """The four headline metrics plus range widths, per corpus or stratum."""

    n_probes: int
    range_coverage_qubits: float
    range_coverage_gates: float
    mean_range_width_qubits: float
    mean_range_width_gates: float
    mean_candidate_count: float
    top1_accuracy: float
    strata: dict[str, "MetricsSummary"] = field(default_factory=dict)


def _summarize_reports(reports: Sequence[IdentificationReport]) -> MetricsSummary:
    n = len(reports)
    if n == 0:
        return MetricsSummary(0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    return MetricsSummary(
        n_probes=n,
        range_coverage_qubits=sum(r.qubit_covered for r in reports) / n,
        range_coverage_gates=sum(r.gate_covered for r in reports) / n,
        mean_range_width_qubits=sum(r.qubit_range.width for r in reports) / n,
        mean_range_width_gates=sum(r.gate_range.width for r in reports) / n,
        mean_candidate_count=sum(r.candidate_count for r in reports) / n,
        top1_accuracy=sum(r.top1_correct for r in reports) / n,
    )


def evaluate_corpus(db: ProfileDatabase,
                    probes: Sequence[tuple[TimingProfile, ShotTrace]],
                    cfg: EvalConfig = EvalConfig()
                    ) -> tuple[list[IdentificationReport], MetricsSummary]:
    """Identify every probe and aggregate metrics overall and per stratum."""
    reports = []
    strata_reports: dict[str, list[IdentificationReport]] = {
        name: [] for name, _, _ in cfg.strata}
    for profile, probe_trace in probes:
        if profile.n_qubits is None or profile.total_gates is None:
            raise QleakError(
                f"probe {profile.circuit_name}.{profile.run_id} is unlabeled; "
                "corpus evaluation needs ground truth")
        report = identify_probe(db, profile, probe_trace.kept_ns, cfg)
        reports.append(report)
        strata_reports[stratify(profile.n_qubits, cfg.strata)].append(report)
    summary = _summarize_reports(reports)
    summary.strata.update({
        name: _summarize_reports(group)
        for name, group in strata_reports.items()})
    return reports, summary


# --- JSON-friendly views ---------------------------------------------------

def _range_to_dict(r: LabelRange) -> dict:
    return {
        "lo": r.lo,
        "hi": r.hi,
        "label_kind": r.label_kind,
        "neighbor_ids": [[name, run] for name, run in r.neighbor_ids],
        "neighbor_distances": [float(d) for d in r.neighbor_distances],
    }


def report_to_dict(report: IdentificationReport) -> dict:
    return {
        "probe_circuit": report.probe_circuit,
        "probe_run": report.probe_run,
        "true_n_qubits": report.true_n_qubits,
        "true_total_gates": report.true_total_gates,
        "qubit_range": _range_to_dict(report.qubit_range),
        "gate_range": _range_to_dict(report.gate_range),
        "qubit_covered": report.qubit_covered,
        "gate_covered": report.gate_covered,
        "candidate_count": report.candidate_count,
        "candidates": list(report.candidates),
        "ranking": [[name, float(d)] for name, d in report.ranking.entries],
        "top1_correct": report.top1_correct,
        "failure_mode": report.failure_mode,
    }


def metrics_to_dict(summary: MetricsSummary) -> dict:
    doc = {
        "n_probes": summary.n_probes,
        "range_coverage_qubits": summary.range_coverage_qubits,
        "range_coverage_gates": summary.range_coverage_gates,
        "mean_range_width_qubits": summary.mean_range_width_qubits,
        "mean_range_width_gates": summary.mean_range_width_gates,
        "mean_candidate_count": summary.mean_candidate_count,
        "top1_accuracy": summary.top1_accuracy,
    }
    if summary.strata:
        doc["strata"] = {name: metrics_to_dict(s)
                         for name, s in sorted(summary.strata.items())}
    return doc


# --- synthetic workload generation ---------------------------------------

_GEN_1Q = tuple(sorted(k for k in UNITARY_KINDS if GATE_QUBITS[k] == 1))
_GEN_2Q = tuple(sorted(k for k in UNITARY_KINDS if GATE_QUBITS[k] == 2))
_GEN_3Q = tuple(sorted(k for k in UNITARY_KINDS if GATE_QUBITS[k] == 3))


def gen_random_circuit(n_qubits: int, n_gates: int, seed: int,
                       name: str | None = None) -> Circuit:
    """Sample a random circuit with exactly n_gates counted gates.

    Gate kinds are uniform over the kinds valid for n_qubits, operands are
    distinct uniform qubits, angles uniform in [0, 2*pi). Deterministic per
    seed.
    """
    if n_qubits < 1:
        raise QleakError(f"n_qubits must be >= 1, got {n_qubits}")
    if n_gates < 0:
        raise QleakError(f"n_gates must be >= 0, got {n_gates}")
    kinds = _GEN_1Q
    if n_qubits >= 2:
        kinds = kinds + _GEN_2Q
    if n_qubits >= 3:
        kinds = kinds + _GEN_3Q
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(0, len(kinds)))]
        qubits = tuple(int(q) for q in rng.choice(
            n_qubits, size=GATE_QUBITS[kind], replace=False))
        params = tuple(float(a) for a in rng.uniform(
            0.0, 2.0 * math.pi, size=GATE_PARAMS.get(kind, 0)))
        gates.append(Gate(kind, qubits, params))
    if name is None:
        name = f"rand_n{n_qubits}_g{n_gates}_s{seed}"
    return make_circuit(name, n_qubits, gates)
