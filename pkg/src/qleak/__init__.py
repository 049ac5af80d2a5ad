"""Timing side-channel toolkit for a state-vector quantum circuit simulator.

Collects per-shot execution traces from an instrumented simulator, then
identifies which circuit produced an unlabeled trace via KNN range
estimation, intersection filtering and Wasserstein distribution matching.

The victim side lives in qleak.sim and qleak.trace (collection must run
alone on a quiet host); the attacker side in qleak.features, qleak.infer,
qleak.match and qleak.evaluate, which only ever see serialized traces and
summary CSVs.
"""

from .evaluate import (EvalConfig, IdentificationReport, MetricsSummary,
                       ProfileDatabase, build_database, evaluate_corpus,
                       gen_random_circuit, identify_probe, stratify)
from .features import (FEATURE_NAMES, NormalizedMatrix, TimingProfile,
                       fit_normalizer, read_profiles_csv, summarize,
                       transform, write_profiles_csv)
from .infer import (CandidateSet, LabelRange, intersect_filter,
                    knn_point_estimate, knn_range)
from .match import (EmpiricalDistribution, MatchRanking, rank_candidates,
                    wasserstein_1d, wasserstein_equal_size)
from .qasm import (Circuit, Gate, emit, load_qasm_file, make_circuit,
                   parse_qasm, total_gates)
from .sim import (ShotResult, StateVector, apply_gate, run_shot,
                  state_size_bytes)
from .trace import (CollectionConfig, ShotTrace, collect, load_trace,
                    load_trace_dir, remove_outliers_iqr, save_trace)

__version__ = "0.1.0"

__all__ = [
    "CandidateSet", "Circuit", "CollectionConfig", "EmpiricalDistribution",
    "EvalConfig", "FEATURE_NAMES", "Gate", "IdentificationReport",
    "LabelRange", "MatchRanking", "MetricsSummary", "NormalizedMatrix",
    "ProfileDatabase", "ShotResult", "ShotTrace", "StateVector",
    "TimingProfile", "apply_gate", "build_database", "collect", "emit",
    "evaluate_corpus", "fit_normalizer", "gen_random_circuit",
    "identify_probe", "intersect_filter", "knn_point_estimate", "knn_range",
    "load_qasm_file", "load_trace", "load_trace_dir", "make_circuit",
    "parse_qasm", "rank_candidates", "read_profiles_csv",
    "remove_outliers_iqr", "run_shot", "save_trace", "state_size_bytes",
    "stratify", "summarize", "total_gates", "transform", "wasserstein_1d",
    "wasserstein_equal_size", "write_profiles_csv",
]
