"""Command line interface.

Subcommands: gen-circuits, collect, features, identify, evaluate.
Exit codes: 0 success, 1 usage error, 2 data error. QLEAK_SEED overrides
--seed everywhere. All JSON output is key-sorted for byte determinism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import evaluate as ev
from . import features as ft
from . import trace as tr
from .errors import QleakError
from .qasm import emit, load_qasm_file
from .sim import DEFAULT_QUBIT_CEILING

USAGE_ERROR = 1
DATA_ERROR = 2


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _span(text: str) -> tuple[int, int]:
    """Parse 'LO:HI' into an inclusive integer span."""
    try:
        lo_text, hi_text = text.split(":")
        lo, hi = int(lo_text), int(hi_text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected LO:HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty span {text!r}")
    return lo, hi


def _strata(text: str) -> tuple[tuple[str, int, int], ...]:
    """Parse 'name=LO:HI,name=LO:HI' stratum bounds."""
    bounds = []
    for part in text.split(","):
        try:
            name, span_text = part.split("=")
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"expected name=LO:HI, got {part!r}") from None
        lo, hi = _span(span_text)
        bounds.append((name, lo, hi))
    return tuple(bounds)


def _status(message: str) -> None:
    print(message, file=sys.stderr)


def _write_json(doc: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _cmd_gen_circuits(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    qlo, qhi = args.qubits
    glo, ghi = args.gates
    rng = np.random.default_rng(args.seed)
    for i in range(args.count):
        n_qubits = int(rng.integers(qlo, qhi + 1))
        n_gates = int(rng.integers(glo, ghi + 1))
        circuit_seed = int(rng.integers(0, 2**31))
        name = f"rand{i:03d}_n{n_qubits}"
        circuit = ev.gen_random_circuit(n_qubits, n_gates, circuit_seed,
                                        name=name)
        (out_dir / f"{name}.qasm").write_text(emit(circuit), encoding="utf-8")
    _status(f"wrote {args.count} circuits to {out_dir}")
    return 0


def _cmd_collect(args) -> int:
    circuit_dir = Path(args.circuits)
    qasm_paths = sorted(circuit_dir.glob("*.qasm"))
    if not qasm_paths:
        raise QleakError(f"no .qasm files under {circuit_dir}")
    mem_mode = {"synthetic": "deterministic_synthetic",
                "os": "os_probe"}[args.mem]
    cfg = tr.CollectionConfig(shots=args.shots, warmup_shots=args.warmup,
                              outlier_rule=args.outliers, mem_mode=mem_mode)
    out_dir = Path(args.out)
    for ci, path in enumerate(qasm_paths):
        circuit = load_qasm_file(path)
        for r in range(args.runs_per_circuit):
            run_seed = int(np.random.SeedSequence(
                entropy=args.seed, spawn_key=(ci, r)).generate_state(1)[0])
            run_id = f"{circuit.name}-r{r:02d}"
            shot_trace = tr.collect(circuit, cfg, run_seed,
                                    max_qubits=args.max_qubits,
                                    run_id=run_id)
            tr.save_trace(shot_trace, out_dir)
            _status(f"collected {run_id} ({cfg.shots} shots)")
    return 0


def _cmd_features(args) -> int:
    traces = tr.load_trace_dir(args.traces)
    profiles = [ft.summarize(t) for t in traces]
    ft.write_profiles_csv(profiles, args.out)
    _status(f"wrote {len(profiles)} profile rows to {args.out}")
    return 0


def _cmd_identify(args) -> int:
    profiles = ft.read_profiles_csv(args.db)
    traces = tr.load_trace_dir(args.refs)
    db = ev.build_database(profiles, traces)
    probe_trace = tr.load_trace(args.probe)
    probe_profile = ft.summarize(probe_trace)
    cfg = ev.EvalConfig(k=args.k)
    report = ev.identify_probe(db, probe_profile, probe_trace.kept_ns, cfg)
    _write_json(ev.report_to_dict(report), Path(args.out))
    top1 = report.ranking.top1
    _status(f"probe {probe_trace.circuit_name}.{probe_trace.run_id}: "
            f"top-1 candidate {top1!r} among {report.candidate_count}")
    return 0


def _cmd_evaluate(args) -> int:
    profiles = ft.read_profiles_csv(args.db)
    traces = tr.load_trace_dir(args.traces)
    db = ev.build_database(profiles, traces)
    probes = []
    for profile in sorted(profiles,
                          key=lambda p: (p.circuit_name, p.run_id)):
        key = (profile.circuit_name, profile.run_id)
        if key not in db.traces:
            raise QleakError(f"no trace file for database row {key}")
        probes.append((profile, db.traces[key]))
    cfg = ev.EvalConfig(k=args.k, strata=args.strata)
    reports, summary = ev.evaluate_corpus(db, probes, cfg)
    doc = {
        "config": {
            "k": cfg.k,
            "strata": {name: [lo, hi] for name, lo, hi in cfg.strata},
        },
        "metrics": ev.metrics_to_dict(summary),
        "reports": [ev.report_to_dict(r) for r in reports],
    }
    _write_json(doc, Path(args.out))
    _status(f"evaluated {summary.n_probes} probes: "
            f"top1_accuracy={summary.top1_accuracy:.4f} "
            f"coverage_qubits={summary.range_coverage_qubits:.4f} "
            f"coverage_gates={summary.range_coverage_gates:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="qleak",
        description="Timing side-channel collection and circuit "
                    "identification for a state-vector simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-circuits", help="write random .qasm files")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--qubits", type=_span, required=True, metavar="LO:HI")
    p.add_argument("--gates", type=_span, required=True, metavar="LO:HI")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_circuits)

    p = sub.add_parser("collect", help="run circuits and record shot traces")
    p.add_argument("--circuits", required=True)
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--warmup", type=int, default=5)
    p.add_argument("--outliers", choices=tr.OUTLIER_RULES, default="iqr_1_5")
    p.add_argument("--mem", choices=("synthetic", "os"), default="synthetic")
    p.add_argument("--runs-per-circuit", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-qubits", type=int, default=DEFAULT_QUBIT_CEILING)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_collect)

    p = sub.add_parser("features", help="summarize traces into a CSV")
    p.add_argument("--traces", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("identify", help="identify one probe trace")
    p.add_argument("--db", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--probe", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("evaluate", help="leave-own-run-out corpus metrics")
    p.add_argument("--db", required=True)
    p.add_argument("--traces", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--strata", type=_strata,
                   default=ev.DEFAULT_STRATA, metavar="NAME=LO:HI,...")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    env_seed = os.environ.get("QLEAK_SEED")
    if env_seed is not None and hasattr(args, "seed"):
        try:
            args.seed = int(env_seed)
        except ValueError:
            parser.error(f"QLEAK_SEED must be an integer, got {env_seed!r}")
    try:
        return args.func(args)
    except QleakError as exc:
        print(f"qleak: error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OSError as exc:
        print(f"qleak: error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
