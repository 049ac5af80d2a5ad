"""Victim-side collector: timed shots, warm-up exclusion, outlier removal.

Collection is strictly single-threaded and assumes a quiet host; running
anything else concurrently voids timing quality. Trace files are one JSON
document per run, named `<circuit_name>.<run_id>.trace.json`.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ProbeUnavailable, QleakError, TooFewSamples
from .qasm import Circuit, total_gates
from .sim import DEFAULT_QUBIT_CEILING, run_shot, state_size_bytes

OUTLIER_RULES = ("iqr_1_5", "none")
MEM_MODES = ("os_probe", "deterministic_synthetic")

_SYNTHETIC_NOISE_SPAN = 4096


@dataclass(frozen=True)
class CollectionConfig:
    shots: int = 100
    warmup_shots: int = 5
    outlier_rule: str = "iqr_1_5"
    mem_mode: str = "deterministic_synthetic"

    def __post_init__(self):
        if self.shots <= self.warmup_shots:
            raise QleakError(
                f"shots ({self.shots}) must exceed warmup_shots "
                f"({self.warmup_shots})")
        if self.outlier_rule not in OUTLIER_RULES:
            raise QleakError(f"unknown outlier rule {self.outlier_rule!r}")
        if self.mem_mode not in MEM_MODES:
            raise QleakError(f"unknown memory mode {self.mem_mode!r}")


@dataclass(frozen=True)
class ShotTrace:
    """Raw per-shot record of one collection run.

    shots_ns holds every measured (post warm-up) latency; kept_ns the
    subsequence surviving outlier removal. outcomes stays in memory only.
    """

    circuit_name: str
    run_id: str
    shots_ns: tuple[int, ...]
    kept_ns: tuple[int, ...]
    mem_deltas_bytes: tuple[int, ...]
    collected_at: str
    config: CollectionConfig
    seed: int
    n_qubits: int | None = None
    total_gates: int | None = None
    outcomes: tuple[str, ...] | None = None


def remove_outliers_iqr(samples: list[int] | tuple[int, ...]) -> list[int]:
    """Drop values outside the Tukey fences Q1-1.5*IQR .. Q3+1.5*IQR.

    Quartiles use linear interpolation; input order is preserved.
    """
    if len(samples) < 4:
        raise TooFewSamples(
            f"need at least 4 samples for IQR filtering, got {len(samples)}")
    q1, q3 = np.percentile(np.asarray(samples, dtype=np.float64), [25.0, 75.0])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return [s for s in samples if lo <= s <= hi]


def _rss_bytes() -> int:
    try:
        import psutil
    except ImportError as exc:
        raise ProbeUnavailable("psutil is required for os_probe mode") from exc
    try:
        return psutil.Process().memory_info().rss
    except Exception as exc:
        raise ProbeUnavailable(f"resident-set query failed: {exc}") from exc


def measure_mem_delta(n_qubits: int, mode: str,
                      rng: np.random.Generator | None = None,
                      run=None) -> int:
    """Return one per-shot memory delta in bytes.

    deterministic_synthetic: state size plus seeded uniform noise in
    [0, 4096). os_probe: resident-set delta across `run` (a zero-argument
    callable executing the shot); may be zero or negative on reuse.
    """
    if mode == "deterministic_synthetic":
        if rng is None:
            rng = np.random.default_rng()
        return state_size_bytes(n_qubits) + int(rng.integers(0, _SYNTHETIC_NOISE_SPAN))
    if mode == "os_probe":
        if run is None:
            raise QleakError("os_probe mode needs the shot callable")
        before = _rss_bytes()
        run()
        return _rss_bytes() - before
    raise QleakError(f"unknown memory mode {mode!r}")


def collect(circuit: Circuit, cfg: CollectionConfig, seed: int,
            max_qubits: int = DEFAULT_QUBIT_CEILING,
            run_id: str = "r00") -> ShotTrace:
    """Run warmup_shots + shots sequential shots and record the trace."""
    rng = np.random.default_rng(seed)
    total = cfg.warmup_shots + cfg.shots
    shot_seeds = rng.integers(0, 2**63 - 1, size=total)

    shots_ns: list[int] = []
    mem_deltas: list[int] = []
    outcomes: list[str] = []
    for i in range(total):
        shot_seed = int(shot_seeds[i])
        if cfg.mem_mode == "os_probe":
            result_box: list = []
            delta = measure_mem_delta(
                circuit.n_qubits, cfg.mem_mode,
                run=lambda: result_box.append(
                    run_shot(circuit, shot_seed, max_qubits=max_qubits)))
            result = result_box[0]
        else:
            result = run_shot(circuit, shot_seed, max_qubits=max_qubits)
            delta = measure_mem_delta(circuit.n_qubits, cfg.mem_mode, rng=rng)
        if i < cfg.warmup_shots:
            continue
        shots_ns.append(result.elapsed_ns)
        mem_deltas.append(delta)
        outcomes.append(result.bitstring)

    if cfg.outlier_rule == "iqr_1_5":
        kept = remove_outliers_iqr(shots_ns)
    else:
        kept = list(shots_ns)

    return ShotTrace(
        circuit_name=circuit.name,
        run_id=run_id,
        shots_ns=tuple(shots_ns),
        kept_ns=tuple(kept),
        mem_deltas_bytes=tuple(mem_deltas),
        collected_at=datetime.now(timezone.utc).isoformat(),
        config=cfg,
        seed=seed,
        n_qubits=circuit.n_qubits,
        total_gates=total_gates(circuit),
        outcomes=tuple(outcomes),
    )


def trace_filename(trace: ShotTrace) -> str:
    return f"{trace.circuit_name}.{trace.run_id}.trace.json"


def save_trace(trace: ShotTrace, directory: str | Path) -> Path:
    """Write the trace JSON (key-sorted); returns the file path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    doc = {
        "circuit_name": trace.circuit_name,
        "run_id": trace.run_id,
        "config": asdict(trace.config),
        "seed": trace.seed,
        "n_qubits": trace.n_qubits,
        "total_gates": trace.total_gates,
        "shots_ns": list(trace.shots_ns),
        "kept_ns": list(trace.kept_ns),
        "mem_deltas_bytes": list(trace.mem_deltas_bytes),
        "collected_at": trace.collected_at,
    }
    path = directory / trace_filename(trace)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    return path


def load_trace(path: str | Path) -> ShotTrace:
    """Read one trace JSON back into a ShotTrace."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return ShotTrace(
            circuit_name=doc["circuit_name"],
            run_id=doc["run_id"],
            shots_ns=tuple(int(v) for v in doc["shots_ns"]),
            kept_ns=tuple(int(v) for v in doc["kept_ns"]),
            mem_deltas_bytes=tuple(int(v) for v in doc["mem_deltas_bytes"]),
            collected_at=doc["collected_at"],
            config=CollectionConfig(**doc["config"]),
            seed=int(doc.get("seed", 0)),
            n_qubits=doc.get("n_qubits"),
            total_gates=doc.get("total_gates"),
        )
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise QleakError(f"malformed trace file {path}: {exc}") from exc


def load_trace_dir(directory: str | Path) -> list[ShotTrace]:
    """Load every *.trace.json under a directory, sorted by (circuit, run)."""
    paths = sorted(Path(directory).glob("*.trace.json"))
    if not paths:
        raise QleakError(f"no *.trace.json files under {directory}")
    traces = [load_trace(p) for p in paths]
    traces.sort(key=lambda t: (t.circuit_name, t.run_id))
    return traces
