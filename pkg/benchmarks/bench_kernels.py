"""Compare the compiled and pure-python gate kernels.

Runs the same fixed-depth random circuit through both backends and prints
per-shot latency medians plus the speedup. Useful both as a sanity check
that the extension built and as a view of how much kernel cost (vs Python
dispatch) contributes to the timing side-channel.

Usage: python benchmarks/bench_kernels.py [--qubits 8 12 16 20] [--gates 24]
       [--shots 30] [--seed 7]
"""

from __future__ import annotations

import argparse
import statistics

from qleak import _kernels_py
from qleak.evaluate import gen_random_circuit
from qleak.qasm import Circuit
from qleak.sim import _op_for, init_state

try:
    from qleak import _kernels
except ImportError:
    _kernels = None


def _time_backend(circuit: Circuit, backend, shots: int) -> float:
    """Median per-shot nanoseconds applying the circuit via one backend."""
    import time

    from qleak import kernels

    # rebind the dispatch table onto the requested backend for the run
    saved = (kernels.apply_1q, kernels.apply_cx, kernels.apply_cz,
             kernels.apply_swap, kernels.apply_ccx)
    kernels.apply_1q = backend.apply_1q
    kernels.apply_cx = backend.apply_cx
    kernels.apply_cz = backend.apply_cz
    kernels.apply_swap = backend.apply_swap
    kernels.apply_ccx = backend.apply_ccx
    try:
        ops = [op for g in circuit.gates
               if (op := _op_for(g, circuit.n_qubits)) is not None]
        samples = []
        for _ in range(shots):
            start = time.perf_counter_ns()
            state = init_state(circuit.n_qubits)
            for op in ops:
                op(state.amplitudes)
            samples.append(time.perf_counter_ns() - start)
        return statistics.median(samples)
    finally:
        (kernels.apply_1q, kernels.apply_cx, kernels.apply_cz,
         kernels.apply_swap, kernels.apply_ccx) = saved


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, nargs="+",
                        default=[8, 12, 16, 20])
    parser.add_argument("--gates", type=int, default=24)
    parser.add_argument("--shots", type=int, default=30)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernels not built; showing pure-python only")
    print(f"{'qubits':>6} {'gates':>5} {'python ms':>10} "
          f"{'cython ms':>10} {'speedup':>8}")
    for n in args.qubits:
        circuit = gen_random_circuit(n, args.gates, args.seed)
        py_ns = _time_backend(circuit, _kernels_py, args.shots)
        if _kernels is not None:
            cy_ns = _time_backend(circuit, _kernels, args.shots)
            print(f"{n:>6} {args.gates:>5} {py_ns / 1e6:>10.3f} "
                  f"{cy_ns / 1e6:>10.3f} {py_ns / cy_ns:>7.2f}x")
        else:
            print(f"{n:>6} {args.gates:>5} {py_ns / 1e6:>10.3f} "
                  f"{'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
