"""Dense state-vector simulator; its per-shot runtime is the leakage source.

A shot allocates the 2**n amplitude vector, applies every gate in order and
samples one bitstring from |amplitude|^2 via the inverse CDF. The monotonic
clock is read immediately before state allocation and immediately after
sampling, so allocation cost is part of the measured latency. Measure and
barrier entries are no-ops during gate application; measurement happens once
at the end of the shot.

Bitstring convention: character i is the outcome of qubit i (the state index
is little-endian, qubit 0 = least significant bit).
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from . import kernels
from .errors import CapacityError, DimensionError
from .qasm import Circuit, Gate

DEFAULT_QUBIT_CEILING = 24

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# 2x2 unitaries of the parameterless single-qubit kinds
_FIXED_1Q: dict[str, tuple[complex, complex, complex, complex]] = {
    "h": (_INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2),
    "x": (0, 1, 1, 0),
    "y": (0, -1j, 1j, 0),
    "z": (1, 0, 0, -1),
    "s": (1, 0, 0, 1j),
    "sdg": (1, 0, 0, -1j),
    "t": (1, 0, 0, cmath.exp(0.25j * math.pi)),
    "tdg": (1, 0, 0, cmath.exp(-0.25j * math.pi)),
}


def _matrix_1q(gate: Gate) -> tuple[complex, complex, complex, complex]:
    kind = gate.kind
    if kind in _FIXED_1Q:
        return _FIXED_1Q[kind]
    if kind == "rx":
        (theta,) = gate.params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return (c, -1j * s, -1j * s, c)
    if kind == "ry":
        (theta,) = gate.params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return (c, -s, s, c)
    if kind == "rz":
        (theta,) = gate.params
        return (cmath.exp(-0.5j * theta), 0, 0, cmath.exp(0.5j * theta))
    if kind == "u1":
        (lam,) = gate.params
        return (1, 0, 0, cmath.exp(1j * lam))
    if kind == "u2":
        phi, lam = gate.params
        return (_INV_SQRT2, -_INV_SQRT2 * cmath.exp(1j * lam),
                _INV_SQRT2 * cmath.exp(1j * phi),
                _INV_SQRT2 * cmath.exp(1j * (phi + lam)))
    if kind == "u3":
        theta, phi, lam = gate.params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return (c, -cmath.exp(1j * lam) * s,
                cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c)
    raise DimensionError(f"no single-qubit matrix for gate kind {gate.kind!r}")


@dataclass
class StateVector:
    """2**n complex amplitudes, little-endian basis ordering."""

    n_qubits: int
    amplitudes: np.ndarray


@dataclass(frozen=True)
class ShotResult:
    """Outcome and wall-clock latency of one shot."""

    bitstring: str
    elapsed_ns: int


def state_size_bytes(n_qubits: int) -> int:
    """State memory footprint: 16 bytes per amplitude."""
    return 16 * (1 << n_qubits)


def init_state(n_qubits: int) -> StateVector:
    """Allocate |0...0>."""
    amplitudes = np.zeros(1 << n_qubits, dtype=np.complex128)
    amplitudes[0] = 1.0
    return StateVector(n_qubits=n_qubits, amplitudes=amplitudes)


def _op_for(gate: Gate, n_qubits: int) -> Callable[[np.ndarray], None] | None:
    """Bind one gate to a kernel call; None for no-op kinds."""
    for q in gate.qubits:
        if not 0 <= q < n_qubits:
            raise DimensionError(
                f"gate {gate.kind} addresses qubit {q} "
                f"in a {n_qubits}-qubit state")
    kind = gate.kind
    if kind in ("measure", "barrier"):
        return None
    if kind == "cx":
        return partial(kernels.apply_cx, control=gate.qubits[0],
                       target=gate.qubits[1])
    if kind == "cz":
        return partial(kernels.apply_cz, control=gate.qubits[0],
                       target=gate.qubits[1])
    if kind == "swap":
        return partial(kernels.apply_swap, a=gate.qubits[0], b=gate.qubits[1])
    if kind == "ccx":
        return partial(kernels.apply_ccx, control_a=gate.qubits[0],
                       control_b=gate.qubits[1], target=gate.qubits[2])
    m00, m01, m10, m11 = _matrix_1q(gate)
    return partial(kernels.apply_1q, m00=m00, m01=m01, m10=m10, m11=m11,
                   qubit=gate.qubits[0])


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate in place and return the same StateVector."""
    op = _op_for(gate, state.n_qubits)
    if op is not None:
        op(state.amplitudes)
    return state


def sample_bitstring(state: StateVector, rng: np.random.Generator) -> str:
    """Draw one outcome from |amplitude|^2 by inverse-CDF sampling."""
    probabilities = np.abs(state.amplitudes) ** 2
    cumulative = np.cumsum(probabilities)
    draw = rng.random() * cumulative[-1]
    index = int(np.searchsorted(cumulative, draw, side="right"))
    index = min(index, state.amplitudes.size - 1)
    return "".join("1" if (index >> q) & 1 else "0"
                   for q in range(state.n_qubits))


def run_shot(circuit: Circuit, seed: int,
             max_qubits: int = DEFAULT_QUBIT_CEILING) -> ShotResult:
    """Execute one shot and measure its wall-clock latency.

    The same seed and circuit always give the same bitstring; elapsed_ns
    varies with host conditions.
    """
    if circuit.n_qubits > max_qubits:
        raise CapacityError(
            f"{circuit.n_qubits} qubits exceed the ceiling of {max_qubits} "
            f"({state_size_bytes(circuit.n_qubits)} bytes of state)")
    # circuit compilation stays outside the timed region; execution is inside
    ops = [op for g in circuit.gates
           if (op := _op_for(g, circuit.n_qubits)) is not None]
    rng = np.random.default_rng(seed)

    start_ns = time.perf_counter_ns()
    state = init_state(circuit.n_qubits)
    amplitudes = state.amplitudes
    for op in ops:
        op(amplitudes)
    bitstring = sample_bitstring(state, rng)
    elapsed_ns = time.perf_counter_ns() - start_ns
    # clock granularity can round an ultra-short shot down to zero
    return ShotResult(bitstring=bitstring, elapsed_ns=max(elapsed_ns, 1))


def final_state(circuit: Circuit,
                max_qubits: int = DEFAULT_QUBIT_CEILING) -> StateVector:
    """Apply the full gate sequence to |0...0> without sampling."""
    if circuit.n_qubits > max_qubits:
        raise CapacityError(
            f"{circuit.n_qubits} qubits exceed the ceiling of {max_qubits}")
    state = init_state(circuit.n_qubits)
    for gate in circuit.gates:
        apply_gate(state, gate)
    return state
