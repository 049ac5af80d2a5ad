"""OpenQASM 2.0 subset parser producing a flat, validated circuit IR.

Supported statements: OPENQASM 2.0, include "qelib1.inc", qreg, creg,
barrier, measure, and applications of the fixed gate set below. Multiple
quantum registers are flattened into one index space in declaration order.
Classical registers are tracked only to validate measure targets; `if`,
`gate`, `opaque` and `reset` statements are rejected. Gate parameters may
be numeric literals or products/quotients involving `pi` (e.g. pi/2,
3*pi/4); general arithmetic is not accepted.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import QasmSyntaxError, RegisterIndexError, UnsupportedGateError

# kind -> qubit arity; barrier is variadic and handled apart
GATE_QUBITS: dict[str, int] = {
    "h": 1, "x": 1, "y": 1, "z": 1, "s": 1, "sdg": 1, "t": 1, "tdg": 1,
    "rx": 1, "ry": 1, "rz": 1, "u1": 1, "u2": 1, "u3": 1,
    "cx": 2, "cz": 2, "swap": 2, "ccx": 3,
    "measure": 1,
}
GATE_PARAMS: dict[str, int] = {
    "rx": 1, "ry": 1, "rz": 1, "u1": 1, "u2": 2, "u3": 3,
}

SUPPORTED_KINDS = frozenset(GATE_QUBITS) | {"barrier"}
UNITARY_KINDS = frozenset(GATE_QUBITS) - {"measure"}
NON_COUNTED_KINDS = frozenset({"measure", "barrier"})

_REJECTED_KEYWORDS = ("gate", "opaque", "reset", "if")

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_GATE_STMT_RE = re.compile(rf"^({_IDENT})\s*(?:\(([^)]*)\))?\s*(.*)$", re.DOTALL)
_OPERAND_RE = re.compile(rf"^({_IDENT})\s*(?:\[\s*(\d+)\s*\])?$")
_REG_DECL_RE = re.compile(rf"^(qreg|creg)\s+({_IDENT})\s*\[\s*([+-]?\d+)\s*\]$")
_INCLUDE_RE = re.compile(r'^include\s+"([^"]*)"$')
_VERSION_RE = re.compile(r"^OPENQASM\s+(\S+)$")


@dataclass(frozen=True)
class Gate:
    """One circuit operation on flattened qubit indices."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()


@dataclass(frozen=True)
class Circuit:
    """Parsed gate-level IR of one program."""

    name: str
    n_qubits: int
    gates: tuple[Gate, ...]
    source_hash: str


def total_gates(circuit: Circuit) -> int:
    """Count gates excluding barrier and measure entries."""
    return sum(1 for g in circuit.gates if g.kind not in NON_COUNTED_KINDS)


def _validate_gate(gate: Gate, n_qubits: int) -> None:
    if gate.kind not in SUPPORTED_KINDS:
        raise UnsupportedGateError(f"unsupported gate {gate.kind!r}")
    if gate.kind == "barrier":
        expected_qubits = len(gate.qubits) if gate.qubits else 1
        expected_params = 0
    else:
        expected_qubits = GATE_QUBITS[gate.kind]
        expected_params = GATE_PARAMS.get(gate.kind, 0)
    if len(gate.qubits) != expected_qubits:
        raise QasmSyntaxError(
            f"{gate.kind} expects {expected_qubits} qubit operand(s), "
            f"got {len(gate.qubits)}")
    if len(gate.params) != expected_params:
        raise QasmSyntaxError(
            f"{gate.kind} expects {expected_params} parameter(s), "
            f"got {len(gate.params)}")
    if len(set(gate.qubits)) != len(gate.qubits):
        raise QasmSyntaxError(f"duplicate qubit operand in {gate.kind}")
    for q in gate.qubits:
        if not 0 <= q < n_qubits:
            raise RegisterIndexError(
                f"qubit index {q} out of range for {n_qubits} qubit(s)")


def _emit_body(n_qubits: int, gates: tuple[Gate, ...]) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{n_qubits}];"]
    if any(g.kind == "measure" for g in gates):
        lines.append(f"creg c[{n_qubits}];")
    for g in gates:
        operands = ",".join(f"q[{q}]" for q in g.qubits)
        if g.kind == "measure":
            lines.append(f"measure q[{g.qubits[0]}] -> c[{g.qubits[0]}];")
        elif g.params:
            args = ",".join(repr(p) for p in g.params)
            lines.append(f"{g.kind}({args}) {operands};")
        else:
            lines.append(f"{g.kind} {operands};")
    return "\n".join(lines) + "\n"


def emit(circuit: Circuit) -> str:
    """Render the canonical single-register source text of a circuit."""
    return _emit_body(circuit.n_qubits, circuit.gates)


def make_circuit(name: str, n_qubits: int, gates: Iterable[Gate]) -> Circuit:
    """Build a validated Circuit; the hash covers the canonical source text."""
    if n_qubits < 1:
        raise QasmSyntaxError(f"circuit needs at least one qubit, got {n_qubits}")
    gate_tuple = tuple(gates)
    for gate in gate_tuple:
        _validate_gate(gate, n_qubits)
    canonical = _emit_body(n_qubits, gate_tuple)
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    return Circuit(name=name, n_qubits=n_qubits, gates=gate_tuple,
                   source_hash=digest)


def _strip_comments(source: str) -> str:
    # // to end of line; keeps the newline so line numbers survive
    return re.sub(r"//[^\n]*", "", source)


def _split_statements(text: str) -> list[tuple[int, str]]:
    """Split on ';' into (line, statement) pairs; reject trailing garbage."""
    statements = []
    pos = 0
    while True:
        end = text.find(";", pos)
        if end == -1:
            break
        raw = text[pos:end]
        chunk = raw.strip()
        if chunk:
            start = pos + (len(raw) - len(raw.lstrip()))
            statements.append((text.count("\n", 0, start) + 1, chunk))
        pos = end + 1
    tail = text[pos:].strip()
    if tail:
        line = text.count("\n", 0, pos) + 1
        raise QasmSyntaxError(f"statement missing ';': {tail.splitlines()[0]!r}", line)
    return statements


def _eval_factor(token: str, line: int) -> float:
    token = token.strip()
    if token == "pi":
        return math.pi
    try:
        return float(token)
    except ValueError:
        raise QasmSyntaxError(
            f"unsupported parameter expression {token!r}", line) from None


def _eval_param(expr: str, line: int) -> float:
    text = expr.strip()
    if not text:
        raise QasmSyntaxError("empty gate parameter", line)
    sign = 1.0
    if text[0] in "+-":
        sign = -1.0 if text[0] == "-" else 1.0
        text = text[1:].strip()
    tokens = re.split(r"\s*([*/])\s*", text)
    value = _eval_factor(tokens[0], line)
    for i in range(1, len(tokens), 2):
        operator, factor = tokens[i], _eval_factor(tokens[i + 1], line)
        if operator == "/":
            if factor == 0.0:
                raise QasmSyntaxError("division by zero in parameter", line)
            value /= factor
        else:
            value *= factor
    return sign * value


class _Parser:
    def __init__(self, name: str):
        self.name = name
        self.qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
        self.cregs: dict[str, int] = {}
        self.n_qubits = 0
        self.gates: list[Gate] = []

    def feed(self, line: int, stmt: str) -> None:
        head = re.match(_IDENT, stmt)
        if head is None:
            raise QasmSyntaxError(f"malformed statement {stmt!r}", line)
        keyword = head.group(0)
        if keyword == "OPENQASM":
            self._version(line, stmt)
        elif keyword == "include":
            self._include(line, stmt)
        elif keyword in ("qreg", "creg"):
            self._declare(line, stmt)
        elif keyword in _REJECTED_KEYWORDS:
            raise UnsupportedGateError(
                f"line {line}: unsupported statement kind {keyword!r}")
        elif keyword == "measure":
            self._measure(line, stmt)
        elif keyword == "barrier":
            self._barrier(line, stmt)
        else:
            self._gate(line, stmt)

    def _version(self, line: int, stmt: str) -> None:
        m = _VERSION_RE.match(stmt)
        if m is None:
            raise QasmSyntaxError(f"malformed OPENQASM statement {stmt!r}", line)
        if m.group(1) != "2.0":
            raise QasmSyntaxError(f"unsupported OPENQASM version {m.group(1)}", line)

    def _include(self, line: int, stmt: str) -> None:
        m = _INCLUDE_RE.match(stmt)
        if m is None:
            raise QasmSyntaxError(f"malformed include statement {stmt!r}", line)
        if m.group(1) != "qelib1.inc":
            raise UnsupportedGateError(
                f"line {line}: unsupported include {m.group(1)!r}")

    def _declare(self, line: int, stmt: str) -> None:
        m = _REG_DECL_RE.match(stmt)
        if m is None:
            raise QasmSyntaxError(f"malformed register declaration {stmt!r}", line)
        kind, reg_name, size_text = m.groups()
        size = int(size_text)
        if size < 1:
            raise QasmSyntaxError(f"register {reg_name!r} must have size >= 1", line)
        if reg_name in self.qregs or reg_name in self.cregs:
            raise QasmSyntaxError(f"register {reg_name!r} already declared", line)
        if kind == "qreg":
            self.qregs[reg_name] = (self.n_qubits, size)
            self.n_qubits += size
        else:
            self.cregs[reg_name] = size

    def _operand(self, text: str, line: int) -> tuple[str, int | None]:
        m = _OPERAND_RE.match(text.strip())
        if m is None:
            raise QasmSyntaxError(f"malformed operand {text.strip()!r}", line)
        reg, index = m.group(1), m.group(2)
        return reg, (int(index) if index is not None else None)

    def _resolve_qubit(self, reg: str, index: int, line: int) -> int:
        if reg not in self.qregs:
            raise QasmSyntaxError(f"undeclared quantum register {reg!r}", line)
        offset, size = self.qregs[reg]
        if index >= size:
            raise RegisterIndexError(
                f"line {line}: index {index} out of range for {reg}[{size}]")
        return offset + index

    def _qreg_span(self, reg: str, line: int) -> list[int]:
        if reg not in self.qregs:
            raise QasmSyntaxError(f"undeclared quantum register {reg!r}", line)
        offset, size = self.qregs[reg]
        return list(range(offset, offset + size))

    def _measure(self, line: int, stmt: str) -> None:
        parts = stmt[len("measure"):].split("->")
        if len(parts) != 2:
            raise QasmSyntaxError("measure expects '<qubit> -> <bit>'", line)
        qreg, qindex = self._operand(parts[0], line)
        creg, cindex = self._operand(parts[1], line)
        if creg not in self.cregs:
            raise QasmSyntaxError(f"undeclared classical register {creg!r}", line)
        csize = self.cregs[creg]
        if (qindex is None) != (cindex is None):
            raise QasmSyntaxError("measure operands must both be indexed or both bare", line)
        if qindex is None:
            qubits = self._qreg_span(qreg, line)
            if len(qubits) != csize:
                raise QasmSyntaxError(
                    f"measure register sizes differ: {qreg} vs {creg}", line)
            for q in qubits:
                self._append(Gate("measure", (q,)), line)
        else:
            if cindex >= csize:
                raise RegisterIndexError(
                    f"line {line}: index {cindex} out of range for {creg}[{csize}]")
            q = self._resolve_qubit(qreg, qindex, line)
            self._append(Gate("measure", (q,)), line)

    def _barrier(self, line: int, stmt: str) -> None:
        body = stmt[len("barrier"):].strip()
        if not body:
            raise QasmSyntaxError("barrier expects at least one operand", line)
        qubits: list[int] = []
        for operand in body.split(","):
            reg, index = self._operand(operand, line)
            if index is None:
                qubits.extend(self._qreg_span(reg, line))
            else:
                qubits.append(self._resolve_qubit(reg, index, line))
        self._append(Gate("barrier", tuple(qubits)), line)

    def _gate(self, line: int, stmt: str) -> None:
        m = _GATE_STMT_RE.match(stmt)
        assert m is not None  # leading identifier already matched
        kind, param_text, operand_text = m.groups()
        if kind not in UNITARY_KINDS:
            raise UnsupportedGateError(f"line {line}: unsupported gate {kind!r}")
        params: tuple[float, ...] = ()
        if param_text is not None:
            params = tuple(_eval_param(p, line) for p in param_text.split(","))
        if not operand_text.strip():
            raise QasmSyntaxError(f"{kind} has no qubit operands", line)
        operands = [self._operand(o, line) for o in operand_text.split(",")]
        bare = [reg for reg, index in operands if index is None]
        if bare:
            if GATE_QUBITS[kind] != 1 or len(operands) != 1:
                raise UnsupportedGateError(
                    f"line {line}: register broadcast is only supported for "
                    f"single-qubit gates, got {kind!r} on {bare[0]!r}")
            for q in self._qreg_span(bare[0], line):
                self._append(Gate(kind, (q,), params), line)
            return
        qubits = tuple(self._resolve_qubit(reg, index, line)
                       for reg, index in operands)
        self._append(Gate(kind, qubits, params), line)

    def _append(self, gate: Gate, line: int) -> None:
        try:
            _validate_gate(gate, self.n_qubits)
        except QasmSyntaxError as exc:
            raise QasmSyntaxError(str(exc), line) from None
        self.gates.append(gate)

    def finish(self) -> Circuit:
        if self.n_qubits == 0:
            raise QasmSyntaxError("no quantum register declared")
        return make_circuit(self.name, self.n_qubits, self.gates)


def parse_qasm(source: str, name: str = "circuit") -> Circuit:
    """Parse OpenQASM 2.0 text into a Circuit.

    Raises QasmSyntaxError, UnsupportedGateError or RegisterIndexError;
    statements are never silently dropped.
    """
    parser = _Parser(name)
    for line, stmt in _split_statements(_strip_comments(source)):
        parser.feed(line, stmt)
    return parser.finish()


def load_qasm_file(path: str | Path) -> Circuit:
    """Parse a .qasm file; the circuit name is the filename stem."""
    path = Path(path)
    return parse_qasm(path.read_text(encoding="utf-8"), name=path.stem)
