"""Access to the bundled example circuits (2-10 qubits, .qasm files)."""

from __future__ import annotations

from pathlib import Path

from .qasm import Circuit, load_qasm_file


def corpus_dir() -> Path:
    """Directory holding the bundled .qasm files."""
    return Path(__file__).parent / "corpus"


def corpus_paths() -> list[Path]:
    """Bundled circuit files, sorted by name."""
    return sorted(corpus_dir().glob("*.qasm"))


def load_corpus() -> list[Circuit]:
    """Parse every bundled circuit."""
    return [load_qasm_file(p) for p in corpus_paths()]
