"""Pure-numpy gate kernels; fallback used when the compiled module is absent.

All kernels mutate a contiguous complex128 state vector of length 2**n in
place. The basis convention is little-endian: qubit q corresponds to bit q
of the amplitude index.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def apply_1q(state: np.ndarray, m00: complex, m01: complex,
             m10: complex, m11: complex, qubit: int) -> None:
    """Apply a 2x2 unitary to one qubit."""
    view = state.reshape(-1, 2, 1 << qubit)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = m00 * lo + m01 * hi
    view[:, 1, :] = m10 * lo + m11 * hi


def _bit_axis(n_qubits: int, qubit: int) -> int:
    # reshape([2]*n) puts the most significant bit on axis 0
    return n_qubits - 1 - qubit


def apply_cx(state: np.ndarray, control: int, target: int) -> None:
    """Flip `target` where `control` is set."""
    n = state.size.bit_length() - 1
    view = state.reshape([2] * n)
    ac, at = _bit_axis(n, control), _bit_axis(n, target)
    sel0 = [slice(None)] * n
    sel1 = [slice(None)] * n
    sel0[ac] = sel1[ac] = 1
    sel0[at], sel1[at] = 0, 1
    tmp = view[tuple(sel0)].copy()
    view[tuple(sel0)] = view[tuple(sel1)]
    view[tuple(sel1)] = tmp


def apply_cz(state: np.ndarray, control: int, target: int) -> None:
    """Negate amplitudes where both qubits are set."""
    n = state.size.bit_length() - 1
    view = state.reshape([2] * n)
    sel = [slice(None)] * n
    sel[_bit_axis(n, control)] = 1
    sel[_bit_axis(n, target)] = 1
    view[tuple(sel)] *= -1.0


def apply_swap(state: np.ndarray, a: int, b: int) -> None:
    """Exchange two qubits."""
    n = state.size.bit_length() - 1
    view = state.reshape([2] * n)
    aa, ab = _bit_axis(n, a), _bit_axis(n, b)
    sel01 = [slice(None)] * n
    sel10 = [slice(None)] * n
    sel01[aa], sel01[ab] = 0, 1
    sel10[aa], sel10[ab] = 1, 0
    tmp = view[tuple(sel01)].copy()
    view[tuple(sel01)] = view[tuple(sel10)]
    view[tuple(sel10)] = tmp


def apply_ccx(state: np.ndarray, control_a: int, control_b: int,
              target: int) -> None:
    """Flip `target` where both controls are set."""
    n = state.size.bit_length() - 1
    view = state.reshape([2] * n)
    aa, ab, at = (_bit_axis(n, control_a), _bit_axis(n, control_b),
                  _bit_axis(n, target))
    sel0 = [slice(None)] * n
    sel1 = [slice(None)] * n
    sel0[aa] = sel1[aa] = 1
    sel0[ab] = sel1[ab] = 1
    sel0[at], sel1[at] = 0, 1
    tmp = view[tuple(sel0)].copy()
    view[tuple(sel0)] = view[tuple(sel1)]
    view[tuple(sel1)] = tmp
