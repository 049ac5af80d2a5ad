"""Backend equivalence: compiled and pure-python kernels must agree."""

import numpy as np
import pytest

from qleak import _kernels_py
from qleak import kernels

try:
    from qleak import _kernels
except ImportError:
    _kernels = None

BACKENDS = [_kernels_py] + ([_kernels] if _kernels is not None else [])


def _random_state(n, rng):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return (amps / np.linalg.norm(amps)).astype(np.complex128)


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
def test_backends_agree_on_random_states():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3, 5, 7):
        base = _random_state(n, rng)
        matrix = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        for q in range(n):
            a, b = base.copy(), base.copy()
            _kernels_py.apply_1q(a, *matrix.ravel(), q)
            _kernels.apply_1q(b, *matrix.ravel(), q)
            np.testing.assert_allclose(a, b, atol=1e-15)
        if n < 2:
            continue
        for name in ("apply_cx", "apply_cz", "apply_swap"):
            for c in range(n):
                for t in range(n):
                    if c == t:
                        continue
                    a, b = base.copy(), base.copy()
                    getattr(_kernels_py, name)(a, c, t)
                    getattr(_kernels, name)(b, c, t)
                    np.testing.assert_array_equal(a, b)
        if n < 3:
            continue
        for triple in ((0, 1, 2), (2, 0, 1), (n - 1, 0, n // 2)):
            c1, c2, t = triple
            if len({c1, c2, t}) != 3:
                continue
            a, b = base.copy(), base.copy()
            _kernels_py.apply_ccx(a, c1, c2, t)
            _kernels.apply_ccx(b, c1, c2, t)
            np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("backend", BACKENDS,
                         ids=[m.BACKEND for m in BACKENDS])
def test_cx_truth_table(backend):
    # |10> (qubit0=0, qubit1=1) with control=1 flips target 0 -> |11>
    state = np.zeros(4, dtype=np.complex128)
    state[0b10] = 1.0
    backend.apply_cx(state, 1, 0)
    assert state[0b11] == 1.0


@pytest.mark.parametrize("backend", BACKENDS,
                         ids=[m.BACKEND for m in BACKENDS])
def test_swap_moves_amplitude(backend):
    state = np.zeros(8, dtype=np.complex128)
    state[0b001] = 1.0
    backend.apply_swap(state, 0, 2)
    assert state[0b100] == 1.0


@pytest.mark.parametrize("backend", BACKENDS,
                         ids=[m.BACKEND for m in BACKENDS])
def test_ccx_needs_both_controls(backend):
    state = np.zeros(8, dtype=np.complex128)
    state[0b011] = 1.0
    backend.apply_ccx(state, 0, 1, 2)
    assert state[0b111] == 1.0
    state = np.zeros(8, dtype=np.complex128)
    state[0b001] = 1.0
    backend.apply_ccx(state, 0, 1, 2)
    assert state[0b001] == 1.0


def test_dispatch_selects_a_backend():
    assert kernels.BACKEND in ("cython", "python")
    assert callable(kernels.apply_1q)
