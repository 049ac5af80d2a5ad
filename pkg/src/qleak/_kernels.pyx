# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels over a contiguous complex128 state vector.

Same contract as _kernels_py: in-place updates, little-endian basis
(qubit q is bit q of the amplitude index). Multi-qubit kernels enumerate
only the affected subspace instead of scanning the full vector.
"""

BACKEND = "cython"


cdef inline Py_ssize_t _insert_zero_bit(Py_ssize_t value, Py_ssize_t position):
    # shift bits at and above `position` up by one, leaving a 0 bit there
    cdef Py_ssize_t low_mask = (<Py_ssize_t>1 << position) - 1
    return ((value & ~low_mask) << 1) | (value & low_mask)


def apply_1q(double complex[::1] state, double complex m00, double complex m01,
             double complex m10, double complex m11, Py_ssize_t qubit):
    """Apply a 2x2 unitary to one qubit."""
    cdef Py_ssize_t size = state.shape[0]
    cdef Py_ssize_t stride = <Py_ssize_t>1 << qubit
    cdef Py_ssize_t block = stride << 1
    cdef Py_ssize_t base, offset, i0, i1
    cdef double complex lo, hi
    cdef bint diagonal = (m01 == 0 and m10 == 0)
    cdef bint antidiagonal = (m00 == 0 and m11 == 0)
    for base in range(0, size, block):
        for offset in range(stride):
            i0 = base + offset
            i1 = i0 + stride
            if diagonal:
                state[i0] = m00 * state[i0]
                state[i1] = m11 * state[i1]
            elif antidiagonal:
                lo = state[i0]
                state[i0] = m01 * state[i1]
                state[i1] = m10 * lo
            else:
                lo = state[i0]
                hi = state[i1]
                state[i0] = m00 * lo + m01 * hi
                state[i1] = m10 * lo + m11 * hi


def apply_cx(double complex[::1] state, Py_ssize_t control, Py_ssize_t target):
    """Flip `target` where `control` is set."""
    cdef Py_ssize_t size = state.shape[0]
    cdef Py_ssize_t cbit = <Py_ssize_t>1 << control
    cdef Py_ssize_t tbit = <Py_ssize_t>1 << target
    cdef Py_ssize_t lo = control if control < target else target
    cdef Py_ssize_t hi = target if control < target else control
    cdef Py_ssize_t k, base, i0, i1
    cdef double complex tmp
    for k in range(size >> 2):
        base = _insert_zero_bit(_insert_zero_bit(k, lo), hi)
        i0 = base | cbit
        i1 = i0 | tbit
        tmp = state[i0]
        state[i0] = state[i1]
        state[i1] = tmp


def apply_cz(double complex[::1] state, Py_ssize_t control, Py_ssize_t target):
    """Negate amplitudes where both qubits are set."""
    cdef Py_ssize_t size = state.shape[0]
    cdef Py_ssize_t mask = (<Py_ssize_t>1 << control) | (<Py_ssize_t>1 << target)
    cdef Py_ssize_t lo = control if control < target else target
    cdef Py_ssize_t hi = target if control < target else control
    cdef Py_ssize_t k, i
    for k in range(size >> 2):
        i = _insert_zero_bit(_insert_zero_bit(k, lo), hi) | mask
        state[i] = -state[i]


def apply_swap(double complex[::1] state, Py_ssize_t a, Py_ssize_t b):
    """Exchange two qubits."""
    cdef Py_ssize_t size = state.shape[0]
    cdef Py_ssize_t abit = <Py_ssize_t>1 << a
    cdef Py_ssize_t bbit = <Py_ssize_t>1 << b
    cdef Py_ssize_t lo = a if a < b else b
    cdef Py_ssize_t hi = b if a < b else a
    cdef Py_ssize_t k, base, i0, i1
    cdef double complex tmp
    for k in range(size >> 2):
        base = _insert_zero_bit(_insert_zero_bit(k, lo), hi)
        i0 = base | abit
        i1 = base | bbit
        tmp = state[i0]
        state[i0] = state[i1]
        state[i1] = tmp


def apply_ccx(double complex[::1] state, Py_ssize_t control_a,
              Py_ssize_t control_b, Py_ssize_t target):
    """Flip `target` where both controls are set."""
    cdef Py_ssize_t size = state.shape[0]
    cdef Py_ssize_t cmask = ((<Py_ssize_t>1 << control_a)
                             | (<Py_ssize_t>1 << control_b))
    cdef Py_ssize_t tbit = <Py_ssize_t>1 << target
    cdef Py_ssize_t p0 = control_a
    cdef Py_ssize_t p1 = control_b
    cdef Py_ssize_t p2 = target
    cdef Py_ssize_t swap_tmp, k, base, i0, i1
    cdef double complex tmp
    # sort the three bit positions ascending for the zero-bit insertions
    if p0 > p1:
        swap_tmp = p0; p0 = p1; p1 = swap_tmp
    if p1 > p2:
        swap_tmp = p1; p1 = p2; p2 = swap_tmp
    if p0 > p1:
        swap_tmp = p0; p0 = p1; p1 = swap_tmp
    for k in range(size >> 3):
        base = _insert_zero_bit(
            _insert_zero_bit(_insert_zero_bit(k, p0), p1), p2)
        i0 = base | cmask
        i1 = i0 | tbit
        tmp = state[i0]
        state[i0] = state[i1]
        state[i1] = tmp
