# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled modular elimination kernels.

All arrays are C-contiguous int64 with entries already reduced into [0, p).
The modulus must be below 2**31 so that products fit in 63 bits.
"""
import numpy as np

from libc.stdint cimport int64_t


cdef inline int64_t _inv_mod(int64_t a, int64_t p) noexcept nogil:
    cdef int64_t t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


cdef int64_t _eliminate(int64_t[:, ::1] a, int64_t p, int64_t[::1] pivots,
                        bint full) noexcept nogil:
    cdef Py_ssize_t nrows = a.shape[0], ncols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv, start
    cdef int64_t inv, f, tmp
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, ncols):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _inv_mod(a[r, c], p)
        if inv != 1:
            for j in range(c, ncols):
                a[r, j] = (a[r, j] * inv) % p
        start = 0 if full else r + 1
        for i in range(start, nrows):
            if i == r:
                continue
            f = a[i, c]
            if f == 0:
                continue
            f = p - f
            for j in range(c, ncols):
                if a[r, j] != 0:
                    a[i, j] = (a[i, j] + f * a[r, j]) % p
        pivots[r] = c
        r += 1
    return r


def rref(a, int64_t p):
    """Reduced row echelon form of ``a`` mod ``p``; returns (matrix, pivots)."""
    arr = np.ascontiguousarray(a, dtype=np.int64).copy()
    piv = np.zeros(max(1, min(arr.shape[0], arr.shape[1])), dtype=np.int64)
    cdef int64_t[:, ::1] buf = arr
    cdef int64_t[::1] pv = piv
    cdef int64_t r
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return arr, []
    with nogil:
        r = _eliminate(buf, p, pv, True)
    return arr, [int(x) for x in piv[:r]]


def rank(a, int64_t p):
    arr = np.ascontiguousarray(a, dtype=np.int64).copy()
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return 0
    piv = np.zeros(min(arr.shape[0], arr.shape[1]), dtype=np.int64)
    cdef int64_t[:, ::1] buf = arr
    cdef int64_t[::1] pv = piv
    cdef int64_t r
    with nogil:
        r = _eliminate(buf, p, pv, False)
    return int(r)


def line_ranks(a, b, int64_t p):
    """Ranks of ``a + t*b`` for t = 0..p-1, followed by the rank of ``b``."""
    A = np.ascontiguousarray(a, dtype=np.int64)
    B = np.ascontiguousarray(b, dtype=np.int64)
    if A.shape[0] != B.shape[0] or A.shape[1] != B.shape[1]:
        raise ValueError("shape mismatch")
    out = np.zeros(p + 1, dtype=np.int64)
    if A.shape[0] == 0 or A.shape[1] == 0:
        return out
    work = np.empty_like(A)
    piv = np.zeros(min(A.shape[0], A.shape[1]), dtype=np.int64)
    cdef int64_t[:, ::1] av = A
    cdef int64_t[:, ::1] bv = B
    cdef int64_t[:, ::1] w = work
    cdef int64_t[::1] pv = piv
    cdef int64_t[::1] o = out
    cdef Py_ssize_t nrows = A.shape[0], ncols = A.shape[1], i, j
    cdef int64_t t
    with nogil:
        for t in range(p):
            for i in range(nrows):
                for j in range(ncols):
                    w[i, j] = (av[i, j] + t * bv[i, j]) % p
            o[t] = _eliminate(w, p, pv, False)
        for i in range(nrows):
            for j in range(ncols):
                w[i, j] = bv[i, j]
        o[p] = _eliminate(w, p, pv, False)
    return out
