"""Numpy implementation of the modular elimination kernels.

Same contract as the compiled module: int64 arrays with entries in [0, p),
p < 2**31.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 4096


def _eliminate(a: np.ndarray, p: int, full: bool) -> list[int]:
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r] = a[r] * inv % p
        col = a[:, c].copy()
        col[: r + 1 if not full else 0] = 0
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            a[rows] = (a[rows] - np.outer(col[rows], a[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def rref(a, p: int):
    arr = np.array(a, dtype=np.int64, copy=True)
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return arr, []
    return arr, _eliminate(arr, p, True)


def rank(a, p: int) -> int:
    arr = np.array(a, dtype=np.int64, copy=True)
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return 0
    return len(_eliminate(arr, p, False))


def _inv_vec(x: np.ndarray, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def batch_rank(stack: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices, eliminating all of them in lockstep."""
    a = np.array(stack, dtype=np.int64, copy=True)
    n, nrows, ncols = a.shape
    row = np.zeros(n, dtype=np.int64)
    if nrows == 0 or ncols == 0:
        return row
    rowidx = np.arange(nrows)
    for c in range(ncols):
        cand = (a[:, :, c] != 0) & (rowidx[None, :] >= row[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        sel = np.flatnonzero(has)
        piv = cand[sel].argmax(axis=1)
        cur = row[sel]
        prow = a[sel, piv].copy()
        a[sel, piv] = a[sel, cur]
        prow = prow * _inv_vec(prow[:, c], p)[:, None] % p
        a[sel, cur] = prow
        below = rowidx[None, :] > cur[:, None]
        f = a[sel, :, c] * below
        a[sel] = (a[sel] - f[:, :, None] * prow[:, None, :]) % p
        row[sel] += 1
    return row


def line_ranks(a, b, p: int) -> np.ndarray:
    A = np.asarray(a, dtype=np.int64)
    B = np.asarray(b, dtype=np.int64)
    if A.shape != B.shape:
        raise ValueError("shape mismatch")
    out = np.zeros(p + 1, dtype=np.int64)
    for start in range(0, p, _CHUNK):
        t = np.arange(start, min(start + _CHUNK, p), dtype=np.int64)
        stack = (A[None, :, :] + t[:, None, None] * B[None, :, :]) % p
        out[start : start + t.size] = batch_rank(stack, p)
    out[p] = rank(B, p)
    return out
