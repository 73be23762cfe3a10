"""Exact rank over a prime field F_p, p < 2**32, on int64 numpy arrays."""

from __future__ import annotations

import numpy as np

_SPLIT = 1 << 16


def mulmod(x, y, p: int):
    """Elementwise ``x * y mod p`` for reduced operands, broadcasting like ``*``.

    Below 2**31 the product fits in int64 directly; above it ``y`` is split
    into 16-bit halves so no intermediate exceeds 2**49.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if p < (1 << 31):
        return (x * y) % p
    hi = (x * (y >> 16)) % p
    return (hi * _SPLIT + x * (y & (_SPLIT - 1))) % p


def rank_mod_p(matrix, p: int) -> int:
    """Rank over F_p by fraction-free elimination.

    Columns are scanned left to right; the pivot is the first nonzero entry
    at or below the current row.  Stops as soon as full column rank is hit.
    """
    A = np.array(matrix, dtype=np.int64) % p
    if A.ndim != 2 or A.size == 0:
        return 0
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        piv = A[r, c]
        below = A[r + 1:, c:]
        f = below[:, 0]
        hit = np.flatnonzero(f)
        if hit.size:
            rows = below[hit]
            below[hit] = (mulmod(rows, piv, p)
                          - mulmod(f[hit][:, None], A[r, c:][None, :], p)) % p
        r += 1
        if r == n:
            break
    return r


def normalize(v, p: int) -> tuple[int, ...]:
    """Projective representative with the first nonzero coordinate equal to 1."""
    v = [int(x) % p for x in v]
    for x in v:
        if x:
            inv = pow(x, -1, p)
            return tuple(y * inv % p for y in v)
    return tuple(v)


def cross3(u, v, p: int) -> np.ndarray:
    """Cross product mod p: the line through two plane points, or the meet of two lines."""
    u = [int(x) % p for x in u]
    v = [int(x) % p for x in v]
    return np.array([
        (u[1] * v[2] - u[2] * v[1]) % p,
        (u[2] * v[0] - u[0] * v[2]) % p,
        (u[0] * v[1] - u[1] * v[0]) % p,
    ], dtype=np.int64)
