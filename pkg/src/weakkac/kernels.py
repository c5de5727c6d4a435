"""Hot tensor kernels: numba-jitted with a pure-numpy fallback.

Set WKA_NO_NUMBA=1 to force the numpy path (also taken automatically when
numba is not importable).  Both paths compute the same contractions; they may
differ by float rounding in the last bits, within any sensible tolerance.

mult[i, j, k] means x_i * x_j = sum_k mult[i, j, k] x_k throughout.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("WKA_NO_NUMBA", "").strip().lower()
_DISABLED = _env in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled via WKA_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _multiply_np(mult: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = mult.shape[0]
    t = (x @ mult.reshape(n, n * n)).reshape(n, n)
    return y @ t


def _product_table_np(mult: np.ndarray, rows_b: np.ndarray, rows_c: np.ndarray) -> np.ndarray:
    # out[p, q, :] = rows_b[p] * rows_c[q] in the algebra
    n = mult.shape[0]
    t = (rows_b @ mult.reshape(n, n * n)).reshape(-1, n, n)
    return np.einsum("pjk,qj->pqk", t, rows_c, optimize=True)


def _assoc_residual_np(mult: np.ndarray) -> float:
    # max-entry residual of (x_i x_j) x_k - x_i (x_j x_k), streamed over i
    # to keep memory at O(n^3)
    n = mult.shape[0]
    flat = mult.reshape(n, n * n)
    worst = 0.0
    for i in range(n):
        left = (mult[i] @ flat).reshape(n, n, n)
        # right[j,k,l] = sum_p mult[j,k,p] mult[i,p,l]
        right = np.tensordot(mult, mult[i], axes=([2], [0]))
        worst = max(worst, float(np.abs(left - right).max()))
    return worst


if HAS_NUMBA:

    @njit(cache=True)
    def _multiply_nb(mult, x, y):  # pragma: no cover - exercised via dispatch
        n = mult.shape[0]
        flat = np.ascontiguousarray(mult).reshape(n, n * n)
        t = (np.ascontiguousarray(x) @ flat).reshape(n, n)
        return np.ascontiguousarray(y) @ t

    @njit(cache=True)
    def _product_table_nb(mult, rows_b, rows_c):  # pragma: no cover
        n = mult.shape[0]
        p = rows_b.shape[0]
        q = rows_c.shape[0]
        out = np.empty((p, q, n), dtype=np.complex128)
        flat = np.ascontiguousarray(mult).reshape(n, n * n)
        bc = np.ascontiguousarray(rows_b)
        cc = np.ascontiguousarray(rows_c)
        for a in range(p):
            t = (bc[a] @ flat).reshape(n, n)
            for b in range(q):
                out[a, b, :] = cc[b] @ t
        return out

    @njit(cache=True)
    def _assoc_residual_nb(mult):  # pragma: no cover
        n = mult.shape[0]
        m = np.ascontiguousarray(mult)
        flat = m.reshape(n, n * n)
        stacked = m.reshape(n * n, n)
        worst = 0.0
        for i in range(n):
            row = np.ascontiguousarray(m[i])
            left = (row @ flat).reshape(n * n, n)
            right = stacked @ row
            d = np.abs(left - right).max()
            if d > worst:
                worst = d
        return worst

    multiply = _multiply_nb
    product_table = _product_table_nb
    assoc_residual = _assoc_residual_nb
else:
    multiply = _multiply_np
    product_table = _product_table_np
    assoc_residual = _assoc_residual_np


def warmup() -> None:
    """Trigger JIT compilation so timing-sensitive callers pay it up front."""
    m = np.zeros((2, 2, 2), dtype=np.complex128)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 0, 1] = 1.0
    m[1, 1, 0] = 1.0
    x = np.ones(2, dtype=np.complex128)
    multiply(m, x, x)
    product_table(m, m[0], m[1])
    assoc_residual(m)
