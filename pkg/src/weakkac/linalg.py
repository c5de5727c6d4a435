"""Tolerance-aware numerical linear algebra helpers.

Column conventions: subspaces are stored as matrices whose *columns* span the
space.  Rank/pivot decisions use an explicit tolerance passed by the caller
(normally cfg.rank_tol).
"""

from __future__ import annotations

import numpy as np

from .config import SolveError


def _as2d(m: np.ndarray) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a


def rank(m: np.ndarray, tol: float) -> int:
    a = _as2d(m)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    return int(np.count_nonzero(sv > tol))


def orth(columns: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the column space."""
    a = np.asarray(columns, dtype=complex)
    if a.size == 0:
        return a.reshape(a.shape[0], 0)
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    r = int(np.count_nonzero(sv > tol))
    return u[:, :r]


def nullspace(m: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the right nullspace."""
    a = _as2d(m)
    nrows, ncols = a.shape
    if nrows == 0:
        return np.eye(ncols, dtype=complex)
    # only wide inputs need the full right factor; asking for it on a tall
    # stack would materialize an nrows-square left factor
    full = nrows < ncols
    _, sv, vh = np.linalg.svd(a, full_matrices=full)
    nz = int(np.count_nonzero(sv > tol))
    return vh[nz:].conj().T


def rref(rows: np.ndarray, tol: float) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with deterministic leftmost-pivot order.

    Returns (reduced nonzero rows, pivot column indices).  Used for quotient
    constructions where reproducible coordinates matter more than the last
    digit of accuracy.
    """
    a = _as2d(rows).copy()
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pick = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[pick, c]) <= tol:
            continue
        a[[r, pick]] = a[[pick, r]]
        a[r] = a[r] / a[r, c]
        other = np.arange(nrows) != r
        a[other] -= np.outer(a[other, c], a[r])
        pivots.append(c)
        r += 1
    return a[:r], pivots


def lstsq_min(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sol, *_ = np.linalg.lstsq(_as2d(a), b, rcond=None)
    return sol


def solve_in_span(columns: np.ndarray, v: np.ndarray, tol: float) -> np.ndarray:
    """Coordinates of v in the given column span; raises if v is not in it."""
    c = lstsq_min(columns, v)
    res = float(np.linalg.norm(columns @ c - v))
    if res > tol:
        raise SolveError(f"vector lies outside span (residual {res:.3e})")
    return c

def span_residual(columns: np.ndarray, v: np.ndarray) -> float:
    c = lstsq_min(columns, v)
    return float(np.linalg.norm(columns @ c - v))


def subspace_leq(a_cols: np.ndarray, b_cols: np.ndarray, tol: float) -> bool:
    """Is span(a) contained in span(b)?"""
    q = orth(b_cols, tol)
    rest = a_cols - q @ (q.conj().T @ a_cols)
    return bool(np.abs(rest).max(initial=0.0) <= 100 * tol)


def subspace_intersection(a_cols: np.ndarray, b_cols: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal columns spanning span(a) ∩ span(b)."""
    qa = orth(a_cols, tol)
    qb = orth(b_cols, tol)
    if qa.shape[1] == 0 or qb.shape[1] == 0:
        return np.zeros((a_cols.shape[0], 0), dtype=complex)
    # x = qa u = qb w  <=>  [qa, -qb] (u; w) = 0
    stacked = np.hstack([qa, -qb])
    ns = nullspace(stacked, tol)
    vecs = qa @ ns[: qa.shape[1], :]
    return orth(vecs, tol)


def min_eig_hermitian(g: np.ndarray) -> float:
    h = (g + g.conj().T) / 2.0
    if h.shape[0] == 0:
        return 0.0
    return float(np.linalg.eigvalsh(h).min())


def herm_deviation(g: np.ndarray) -> float:
    return float(np.abs(g - g.conj().T).max(initial=0.0))


def round_int(x: float | complex, tol: float) -> int:
    xr = complex(x)
    n = int(round(xr.real))
    if abs(xr - n) > tol:
        raise SolveError(f"value {x!r} is not integral within {tol:g}")
    return n


def round_int_array(m: np.ndarray, tol: float) -> np.ndarray:
    out = np.empty(m.shape, dtype=np.int64)
    flat_in = np.asarray(m, dtype=complex).ravel()
    flat_out = out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = round_int(v, tol)
    return out


def cluster_1d(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Group sorted real values into clusters split at gaps larger than `gap`.

    Returns index arrays into the original ordering.
    """
    order = np.argsort(values)
    groups: list[list[int]] = []
    for idx in order:
        if groups and abs(values[idx] - values[groups[-1][-1]]) <= gap:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return [np.array(g, dtype=int) for g in groups]
