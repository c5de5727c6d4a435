"""Block decomposition of finite-dimensional C*-algebras.

Strategy: a random self-adjoint central element is diagonalized in the left
regular representation (made Hermitian via the Cholesky factor of the trace
form), its spectral projections applied to the unit give the minimal central
projections.  The same trick inside a block yields diagonal matrix units;
off-diagonal ones come from polar-corrected partial isometries.  Randomness is
seeded and retried, so results are deterministic per (input, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteStarAlgebra
from .config import DecompositionError, DimensionMismatch, SolveError, ToleranceConfig
from .linalg import (cluster_1d, lstsq_min, orth, round_int, round_int_array,
                     solve_in_span)
from .report import Report

_MAX_RETRIES = 12


@dataclass(frozen=True)
class BlockDecomposition:
    central_projections: np.ndarray  # (N, n) rows
    block_dims: tuple[int, ...]

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)


@dataclass(frozen=True)
class MatrixUnitSystem:
    units: tuple[np.ndarray, ...]  # one (d, d, n) array per block

    def flat(self) -> np.ndarray:
        return np.vstack([u.reshape(-1, u.shape[-1]) for u in self.units])


@dataclass(frozen=True)
class SubalgebraEmbedding:
    sub: FiniteStarAlgebra
    amb: FiniteStarAlgebra
    matrix: np.ndarray  # (dim_amb, dim_sub), columns = images of sub basis

    def __post_init__(self) -> None:
        if self.matrix.shape != (self.amb.dim, self.sub.dim):
            raise DimensionMismatch("embedding matrix shape mismatch")

    def embed(self, x_sub: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x_sub, complex)

    def restrict(self, x_amb: np.ndarray, tol: float) -> np.ndarray:
        return solve_in_span(self.matrix, np.asarray(x_amb, complex), tol)


@dataclass(frozen=True)
class InclusionMatrix:
    entries: np.ndarray  # (L, N) int64, sub blocks x amb blocks
    sub_dims: tuple[int, ...]
    amb_dims: tuple[int, ...]


def _hermitianized(op: np.ndarray, gram: np.ndarray):
    # conjugate op (self-adjoint wrt the trace form) into an honestly
    # Hermitian matrix: G = R^H R, T = R op R^-1
    low = np.linalg.cholesky(gram)
    r = low.conj().T
    rinv = np.linalg.inv(r)
    return r @ op @ rinv, r, rinv


def _spectral_projection(evecs: np.ndarray, idx: np.ndarray,
                         r: np.ndarray, rinv: np.ndarray) -> np.ndarray:
    v = evecs[:, idx]
    return rinv @ (v @ v.conj().T) @ r


def _random_self_adjoint(alg: FiniteStarAlgebra, rows: np.ndarray, rng) -> np.ndarray:
    coeff = rng.standard_normal(rows.shape[0]) + 1j * rng.standard_normal(rows.shape[0])
    w = coeff @ rows
    return (w + alg.star(w)) / 2.0


def block_decompose(alg: FiniteStarAlgebra, cfg: ToleranceConfig,
                    center_rows: np.ndarray | None = None) -> BlockDecomposition:
    from .algebra import center as center_of

    n = alg.dim
    gram = alg.trace_form()
    try:
        np.linalg.cholesky((gram + gram.conj().T) / 2)
    except np.linalg.LinAlgError:
        raise DecompositionError("trace form not positive definite; not a C*-algebra")

    z_rows = center_of(alg, cfg) if center_rows is None else center_rows
    n_blocks = z_rows.shape[0]
    tr = alg.trace_vector()
    if n_blocks == 1:
        d = round_int(np.sqrt((tr @ alg.unit).real), cfg.int_tol)
        return BlockDecomposition(alg.unit[None, :].copy(), (d,))

    rng = np.random.default_rng([cfg.rng_seed, 0x5B10C5])
    for _ in range(_MAX_RETRIES):
        h = _random_self_adjoint(alg, z_rows, rng)
        t, r, rinv = _hermitianized(alg.lmat(h), gram)
        evals, evecs = np.linalg.eigh((t + t.conj().T) / 2)
        clusters = cluster_1d(evals, cfg.cluster_tol)
        if len(clusters) != n_blocks:
            continue
        projs = []
        dims = []
        ok = True
        for idx in clusters:
            p = _spectral_projection(evecs, idx, r, rinv) @ alg.unit
            if np.abs(alg.mul(p, p) - p).max() > cfg.rank_tol:
                ok = False
                break
            try:
                d2 = round_int((tr @ p).real, cfg.int_tol)
                d = round_int(np.sqrt(d2), cfg.int_tol)
            except SolveError:
                ok = False
                break
            if d * d != len(idx):
                ok = False
                break
            projs.append(p)
            dims.append(d)
        if not ok:
            continue
        order = sorted(range(n_blocks), key=lambda i: dims[i])
        return BlockDecomposition(np.array([projs[i] for i in order]),
                                  tuple(dims[i] for i in order))
    raise DecompositionError("could not separate central spectrum after retries")


def _block_minimal_projections(alg: FiniteStarAlgebra, p: np.ndarray, d: int,
                               gram: np.ndarray, cfg: ToleranceConfig, rng) -> list[np.ndarray]:
    cols = orth(alg.lmat(p), cfg.rank_tol)
    if cols.shape[1] != d * d:
        raise DecompositionError("block ideal has unexpected dimension")
    tr = alg.trace_vector()
    for _ in range(_MAX_RETRIES):
        h = _random_self_adjoint(alg, cols.T, rng)
        lh_cols = alg.lmat(h) @ cols
        mrest = lstsq_min(cols, lh_cols)
        grest = cols.conj().T @ gram @ cols
        t, r, rinv = _hermitianized(mrest, grest)
        evals, evecs = np.linalg.eigh((t + t.conj().T) / 2)
        clusters = cluster_1d(evals, cfg.cluster_tol)
        if len(clusters) != d or any(len(c) != d for c in clusters):
            continue
        p_rest = lstsq_min(cols, p)
        qs = []
        ok = True
        for idx in clusters:
            q = cols @ (_spectral_projection(evecs, idx, r, rinv) @ p_rest)
            if np.abs(alg.mul(q, q) - q).max() > cfg.rank_tol:
                ok = False
                break
            if abs((tr @ q).real - d) > cfg.int_tol:
                ok = False
                break
            qs.append(q)
        if ok:
            return qs
    raise DecompositionError("could not split a block into minimal projections")


def matrix_units(alg: FiniteStarAlgebra, dec: BlockDecomposition,
                 cfg: ToleranceConfig) -> MatrixUnitSystem:
    gram = alg.trace_form()
    rng = np.random.default_rng([cfg.rng_seed, 0xE11E])
    tr = alg.trace_vector()
    out = []
    for p, d in zip(dec.central_projections, dec.block_dims):
        if d == 1:
            out.append(p.reshape(1, 1, -1).copy())
            continue
        qs = _block_minimal_projections(alg, p, d, gram, cfg, rng)
        cols = orth(alg.lmat(p), cfg.rank_tol)
        row0 = [qs[0]]
        for k in range(1, d):
            e0k = None
            for _ in range(_MAX_RETRIES):
                z = (rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)) @ cols.T
                v = alg.mul(alg.mul(qs[0], z), qs[k])
                tval = (tr @ alg.mul(alg.star(v), v)).real / d
                if tval > 1e-6:
                    e0k = v / np.sqrt(tval)
                    break
            if e0k is None:
                raise DecompositionError("degenerate partial isometry draw")
            row0.append(e0k)
        units = np.empty((d, d, alg.dim), dtype=complex)
        for k in range(d):
            for l in range(d):
                units[k, l] = alg.mul(alg.star(row0[k]), row0[l])
        out.append(units)
    return MatrixUnitSystem(tuple(out))


def verify_matrix_units(alg: FiniteStarAlgebra, dec: BlockDecomposition,
                        mus: MatrixUnitSystem, cfg: ToleranceConfig) -> Report:
    rep = Report(title="matrix-unit relations")
    tol = 100 * cfg.abs_tol
    total = np.zeros(alg.dim, dtype=complex)
    worst_rel = 0.0
    worst_star = 0.0
    for units in mus.units:
        d = units.shape[0]
        flat = units.reshape(d * d, -1)
        prods = alg.product_table(flat, flat)
        for k in range(d):
            for l in range(d):
                for p in range(d):
                    for q in range(d):
                        expect = units[k, q] if l == p else 0.0
                        r = np.abs(prods[k * d + l, p * d + q] - expect).max()
                        worst_rel = max(worst_rel, float(r))
        for k in range(d):
            for l in range(d):
                worst_star = max(worst_star, float(
                    np.abs(alg.star(units[k, l]) - units[l, k]).max()))
            total += units[k, k]
    rep.add("unit_relations", worst_rel, tol)
    rep.add("unit_star_symmetry", worst_star, tol)
    rep.add("diagonal_completeness", float(np.abs(total - alg.unit).max()), tol)
    return rep


# ---------------------------------------------------------------------------
# subalgebras

def subalgebra_from_basis(amb: FiniteStarAlgebra, rows: np.ndarray,
                          cfg: ToleranceConfig, name: str = "",
                          orthonormalize: bool = True,
                          unital: bool = True) -> SubalgebraEmbedding:
    rows = np.atleast_2d(np.asarray(rows, complex))
    cols = orth(rows.T, cfg.rank_tol) if orthonormalize else rows.T.copy()
    k = cols.shape[1]
    if orthonormalize and k != rows.shape[0]:
        raise DecompositionError("spanning rows are linearly dependent")
    prods = amb.product_table(cols.T, cols.T).reshape(k * k, amb.dim)
    coeff = lstsq_min(cols, prods.T)  # (k, k*k)
    closure = float(np.abs(cols @ coeff - prods.T).max(initial=0.0))
    if closure > 100 * cfg.rank_tol:
        raise DecompositionError(f"span is not multiplicatively closed ({closure:.2e})")
    m_sub = coeff.T.reshape(k, k, k)
    if unital:
        unit_sub = solve_in_span(cols, amb.unit, 100 * cfg.rank_tol)
    else:
        # corner subalgebra: its own unit solves u b = b = b u over the basis
        eye = np.eye(k)
        lhs = np.vstack([
            m_sub.transpose(1, 2, 0).reshape(k * k, k),
            m_sub.transpose(0, 2, 1).reshape(k * k, k),
        ])
        rhs = np.concatenate([eye.reshape(k * k), eye.reshape(k * k)]).astype(complex)
        unit_sub = lstsq_min(lhs, rhs)
        if float(np.abs(lhs @ unit_sub - rhs).max()) > 100 * cfg.rank_tol:
            raise DecompositionError("span has no two-sided unit")
    inv_sub = np.empty((k, k), dtype=complex)
    for a in range(k):
        inv_sub[a] = solve_in_span(cols, amb.star(cols[:, a]), 100 * cfg.rank_tol)
    sub = FiniteStarAlgebra(m_sub, unit_sub, inv_sub, name=name)
    return SubalgebraEmbedding(sub, amb, cols)


def generated_subalgebra(amb: FiniteStarAlgebra, seed_rows: np.ndarray,
                         cfg: ToleranceConfig, name: str = "") -> SubalgebraEmbedding:
    """Smallest unital *-subalgebra containing the given row span."""
    rows = np.atleast_2d(np.asarray(seed_rows, complex))
    rows = np.vstack([rows, amb.unit[None, :], (amb.invol.T @ rows.conj().T).T])
    span = orth(rows.T, cfg.rank_tol)
    while True:
        prods = amb.product_table(span.T, span.T).reshape(-1, amb.dim)
        new_span = orth(np.hstack([span, prods.T]), cfg.rank_tol)
        if new_span.shape[1] == span.shape[1]:
            return subalgebra_from_basis(amb, span.T, cfg, name=name)
        span = new_span


def inclusion_matrix(emb: SubalgebraEmbedding, cfg: ToleranceConfig,
                     sub_dec: BlockDecomposition | None = None,
                     amb_dec: BlockDecomposition | None = None,
                     sub_units: MatrixUnitSystem | None = None) -> InclusionMatrix:
    """Multiplicity matrix of a unital inclusion: entry (alpha, i) counts how
    often sub-block alpha appears in ambient block i (trace of an embedded
    minimal sub projection inside block i)."""
    if float(np.abs(emb.embed(emb.sub.unit) - emb.amb.unit).max()) > 100 * cfg.abs_tol:
        raise DecompositionError("inclusion is not unital")
    if sub_dec is None:
        sub_dec = block_decompose(emb.sub, cfg)
    if amb_dec is None:
        amb_dec = block_decompose(emb.amb, cfg)
    if sub_units is None:
        sub_units = matrix_units(emb.sub, sub_dec, cfg)
    tr = emb.amb.trace_vector()
    lam = np.empty((sub_dec.num_blocks, amb_dec.num_blocks), dtype=float)
    for a, units in enumerate(sub_units.units):
        q = emb.embed(units[0, 0])
        for i, (p, d) in enumerate(zip(amb_dec.central_projections, amb_dec.block_dims)):
            lam[a, i] = (tr @ emb.amb.mul(q, p)).real / d
    entries = round_int_array(lam, cfg.int_tol)
    # unital consistency: Lambda^T m = d
    m_vec = np.array(sub_dec.block_dims)
    d_vec = np.array(amb_dec.block_dims)
    if not np.array_equal(entries.T @ m_vec, d_vec):
        raise DecompositionError("inclusion matrix fails Lambda^T m = d")
    return InclusionMatrix(entries, sub_dec.block_dims, amb_dec.block_dims)


def perron_eigen(m: np.ndarray, cfg: ToleranceConfig,
                 max_iter: int = 10_000) -> tuple[float, np.ndarray, bool]:
    """Largest eigenvalue and positive eigenvector of an entrywise-nonnegative
    matrix by power iteration.  The vector is scaled so its smallest entry is
    1 when that is possible.  Third return: irreducibility of the matrix."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("perron_eigen expects a square matrix")
    if (a < -cfg.abs_tol).any():
        raise DimensionMismatch("perron_eigen expects nonnegative entries")
    k = a.shape[0]
    reach = np.linalg.matrix_power(np.eye(k) + (a > cfg.abs_tol), max(k - 1, 1))
    irreducible = bool((reach > 0).all())
    v = np.ones(k)
    lam = 0.0
    for _ in range(max_iter):
        w = a @ v
        nrm = np.abs(w).max()
        if nrm == 0:
            return 0.0, v, irreducible
        w = w / nrm
        if np.abs(w - v).max() < cfg.abs_tol:
            v = w
            break
        v = w
    av = a @ v
    lam = float((v @ av) / (v @ v))
    vmin = v.min()
    if vmin > cfg.rank_tol:
        v = v / vmin
    return lam, v, irreducible
