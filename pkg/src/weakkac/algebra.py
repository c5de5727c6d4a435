"""Finite-dimensional *-algebras as structure-constant tensors.

An algebra of dimension n is a tensor mult[i,j,k] with x_i x_j = sum_k
mult[i,j,k] x_k, a unit coordinate vector, and an involution matrix invol
whose row i holds the coordinates of x_i^*.  Elements and functionals are
plain complex coordinate vectors.

Map conventions used package-wide:
  * basis-image matrices are row-convention: M[i, :] = coords of image of x_i,
    so the action on a coordinate vector c is M.T @ c (antilinear maps use
    M.T @ conj(c));
  * a functional f evaluates as f @ c.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import DimensionMismatch, NotStarAlgebra, ToleranceConfig
from .linalg import herm_deviation, min_eig_hermitian, nullspace, rank
from .report import Report


def _tensor(a, shape, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(a, dtype=complex)
    if arr.shape != shape:
        raise DimensionMismatch(f"{what}: expected shape {shape}, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise DimensionMismatch(f"{what}: non-finite entries")
    return arr


@dataclass(frozen=True)
class FiniteStarAlgebra:
    mult: np.ndarray
    unit: np.ndarray
    invol: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        n = np.asarray(self.mult).shape[0]
        object.__setattr__(self, "mult", _tensor(self.mult, (n, n, n), "mult"))
        object.__setattr__(self, "unit", _tensor(self.unit, (n,), "unit"))
        object.__setattr__(self, "invol", _tensor(self.invol, (n, n), "invol"))

    @property
    def dim(self) -> int:
        return self.mult.shape[0]

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return kernels.multiply(self.mult, np.asarray(x, complex), np.asarray(y, complex))

    def star(self, x: np.ndarray) -> np.ndarray:
        return self.invol.T @ np.conj(np.asarray(x, complex))

    def lmat(self, x: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication y -> x y on coordinates."""
        return np.tensordot(np.asarray(x, complex), self.mult, axes=(0, 0)).T

    def rmat(self, y: np.ndarray) -> np.ndarray:
        """Matrix of right multiplication x -> x y on coordinates."""
        return np.tensordot(self.mult, np.asarray(y, complex), axes=(1, 0)).transpose()

    def basis(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def product_table(self, rows_b: np.ndarray, rows_c: np.ndarray) -> np.ndarray:
        return kernels.product_table(self.mult, np.asarray(rows_b, complex),
                                     np.asarray(rows_c, complex))

    def trace_vector(self) -> np.ndarray:
        """Coordinates of the left-regular trace functional Tr(L_x)."""
        return np.einsum("kjj->k", self.mult)

    def trace_form(self) -> np.ndarray:
        """Gram matrix G[a,b] = Tr(L_{x_a^* x_b}); positive definite iff C*."""
        tr = self.trace_vector()
        prods = self.product_table(self.invol, self.basis())
        return prods @ tr


def verify_star_algebra(alg: FiniteStarAlgebra, cfg: ToleranceConfig) -> Report:
    """All finitely-checkable axioms: associativity, unit, involution laws,
    and positive definiteness of the regular trace form (the C* condition)."""
    rep = Report(title=f"star-algebra checks ({alg.name or 'unnamed'}, dim {alg.dim})")
    n = alg.dim
    m, u, j = alg.mult, alg.unit, alg.invol
    tol = cfg.abs_tol * max(1.0, float(np.abs(m).max()))

    rep.add("associativity", kernels.assoc_residual(m), tol)
    rep.add("unit_left", np.abs(np.tensordot(u, m, axes=(0, 0)) - np.eye(n)).max(), tol)
    rep.add("unit_right", np.abs(np.tensordot(u, m, axes=(0, 1)) - np.eye(n)).max(), tol)

    rep.add("invol_involutive", np.abs(np.conj(j) @ j - np.eye(n)).max(), tol)
    rep.add("invol_unit", np.abs(alg.star(u) - u).max(), tol)
    lhs = np.einsum("ijl,lk->ijk", np.conj(m), j)
    rhs = np.einsum("jp,iq,pqk->ijk", j, j, m, optimize=True)
    rep.add("invol_antimultiplicative", np.abs(lhs - rhs).max(), tol)

    g = alg.trace_form()
    rep.add("trace_form_hermitian", herm_deviation(g), 100 * tol)
    mineig = min_eig_hermitian(g)
    rep.values["trace_form_min_eig"] = mineig
    rep.add_flag("trace_form_positive_definite", mineig > cfg.rank_tol)
    return rep


def require_star_algebra(alg: FiniteStarAlgebra, cfg: ToleranceConfig) -> None:
    verify_star_algebra(alg, cfg).require(NotStarAlgebra, alg.name or "algebra")


def star_homomorphism_report(src: FiniteStarAlgebra, dst: FiniteStarAlgebra,
                             cols: np.ndarray, cfg: ToleranceConfig,
                             unital: bool = True) -> Report:
    """Checks that the linear map whose columns are the images of the source
    basis is a *-homomorphism; injectivity is reported as a flag."""
    cols = np.asarray(cols, complex)
    if cols.shape != (dst.dim, src.dim):
        raise DimensionMismatch(
            f"map shape {cols.shape}, expected {(dst.dim, src.dim)}")
    rep = Report(title=f"star homomorphism {src.name or 'src'} -> {dst.name or 'dst'}")
    tol = 100 * cfg.abs_tol

    want = np.tensordot(src.mult, cols, axes=(2, 1))  # (i, j, dst coords)
    got = dst.product_table(cols.T, cols.T)
    rep.add("multiplicative", float(np.abs(got - want).max()), tol)
    if unital:
        rep.add("unital", float(np.abs(cols @ src.unit - dst.unit).max()), tol)
    star_then_map = cols @ src.invol.T
    map_then_star = dst.invol.T @ np.conj(cols)
    rep.add("star_preserving", float(np.abs(star_then_map - map_then_star).max()), tol)
    rep.add_flag("injective", rank(cols, cfg.rank_tol) == src.dim)
    return rep


def star_isomorphism_check(src: FiniteStarAlgebra, dst: FiniteStarAlgebra,
                           cols: np.ndarray, cfg: ToleranceConfig) -> Report:
    """Homomorphism checks plus bijectivity."""
    rep = star_homomorphism_report(src, dst, cols, cfg)
    rep.add_flag("bijective",
                 src.dim == dst.dim and rank(np.asarray(cols, complex),
                                             cfg.rank_tol) == src.dim)
    return rep


def regular_trace(alg: FiniteStarAlgebra) -> np.ndarray:
    return alg.trace_vector()


def normalized_trace(alg: FiniteStarAlgebra) -> np.ndarray:
    tr = alg.trace_vector()
    return tr / (tr @ alg.unit)


def commutant(alg: FiniteStarAlgebra, rows_s: np.ndarray, cfg: ToleranceConfig) -> np.ndarray:
    """Rows spanning {x : x s = s x for every s in the given row-span}."""
    rows_s = np.atleast_2d(np.asarray(rows_s, complex))
    blocks = [alg.lmat(s) - alg.rmat(s) for s in rows_s]
    stacked = np.vstack(blocks) if blocks else np.zeros((0, alg.dim))
    return nullspace(stacked, cfg.rank_tol).T


def center(alg: FiniteStarAlgebra, cfg: ToleranceConfig) -> np.ndarray:
    return commutant(alg, alg.basis(), cfg)


def matrix_algebra(d: int) -> FiniteStarAlgebra:
    """M_d(C) on the matrix-unit basis e_(kl), index (k,l) flattened C-order."""
    n = d * d
    m = np.zeros((n, n, n), dtype=complex)
    for k in range(d):
        for l in range(d):
            for p in range(d):
                for q in range(d):
                    if l == p:
                        m[k * d + l, p * d + q, k * d + q] = 1.0
    unit = np.zeros(n, dtype=complex)
    for k in range(d):
        unit[k * d + k] = 1.0
    inv = np.zeros((n, n), dtype=complex)
    for k in range(d):
        for l in range(d):
            inv[k * d + l, l * d + k] = 1.0
    return FiniteStarAlgebra(m, unit, inv, name=f"M{d}")


def direct_sum_algebra(a: FiniteStarAlgebra, b: FiniteStarAlgebra,
                       name: str = "") -> FiniteStarAlgebra:
    na, nb = a.dim, b.dim
    n = na + nb
    m = np.zeros((n, n, n), dtype=complex)
    m[:na, :na, :na] = a.mult
    m[na:, na:, na:] = b.mult
    unit = np.concatenate([a.unit, b.unit])
    inv = np.zeros((n, n), dtype=complex)
    inv[:na, :na] = a.invol
    inv[na:, na:] = b.invol
    return FiniteStarAlgebra(m, unit, inv, name=name or f"{a.name}(+){b.name}")


# ---------------------------------------------------------------------------
# tensor-square helpers (elements of A (x) A as n x n coefficient matrices)

def tensor_square_mul(alg: FiniteStarAlgebra, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    m = alg.mult
    return np.einsum("ab,cd,ack,bdl->kl", u, v, m, m, optimize=True)


def tensor_square_star(alg: FiniteStarAlgebra, u: np.ndarray) -> np.ndarray:
    j = alg.invol
    return np.einsum("ab,ac,bd->cd", np.conj(u), j, j, optimize=True)


def tensor_product_algebra(a: FiniteStarAlgebra, b: FiniteStarAlgebra,
                           name: str = "") -> FiniteStarAlgebra:
    """A (x) B with basis index (i, j) flattened C-order."""
    m = np.einsum("ipr,jqs->ijpqrs", a.mult, b.mult).reshape(
        a.dim * b.dim, a.dim * b.dim, a.dim * b.dim)
    unit = np.kron(a.unit, b.unit)
    inv = np.einsum("ip,jq->ijpq", a.invol, b.invol).reshape(
        a.dim * b.dim, a.dim * b.dim)
    return FiniteStarAlgebra(m, unit, inv, name=name or f"{a.name}(x){b.name}")
