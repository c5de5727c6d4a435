"""Conditional expectations, quasi-bases and the basic construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteStarAlgebra
from .config import DecompositionError, SolveError, ToleranceConfig
from .linalg import min_eig_hermitian, rank
from .report import Report
from .wedderburn import SubalgebraEmbedding


@dataclass(frozen=True)
class ConditionalExpectation:
    emb: SubalgebraEmbedding
    matrix: np.ndarray  # (dim_sub, dim_amb): ambient coords -> sub coords

    def apply(self, x_amb: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x_amb, complex)

    def on_ambient(self) -> np.ndarray:
        """The idempotent amb -> amb given by embedding the expectation."""
        return self.emb.matrix @ self.matrix


def trace_conditional_expectation(emb: SubalgebraEmbedding, trace: np.ndarray,
                                  cfg: ToleranceConfig) -> ConditionalExpectation:
    """Orthogonal projection onto the subalgebra w.r.t. the faithful trace
    inner product <x, y> = trace(x^* y); this is the unique trace-preserving
    conditional expectation."""
    amb = emb.amb
    trace = np.asarray(trace, complex)
    b = emb.matrix
    star_cols = amb.invol.T @ np.conj(b)  # columns: images of (sub basis)^*
    # gram[a, c] = trace((b_a)^* b_c)
    prods = amb.product_table(star_cols.T, b.T)
    gram = prods @ trace
    if min_eig_hermitian(gram) <= cfg.rank_tol:
        raise DecompositionError("trace is not faithful on the subalgebra")
    rhs = amb.product_table(star_cols.T, np.eye(amb.dim, dtype=complex)) @ trace
    mat = np.linalg.solve(gram, rhs)
    return ConditionalExpectation(emb, mat)


def verify_conditional_expectation(e: ConditionalExpectation, trace: np.ndarray | None,
                                   cfg: ToleranceConfig) -> Report:
    """Bimodule property, idempotence onto the subalgebra, *-compatibility,
    faithfulness; trace preservation when a trace is supplied."""
    rep = Report(title="conditional expectation checks")
    amb, sub = e.emb.amb, e.emb.sub
    tol = 100 * cfg.abs_tol
    proj = e.emb.matrix @ e.matrix

    rep.add("restricts_to_identity",
            np.abs(e.matrix @ e.emb.matrix - np.eye(sub.dim)).max(), tol)
    worst = 0.0
    basis_amb = np.eye(amb.dim, dtype=complex)
    sub_cols = e.emb.matrix
    for a in range(sub.dim):
        la = amb.lmat(sub_cols[:, a])
        ra = amb.rmat(sub_cols[:, a])
        worst = max(worst, float(np.abs(proj @ la - la @ proj).max()),
                    float(np.abs(proj @ ra - ra @ proj).max()))
    rep.add("bimodule_property", worst, tol)

    star_then = np.array([e.apply(amb.star(basis_amb[i])) for i in range(amb.dim)])
    then_star = np.array([sub.star(e.apply(basis_amb[i])) for i in range(amb.dim)])
    rep.add("star_compatibility", np.abs(star_then - then_star).max(), tol)

    # faithfulness: sub-valued form traced against the regular trace of sub
    tr_sub = sub.trace_vector()
    star_basis = amb.invol  # rows: coords of basis stars
    gram = np.empty((amb.dim, amb.dim), dtype=complex)
    prods = amb.product_table(star_basis, basis_amb)
    for i in range(amb.dim):
        for k in range(amb.dim):
            gram[i, k] = tr_sub @ e.apply(prods[i, k])
    rep.add("faithful_gram_hermitian",
            np.abs(gram - gram.conj().T).max(), tol)
    rep.add_flag("faithful", min_eig_hermitian(gram) > cfg.rank_tol)

    if trace is not None:
        tr = np.asarray(trace, complex)
        rep.add("trace_preserving", np.abs(proj.T @ tr - tr).max(), tol)
    return rep


@dataclass(frozen=True)
class QuasiBasisReport:
    report: Report
    index_element: np.ndarray
    is_basis: bool


def verify_quasi_basis(e: ConditionalExpectation, u_rows: np.ndarray,
                       cfg: ToleranceConfig) -> QuasiBasisReport:
    """Check sum_i u_i E(u_i^* b) = b for all b, centrality of the index
    element, and whether the family is a true basis (unique coefficients)."""
    amb = e.emb.amb
    u_rows = np.atleast_2d(np.asarray(u_rows, complex))
    k = u_rows.shape[0]
    rep = Report(title="quasi-basis checks")
    tol = 100 * cfg.abs_tol
    proj = e.emb.matrix @ e.matrix
    star_rows = np.array([amb.star(u) for u in u_rows])

    worst = 0.0
    for b in np.eye(amb.dim, dtype=complex):
        acc = np.zeros(amb.dim, dtype=complex)
        for i in range(k):
            acc += amb.mul(u_rows[i], proj @ amb.mul(star_rows[i], b))
        worst = max(worst, float(np.abs(acc - b).max()))
    rep.add("reconstruction", worst, tol)

    index_el = np.zeros(amb.dim, dtype=complex)
    for i in range(k):
        index_el += amb.mul(u_rows[i], star_rows[i])
    central = max(float(np.abs(amb.mul(index_el, b) - amb.mul(b, index_el)).max())
                  for b in np.eye(amb.dim, dtype=complex))
    rep.add("index_central", central, tol)

    # basis property: (a_1..a_k) -> sum u_i emb(a_i) injective; informational,
    # a quasi-basis need not be a module basis
    sub_dim = e.emb.sub.dim
    bl = np.hstack([amb.lmat(u_rows[i]) @ e.emb.matrix for i in range(k)])
    is_basis = rank(bl, cfg.rank_tol) == k * sub_dim
    rep.values["index_element"] = index_el
    rep.values["is_basis"] = is_basis
    return QuasiBasisReport(rep, index_el, is_basis)


@dataclass(frozen=True)
class BasicConstructionAlgebra:
    algebra: FiniteStarAlgebra      # M_k(sub) on basis (i, j, sub-basis)
    jones: np.ndarray               # coords of the Jones projection
    include_amb: np.ndarray         # (dim_out, dim_amb): b -> matrix of right mult coeffs
    include_sub: np.ndarray         # (dim_out, dim_sub)
    basis_rows: np.ndarray


def matrix_over_algebra(sub: FiniteStarAlgebra, k: int) -> FiniteStarAlgebra:
    """M_k(A) with basis (i, j, a) flattened C-order; star is conjugate
    transpose with entrywise involution."""
    ns = sub.dim
    n = k * k * ns
    m = np.zeros((n, n, n), dtype=complex)
    for i in range(k):
        for j in range(k):
            for l in range(k):
                for p in range(k):
                    if j != l:
                        continue
                    blk_in1 = (i * k + j) * ns
                    blk_in2 = (l * k + p) * ns
                    blk_out = (i * k + p) * ns
                    m[blk_in1:blk_in1 + ns, blk_in2:blk_in2 + ns,
                      blk_out:blk_out + ns] = sub.mult
    unit = np.zeros(n, dtype=complex)
    for i in range(k):
        unit[(i * k + i) * ns:(i * k + i + 1) * ns] = sub.unit
    inv = np.zeros((n, n), dtype=complex)
    for i in range(k):
        for j in range(k):
            inv[(i * k + j) * ns:(i * k + j + 1) * ns,
                (j * k + i) * ns:(j * k + i + 1) * ns] = sub.invol
    return FiniteStarAlgebra(m, unit, inv, name=f"M{k}({sub.name or 'A'})")


def basic_construction(e: ConditionalExpectation, u_rows: np.ndarray,
                       cfg: ToleranceConfig) -> BasicConstructionAlgebra:
    """Jones extension of amb along E, realized as k x k matrices over the
    subalgebra via the free right-module basis u_i.  Validates the
    characterizing properties of the extension projection."""
    qb = verify_quasi_basis(e, u_rows, cfg)
    if not qb.report.ok or not qb.is_basis:
        qb.report.require(DecompositionError, "basic construction needs a basis")
        raise DecompositionError("family is a quasi-basis but not a basis")
    amb, sub = e.emb.amb, e.emb.sub
    u_rows = np.atleast_2d(np.asarray(u_rows, complex))
    k = u_rows.shape[0]
    ns = sub.dim
    star_rows = np.array([amb.star(u) for u in u_rows])
    out = matrix_over_algebra(sub, k)

    # a true basis is automatically orthonormal: E(u_i^* u_j) = delta_ij
    onb = max(float(np.abs(e.apply(amb.mul(star_rows[i], u_rows[j]))
                           - (1.0 if i == j else 0.0) * sub.unit).max())
              for i in range(k) for j in range(k))
    if onb > 100 * cfg.abs_tol:
        raise DecompositionError("basis is not E-orthonormal; coefficients not unique")

    include_amb = np.zeros((out.dim, amb.dim), dtype=complex)
    for b_idx in range(amb.dim):
        b = np.zeros(amb.dim, dtype=complex)
        b[b_idx] = 1.0
        for i in range(k):
            for j in range(k):
                val = e.apply(amb.mul(star_rows[i], amb.mul(b, u_rows[j])))
                include_amb[(i * k + j) * ns:(i * k + j + 1) * ns, b_idx] = val

    include_sub = include_amb @ e.emb.matrix

    jones = np.zeros(out.dim, dtype=complex)
    eu = [e.apply(u_rows[i]) for i in range(k)]
    eus = [e.apply(star_rows[i]) for i in range(k)]
    for i in range(k):
        for j in range(k):
            jones[(i * k + j) * ns:(i * k + j + 1) * ns] = sub.mul(eus[i], eu[j])
    return BasicConstructionAlgebra(out, jones, include_amb, include_sub, u_rows.copy())


def verify_basic_construction(bc: BasicConstructionAlgebra, e: ConditionalExpectation,
                              cfg: ToleranceConfig) -> Report:
    """Characterization: e_A is a projection with e_A b e_A = E(b) e_A,
    a -> a e_A injective on the subalgebra, the embedding of amb is a unital
    *-homomorphism, and amb together with e_A generates everything."""
    rep = Report(title="basic construction checks")
    out, amb = bc.algebra, e.emb.amb
    tol = 100 * cfg.abs_tol
    j = bc.jones
    rep.add("jones_idempotent", np.abs(out.mul(j, j) - j).max(), tol)
    rep.add("jones_selfadjoint", np.abs(out.star(j) - j).max(), tol)

    worst_hom = 0.0
    basis = np.eye(amb.dim, dtype=complex)
    imgs = bc.include_amb
    prods_amb = amb.product_table(basis, basis)
    for i in range(amb.dim):
        for l in range(amb.dim):
            lhs = out.mul(imgs[:, i], imgs[:, l])
            rhs = imgs @ prods_amb[i, l]
            worst_hom = max(worst_hom, float(np.abs(lhs - rhs).max()))
    rep.add("amb_embedding_multiplicative", worst_hom, tol)
    rep.add("amb_embedding_unital", np.abs(imgs @ amb.unit - out.unit).max(), tol)
    star_resid = max(float(np.abs(out.star(imgs[:, i]) - imgs @ amb.star(basis[i])).max())
                     for i in range(amb.dim))
    rep.add("amb_embedding_star", star_resid, tol)
    rep.add_flag("amb_embedding_injective",
                 rank(imgs, cfg.rank_tol) == amb.dim)

    worst_exe = 0.0
    eproj = e.on_ambient()
    for i in range(amb.dim):
        lhs = out.mul(j, out.mul(imgs[:, i], j))
        rhs = out.mul(imgs @ (eproj @ basis[i]), j)
        worst_exe = max(worst_exe, float(np.abs(lhs - rhs).max()))
    rep.add("jones_compression", worst_exe, tol)

    sub_cols = bc.include_sub
    cols = np.array([out.mul(sub_cols[:, a], j) for a in range(sub_cols.shape[1])]).T
    rep.add_flag("sub_times_jones_injective",
                 rank(cols, cfg.rank_tol) == sub_cols.shape[1])

    # generation: span of b1 e_A b2
    left = [out.mul(imgs[:, i], j) for i in range(amb.dim)]
    gens = out.product_table(np.array(left), imgs.T).reshape(-1, out.dim)
    rep.add_flag("generated_by_amb_and_jones",
                 rank(gens.T, cfg.rank_tol) == out.dim)
    return rep
