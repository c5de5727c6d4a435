"""Weak Kac algebras: axiom checks, Haar data, duals, and connectivity.

Builds on the star-algebra layer. Next to the multiplication tensor, a
weak Kac algebra carries a comultiplication stored as D[k, a, b] (the
coefficient of x_a (x) x_b in the coproduct of x_k), a counit vector, and
an antipode matrix in the row convention of the algebra module. Elements
of the tensor square appear as n-by-n coefficient matrices throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .algebra import (
    FiniteStarAlgebra,
    _tensor,
    center,
    tensor_square_mul,
    tensor_square_star,
    verify_star_algebra,
)
from .config import (
    DecompositionError,
    NotWeakKac,
    ToleranceConfig,
    WkaError,
)
from .expectations import (
    ConditionalExpectation,
    trace_conditional_expectation,
    verify_conditional_expectation,
)
from .report import Report
from .wedderburn import (
    BlockDecomposition,
    MatrixUnitSystem,
    SubalgebraEmbedding,
    block_decompose,
    matrix_units,
    subalgebra_from_basis,
)

POSITIVITY_SAMPLES = 50


@dataclass(frozen=True)
class WeakKacAlgebra:
    """Finite dimensional C*-algebra with comultiplication, counit, antipode."""

    alg: FiniteStarAlgebra
    comult: np.ndarray
    counit: np.ndarray
    antipode: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        n = self.alg.dim
        object.__setattr__(self, "comult", _tensor(self.comult, (n, n, n), "comult"))
        object.__setattr__(self, "counit", _tensor(self.counit, (n,), "counit"))
        object.__setattr__(self, "antipode", _tensor(self.antipode, (n, n), "antipode"))

    @property
    def dim(self) -> int:
        return self.alg.dim

    def comultiply(self, x: np.ndarray) -> np.ndarray:
        """Coefficient matrix of the coproduct of an element."""
        return np.tensordot(np.asarray(x, complex), self.comult, axes=([0], [0]))

    def delta_unit(self) -> np.ndarray:
        return self.comultiply(self.alg.unit)

    def eps(self, x: np.ndarray) -> complex:
        return complex(self.counit @ np.asarray(x, complex))

    def s_apply(self, x: np.ndarray) -> np.ndarray:
        return self.antipode.T @ np.asarray(x, complex)


@dataclass(frozen=True)
class CounitalData:
    """Row-convention matrices of the source and target counital maps."""

    source_mat: np.ndarray
    target_mat: np.ndarray
    report: Report


@dataclass(frozen=True)
class CartanPair:
    """The two counital subalgebras with their block data and matrix units."""

    source: SubalgebraEmbedding
    target: SubalgebraEmbedding
    source_blocks: BlockDecomposition
    target_blocks: BlockDecomposition
    source_units: MatrixUnitSystem
    target_units: MatrixUnitSystem
    report: Report

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return self.source_blocks.block_dims


@dataclass(frozen=True)
class HaarData:
    projection: np.ndarray
    trace: np.ndarray
    report: Report
    lambda_candidate: complex | None = None


@dataclass(frozen=True)
class CounitalExpectations:
    source: ConditionalExpectation
    target: ConditionalExpectation
    report: Report


def counital_matrices(wka: WeakKacAlgebra) -> tuple[np.ndarray, np.ndarray]:
    """Source and target counital maps evaluated on the basis, as rows."""
    m, d, eps = wka.alg.mult, wka.comult, wka.counit
    w = wka.delta_unit()
    source = np.einsum("ab,ibk,k->ia", w, m, eps, optimize=True)
    target = np.einsum("cb,cia,a->ib", w, m, eps, optimize=True)
    return source, target


def verify_wka(wka: WeakKacAlgebra, cfg: ToleranceConfig) -> Report:
    """Residuals of every defining identity, star-algebra layer included."""
    rep = Report(title=f"weak Kac axioms: {wka.name or 'unnamed'}")
    rep.extend(verify_star_algebra(wka.alg, cfg), prefix="algebra.")
    alg = wka.alg
    n = alg.dim
    m, d = alg.mult, wka.comult
    eps, s, j = wka.counit, wka.antipode, alg.invol
    tol = cfg.abs_tol
    eye = np.eye(n)

    res = 0.0
    for k in range(n):
        left = np.einsum("pc,pab->abc", d[k], d, optimize=True)
        right = np.einsum("aq,qbc->abc", d[k], d, optimize=True)
        res = max(res, float(np.abs(left - right).max()))
    rep.add("coassociativity", res, tol)

    rep.add("counit_left", float(np.abs(np.einsum("kab,a->kb", d, eps) - eye).max()), tol)
    rep.add("counit_right", float(np.abs(np.einsum("kab,b->ka", d, eps) - eye).max()), tol)

    res = 0.0
    for i in range(n):
        lhs = np.tensordot(m[i], d, axes=([1], [0]))
        t = np.tensordot(d[i], m, axes=([0], [0]))
        rhs = np.einsum("pya,jyq,pqb->jab", t, d, m, optimize=True)
        res = max(res, float(np.abs(lhs - rhs).max()))
    rep.add("comult_multiplicative", res, tol)

    lhs = np.einsum("kl,lab->kab", j, d)
    rhs = np.einsum("kpq,pa,qb->kab", np.conj(d), j, j, optimize=True)
    rep.add("comult_star", float(np.abs(lhs - rhs).max()), tol)

    source, target = counital_matrices(wka)
    w = wka.delta_unit()

    lhs = np.einsum("ia,ajc->ijc", source, m)
    rhs = np.einsum("jab,ibk,k->ija", d, m, eps, optimize=True)
    rep.add("source_map_product_rule", float(np.abs(lhs - rhs).max()), tol)

    lhs = np.einsum("jb,ibc->ijc", target, m)
    rhs = np.einsum("icb,cja,a->ijb", d, m, eps, optimize=True)
    rep.add("target_map_product_rule", float(np.abs(lhs - rhs).max()), tol)

    lhs = np.einsum("kcb,ca->kab", d, source)
    rhs = np.einsum("ac,kcb->kab", w, m)
    rep.add("source_map_splits_comult", float(np.abs(lhs - rhs).max()), tol)

    lhs = np.einsum("kac,cb->kab", d, target)
    rhs = np.einsum("cb,cka->kab", w, m)
    rep.add("target_map_splits_comult", float(np.abs(lhs - rhs).max()), tol)

    lhs = np.einsum("kab,ap,pbc->kc", d, s, m, optimize=True)
    rep.add("antipode_yields_source_map", float(np.abs(lhs - source).max()), tol)

    lhs = np.einsum("kab,bq,aqc->kc", d, s, m, optimize=True)
    rep.add("antipode_yields_target_map", float(np.abs(lhs - target).max()), tol)

    rep.add("antipode_involutive", float(np.abs(s @ s - eye).max()), tol)

    lhs = np.einsum("ijk,kc->ijc", m, s)
    rhs = np.einsum("jp,iq,pqc->ijc", s, s, m, optimize=True)
    rep.add("antipode_antimultiplicative", float(np.abs(lhs - rhs).max()), tol)

    lhs = np.einsum("kl,lab->kab", s, d)
    rhs = np.einsum("kpq,qa,pb->kab", d, s, s, optimize=True)
    rep.add("antipode_anticomultiplicative", float(np.abs(lhs - rhs).max()), tol)

    rep.add("antipode_star_commute", float(np.abs(np.conj(s) @ j - j @ s).max()), tol)
    rep.add("counit_hermitian", float(np.abs(j @ eps - np.conj(eps)).max()), tol)

    rng = np.random.default_rng(cfg.rng_seed)
    worst = 0.0
    for _ in range(POSITIVITY_SAMPLES):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        val = wka.eps(alg.mul(alg.star(v), v))
        worst = max(worst, -val.real, abs(val.imag))
    rep.add("counit_positive_sample", max(worst, 0.0), cfg.cluster_tol)

    gram = alg.product_table(alg.invol, np.eye(n, dtype=complex)) @ eps
    rep.add("counit_gram_hermitian", linalg.herm_deviation(gram), cfg.cluster_tol)
    rep.add("counit_positive", max(0.0, -linalg.min_eig_hermitian(gram)), cfg.cluster_tol)
    return rep


def counital_maps(wka: WeakKacAlgebra, cfg: ToleranceConfig) -> CounitalData:
    source, target = counital_matrices(wka)
    s = wka.antipode
    rep = Report(title="counital maps")
    rep.add("source_idempotent", float(np.abs(source @ source - source).max()), cfg.cluster_tol)
    rep.add("target_idempotent", float(np.abs(target @ target - target).max()), cfg.cluster_tol)
    # row-convention composites: S after eps_s is source @ s, eps_t after S is s @ target
    rep.add("antipode_intertwines", float(np.abs(source @ s - s @ target).max()), cfg.cluster_tol)
    return CounitalData(source_mat=source, target_mat=target, report=rep)


def _fixed_rows(mat: np.ndarray, tol: float) -> np.ndarray:
    """Row basis of the fixed-point space of a row-convention map."""
    n = mat.shape[0]
    return linalg.nullspace(mat.T - np.eye(n), tol).T


def cartan_subalgebras(wka: WeakKacAlgebra, counital: CounitalData,
                       cfg: ToleranceConfig) -> CartanPair:
    """Counital subalgebras as embedded *-algebras with matrix units."""
    alg = wka.alg
    rep = Report(title="Cartan subalgebras")
    built = {}
    for label, mat in (("source", counital.source_mat), ("target", counital.target_mat)):
        fixed = _fixed_rows(mat, cfg.rank_tol)
        image = linalg.orth(mat.T, cfg.rank_tol).T
        agree = (linalg.subspace_leq(fixed.T, image.T, cfg.rank_tol)
                 and linalg.subspace_leq(image.T, fixed.T, cfg.rank_tol))
        rep.add_flag(f"{label}_fixed_points_equal_image", agree)
        emb = subalgebra_from_basis(alg, fixed, cfg, name=f"{wka.name}.{label}")
        blocks = block_decompose(emb.sub, cfg)
        units = matrix_units(emb.sub, blocks, cfg)
        built[label] = (emb, blocks, units)

    (s_emb, s_blocks, s_units) = built["source"]
    (t_emb, t_blocks, t_units) = built["target"]
    rep.add_flag("cartan_dims_match", s_emb.sub.dim == t_emb.sub.dim)
    rep.add_flag("cartan_block_dims_match", s_blocks.block_dims == t_blocks.block_dims)

    ks_rows, kt_rows = s_emb.matrix.T, t_emb.matrix.T
    forward = alg.product_table(ks_rows, kt_rows)
    backward = alg.product_table(kt_rows, ks_rows)
    rep.add("cartan_commute",
            float(np.abs(forward - backward.transpose(1, 0, 2)).max()), cfg.cluster_tol)

    s_image = ks_rows @ wka.antipode
    swap_ok = (linalg.subspace_leq(s_image.T, kt_rows.T, cfg.rank_tol)
               and linalg.subspace_leq(kt_rows.T, s_image.T, cfg.rank_tol))
    rep.add_flag("antipode_swaps_cartan", swap_ok)

    # images g_rs = S(f_sr) must again satisfy the matrix-unit relations
    transported = []
    for blk in s_units.units:
        dblk = blk.shape[0]
        amb = np.array([[s_emb.embed(blk[r, t]) for t in range(dblk)]
                        for r in range(dblk)])
        g = np.array([[wka.s_apply(amb[t, r]) for t in range(dblk)]
                      for r in range(dblk)])
        transported.append(g)
    worst = 0.0
    membership = 0.0
    total = np.zeros(alg.dim, dtype=complex)
    for bi, gb in enumerate(transported):
        db = gb.shape[0]
        for r in range(db):
            total += gb[r, r]
            for t in range(db):
                worst = max(worst, float(np.abs(alg.star(gb[r, t]) - gb[t, r]).max()))
                membership = max(membership,
                                 linalg.span_residual(t_emb.matrix, gb[r, t]))
        for bj, hb in enumerate(transported):
            dh = hb.shape[0]
            for r in range(db):
                for t in range(db):
                    for p in range(dh):
                        for q in range(dh):
                            prod = alg.mul(gb[r, t], hb[p, q])
                            if bi == bj and t == p:
                                prod = prod - gb[r, q]
                            worst = max(worst, float(np.abs(prod).max()))
    rep.add("transported_units_relations", worst, cfg.cluster_tol)
    rep.add("transported_units_complete", float(np.abs(total - alg.unit).max()), cfg.cluster_tol)
    rep.add("transported_units_in_target", membership, cfg.cluster_tol)

    return CartanPair(source=s_emb, target=t_emb,
                      source_blocks=s_blocks, target_blocks=t_blocks,
                      source_units=s_units, target_units=t_units, report=rep)


def haar_projection(wka: WeakKacAlgebra, counital: CounitalData,
                    cfg: ToleranceConfig) -> tuple[np.ndarray, Report]:
    """Solve the defining linear system; uniqueness is part of the report."""
    alg = wka.alg
    n = alg.dim
    m = alg.mult
    source, target = counital.source_mat, counital.target_mat

    right = np.transpose(m, (1, 2, 0)) - np.einsum("ib,abc->ica", source, m)
    left = np.transpose(m, (0, 2, 1)) - np.einsum("ia,abc->icb", target, m)
    rows = np.vstack([
        right.reshape(n * n, n),
        left.reshape(n * n, n),
        source.T,
        target.T,
    ])
    rhs = np.concatenate([
        np.zeros(2 * n * n, dtype=complex), alg.unit, alg.unit,
    ])
    p = linalg.lstsq_min(rows, rhs)

    rep = Report(title="Haar projection")
    rep.add("defining_system", float(np.abs(rows @ p - rhs).max()), cfg.cluster_tol)
    rep.add_flag("unique", linalg.nullspace(rows, cfg.rank_tol).shape[1] == 0)
    rep.add("idempotent", float(np.abs(alg.mul(p, p) - p).max()), cfg.cluster_tol)
    rep.add("self_adjoint", float(np.abs(alg.star(p) - p).max()), cfg.cluster_tol)
    rep.add("antipode_invariant", float(np.abs(wka.s_apply(p) - p).max()), cfg.cluster_tol)
    wp = wka.comultiply(p)
    rep.add("coproduct_cocommutative", float(np.abs(wp - wp.T).max()), cfg.cluster_tol)
    return p, rep


def haar_trace(wka: WeakKacAlgebra, counital: CounitalData,
               cfg: ToleranceConfig) -> tuple[np.ndarray, Report]:
    alg = wka.alg
    n = alg.dim
    m, d = alg.mult, wka.comult
    source, target = counital.source_mat, counital.target_mat

    tracial = (m - np.transpose(m, (1, 0, 2))).reshape(n * n, n)
    first = np.transpose(d, (0, 2, 1)) - np.einsum("kap,pc->kca", d, source)
    second = d - np.einsum("kab,ac->kcb", d, target)
    rows = np.vstack([
        tracial,
        first.reshape(n * n, n),
        second.reshape(n * n, n),
        source,
        target,
    ])
    rhs = np.concatenate([
        np.zeros(3 * n * n, dtype=complex), wka.counit, wka.counit,
    ])
    tau = linalg.lstsq_min(rows, rhs)

    rep = Report(title="Haar trace")
    rep.add("defining_system", float(np.abs(rows @ tau - rhs).max()), cfg.cluster_tol)
    rep.add_flag("unique", linalg.nullspace(rows, cfg.rank_tol).shape[1] == 0)
    gram = alg.product_table(alg.invol, np.eye(n, dtype=complex)) @ tau
    rep.add("gram_hermitian", linalg.herm_deviation(gram), cfg.cluster_tol)
    low = linalg.min_eig_hermitian(gram)
    rep.add_flag("faithful", low > cfg.rank_tol)
    rep.values["gram_min_eigenvalue"] = low
    rep.add("antipode_invariant", float(np.abs(wka.antipode @ tau - tau).max()), cfg.cluster_tol)
    rep.values["trace_of_unit"] = complex(tau @ alg.unit)
    return tau, rep


def haar_data(wka: WeakKacAlgebra, counital: CounitalData,
              cfg: ToleranceConfig) -> HaarData:
    p, prep = haar_projection(wka, counital, cfg)
    tau, trep = haar_trace(wka, counital, cfg)
    rep = Report(title="Haar data")
    rep.extend(prep, prefix="projection.")
    rep.extend(trep, prefix="trace.")
    rep.values["trace_of_projection"] = complex(tau @ p)
    return HaarData(projection=p, trace=tau, report=rep)


def counital_expectations(wka: WeakKacAlgebra, cartan: CartanPair,
                          haar: HaarData, cfg: ToleranceConfig) -> CounitalExpectations:
    """Trace-sided slices of the coproduct, checked against the trace projection."""
    alg = wka.alg
    d, tau = wka.comult, haar.trace
    amb_source = np.einsum("kac,a->ck", d, tau)
    amb_target = np.einsum("kcb,b->ck", d, tau)
    rep = Report(title="counital expectations")

    exps = []
    for emb, amb_mat, label in ((cartan.source, amb_source, "source"),
                                (cartan.target, amb_target, "target")):
        sub_mat = linalg.lstsq_min(emb.matrix, amb_mat)
        rep.add(f"{label}_image_in_subalgebra",
                float(np.abs(emb.matrix @ sub_mat - amb_mat).max()), cfg.cluster_tol)
        exp = ConditionalExpectation(emb=emb, matrix=sub_mat)
        rep.extend(verify_conditional_expectation(exp, tau, cfg), prefix=f"{label}.")
        ortho = trace_conditional_expectation(emb, tau, cfg)
        rep.add(f"{label}_matches_trace_projection",
                float(np.abs(exp.matrix - ortho.matrix).max()), cfg.cluster_tol)
        rep.add(f"{label}_unital",
                float(np.abs(exp.apply(alg.unit) - emb.sub.unit).max()), cfg.cluster_tol)
        exps.append(exp)

    s = wka.antipode
    rep.add("target_is_antipode_conjugate",
            float(np.abs(amb_target - s.T @ amb_source @ s.T).max()), cfg.cluster_tol)
    return CounitalExpectations(source=exps[0], target=exps[1], report=rep)


def dual(wka: WeakKacAlgebra, cfg: ToleranceConfig | None = None,
         name: str | None = None) -> WeakKacAlgebra:
    """Structure on the dual space; verifies the axioms when cfg is given."""
    label = name if name is not None else (f"{wka.name}*" if wka.name else "dual")
    alg = FiniteStarAlgebra(
        mult=np.ascontiguousarray(wka.comult.transpose(1, 2, 0)),
        unit=wka.counit.copy(),
        invol=np.conj(wka.alg.invol @ wka.antipode).T,
        name=label,
    )
    out = WeakKacAlgebra(
        alg=alg,
        comult=np.ascontiguousarray(wka.alg.mult.transpose(2, 0, 1)),
        counit=wka.alg.unit.copy(),
        antipode=wka.antipode.T.copy(),
        name=label,
    )
    if cfg is not None:
        verify_wka(out, cfg).require(NotWeakKac, context=label)
    return out


def _unit_formula(blocks: list[np.ndarray], apply_s) -> np.ndarray:
    """Sum over blocks of (1/d) sum_{r,t} f_rt (x) S(f_tr) for given matrix units."""
    n = blocks[0].shape[-1]
    out = np.zeros((n, n), dtype=complex)
    for blk in blocks:
        dblk = blk.shape[0]
        for r in range(dblk):
            for t in range(dblk):
                out += np.outer(blk[r, t], apply_s(blk[t, r])) / dblk
    return out


def verify_delta_unit(wka: WeakKacAlgebra, cartan: CartanPair, haar: HaarData,
                      cfg: ToleranceConfig,
                      decomposition: BlockDecomposition | None = None,
                      units: MatrixUnitSystem | None = None) -> Report:
    """Characterizing properties of the coproduct of the unit, then the
    explicit matrix-unit formulas for it and for the coproduct of the
    Haar projection."""
    alg = wka.alg
    rep = Report(title="coproduct of unit and Haar projection")
    w = wka.delta_unit()
    s, m = wka.antipode, alg.mult
    tol = cfg.cluster_tol

    rep.add("unit_coproduct_idempotent",
            float(np.abs(tensor_square_mul(alg, w, w) - w).max()), tol)
    rep.add("unit_coproduct_self_adjoint",
            float(np.abs(tensor_square_star(alg, w) - w).max()), tol)
    rep.add_flag("first_leg_in_source",
                 linalg.subspace_leq(w, cartan.source.matrix, cfg.rank_tol))
    rep.add_flag("second_leg_in_target",
                 linalg.subspace_leq(w.T, cartan.target.matrix, cfg.rank_tol))
    fold_left = np.einsum("ab,ap,pbc->c", w, s, m, optimize=True)
    fold_right = np.einsum("ab,bq,aqc->c", w, s, m, optimize=True)
    rep.add("fold_antipode_left", float(np.abs(fold_left - alg.unit).max()), tol)
    rep.add("fold_antipode_right", float(np.abs(fold_right - alg.unit).max()), tol)

    source_amb = [np.array([[cartan.source.embed(blk[r, t])
                             for t in range(blk.shape[0])]
                            for r in range(blk.shape[0])])
                  for blk in cartan.source_units.units]
    formula = _unit_formula(source_amb, wka.s_apply)
    resid = float(np.abs(formula - w).max())
    rep.values["source_units_formula_residual"] = resid
    if resid <= tol:
        rep.add("source_units_formula", resid, tol)
    else:
        rep.warn(f"source matrix-unit formula off by {resid:.3e}")

    # mirrored gauge: sum (1/d) sum_{r,t} S(g_tr) (x) g_rt over target units
    target_amb = [np.array([[cartan.target.embed(blk[r, t])
                             for t in range(blk.shape[0])]
                            for r in range(blk.shape[0])])
                  for blk in cartan.target_units.units]
    mirrored = np.zeros_like(w)
    for gb in target_amb:
        dblk = gb.shape[0]
        for r in range(dblk):
            for t in range(dblk):
                mirrored += np.outer(wka.s_apply(gb[t, r]), gb[r, t]) / dblk
    resid = float(np.abs(mirrored - w).max())
    rep.values["target_units_formula_residual"] = resid
    if resid <= tol:
        rep.add("target_units_formula", resid, tol)
    else:
        rep.warn(f"target matrix-unit formula off by {resid:.3e}")

    if decomposition is None:
        decomposition = block_decompose(alg, cfg)
    if units is None:
        units = matrix_units(alg, decomposition, cfg)
    wp = wka.comultiply(haar.projection)
    rep.add("haar_coproduct_cocommutative", float(np.abs(wp - wp.T).max()), tol)
    formula = _unit_formula(list(units.units), wka.s_apply)
    resid = float(np.abs(formula - wp).max())
    rep.values["haar_units_formula_residual"] = resid
    if resid <= tol:
        rep.add("haar_units_formula", resid, tol)
    else:
        rep.warn(f"Haar projection matrix-unit formula off by {resid:.3e}")
    return rep


def hypercenter(wka: WeakKacAlgebra, counital: CounitalData,
                cfg: ToleranceConfig) -> np.ndarray:
    """Row basis of the intersection of both counital subalgebras and the center."""
    ks = _fixed_rows(counital.source_mat, cfg.rank_tol)
    kt = _fixed_rows(counital.target_mat, cfg.rank_tol)
    z = center(wka.alg, cfg)
    both = linalg.subspace_intersection(ks.T, kt.T, cfg.rank_tol)
    return linalg.subspace_intersection(both, z.T, cfg.rank_tol).T


def is_decomposable(wka: WeakKacAlgebra, counital: CounitalData,
                    cfg: ToleranceConfig) -> bool:
    return hypercenter(wka, counital, cfg).shape[0] > 1


def decompose(wka: WeakKacAlgebra, counital: CounitalData,
              cfg: ToleranceConfig) -> tuple[list[WeakKacAlgebra], Report]:
    """Split along the minimal projections of the hypercenter and re-verify
    every component."""
    alg = wka.alg
    rows = hypercenter(wka, counital, cfg)
    rep = Report(title="hypercenter decomposition")
    rep.values["hypercenter_dim"] = int(rows.shape[0])
    if rows.shape[0] <= 1:
        return [wka], rep

    emb = subalgebra_from_basis(alg, rows, cfg, name="hypercenter")
    blocks = block_decompose(emb.sub, cfg)
    if any(dd != 1 for dd in blocks.block_dims):
        raise DecompositionError("hypercenter is not commutative")

    w = wka.delta_unit()
    components = []
    for idx, q_sub in enumerate(blocks.central_projections):
        q = emb.embed(q_sub)
        rep.add(f"component_{idx}_antipode_fixed",
                float(np.abs(wka.s_apply(q) - q).max()), cfg.cluster_tol)
        qq = np.outer(q, q)
        rep.add(f"component_{idx}_coproduct",
                float(np.abs(wka.comultiply(q) - tensor_square_mul(alg, qq, w)).max()),
                cfg.cluster_tol)
        res = 0.0
        for k in range(alg.dim):
            lhs = wka.comultiply(alg.mul(q, np.eye(alg.dim, dtype=complex)[k]))
            rhs = tensor_square_mul(alg, qq, wka.comult[k])
            res = max(res, float(np.abs(lhs - rhs).max()))
        rep.add(f"component_{idx}_coproduct_compression", res, cfg.cluster_tol)

        cols = linalg.orth(alg.lmat(q), cfg.rank_tol)
        comp_emb = subalgebra_from_basis(alg, cols.T, cfg,
                                         name=f"{wka.name}[{idx}]", unital=False)
        p = comp_emb.matrix
        k_dim = p.shape[1]
        dcomp = np.empty((k_dim, k_dim, k_dim), dtype=complex)
        coord_res = 0.0
        for a in range(k_dim):
            wm = wka.comultiply(p[:, a])
            c1 = linalg.lstsq_min(p, wm)
            block = linalg.lstsq_min(p, c1.T).T
            dcomp[a] = block
            coord_res = max(coord_res, float(np.abs(p @ block @ p.T - wm).max()))
        rep.add(f"component_{idx}_coproduct_coords", coord_res, cfg.cluster_tol)

        s_cols = linalg.lstsq_min(p, wka.antipode.T @ p)
        rep.add(f"component_{idx}_antipode_closed",
                float(np.abs(p @ s_cols - wka.antipode.T @ p).max()), cfg.cluster_tol)
        comp = WeakKacAlgebra(
            alg=comp_emb.sub,
            comult=dcomp,
            counit=wka.counit @ p,
            antipode=s_cols.T,
            name=f"{wka.name}[{idx}]",
        )
        rep.extend(verify_wka(comp, cfg), prefix=f"component_{idx}.")
        components.append(comp)
    return components, rep


def is_connected(wka: WeakKacAlgebra, counital: CounitalData, haar: HaarData,
                 cfg: ToleranceConfig,
                 dual_wka: WeakKacAlgebra | None = None) -> tuple[bool, Report]:
    """Evaluate the three equivalent connectedness criteria and insist
    they agree."""
    alg = wka.alg
    rep = Report(title="connectedness")
    ks = _fixed_rows(counital.source_mat, cfg.rank_tol)
    z = center(alg, cfg)
    crit_center = linalg.subspace_intersection(ks.T, z.T, cfg.rank_tol).shape[1] == 1

    if dual_wka is None:
        dual_wka = dual(wka)
    src_d, tgt_d = counital_matrices(dual_wka)
    ks_d = _fixed_rows(src_d, cfg.rank_tol)
    kt_d = _fixed_rows(tgt_d, cfg.rank_tol)
    crit_dual = linalg.subspace_intersection(ks_d.T, kt_d.T, cfg.rank_tol).shape[1] == 1

    p = haar.projection
    compressed = alg.lmat(p) @ alg.rmat(p)
    crit_minimal = linalg.rank(compressed, cfg.rank_tol) == 1

    rep.values["center_criterion"] = crit_center
    rep.values["dual_cartan_criterion"] = crit_dual
    rep.values["haar_minimal_criterion"] = crit_minimal
    agree = crit_center == crit_dual == crit_minimal
    rep.add_flag("criteria_agree", agree)
    if not agree:
        raise WkaError(
            "connectedness criteria disagree: "
            f"center={crit_center} dual={crit_dual} minimal={crit_minimal}")
    return crit_center, rep


def is_biconnected(wka: WeakKacAlgebra, counital: CounitalData, haar: HaarData,
                   cfg: ToleranceConfig,
                   dual_wka: WeakKacAlgebra | None = None) -> tuple[bool, Report]:
    if dual_wka is None:
        dual_wka = dual(wka)
    first, rep1 = is_connected(wka, counital, haar, cfg, dual_wka=dual_wka)
    dual_counital = counital_maps(dual_wka, cfg)
    dual_haar = haar_data(dual_wka, dual_counital, cfg)
    second, rep2 = is_connected(dual_wka, dual_counital, dual_haar, cfg,
                                dual_wka=wka)
    rep = Report(title="biconnectedness")
    rep.extend(rep1, prefix="primal.")
    rep.extend(rep2, prefix="dual.")
    return first and second, rep


def cyclic_group_table(n: int) -> np.ndarray:
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


def direct_product_table(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    nb = b.shape[0]
    return (a[:, None, :, None] * nb + b[None, :, None, :]).reshape(
        a.shape[0] * nb, a.shape[0] * nb)


def from_group(table: np.ndarray, name: str = "") -> WeakKacAlgebra:
    """Group algebra with the diagonal coproduct."""
    table = np.asarray(table)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise WkaError("group table must be square")
    if not np.issubdtype(table.dtype, np.integer):
        raise WkaError("group table must be integer valued")
    n = table.shape[0]
    idx = np.arange(n)
    if table.min() < 0 or table.max() >= n:
        raise WkaError("group table entries out of range")
    if (not np.all(np.sort(table, axis=0) == idx[:, None])
            or not np.all(np.sort(table, axis=1) == idx[None, :])):
        raise WkaError("group table is not a Latin square")
    if not np.array_equal(table[table, :], table[:, table]):
        raise WkaError("group table is not associative")
    unit_candidates = [e for e in range(n)
                       if np.array_equal(table[e], idx)
                       and np.array_equal(table[:, e], idx)]
    if len(unit_candidates) != 1:
        raise WkaError("group table has no identity element")
    e = unit_candidates[0]
    inv = np.array([int(np.flatnonzero(table[i] == e)[0]) for i in range(n)])

    mult = (table[:, :, None] == idx).astype(complex)
    comult = np.zeros((n, n, n), dtype=complex)
    comult[idx, idx, idx] = 1.0
    counit = np.ones(n, dtype=complex)
    unit = np.zeros(n, dtype=complex)
    unit[e] = 1.0
    perm = np.zeros((n, n), dtype=complex)
    perm[idx, inv] = 1.0
    label = name or f"group{n}"
    alg = FiniteStarAlgebra(mult=mult, unit=unit, invol=perm, name=label)
    return WeakKacAlgebra(alg=alg, comult=comult, counit=counit,
                          antipode=perm, name=label)


def from_dual_group(table: np.ndarray, name: str = "") -> WeakKacAlgebra:
    """Function algebra of a finite group, i.e. the dual of its group algebra."""
    base = from_group(table)
    return dual(base, name=name or f"dualgroup{np.asarray(table).shape[0]}")


def from_pair_groupoid(n: int, name: str = "") -> WeakKacAlgebra:
    """Groupoid algebra of the full equivalence relation on n points."""
    if n < 1:
        raise WkaError("pair groupoid needs at least one point")
    big = n * n

    def pair(k: int, l: int) -> int:
        return k * n + l

    mult = np.zeros((big, big, big), dtype=complex)
    for k in range(n):
        for l in range(n):
            for q in range(n):
                mult[pair(k, l), pair(l, q), pair(k, q)] = 1.0
    comult = np.zeros((big, big, big), dtype=complex)
    rng_idx = np.arange(big)
    comult[rng_idx, rng_idx, rng_idx] = 1.0
    counit = np.ones(big, dtype=complex)
    unit = np.zeros(big, dtype=complex)
    unit[[pair(k, k) for k in range(n)]] = 1.0
    swap = np.zeros((big, big), dtype=complex)
    for k in range(n):
        for l in range(n):
            swap[pair(k, l), pair(l, k)] = 1.0
    label = name or f"pairgroupoid{n}"
    alg = FiniteStarAlgebra(mult=mult, unit=unit, invol=swap, name=label)
    return WeakKacAlgebra(alg=alg, comult=comult, counit=counit,
                          antipode=swap, name=label)


def direct_sum(k1: WeakKacAlgebra, k2: WeakKacAlgebra,
               name: str = "") -> WeakKacAlgebra:
    n1, n2 = k1.dim, k2.dim
    n = n1 + n2
    mult = np.zeros((n, n, n), dtype=complex)
    mult[:n1, :n1, :n1] = k1.alg.mult
    mult[n1:, n1:, n1:] = k2.alg.mult
    comult = np.zeros((n, n, n), dtype=complex)
    comult[:n1, :n1, :n1] = k1.comult
    comult[n1:, n1:, n1:] = k2.comult
    invol = np.zeros((n, n), dtype=complex)
    invol[:n1, :n1] = k1.alg.invol
    invol[n1:, n1:] = k2.alg.invol
    anti = np.zeros((n, n), dtype=complex)
    anti[:n1, :n1] = k1.antipode
    anti[n1:, n1:] = k2.antipode
    label = name or f"{k1.name}(+){k2.name}"
    alg = FiniteStarAlgebra(
        mult=mult,
        unit=np.concatenate([k1.alg.unit, k2.alg.unit]),
        invol=invol,
        name=label,
    )
    return WeakKacAlgebra(
        alg=alg,
        comult=comult,
        counit=np.concatenate([k1.counit, k2.counit]),
        antipode=anti,
        name=label,
    )


@dataclass(frozen=True)
class WeakKacData:
    """Everything the full verification pipeline derives from one algebra."""

    wka: WeakKacAlgebra
    counital: CounitalData
    cartan: CartanPair
    haar: HaarData
    expectations: CounitalExpectations
    dual_wka: WeakKacAlgebra
    hypercenter_dim: int
    decomposable: bool
    connected: bool
    biconnected: bool
    report: Report


def analyze(wka: WeakKacAlgebra, cfg: ToleranceConfig) -> WeakKacData:
    """Run the whole verification pipeline; raises when a structural
    assertion fails."""
    rep = Report(title=f"analysis: {wka.name or 'unnamed'}")
    axioms = verify_wka(wka, cfg)
    rep.extend(axioms, prefix="axioms.")
    axioms.require(NotWeakKac, context=wka.name)

    counital = counital_maps(wka, cfg)
    rep.extend(counital.report, prefix="counital.")
    cartan = cartan_subalgebras(wka, counital, cfg)
    rep.extend(cartan.report, prefix="cartan.")
    haar = haar_data(wka, counital, cfg)
    rep.extend(haar.report, prefix="haar.")
    haar.report.require(NotWeakKac, context=f"{wka.name or 'unnamed'} Haar data")
    exps = counital_expectations(wka, cartan, haar, cfg)
    rep.extend(exps.report, prefix="expectation.")
    rep.extend(verify_delta_unit(wka, cartan, haar, cfg), prefix="coproduct_unit.")

    dual_wka = dual(wka)
    rep.extend(verify_wka(dual_wka, cfg), prefix="dual.axioms.")
    dual_counital = counital_maps(dual_wka, cfg)
    dual_haar = haar_data(dual_wka, dual_counital, cfg)
    rep.add("dual_haar_projection_is_trace",
            float(np.abs(dual_haar.projection - haar.trace).max()), cfg.cluster_tol)
    rep.add("dual_haar_trace_is_projection",
            float(np.abs(dual_haar.trace - haar.projection).max()), cfg.cluster_tol)
    double = dual(dual_wka)
    round_trip = max(
        float(np.abs(double.alg.mult - wka.alg.mult).max()),
        float(np.abs(double.alg.unit - wka.alg.unit).max()),
        float(np.abs(double.alg.invol - wka.alg.invol).max()),
        float(np.abs(double.comult - wka.comult).max()),
        float(np.abs(double.counit - wka.counit).max()),
        float(np.abs(double.antipode - wka.antipode).max()),
    )
    rep.add("double_dual_identity", round_trip, cfg.cluster_tol)

    hyper_dim = hypercenter(wka, counital, cfg).shape[0]
    connected, crep = is_connected(wka, counital, haar, cfg, dual_wka=dual_wka)
    rep.extend(crep, prefix="connected.")
    dual_connected, drep = is_connected(dual_wka, dual_counital, dual_haar, cfg,
                                        dual_wka=wka)
    rep.extend(drep, prefix="dual_connected.")
    rep.values["hypercenter_dim"] = int(hyper_dim)
    rep.values["connected"] = connected
    rep.values["biconnected"] = connected and dual_connected

    return WeakKacData(
        wka=wka,
        counital=counital,
        cartan=cartan,
        haar=haar,
        expectations=exps,
        dual_wka=dual_wka,
        hypercenter_dim=int(hyper_dim),
        decomposable=hyper_dim > 1,
        connected=connected,
        biconnected=connected and dual_connected,
        report=rep,
    )
