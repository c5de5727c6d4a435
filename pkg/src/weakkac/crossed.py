"""Crossed products of *-algebras by weak Kac algebra actions.

An action is a dense tensor act[h, a, :] holding the coordinates of the h-th
acting basis vector applied to the a-th module basis vector; ``side`` records
whether the acting algebra sits on the left or the right of the module.  The
crossed product is the quotient of the plain tensor product by the Cartan
balancing relations.  Quotient coordinates come from reduced row echelon
pivoting so that repeated runs produce identical bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .algebra import (FiniteStarAlgebra, _tensor, commutant,
                      star_homomorphism_report, star_isomorphism_check,
                      verify_star_algebra)
from .config import (DimensionMismatch, SolveError, ToleranceConfig, WkaError)
from .expectations import (ConditionalExpectation, matrix_over_algebra,
                           verify_conditional_expectation, verify_quasi_basis)
from .report import Report
from .wedderburn import MatrixUnitSystem, SubalgebraEmbedding
from .weak_kac import (CounitalExpectations, WeakKacAlgebra,
                       counital_matrices, verify_wka)


@dataclass(frozen=True)
class ActionSpec:
    """A weak Kac algebra acting on a finite *-algebra on one side."""

    wka: WeakKacAlgebra
    module: FiniteStarAlgebra
    tensor: np.ndarray  # (acting dim, module dim, module dim)
    side: str = "left"
    name: str = ""

    def __post_init__(self) -> None:
        nk, na = self.wka.dim, self.module.dim
        object.__setattr__(self, "tensor",
                           _tensor(self.tensor, (nk, na, na), "action tensor"))
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    def apply(self, h: np.ndarray, a: np.ndarray) -> np.ndarray:
        return np.einsum("h,a,hao->o", np.asarray(h, complex),
                         np.asarray(a, complex), self.tensor)

    def unit_images(self) -> np.ndarray:
        """Row h holds the coordinates of the acting basis vector applied
        to the module unit."""
        return np.einsum("hao,a->ho", self.tensor, self.module.unit)


def validate_action(action: ActionSpec, cfg: ToleranceConfig) -> Report:
    """All module-algebra axioms: compatibility with the acting product and
    unit, the coproduct product rule, the antipode star rule, and the Cartan
    behaviour of the unit map."""
    wka, alg, t = action.wka, action.module, action.tensor
    rep = Report(title=f"action checks ({action.name or action.side})")
    tol = 100 * cfg.abs_tol
    nk, na = wka.dim, alg.dim
    mk, d = wka.alg.mult, wka.comult
    ma, ja = alg.mult, alg.invol
    jk = wka.alg.invol

    lhs = np.einsum("hkp,pao->hkao", mk, t, optimize=True)
    if action.side == "left":
        # h |> (k |> a) composes as (h k) |> a
        rhs = np.einsum("kab,hbo->hkao", t, t, optimize=True)
    else:
        # (a <| h) <| k composes as a <| (h k)
        rhs = np.einsum("hab,kbo->hkao", t, t, optimize=True)
    rep.add("module_composition", float(np.abs(lhs - rhs).max()), tol)
    unit_act = np.einsum("h,hao->ao", wka.alg.unit, t)
    rep.add("module_unital", float(np.abs(unit_act - np.eye(na)).max()), tol)

    # product rule through the coproduct; the first leg lands on the first
    # factor for either side, so one formula serves both
    worst = 0.0
    for h in range(nk):
        lhs_h = np.einsum("abp,po->abo", ma, t[h])
        rhs_h = np.einsum("cd,cau,dbv,uvo->abo", d[h], t, t, ma, optimize=True)
        worst = max(worst, float(np.abs(lhs_h - rhs_h).max()))
    rep.add("product_rule", worst, tol)

    # star rule: acting on a star is the antipode of the star acting
    star_of_image = np.einsum("hap,po->hao", np.conj(t), ja)
    acted_star = np.einsum("hp,aq,pqo->hao", jk @ wka.antipode, ja, t,
                           optimize=True)
    rep.add("star_rule", float(np.abs(star_of_image - acted_star).max()), tol)

    es_row, et_row = counital_matrices(wka)
    cmat = et_row if action.side == "left" else es_row
    u = action.unit_images()
    rep.add("unit_factors_through_counital",
            float(np.abs(u - cmat @ u).max()), tol)
    zcols = linalg.orth(cmat.T, cfg.rank_tol)
    kt = zcols.shape[1]
    m_unit = u.T @ zcols  # module images of a Cartan basis acting on the unit
    rep.add_flag("cartan_unit_map_injective",
                 linalg.rank(m_unit, cfg.rank_tol) == kt)
    prods = wka.alg.product_table(zcols.T, zcols.T)
    rep.add("cartan_unit_map_multiplicative",
            float(np.abs(np.einsum("ijh,ho->ijo", prods, u)
                         - alg.product_table(m_unit.T, m_unit.T)).max()), tol)
    stars_k = np.stack([wka.alg.star(zcols[:, i]) for i in range(kt)], axis=1)
    star_imgs = np.stack([alg.star(m_unit[:, i]) for i in range(kt)], axis=1)
    rep.add("cartan_unit_map_star",
            float(np.abs(u.T @ stars_k - star_imgs).max(initial=0.0)), tol)
    rep.values["cartan_dim"] = kt
    return rep


def require_action(action: ActionSpec, cfg: ToleranceConfig) -> Report:
    rep = validate_action(action, cfg)
    rep.require(WkaError, context=f"action {action.name or action.side}")
    return rep


def trivial_action(wka: WeakKacAlgebra, emb: SubalgebraEmbedding,
                   cfg: ToleranceConfig, side: str = "left") -> ActionSpec:
    """The algebra acting on its own Cartan subalgebra through the counital
    map: multiply into the ambient algebra, project, restrict."""
    es_row, et_row = counital_matrices(wka)
    nk, k = wka.dim, emb.sub.dim
    if side == "left":
        prods = np.tensordot(wka.alg.mult, emb.matrix,
                             axes=(1, 0)).transpose(0, 2, 1)  # (h, a, amb)
        amb = prods @ et_row
    else:
        prods = np.tensordot(emb.matrix, wka.alg.mult,
                             axes=(0, 0)).transpose(1, 0, 2)  # (h, a, amb)
        amb = prods @ es_row
    flat = amb.reshape(-1, nk).T
    sol = linalg.lstsq_min(emb.matrix, flat)
    resid = float(np.abs(emb.matrix @ sol - flat).max(initial=0.0))
    if resid > 100 * cfg.rank_tol:
        raise SolveError(f"counital image left the subalgebra ({resid:.2e})")
    tensor = sol.T.reshape(nk, k, k)
    return ActionSpec(wka, emb.sub, tensor, side=side,
                      name=f"trivial {side} action")


def dual_action(wka: WeakKacAlgebra, dual_wka: WeakKacAlgebra,
                side: str = "left") -> ActionSpec:
    """Evaluation action of the dual on the algebra through the coproduct:
    one coproduct leg is paired with the functional, the other survives."""
    if side == "left":
        tensor = np.ascontiguousarray(wka.comult.transpose(2, 0, 1))
    else:
        tensor = np.ascontiguousarray(wka.comult.transpose(1, 0, 2))
    return ActionSpec(dual_wka, wka.alg, tensor, side=side,
                      name=f"dual {side} action")


@dataclass(frozen=True)
class CrossedProduct:
    """Quotient of the tensor product by the Cartan balancing relations.

    Raw coordinates flatten (module, acting) C-order on the left side and
    (acting, module) on the right.  ``section`` columns are the canonical raw
    representatives of the basis classes, ``projection`` maps raw coordinates
    to classes, and ``relations`` rows span the balancing subspace.
    """

    action: ActionSpec
    algebra: FiniteStarAlgebra
    section: np.ndarray
    projection: np.ndarray
    relations: np.ndarray
    include_module: np.ndarray  # (dim, module dim) columns: classes a (x) 1
    include_kac: np.ndarray     # (dim, acting dim) columns: classes 1 (x) h
    report: Report

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def raw_dim(self) -> int:
        return self.action.module.dim * self.action.wka.dim

    def class_of(self, raw: np.ndarray) -> np.ndarray:
        return self.projection @ np.asarray(raw, complex)

    def lift(self, x: np.ndarray) -> np.ndarray:
        return self.section @ np.asarray(x, complex)


def _raw_basis_products(action: ActionSpec, idx: int) -> np.ndarray:
    """Products of the idx-th raw basis vector with every raw basis vector;
    row j holds the raw coordinates of (basis idx) * (basis j)."""
    wka, alg, t = action.wka, action.module, action.tensor
    nk, na = wka.dim, alg.dim
    mk, d, ma = wka.alg.mult, wka.comult, alg.mult
    n_raw = na * nk
    if action.side == "left":
        a, h = divmod(idx, nk)
        # [a (x) h][b (x) k] = a (h1 |> b) (x) h2 k
        u = np.tensordot(t, ma[a], axes=(2, 0))       # (c, b, out_a)
        t2 = np.tensordot(d[h], u, axes=(0, 0))       # (d, b, out_a)
        out = np.einsum("dbo,dkp->bkop", t2, mk, optimize=True)
        return out.reshape(n_raw, n_raw)
    h, a = divmod(idx, na)
    # [h (x) a][k (x) b] = h k1 (x) (a <| k2) b
    v = np.tensordot(t[:, a, :], ma, axes=(1, 0))     # (d, b, out_a)
    x1 = np.einsum("kcd,co->kdo", d, mk[h], optimize=True)
    out = np.einsum("kdo,dba->kboa", x1, v, optimize=True)
    return out.reshape(n_raw, n_raw)


def _raw_product(action: ActionSpec, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Raw-coordinate product of two arbitrary representatives."""
    wka, alg, t = action.wka, action.module, action.tensor
    nk, na = wka.dim, alg.dim
    mk, d, ma = wka.alg.mult, wka.comult, alg.mult
    if action.side == "left":
        vm = np.asarray(v, complex).reshape(na, nk)
        wm = np.asarray(w, complex).reshape(na, nk)
        t1 = np.tensordot(vm, d, axes=(1, 0))                 # (a, c, d)
        s1 = np.einsum("cbu,bk->cku", t, wm, optimize=True)
        s3 = np.einsum("acd,dkp->ackp", t1, mk, optimize=True)
        out = np.einsum("ackp,cku,auo->op", s3, s1, ma, optimize=True)
        return out.reshape(-1)
    vm = np.asarray(v, complex).reshape(nk, na)
    wm = np.asarray(w, complex).reshape(nk, na)
    t1 = np.tensordot(wm, d, axes=(0, 0))                     # (b, c, d)
    s1 = np.tensordot(vm, mk, axes=(0, 0))                    # (a, c, out_k)
    out = np.einsum("bcd,ack,dau,ubo->ko", t1, s1, t, ma, optimize=True)
    return out.reshape(-1)


def _raw_star_matrix(action: ActionSpec) -> np.ndarray:
    """Row i holds the raw coordinates of the star of raw basis vector i."""
    wka, alg, t = action.wka, action.module, action.tensor
    nk, na = wka.dim, alg.dim
    n_raw = na * nk
    dstar = np.einsum("hp,pcd->hcd", wka.alg.invol, wka.comult, optimize=True)
    ja = alg.invol
    if action.side == "left":
        # [a (x) h]* = (h1* |> a*) (x) h2*
        rows = np.einsum("hcd,aq,cqo->ahod", dstar, ja, t, optimize=True)
        return rows.reshape(n_raw, n_raw)
    # [h (x) a]* = h1* (x) (a* <| h2*)
    rows = np.einsum("hcd,aq,dqo->haco", dstar, ja, t, optimize=True)
    return rows.reshape(n_raw, n_raw)


def _balancing_rows(action: ActionSpec, cfg: ToleranceConfig) -> np.ndarray:
    """Rows spanning the balancing subspace generated by moving a Cartan
    element across the tensor sign."""
    wka, alg, t = action.wka, action.module, action.tensor
    nk, na = wka.dim, alg.dim
    mk, ma = wka.alg.mult, alg.mult
    es_row, et_row = counital_matrices(wka)
    cmat = et_row if action.side == "left" else es_row
    zcols = linalg.orth(cmat.T, cfg.rank_tol)
    kt = zcols.shape[1]
    u = action.unit_images()
    zin = u.T @ zcols  # module images of the Cartan basis on the unit
    n_raw = na * nk
    if action.side == "left":
        # a (z |> 1) (x) h  -  a (x) z h
        m1 = np.tensordot(ma, zin, axes=(1, 0)).transpose(2, 0, 1)  # (t, a, o)
        m2 = np.tensordot(zcols, mk, axes=(0, 0))                   # (t, h, o)
        w1 = np.einsum("tao,hp->tahop", m1, np.eye(nk), optimize=True)
        w2 = np.einsum("ab,tho->tahbo", np.eye(na), m2, optimize=True)
    else:
        # h z (x) a  -  h (x) (1 <| z) a
        m1 = np.tensordot(mk, zcols, axes=(1, 0)).transpose(2, 0, 1)  # (t, h, o)
        m2 = np.tensordot(zin, ma, axes=(0, 0))                       # (t, a, o)
        w1 = np.einsum("tho,ab->thaob", m1, np.eye(na), optimize=True)
        w2 = np.einsum("hp,tao->thapo", np.eye(nk), m2, optimize=True)
    return (w1 - w2).reshape(kt * n_raw, n_raw)


def crossed_product(action: ActionSpec, cfg: ToleranceConfig,
                    samples: int = 100, name: str = "") -> CrossedProduct:
    """Builds the crossed product and certifies that both the multiplication
    and the star descend to the quotient by the balancing relations."""
    wka, alg = action.wka, action.module
    nk, na = wka.dim, alg.dim
    n_raw = na * nk
    rep = Report(title=f"crossed product ({action.name or action.side})")
    tol = 100 * cfg.abs_tol

    wrows = _balancing_rows(action, cfg)
    rrows, pivots = linalg.rref(wrows, cfg.rank_tol)
    pivset = set(pivots)
    free = np.array([c for c in range(n_raw) if c not in pivset], dtype=int)
    q = free.size
    w = rrows.shape[0]

    proj = np.zeros((q, n_raw), dtype=complex)
    proj[np.arange(q), free] = 1.0
    if pivots:
        proj[:, np.array(pivots)] = -rrows[:, free].T
    sec = np.zeros((n_raw, q), dtype=complex)
    sec[free, np.arange(q)] = 1.0

    rep.add("relations_in_kernel",
            float(np.abs(proj @ rrows.T).max(initial=0.0)), tol)
    rep.add("projection_section_identity",
            float(np.abs(proj @ sec - np.eye(q)).max()), tol)

    es_row, et_row = counital_matrices(wka)
    cmat = et_row if action.side == "left" else es_row
    kt = linalg.rank(cmat, cfg.rank_tol)
    rep.add_flag("free_rank_matches_cartan_index", q * kt == n_raw)
    rep.values["dimension"] = q
    rep.values["raw_dimension"] = n_raw
    rep.values["relation_rank"] = w
    rep.values["cartan_dim"] = kt

    pos_of = np.full(n_raw, -1, dtype=int)
    pos_of[free] = np.arange(q)
    mult_q = np.zeros((q, q, q), dtype=complex)
    left_desc = np.zeros((w, q, q), dtype=complex) if w else None
    right_desc = 0.0
    for idx in range(n_raw):
        out = _raw_basis_products(action, idx)
        reduced = out[free] @ proj.T                       # (q, q)
        p = pos_of[idx]
        if p >= 0:
            mult_q[p] = reduced
        if w:
            right_desc = max(right_desc,
                             float(np.abs((rrows @ out) @ proj.T).max()))
            left_desc += rrows[:, idx, None, None] * reduced[None]
    rep.add("right_multiplication_descends", right_desc, tol)
    rep.add("left_multiplication_descends",
            float(np.abs(left_desc).max()) if w else 0.0, tol)

    star_raw = _raw_star_matrix(action)
    invol_q = star_raw[free] @ proj.T
    star_desc = (float(np.abs(proj @ (star_raw.T @ np.conj(rrows).T)).max())
                 if w else 0.0)
    rep.add("star_descends", star_desc, tol)

    if action.side == "left":
        unit_raw = np.kron(alg.unit, wka.alg.unit)
        ia_raw = np.kron(np.eye(na), wka.alg.unit[:, None])
        ik_raw = np.kron(alg.unit[:, None], np.eye(nk))
    else:
        unit_raw = np.kron(wka.alg.unit, alg.unit)
        ia_raw = np.kron(wka.alg.unit[:, None], np.eye(na))
        ik_raw = np.kron(np.eye(nk), alg.unit[:, None])
    unit_q = proj @ unit_raw

    label = name or (f"crossed({alg.name or 'A'},{wka.name or 'K'})"
                     if action.side == "left"
                     else f"crossed({wka.name or 'K'},{alg.name or 'A'})")
    out_alg = FiniteStarAlgebra(mult_q, unit_q, invol_q, name=label)
    rep.extend(verify_star_algebra(out_alg, cfg), prefix="algebra.")

    include_module = proj @ ia_raw
    include_kac = proj @ ik_raw
    rep.extend(star_homomorphism_report(alg, out_alg, include_module, cfg),
               prefix="module_embedding.")
    rep.extend(star_homomorphism_report(wka.alg, out_alg, include_kac, cfg),
               prefix="kac_embedding.")
    if action.side == "left":
        table = out_alg.product_table(include_module.T, include_kac.T)
    else:
        table = out_alg.product_table(include_kac.T, include_module.T)
    rep.add("embedding_products_cover_classes",
            float(np.abs(table.reshape(n_raw, q) - proj.T).max()), tol)

    if samples > 0:
        rng = np.random.default_rng(cfg.rng_seed)
        worst = 0.0
        for _ in range(samples):
            c1 = rng.standard_normal(q) + 1j * rng.standard_normal(q)
            c2 = rng.standard_normal(q) + 1j * rng.standard_normal(q)
            reps = []
            for c in (c1, c1, c2, c2):
                v = sec @ c
                if w:
                    r = rng.standard_normal(w) + 1j * rng.standard_normal(w)
                    v = v + rrows.T @ r
                reps.append(v)
            pa = proj @ _raw_product(action, reps[0], reps[2])
            pb = proj @ _raw_product(action, reps[1], reps[3])
            table_prod = np.einsum("i,j,ijq->q", c1, c2, mult_q, optimize=True)
            worst = max(worst, float(np.abs(pa - pb).max()),
                        float(np.abs(pa - table_prod).max()))
        rep.add("representative_independence", worst, 1e4 * cfg.abs_tol)

    return CrossedProduct(action=action, algebra=out_alg, section=sec,
                          projection=proj, relations=rrows,
                          include_module=include_module,
                          include_kac=include_kac, report=rep)


def trivial_crossed_isomorphism(cp: CrossedProduct, emb: SubalgebraEmbedding,
                                cfg: ToleranceConfig) -> Report:
    """For the trivial action on a Cartan subalgebra the crossed product is
    the algebra itself; the candidate map multiplies the embedded module
    factor with the acting factor."""
    if cp.action.module is not emb.sub:
        raise DimensionMismatch("embedding does not match the acted module")
    wka = cp.action.wka
    nk, na = wka.dim, emb.sub.dim
    if cp.action.side == "left":
        raw_map = np.tensordot(emb.matrix, wka.alg.mult,
                               axes=(0, 0))           # (a, h, out)
        raw_map = raw_map.reshape(na * nk, nk).T
    else:
        raw_map = np.tensordot(wka.alg.mult, emb.matrix,
                               axes=(1, 0))           # (h, out, a)
        raw_map = raw_map.transpose(0, 2, 1).reshape(nk * na, nk).T
    rep = Report(title="trivial crossed product identification")
    rep.add("kills_balancing_relations",
            float(np.abs(raw_map @ cp.relations.T).max(initial=0.0)),
            100 * cfg.abs_tol)
    cols = raw_map @ cp.section
    rep.extend(star_isomorphism_check(cp.algebra, wka.alg, cols, cfg))
    return rep


def module_expectation(cp: CrossedProduct,
                       acting_expectations: CounitalExpectations,
                       cfg: ToleranceConfig
                       ) -> tuple[ConditionalExpectation, Report]:
    """Conditional expectation onto the embedded module: push the acting
    factor through the Haar expectation onto the Cartan subalgebra, then act
    on the module unit."""
    action = cp.action
    alg, wka = action.module, action.wka
    nk, na = wka.dim, alg.dim
    n_raw = na * nk
    u = action.unit_images()
    if action.side == "left":
        e_amb = acting_expectations.target.on_ambient()
        th = u.T @ e_amb                               # (na, nk) columns
        g = np.tensordot(alg.mult, th, axes=(1, 0))    # (a, out, h)
        ea_raw = g.transpose(0, 2, 1).reshape(n_raw, na).T
    else:
        e_amb = acting_expectations.source.on_ambient()
        th = u.T @ e_amb
        g = np.tensordot(th, alg.mult, axes=(0, 0))    # (h, a, out)
        ea_raw = g.reshape(n_raw, na).T

    rep = Report(title="module expectation")
    rep.add("kills_balancing_relations",
            float(np.abs(ea_raw @ cp.relations.T).max(initial=0.0)),
            100 * cfg.abs_tol)
    emb = SubalgebraEmbedding(sub=alg, amb=cp.algebra,
                              matrix=cp.include_module)
    exp = ConditionalExpectation(emb=emb, matrix=ea_raw @ cp.section)
    rep.extend(verify_conditional_expectation(exp, None, cfg))
    return exp, rep


def expectation_basis_report(cp: CrossedProduct, exp: ConditionalExpectation,
                             basis_rows: np.ndarray,
                             cfg: ToleranceConfig) -> Report:
    """Images of a free module basis of the acting algebra inside the crossed
    product are an orthonormal basis for the module expectation, with scalar
    index equal to the number of basis vectors."""
    rows = np.atleast_2d(np.asarray(basis_rows, complex))
    n = rows.shape[0]
    u_rows = (cp.include_kac @ rows.T).T
    rep = Report(title="expectation basis")
    tol = 100 * cfg.abs_tol
    alg = cp.algebra
    stars = np.stack([alg.star(r) for r in u_rows])
    prods = alg.product_table(stars, u_rows)
    vals = np.einsum("su,iju->ijs", exp.matrix, prods, optimize=True)
    delta = np.einsum("ij,s->ijs", np.eye(n), exp.emb.sub.unit)
    rep.add("orthonormal_under_expectation",
            float(np.abs(vals - delta).max()), tol)

    qb = verify_quasi_basis(exp, u_rows, cfg)
    rep.extend(qb.report)
    rep.add("index_scalar",
            float(np.abs(qb.index_element - n * alg.unit).max()), tol)
    rep.add_flag("is_module_basis", qb.is_basis)
    rep.values["index"] = n
    return rep


def dual_action_on_crossed(cp: CrossedProduct, dual_wka: WeakKacAlgebra,
                           cfg: ToleranceConfig
                           ) -> tuple[ActionSpec, Report]:
    """The dual acts on a crossed product through the acting factor only;
    the balancing relations are stable, so the action descends."""
    action = cp.action
    wka = action.wka
    nk, na, q = wka.dim, action.module.dim, cp.dim
    n_raw = na * nk
    rep = Report(title="dual action on crossed product")
    free = np.flatnonzero(np.abs(cp.section).max(axis=1) > 0)
    rrows = cp.relations
    if action.side == "left":
        afree, hfree = np.divmod(free, nk)
        projb = cp.projection.reshape(q, na, nk)
        c1 = wka.comult[hfree]                       # (f, out, phi)
        p1 = projb[:, afree, :].transpose(1, 0, 2)   # (f, q, out)
        tensor = np.einsum("foP,fqo->Pfq", c1, p1, optimize=True)
        if rrows.shape[0]:
            rb = rrows.reshape(-1, na, nk)
            y = np.einsum("wah,hoP->Pwao", rb, wka.comult, optimize=True)
            resid = float(np.abs(np.einsum("Pwao,qao->Pwq", y, projb,
                                           optimize=True)).max())
        else:
            resid = 0.0
        out_side = "left"
    else:
        hfree, afree = np.divmod(free, na)
        projb = cp.projection.reshape(q, nk, na)
        c1 = wka.comult[hfree]                       # (f, phi, out)
        p1 = projb[:, :, afree].transpose(2, 0, 1)   # (f, q, out)
        tensor = np.einsum("fPo,fqo->Pfq", c1, p1, optimize=True)
        if rrows.shape[0]:
            rb = rrows.reshape(-1, nk, na)
            y = np.einsum("wha,hPo->Pwoa", rb, wka.comult, optimize=True)
            resid = float(np.abs(np.einsum("Pwoa,qoa->Pwq", y, projb,
                                           optimize=True)).max())
        else:
            resid = 0.0
        out_side = "right"
    rep.add("stabilizes_balancing_relations", resid, 100 * cfg.abs_tol)
    spec = ActionSpec(dual_wka, cp.algebra, tensor, side=out_side,
                      name=f"dual action on {cp.algebra.name or 'crossed'}")
    return spec, rep


@dataclass(frozen=True)
class DualityData:
    """Second crossed product with its expectation projection and the
    explicit matrix-model identification."""

    crossed: CrossedProduct
    jones: np.ndarray
    expectation: ConditionalExpectation
    rho: np.ndarray
    matrix_model: FiniteStarAlgebra
    report: Report


def duality_isomorphism(cp: CrossedProduct,
                        exp_module: ConditionalExpectation,
                        dual_wka: WeakKacAlgebra,
                        dual_expectations: CounitalExpectations,
                        integral: np.ndarray,
                        basis_rows: np.ndarray,
                        lam: float,
                        cfg: ToleranceConfig,
                        samples: int = 50) -> DualityData:
    """Crossing back with the dual lands in a full matrix algebra over the
    module: the double crossed product is generated by a matrix-unit grid
    built from the expectation projection, and the entrywise expectation map
    is a *-isomorphism onto matrices over the module algebra."""
    rep = Report(title="duality isomorphism")
    tol = 100 * cfg.abs_tol
    rows = np.atleast_2d(np.asarray(basis_rows, complex))
    n = rows.shape[0]
    alg_a = cp.action.module

    act2, rep_act = dual_action_on_crossed(cp, dual_wka, cfg)
    rep.extend(rep_act)
    rep.extend(validate_action(act2, cfg), prefix="action.")
    cp2 = crossed_product(act2, cfg, samples=samples)
    rep.extend(cp2.report, prefix="extension.")
    out = cp2.algebra

    jones = cp2.include_kac @ np.asarray(integral, complex)
    rep.add("jones_idempotent", float(np.abs(out.mul(jones, jones) - jones).max()), tol)
    rep.add("jones_selfadjoint", float(np.abs(out.star(jones) - jones).max()), tol)

    lm, rm = out.lmat(jones), out.rmat(jones)
    imgs = cp2.include_module                          # (dim2, dim cp)
    conditioned = lm @ (rm @ imgs)
    expected = rm @ (imgs @ (cp.include_module @ exp_module.matrix))
    rep.add("jones_implements_expectation",
            float(np.abs(conditioned - expected).max()), tol)
    corner = rm @ (imgs @ cp.include_module)
    rep.add_flag("module_corner_injective",
                 linalg.rank(corner, cfg.rank_tol) == alg_a.dim)

    exp2, rep2 = module_expectation(cp2, dual_expectations, cfg)
    rep.extend(rep2, prefix="expectation.")
    scalar = exp2.apply(jones)
    rep.add("jones_expectation_scalar",
            float(np.abs(scalar - lam * cp.algebra.unit).max()), tol)
    rep.values["jones_expectation"] = scalar

    half = rm @ imgs                                   # columns: i(x) e
    spans = out.product_table(half.T, imgs.T).reshape(-1, out.dim)
    rep.add_flag("jones_conjugates_span",
                 linalg.rank(spans.T, cfg.rank_tol) == out.dim)

    # matrix coefficients come from sandwiching between the projection:
    # rho(x)[nu, kappa] = lam^-1 E(e u_nu* x u_kappa e)
    u_cols = imgs @ (cp.include_kac @ rows.T)          # (dim2, n)
    ea2 = exp_module.matrix @ exp2.matrix              # (dim A, dim2)
    blocks = []
    for nu in range(n):
        left = out.lmat(out.mul(jones, out.star(u_cols[:, nu])))
        for kappa in range(n):
            right = out.rmat(out.mul(u_cols[:, kappa], jones))
            blocks.append((ea2 @ (left @ right)) / lam)
    rho = np.vstack(blocks)                            # (n*n*dimA, dim2)
    model = matrix_over_algebra(alg_a, n)
    rep.extend(star_isomorphism_check(out, model, rho, cfg),
               prefix="matrix_model.")
    rep.add_flag("dimension_exact", out.dim == n * n * alg_a.dim)
    rep.values["dimension"] = out.dim
    return DualityData(crossed=cp2, jones=jones, expectation=exp2, rho=rho,
                       matrix_model=model, report=rep)


def relative_commutant_report(cp: CrossedProduct, cartan_cols: np.ndarray,
                              cfg: ToleranceConfig) -> Report:
    """The embedded Cartan subalgebra of the acting algebra centralizes the
    module inside the crossed product; equality is reported, not asserted."""
    rep = Report(title="relative commutant")
    cartan_cols = np.asarray(cartan_cols, complex)
    cent = commutant(cp.algebra, cp.include_module.T, cfg)
    imgs = cp.include_kac @ cartan_cols
    rep.add_flag("cartan_image_centralizes",
                 linalg.subspace_leq(imgs, cent.T, cfg.rank_tol))
    rep.values["commutant_dim"] = cent.shape[0]
    rep.values["cartan_image_dim"] = linalg.rank(imgs, cfg.rank_tol)
    rep.add_flag("commutant_equals_cartan_image",
                 cent.shape[0] == linalg.rank(imgs, cfg.rank_tol))
    return rep


# ---------------------------------------------------------------------------
# two-sided crossed products


@dataclass(frozen=True)
class TwoSidedInput:
    """A Kac algebra acting on both sides of a base algebra, together with a
    separability element and a base anti-automorphism."""

    kac: WeakKacAlgebra
    base: FiniteStarAlgebra
    left: np.ndarray          # (dim kac, dim base, dim base)
    right: np.ndarray
    separability: np.ndarray  # (dim base, dim base) coefficient matrix
    base_antipode: np.ndarray  # rows: images of the base basis
    name: str = ""

    def __post_init__(self) -> None:
        nh, na = self.kac.dim, self.base.dim
        object.__setattr__(self, "left", _tensor(self.left, (nh, na, na), "left action"))
        object.__setattr__(self, "right", _tensor(self.right, (nh, na, na), "right action"))
        object.__setattr__(self, "separability",
                           _tensor(self.separability, (na, na), "separability element"))
        object.__setattr__(self, "base_antipode",
                           _tensor(self.base_antipode, (na, na), "base antipode"))


def trivial_kac_action(kac: WeakKacAlgebra, base: FiniteStarAlgebra) -> np.ndarray:
    """Scalar action through the counit; a genuine action whenever the
    counit is multiplicative, i.e. for Kac algebras."""
    return np.einsum("h,ao->hao", kac.counit, np.eye(base.dim)).astype(complex)


def canonical_separability(base: FiniteStarAlgebra, base_antipode: np.ndarray,
                           units: MatrixUnitSystem) -> np.ndarray:
    """Block average of matrix units paired with their antipode partners;
    the standard separability element of a multimatrix algebra."""
    n = base.dim
    s_apply = np.asarray(base_antipode, complex).T
    out = np.zeros((n, n), dtype=complex)
    for blk in units.units:
        dblk = blk.shape[0]
        for r in range(dblk):
            for s in range(dblk):
                out += np.outer(blk[r, s], s_apply @ blk[s, r]) / dblk
    return out


def validate_two_sided_input(inp: TwoSidedInput, cfg: ToleranceConfig) -> Report:
    """Everything the double crossed product construction relies on: a Kac
    acting algebra, commuting module-algebra actions, an anti-automorphism of
    the base, and the separability identities."""
    rep = Report(title=f"two-sided input checks ({inp.name or 'unnamed'})")
    tol = 100 * cfg.abs_tol
    kac, base = inp.kac, inp.base
    nh, na = kac.dim, base.dim
    sa = inp.base_antipode
    sa_apply = sa.T
    pm = inp.separability
    tr = base.trace_vector()

    delta_unit = kac.delta_unit()
    rep.add("acting_algebra_is_kac",
            float(np.abs(delta_unit - np.outer(kac.alg.unit, kac.alg.unit)).max()),
            tol)
    left_spec = ActionSpec(kac, base, inp.left, side="left")
    right_spec = ActionSpec(kac, base, inp.right, side="right")
    rep.extend(validate_action(left_spec, cfg), prefix="left.")
    rep.extend(validate_action(right_spec, cfg), prefix="right.")
    both = np.einsum("hab,kbo->hkao", inp.left, inp.right, optimize=True)
    other = np.einsum("kab,hbo->hkao", inp.right, inp.left, optimize=True)
    rep.add("actions_commute", float(np.abs(both - other).max()), tol)

    square = np.tensordot(base.mult, sa, axes=(2, 0))
    swapped = base.product_table(sa, sa).transpose(1, 0, 2)
    rep.add("base_antipode_antimultiplicative",
            float(np.abs(square - swapped).max()), tol)
    rep.add("base_antipode_unital",
            float(np.abs(sa_apply @ base.unit - base.unit).max()), tol)
    rep.add_flag("base_antipode_invertible",
                 linalg.rank(sa, cfg.rank_tol) == na)
    sa_inv = np.linalg.inv(sa_apply)
    star_round = base.invol.T @ np.conj(sa_apply @ base.invol.T)
    rep.add("base_antipode_star_inverse",
            float(np.abs(star_round - sa_inv).max()), tol)
    rep.add("trace_antipode_invariant",
            float(np.abs(sa @ tr - tr).max()), tol)

    from .algebra import tensor_square_mul, tensor_square_star
    rep.add("separability_idempotent",
            float(np.abs(tensor_square_mul(base, pm, pm) - pm).max()), tol)
    rep.add("separability_selfadjoint",
            float(np.abs(tensor_square_star(base, pm) - pm).max()), tol)
    contracted = np.einsum("ab,ub,auo->o", pm, sa_inv, base.mult, optimize=True)
    rep.add("separability_antipode_right",
            float(np.abs(contracted - base.unit).max()), tol)
    contracted = np.einsum("ab,au,ubo->o", pm, sa, base.mult, optimize=True)
    rep.add("separability_antipode_left",
            float(np.abs(contracted - base.unit).max()), tol)
    rep.add("separability_trace_right",
            float(np.abs(pm @ tr - base.unit).max()), tol)
    rep.add("separability_trace_left",
            float(np.abs(pm.T @ tr - base.unit).max()), tol)
    lhs = np.einsum("ab,hbo->hao", pm, inp.left, optimize=True)
    rhs = np.einsum("ab,hao->hob", pm, inp.right, optimize=True)
    rep.add("separability_action_compatibility",
            float(np.abs(lhs - rhs).max()), tol)
    return rep


def two_sided_crossed_product(inp: TwoSidedInput, cfg: ToleranceConfig,
                              verify: bool = True
                              ) -> tuple[WeakKacAlgebra, Report]:
    """Base (x) kac (x) base with twisted product, triple-leg involution and
    a coproduct that splits the middle factor around the separability
    element.  The result is a weak Kac algebra."""
    rep = validate_two_sided_input(inp, cfg)
    rep.require(WkaError, context="two-sided input")
    kac, base = inp.kac, inp.base
    nh, na = kac.dim, base.dim
    n3 = na * nh * na
    mh, dh = kac.alg.mult, kac.comult
    ma = base.mult
    pm = inp.separability
    lact, ract = inp.left, inp.right
    sa_apply = inp.base_antipode.T
    tr = base.trace_vector()

    # product: (b, h, a)(b', h', a') = b (h1 |> b') (x) h2 h'1 (x) (a <| h'2) a'
    ab1 = np.einsum("cpu,buo->cbpo", lact, ma, optimize=True)
    lp = np.einsum("hcd,cbpo->hdbpo", dh, ab1, optimize=True)
    ab2 = np.einsum("fau,upo->fapo", ract, ma, optimize=True)
    rp = np.einsum("hef,fapo->heapo", dh, ab2, optimize=True)
    x = np.tensordot(lp, mh, axes=(1, 0))        # (h, b, b', bo, e, ho)
    y = np.tensordot(x, rp, axes=(4, 1))         # (h, b, b', bo, ho, h', a, a', ao)
    mult3 = np.ascontiguousarray(
        y.transpose(1, 0, 6, 2, 5, 7, 3, 4, 8).reshape(n3, n3, n3))

    # unit is the plain tensor unit; the separability element enters only
    # through the coproduct, which is what makes the unit group-unlike
    unit3 = np.einsum("b,h,a->bha", base.unit, kac.alg.unit,
                      base.unit).reshape(n3)

    # involution: (b, h, a)* = (h1* |> b*) (x) h2* (x) (a* <| h3*)
    dstar = np.einsum("hp,pce->hce", kac.alg.invol, dh, optimize=True)
    g = np.einsum("hpe,pcd->hcde", dstar, dh, optimize=True)
    t1 = np.einsum("bq,cqo->cbo", base.invol, lact, optimize=True)
    t2 = np.einsum("aq,eqo->eao", base.invol, ract, optimize=True)
    invol3 = np.einsum("hcde,cbp,eaq->bhapdq", g, t1, t2,
                       optimize=True).reshape(n3, n3)

    # coproduct: (b (x) h1 (x) P1) (x) ((h2 |> P2) (x) h3 (x) a)
    g2 = np.einsum("hpe,pcd->hcde", dh, dh, optimize=True)
    mid = np.einsum("hcde,xy,dyb->hcexb", g2, pm, lact, optimize=True)
    comult3 = np.zeros((na, nh, na, na, nh, na, na, nh, na), dtype=complex)
    for b in range(na):
        for a in range(na):
            comult3[b, :, a, b, :, :, :, :, a] = mid.transpose(0, 1, 3, 4, 2)
    comult3 = comult3.reshape(n3, n3, n3)

    # counit: (b, h, a) -> tau(S_A^-1(b) (S_H(h) |> a)); the base-antipode
    # twist on the left leg is forced by the counit axiom against the
    # separability legs in the coproduct
    counit3 = np.einsum("bq,hp,pau,qum,m->bha",
                        np.linalg.inv(inp.base_antipode), kac.antipode,
                        lact, ma, tr, optimize=True).reshape(n3)

    antipode3 = np.einsum("aB,hH,bA->bhaBHA", inp.base_antipode, kac.antipode,
                          np.linalg.inv(inp.base_antipode),
                          optimize=True).reshape(n3, n3)

    label = inp.name or f"two-sided({base.name or 'A'},{kac.name or 'H'})"
    alg3 = FiniteStarAlgebra(mult3, unit3, invol3, name=label)
    wka3 = WeakKacAlgebra(alg=alg3, comult=comult3, counit=counit3,
                          antipode=antipode3, name=label)
    if verify:
        rep.extend(verify_wka(wka3, cfg), prefix="axioms.")
    return wka3, rep


def two_sided_structure_report(wka3: WeakKacAlgebra, inp: TwoSidedInput,
                               cfg: ToleranceConfig) -> Report:
    """Identifies the Cartan subalgebras with the outer tensor legs and
    reports whether the two fixed-point algebras of the base are trivial
    (which decides biconnectedness of the double crossed product)."""
    rep = Report(title="two-sided structure")
    kac, base = inp.kac, inp.base
    nh, na = kac.dim, base.dim
    n3 = na * nh * na
    uh = kac.alg.unit

    left_leg = np.einsum("cb,h,a->cbha", np.eye(na), uh, base.unit,
                         optimize=True).reshape(na, n3).T
    right_leg = np.einsum("b,h,ca->cbha", base.unit, uh, np.eye(na),
                          optimize=True).reshape(na, n3).T
    es_row, et_row = counital_matrices(wka3)
    rep.add_flag("target_cartan_is_left_leg",
                 linalg.subspace_leq(left_leg, et_row.T, cfg.rank_tol)
                 and linalg.subspace_leq(et_row.T, left_leg, cfg.rank_tol))
    rep.add_flag("source_cartan_is_right_leg",
                 linalg.subspace_leq(right_leg, es_row.T, cfg.rank_tol)
                 and linalg.subspace_leq(es_row.T, right_leg, cfg.rank_tol))

    eps_h = kac.counit
    stack_l = np.vstack([inp.left[h].T - eps_h[h] * np.eye(na)
                         for h in range(nh)])
    stack_r = np.vstack([inp.right[h].T - eps_h[h] * np.eye(na)
                         for h in range(nh)])
    fixed_l = linalg.nullspace(stack_l, cfg.rank_tol).shape[1]
    fixed_r = linalg.nullspace(stack_r, cfg.rank_tol).shape[1]
    rep.values["left_fixed_dim"] = fixed_l
    rep.values["right_fixed_dim"] = fixed_r
    rep.add_flag("left_fixed_points_trivial", fixed_l == 1)
    rep.add_flag("right_fixed_points_trivial", fixed_r == 1)
    return rep


def kac_subalgebra_input(hopf: WeakKacAlgebra, rows: np.ndarray,
                         cfg: ToleranceConfig, name: str = "") -> TwoSidedInput:
    """Two-sided data from a Kac subalgebra of the dual: the evaluation
    actions restrict to the subalgebra and the coproduct of its own Haar
    integral is the separability element."""
    from .wedderburn import subalgebra_from_basis
    from .weak_kac import counital_maps, dual, haar_projection

    dual_h = dual(hopf)
    emb = subalgebra_from_basis(dual_h.alg, rows, cfg, name=name or "base")
    na, nh = emb.sub.dim, hopf.dim
    if dual_h.dim != nh:
        raise DimensionMismatch("dual dimension mismatch")

    cop = np.stack([dual_h.comultiply(emb.matrix[:, a]) for a in range(na)])
    # left: pair the second leg; right: pair the first
    left_amb = cop.transpose(2, 0, 1).reshape(nh * na, nh).T
    right_amb = cop.transpose(1, 0, 2).reshape(nh * na, nh).T
    tl = linalg.lstsq_min(emb.matrix, left_amb)
    tr_ = linalg.lstsq_min(emb.matrix, right_amb)
    resid = max(float(np.abs(emb.matrix @ tl - left_amb).max()),
                float(np.abs(emb.matrix @ tr_ - right_amb).max()))
    if resid > 100 * cfg.rank_tol:
        raise SolveError(f"span is not a coideal of the dual ({resid:.2e})")
    left = tl.T.reshape(nh, na, na)
    right = tr_.T.reshape(nh, na, na)

    # restrict the dual structure to the span and take its Haar integral
    both = linalg.lstsq_min(np.kron(emb.matrix, emb.matrix),
                            cop.reshape(na, nh * nh).T)
    resid = float(np.abs(np.kron(emb.matrix, emb.matrix) @ both
                         - cop.reshape(na, nh * nh).T).max())
    if resid > 100 * cfg.rank_tol:
        raise SolveError(f"span is not a sub-bialgebra of the dual ({resid:.2e})")
    comult_sub = both.T.reshape(na, na, na)
    antipode_sub = np.vstack(
        [emb.restrict(dual_h.s_apply(emb.matrix[:, a]), 100 * cfg.rank_tol)
         for a in range(na)])
    sub_wka = WeakKacAlgebra(alg=emb.sub, comult=comult_sub,
                             counit=dual_h.counit @ emb.matrix,
                             antipode=antipode_sub,
                             name=name or "base")
    proj, _ = haar_projection(sub_wka, counital_maps(sub_wka, cfg), cfg)
    pm = sub_wka.comultiply(proj)
    return TwoSidedInput(kac=hopf, base=emb.sub, left=left, right=right,
                         separability=pm, base_antipode=antipode_sub,
                         name=name)
