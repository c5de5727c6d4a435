"""Iterated crossed product towers, commuting squares, index arithmetic.

The upper chain starts at the algebra itself and crosses alternately with
the dual and the original algebra; the lower chain starts at the source
Cartan subalgebra and stays one crossing behind.  Every new floor is checked
against the extension characterization: it is spanned by conjugates of one
projection that implements the previous conditional expectation, and the
extended trace is Markov with the same scalar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .algebra import FiniteStarAlgebra, commutant, star_isomorphism_check
from .config import ToleranceConfig, WkaError
from .crossed import (CrossedProduct, crossed_product, dual_action,
                      dual_action_on_crossed, module_expectation,
                      validate_action)
from .expectations import ConditionalExpectation, trace_conditional_expectation
from .markov import MarkovData, markov_analysis
from .report import Report
from .wedderburn import (BlockDecomposition, InclusionMatrix,
                         SubalgebraEmbedding, block_decompose,
                         generated_subalgebra, inclusion_matrix,
                         subalgebra_from_basis)
from .weak_kac import (CounitalExpectations, WeakKacAlgebra, WeakKacData,
                       analyze, cartan_subalgebras, counital_expectations,
                       counital_maps, dual, haar_data)


@dataclass(frozen=True)
class TowerContext:
    """Analysis products shared by every tower computation on one algebra."""

    wka: WeakKacAlgebra
    data: WeakKacData
    markov: MarkovData
    dual_expectations: CounitalExpectations
    dual_cartan_source: SubalgebraEmbedding
    dual_integral: np.ndarray  # Haar projection of the dual algebra


def tower_context(wka: WeakKacAlgebra, cfg: ToleranceConfig,
                  data: WeakKacData | None = None,
                  markov: MarkovData | None = None) -> TowerContext:
    if data is None:
        data = analyze(wka, cfg)
    if markov is None:
        markov = markov_analysis(wka, cfg, counital=data.counital,
                                 cartan=data.cartan, haar=data.haar,
                                 expectations=data.expectations)
    if markov.index is None:
        raise WkaError("tower construction needs the integer Markov index")
    dual_wka = data.dual_wka
    dcu = counital_maps(dual_wka, cfg)
    dca = cartan_subalgebras(dual_wka, dcu, cfg)
    dca.report.require(WkaError, "dual Cartan subalgebras")
    dha = haar_data(dual_wka, dcu, cfg)
    dha.report.require(WkaError, "dual Haar data")
    dex = counital_expectations(dual_wka, dca, dha, cfg)
    dex.report.require(WkaError, "dual counital expectations")
    return TowerContext(wka=wka, data=data, markov=markov,
                        dual_expectations=dex,
                        dual_cartan_source=dca.source,
                        dual_integral=dha.projection)


@dataclass(frozen=True)
class TowerStage:
    """One floor of the upper chain with its lower-row companion."""

    index: int
    algebra: FiniteStarAlgebra
    crossed: CrossedProduct | None       # None at the base floor
    acting: WeakKacAlgebra | None
    embed_prev: np.ndarray | None        # columns: previous floor embedded
    inclusion: InclusionMatrix | None    # previous floor inside this one
    jones: np.ndarray | None
    expectation: ConditionalExpectation | None  # onto the previous floor
    trace: np.ndarray
    lower: SubalgebraEmbedding
    lower_inclusion: InclusionMatrix


@dataclass(frozen=True)
class Tower:
    wka: WeakKacAlgebra
    lam: float
    index: int
    stages: tuple[TowerStage, ...]
    capped: bool
    report: Report

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.algebra.dim for s in self.stages)


def _trace_report(alg: FiniteStarAlgebra, tr: np.ndarray, rep: Report,
                  prefix: str, cfg: ToleranceConfig) -> None:
    tol = 100 * cfg.abs_tol
    bil = np.tensordot(alg.mult, tr, axes=(2, 0))
    rep.add(prefix + "trace_tracial", float(np.abs(bil - bil.T).max()), tol)
    gram = alg.invol @ bil
    rep.add(prefix + "trace_form_hermitian", linalg.herm_deviation(gram), tol)
    rep.add_flag(prefix + "trace_positive",
                 linalg.min_eig_hermitian(gram) > -tol)


def _stage_checks(alg: FiniteStarAlgebra, inc: np.ndarray, e: np.ndarray,
                  prev_exp_amb: np.ndarray, sub2_cols: np.ndarray,
                  exp: ConditionalExpectation, lam: float,
                  cfg: ToleranceConfig) -> Report:
    """Extension characterization of one floor: its Jones projection
    compresses onto the floor below the previous one and conjugates of it
    span everything, and the expectation of the projection is the Markov
    scalar."""
    rep = Report(title="stage extension checks")
    tol = 100 * cfg.abs_tol
    rep.add("jones_idempotent", float(np.abs(alg.mul(e, e) - e).max()), tol)
    rep.add("jones_selfadjoint", float(np.abs(alg.star(e) - e).max()), tol)

    xe = alg.rmat(e) @ inc                       # columns x e
    lhs = alg.lmat(e) @ xe                       # columns e x e
    rhs = alg.rmat(e) @ (inc @ prev_exp_amb)     # columns E(x) e
    rep.add("jones_implements_expectation", float(np.abs(lhs - rhs).max()), tol)

    cols_ae = alg.rmat(e) @ sub2_cols
    rep.add_flag("sub_times_jones_injective",
                 linalg.rank(cols_ae, cfg.rank_tol) == sub2_cols.shape[1])

    spans = alg.product_table(xe.T, inc.T).reshape(-1, alg.dim)
    rep.add_flag("jones_conjugates_span",
                 linalg.rank(spans.T, cfg.rank_tol) == alg.dim)

    scalar = exp.apply(e)
    rep.add("markov_extension_scalar",
            float(np.abs(scalar - lam * exp.emb.sub.unit).max()), tol)
    return rep


def build_tower(wka: WeakKacAlgebra, depth: int, cfg: ToleranceConfig,
                ctx: TowerContext | None = None, cap: int = 4096,
                samples: int = 50) -> Tower:
    """Upper chain of iterated crossed products with per-floor verification.

    Exceeding the dimension cap stops the iteration early; the partial tower
    carries a warning instead of an error.
    """
    if ctx is None:
        ctx = tower_context(wka, cfg)
    data, md = ctx.data, ctx.markov
    n = md.index
    lam = 1.0 / n
    dual_wka = data.dual_wka
    rep = Report(title=f"tower({wka.name or 'K'}, depth {depth})")
    rep.values["index"] = n

    tr0 = data.haar.trace / (data.haar.trace @ wka.alg.unit)
    lower0 = data.cartan.source
    stages = [TowerStage(index=0, algebra=wka.alg, crossed=None, acting=None,
                         embed_prev=None, inclusion=None, jones=None,
                         expectation=None, trace=tr0, lower=lower0,
                         lower_inclusion=inclusion_matrix(lower0, cfg))]
    # expectation onto the floor below the base, used by the first Jones check
    prev_exp_amb = data.expectations.target.on_ambient()
    sub2_cols = data.cartan.target.matrix
    capped = False

    for i in range(1, depth + 1):
        odd = i % 2 == 1
        acting = dual_wka if odd else wka
        prev = stages[-1]
        if n * prev.algebra.dim > cap:
            rep.warn(f"stage {i} would exceed the dimension cap {cap}; "
                     "tower truncated")
            capped = True
            break
        if i == 1:
            act = dual_action(wka, dual_wka, side="left")
        else:
            act, arep = dual_action_on_crossed(prev.crossed, acting, cfg)
            rep.extend(arep, prefix=f"stage{i}.")
        rep.extend(validate_action(act, cfg), prefix=f"stage{i}.action.")
        cp = crossed_product(act, cfg, samples=samples,
                             name=f"{wka.name or 'K'}#stage{i}")
        rep.extend(cp.report, prefix=f"stage{i}.")
        alg = cp.algebra
        rep.add_flag(f"stage{i}.dimension_growth_exact",
                     alg.dim == n * prev.algebra.dim)

        integral = ctx.dual_integral if odd else data.haar.projection
        e = cp.include_kac @ integral
        exps = ctx.dual_expectations if odd else data.expectations
        exp, erep = module_expectation(cp, exps, cfg)
        rep.extend(erep, prefix=f"stage{i}.expectation.")
        rep.extend(_stage_checks(alg, cp.include_module, e, prev_exp_amb,
                                 cp.include_module @ sub2_cols, exp, lam, cfg),
                   prefix=f"stage{i}.")

        tr = prev.trace @ exp.matrix
        rep.add(f"stage{i}.trace_extends",
                float(np.abs(tr @ cp.include_module - prev.trace).max()),
                100 * cfg.abs_tol)
        _trace_report(alg, tr, rep, f"stage{i}.", cfg)

        emb_prev = SubalgebraEmbedding(sub=prev.algebra, amb=alg,
                                       matrix=cp.include_module)
        inc = inclusion_matrix(emb_prev, cfg)
        rep.values[f"stage{i}.inclusion"] = inc.entries.tolist()

        if i == 1:
            lower = subalgebra_from_basis(alg, cp.include_kac.T, cfg,
                                          name="dual image")
            # the embedded source Cartan of the algebra and the target Cartan
            # of the dual land on the same classes
            zt = ctx.dual_expectations.target.emb.matrix
            u = act.unit_images()
            ident = cp.include_kac @ zt - cp.include_module @ (u.T @ zt)
            rep.add("stage1.cartan_identification",
                    float(np.abs(ident).max()), 100 * cfg.abs_tol)
        else:
            gens = np.hstack([cp.include_module @ prev.lower.matrix,
                              cp.include_kac])
            lower = generated_subalgebra(alg, gens.T, cfg, name="lower row")
        rep.add_flag(f"stage{i}.lower_row_dimension",
                     lower.sub.dim == wka.dim * n ** (i - 1))
        lower_inc = inclusion_matrix(lower, cfg)
        rep.values[f"stage{i}.lower_inclusion"] = lower_inc.entries.tolist()

        stages.append(TowerStage(index=i, algebra=alg, crossed=cp,
                                 acting=acting, embed_prev=cp.include_module,
                                 inclusion=inc, jones=e, expectation=exp,
                                 trace=tr, lower=lower,
                                 lower_inclusion=lower_inc))
        prev_exp_amb = cp.include_module @ exp.matrix
        sub2_cols = cp.include_module
    rep.values["dims"] = [s.algebra.dim for s in stages]
    return Tower(wka=wka, lam=lam, index=n, stages=tuple(stages),
                 capped=capped, report=rep)


def commuting_square_check(wka: WeakKacAlgebra, cfg: ToleranceConfig,
                           ctx: TowerContext | None = None,
                           samples: int = 50) -> Report:
    """The first floor over a connected algebra forms a symmetric commuting
    square: conditioning onto either embedded factor and then onto the other
    equals the expectation onto the shared corner, which is the source Cartan
    image and at the same time the dual target Cartan image."""
    if ctx is None:
        ctx = tower_context(wka, cfg)
    data = ctx.data
    rep = Report(title=f"commuting square ({wka.name or 'K'})")
    tol = 100 * cfg.abs_tol
    act = dual_action(wka, data.dual_wka, side="left")
    cp = crossed_product(act, cfg, samples=samples)
    rep.extend(cp.report, prefix="floor.")
    exp, erep = module_expectation(cp, ctx.dual_expectations, cfg)
    rep.extend(erep, prefix="expectation.")
    floor = cp.algebra
    tr = (data.haar.trace / (data.haar.trace @ wka.alg.unit)) @ exp.matrix

    conditioned = exp.matrix @ cp.include_kac     # columns E(i(phi))
    u = act.unit_images()
    ks_cols = data.cartan.source.matrix
    worst = max(linalg.span_residual(ks_cols, conditioned[:, j])
                for j in range(conditioned.shape[1]))
    rep.add("conditioned_dual_lands_in_source_cartan", worst, tol)

    # on the dual target Cartan the balancing relation makes the expectation
    # act by applying the functional to the unit
    zt = ctx.dual_expectations.target.emb.matrix
    rep.add("corner_expectation_explicit",
            float(np.abs(conditioned @ zt - u.T @ zt).max()), tol)

    down = cp.include_module @ exp.matrix
    dual_emb = SubalgebraEmbedding(sub=data.dual_wka.alg, amb=floor,
                                   matrix=cp.include_kac)
    right = trace_conditional_expectation(dual_emb, tr, cfg).on_ambient()
    corner_emb = subalgebra_from_basis(floor, (cp.include_module @ ks_cols).T,
                                       cfg, name="corner")
    corner = trace_conditional_expectation(corner_emb, tr, cfg).on_ambient()
    rep.add("square_commutes", float(np.abs(down @ right - corner).max()), tol)
    rep.add("square_commutes_reversed",
            float(np.abs(right @ down - corner).max()), tol)

    prods = floor.product_table(cp.include_module.T,
                                cp.include_kac.T).reshape(-1, cp.dim)
    rep.add_flag("factors_span_floor",
                 linalg.rank(prods.T, cfg.rank_tol) == cp.dim)
    return rep


def _composite_quotient(stages: list[CrossedProduct],
                        factor_dims: list[int],
                        left_nested: bool) -> tuple[np.ndarray, np.ndarray]:
    """Projection raw tensor -> top classes and section back, composed over
    the whole chain.  ``factor_dims`` lists the dimensions of the tensor
    factors added after the innermost crossed product."""
    proj = stages[0].projection
    lift = stages[0].section
    for cp, extra in zip(stages[1:], factor_dims):
        if left_nested:
            proj = cp.projection @ np.kron(proj, np.eye(extra))
            lift = np.kron(lift, np.eye(extra)) @ cp.section
        else:
            proj = cp.projection @ np.kron(np.eye(extra), proj)
            lift = np.kron(np.eye(extra), lift) @ cp.section
    return proj, lift


def left_right_iso_check(wka: WeakKacAlgebra, cfg: ToleranceConfig,
                         depth: int = 1, ctx: TowerContext | None = None,
                         samples: int = 50) -> Report:
    """The left-nested and right-nested iterated crossed products carry the
    same multiplication on identical raw coordinates; the induced map on
    classes is a *-isomorphism."""
    if depth not in (1, 2):
        raise ValueError("only depths 1 and 2 are supported")
    if ctx is None:
        ctx = tower_context(wka, cfg)
    dual_wka = ctx.data.dual_wka
    nk, nf = wka.dim, dual_wka.dim
    rep = Report(title=f"left/right iterated products ({wka.name or 'K'})")

    cp_a = crossed_product(dual_action(wka, dual_wka, "left"), cfg,
                           samples=samples)
    rep.extend(cp_a.report, prefix="left.floor1.")
    left_chain = [cp_a]
    cp_b = crossed_product(dual_action(dual_wka, wka, "right"), cfg,
                           samples=samples)
    rep.extend(cp_b.report, prefix="right.floor1.")
    right_chain = [cp_b]
    left_extra: list[int] = []
    right_extra: list[int] = []

    if depth == 2:
        for acting, extra, tag in ((wka, nk, "floor2"), (dual_wka, nf, "floor3")):
            act, arep = dual_action_on_crossed(left_chain[-1], acting, cfg)
            rep.extend(arep, prefix=f"left.{tag}.")
            left_chain.append(crossed_product(act, cfg, samples=samples))
            rep.extend(left_chain[-1].report, prefix=f"left.{tag}.")
            left_extra.append(extra)
        for acting, extra, tag in ((dual_wka, nf, "floor2"), (wka, nk, "floor3")):
            act, arep = dual_action_on_crossed(right_chain[-1], acting, cfg)
            rep.extend(arep, prefix=f"right.{tag}.")
            right_chain.append(crossed_product(act, cfg, samples=samples))
            rep.extend(right_chain[-1].report, prefix=f"right.{tag}.")
            right_extra.append(extra)

    proj_a, lift_a = _composite_quotient(left_chain, left_extra,
                                         left_nested=True)
    proj_b, _ = _composite_quotient(right_chain, right_extra,
                                    left_nested=False)
    cols = proj_b @ lift_a
    rep.add("identity_map_well_defined",
            float(np.abs(cols @ proj_a - proj_b).max()), 100 * cfg.abs_tol)
    rep.extend(star_isomorphism_check(left_chain[-1].algebra,
                                      right_chain[-1].algebra, cols, cfg))
    return rep


def relative_commutant_checks(cp: CrossedProduct, cfg: ToleranceConfig,
                              samples: int = 50) -> Report:
    """Inside the next floor, the commutant of the new acting image meets
    the old floor exactly in the embedded module algebra."""
    rep = Report(title="relative commutant")
    dual_wka = dual(cp.action.wka)
    act2, arep = dual_action_on_crossed(cp, dual_wka, cfg)
    rep.extend(arep)
    cp2 = crossed_product(act2, cfg, samples=samples)
    rep.extend(cp2.report, prefix="floor.")

    cent_rows = commutant(cp2.algebra, cp2.include_kac.T, cfg)
    meet = linalg.subspace_intersection(cent_rows.T, cp2.include_module,
                                        cfg.rank_tol)
    target = cp2.include_module @ cp.include_module
    forward = linalg.subspace_leq(meet, target, cfg.rank_tol)
    backward = linalg.subspace_leq(target, meet, cfg.rank_tol)
    rep.values["intersection_dim"] = int(linalg.rank(meet, cfg.rank_tol))
    rep.values["module_dim"] = cp.action.module.dim
    rep.add_flag("commutant_meets_floor_in_module", forward and backward)
    if not (forward and backward):
        raise WkaError("triple relative commutant differs from the embedded "
                       "module algebra")
    return rep


@dataclass(frozen=True)
class ArithmeticReport:
    """Integer index invariants of a biconnected algebra."""

    index: int                       # inverse Markov scalar
    cartan_dim: int                  # d
    cartan_blocks: tuple[int, ...]   # m_alpha
    ambient_blocks: tuple[int, ...]  # d_i
    first_kind: tuple[int, ...]      # m_alpha^2 n / d^2
    second_kind: tuple[int, ...]     # (d_i / d)^2
    report: Report


def arithmetic_report(wka: WeakKacAlgebra, cfg: ToleranceConfig,
                      md: MarkovData | None = None,
                      cartan_sub: FiniteStarAlgebra | None = None,
                      amb_dec: BlockDecomposition | None = None
                      ) -> ArithmeticReport:
    """Reduced subfactor indices attached to the minimal projections of the
    Cartan subalgebra and to the irreducible representations; all are
    integers for a biconnected algebra, which forces the divisibility flags.
    """
    if md is None:
        md = markov_analysis(wka, cfg)
    if md.index is None:
        raise WkaError("index arithmetic needs the integer Markov index")
    n = int(md.index)
    if cartan_sub is None:
        counital = counital_maps(wka, cfg)
        cartan_sub = cartan_subalgebras(wka, counital, cfg).source.sub
    if amb_dec is None:
        amb_dec = block_decompose(wka.alg, cfg)
    m_vec = tuple(int(x) for x in block_decompose(cartan_sub, cfg).block_dims)
    d_vec = tuple(int(x) for x in amb_dec.block_dims)
    d = int(cartan_sub.dim)

    rep = Report(title=f"index arithmetic ({wka.name or 'K'})")
    rep.values["index"] = n
    rep.values["cartan_dim"] = d
    rep.values["cartan_blocks"] = list(m_vec)
    rep.values["ambient_blocks"] = list(d_vec)
    rep.add_flag("dimension_product", wka.dim == d * n)
    rep.add_flag("cartan_square_divides_reduced_indices",
                 all(m * m * n % (d * d) == 0 for m in m_vec))
    rep.add_flag("cartan_dim_divides_block_dims",
                 all(di % d == 0 for di in d_vec))
    rep.add_flag("cartan_square_divides_dimension", wka.dim % (d * d) == 0)
    rep.add_flag("cartan_dim_divides_index", n % d == 0)

    first = tuple(m * m * n // (d * d) for m in m_vec)
    second = tuple((di // d) ** 2 for di in d_vec)
    rep.values["first_kind_indices"] = list(first)
    rep.values["second_kind_indices"] = list(second)

    prime = n > 1 and all(n % k for k in range(2, int(n ** 0.5) + 1))
    rep.values["index_prime"] = prime
    if prime:
        rep.add_flag("prime_index_forces_group_algebra",
                     d == 1 and wka.dim == n)
    return ArithmeticReport(index=n, cartan_dim=d, cartan_blocks=m_vec,
                            ambient_blocks=d_vec, first_kind=first,
                            second_kind=second, report=rep)
