"""Markov scalar and free module bases over the Cartan subalgebras.

For an indecomposable algebra the counital expectations send the integral
projection to a common positive scalar multiple of the unit.  This module
decides that condition, cross-checks the equivalent numeric criteria
(trace scaling, inclusion-matrix eigenvalue, operator norm, dimension
ratio, integrality), and builds explicit orthonormal module bases for the
source and target expectations whose index element is a scalar.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .algebra import FiniteStarAlgebra, regular_trace
from .config import SolveError, ToleranceConfig, WkaError
from .report import Report
from .wedderburn import (BlockDecomposition, InclusionMatrix, MatrixUnitSystem,
                         block_decompose, inclusion_matrix, matrix_units)
from .weak_kac import (CartanPair, CounitalData, CounitalExpectations, HaarData,
                       WeakKacAlgebra, cartan_subalgebras, counital_expectations,
                       counital_maps, dual, haar_data, hypercenter)


@dataclass(frozen=True)
class MarkovLambda:
    """Image of the integral projection under the source expectation.

    `scalar` is set only when that image is a scalar multiple of the unit;
    `spectrum` always lists its coefficient on each central block.
    """

    scalar: float | None
    central: np.ndarray
    spectrum: tuple[float, ...]
    report: Report


@dataclass(frozen=True)
class EquivalenceData:
    lam: float
    n: int
    inclusion: InclusionMatrix
    report: Report


@dataclass(frozen=True)
class ModuleBasis:
    rows: np.ndarray  # (n, dim) coordinates of the basis elements
    report: Report


@dataclass(frozen=True)
class MarkovData:
    wka: WeakKacAlgebra
    haar: HaarData
    scalar: MarkovLambda
    equivalences: EquivalenceData | None
    source_basis: ModuleBasis | None
    target_basis: ModuleBasis | None
    report: Report

    @property
    def lam(self) -> float | None:
        return self.scalar.scalar

    @property
    def index(self) -> int | None:
        return self.equivalences.n if self.equivalences is not None else None


def markov_lambda(wka: WeakKacAlgebra, haar: HaarData,
                  expectations: CounitalExpectations, cfg: ToleranceConfig,
                  amb_dec: BlockDecomposition | None = None,
                  amb_units: MatrixUnitSystem | None = None) -> MarkovLambda:
    """Decide whether both expectations send the integral to a scalar.

    A non-scalar image is a valid outcome (the algebra is then decomposable)
    and is reported through the block spectrum, not as a failed check.
    """
    alg = wka.alg
    p = haar.projection
    es_p = expectations.source.on_ambient() @ p
    et_p = expectations.target.on_ambient() @ p

    rep = Report(title="Markov scalar")
    rep.add("source_target_agree", float(np.abs(es_p - et_p).max()), cfg.cluster_tol)
    rep.add("central", float(np.abs(alg.lmat(es_p) - alg.rmat(es_p)).max()),
            cfg.cluster_tol)
    rep.add("trace_preserved", float(abs(haar.trace @ es_p - haar.trace @ p)),
            cfg.cluster_tol)

    if amb_dec is None:
        amb_dec = block_decompose(alg, cfg)
    coeffs = linalg.lstsq_min(amb_dec.central_projections.T, es_p)
    rep.add("central_block_expansion",
            float(np.abs(amb_dec.central_projections.T @ coeffs - es_p).max()),
            cfg.cluster_tol)
    rep.add("spectrum_real", float(np.abs(coeffs.imag).max()), cfg.cluster_tol)
    spectrum = tuple(float(c) for c in coeffs.real)
    if amb_units is not None:
        # coefficient on block i must be tau(e_kk)/d_i
        dev = 0.0
        for i, units in enumerate(amb_units.units):
            ti = complex(haar.trace @ units[0, 0])
            dev = max(dev, abs(coeffs[i] - ti / units.shape[0]))
        rep.add("block_trace_formula", float(dev), cfg.cluster_tol)

    fit = complex(np.vdot(alg.unit, es_p) / np.vdot(alg.unit, alg.unit))
    scalar_res = float(np.abs(es_p - fit * alg.unit).max())
    rep.values["scalar_residual"] = scalar_res
    is_scalar = scalar_res <= cfg.cluster_tol
    rep.values["is_scalar"] = is_scalar
    scalar = None
    if is_scalar:
        rep.add("scalar_imaginary_part", abs(fit.imag), cfg.cluster_tol)
        rep.add_flag("scalar_positive", fit.real > cfg.cluster_tol)
        scalar = float(fit.real)
    return MarkovLambda(scalar=scalar, central=es_p, spectrum=spectrum, report=rep)


_CRITERIA = (
    "trace_scales_regular_trace",
    "inclusion_eigen_inverse",
    "operator_norm_identity",
    "dimension_ratio_identity",
    "index_integral",
)


def verify_equivalences(wka: WeakKacAlgebra, haar: HaarData, cartan: CartanPair,
                        lam: float, cfg: ToleranceConfig,
                        amb_dec: BlockDecomposition | None = None) -> EquivalenceData:
    """Cross-check the equivalent numeric forms of the Markov condition.

    The eigenvalue relation is checked with 1/lam on the right-hand side;
    the residual for the reciprocal exponent is recorded as a value so the
    two conventions stay distinguishable in reports.
    """
    alg = wka.alg
    rep = Report(title="Markov criteria")
    if amb_dec is None:
        amb_dec = block_decompose(alg, cfg)
    incl = inclusion_matrix(cartan.source, cfg, sub_dec=cartan.source_blocks,
                            amb_dec=amb_dec, sub_units=cartan.source_units)
    lam_inv = 1.0 / lam
    lmat = incl.entries.astype(float)
    gram = lmat @ lmat.T
    m_vec = np.array(incl.sub_dims, dtype=float)

    tr = regular_trace(alg)
    crit = {
        "trace_scales_regular_trace": float(np.abs(haar.trace - lam * tr).max()),
        "inclusion_eigen_inverse": float(np.abs(gram @ m_vec - lam_inv * m_vec).max()),
        "operator_norm_identity": abs(float(np.linalg.svd(lmat, compute_uv=False)[0] ** 2)
                                      - lam_inv),
        "dimension_ratio_identity": abs(alg.dim / cartan.source.sub.dim - lam_inv),
        "index_integral": abs(lam_inv - round(lam_inv)),
    }
    for name in _CRITERIA:
        rep.add(name, crit[name], cfg.cluster_tol)
    rep.values["stated_exponent_residual"] = float(
        np.abs(gram @ m_vec - lam * m_vec).max())

    estimates = {
        "trace_fit": float(np.vdot(tr, haar.trace).real / np.vdot(tr, tr).real),
        "rayleigh": float((m_vec @ m_vec) / (m_vec @ gram @ m_vec)),
        "dimension_ratio": cartan.source.sub.dim / alg.dim,
        "operator_norm": float(1.0 / np.linalg.svd(lmat, compute_uv=False)[0] ** 2),
    }
    rep.add("estimates_agree",
            max(abs(v - lam) for v in estimates.values()), cfg.cluster_tol)

    failed = [name for name in _CRITERIA
              if crit[name] > cfg.cluster_tol]
    if failed and len(failed) < len(_CRITERIA):
        raise WkaError(
            "equivalent Markov criteria disagree, failing: " + ", ".join(failed))

    n = int(round(lam_inv))
    rep.values["lambda"] = lam
    rep.values["index"] = n
    rep.values["inclusion_matrix"] = tuple(map(tuple, incl.entries.tolist()))
    return EquivalenceData(lam=lam, n=n, inclusion=incl, report=rep)


def _expectation_gram(alg: FiniteStarAlgebra, exp_amb: np.ndarray,
                      cols: np.ndarray, f11: np.ndarray) -> tuple[np.ndarray, float]:
    """Scalar Gram matrix of E(y_i^* y_j) = g_ij f11 on an ideal K f11."""
    k = cols.shape[1]
    stars = np.array([alg.star(cols[:, i]) for i in range(k)])
    prods = alg.product_table(stars, cols.T.copy())
    images = prods @ exp_amb.T
    norm = float(np.vdot(f11, f11).real)
    g = np.tensordot(images, np.conj(f11), axes=(2, 0)) / norm
    residual = float(np.abs(images - g[:, :, None] * f11).max())
    return g, residual


def _orthonormal_ideal_basis(alg: FiniteStarAlgebra, exp_amb: np.ndarray,
                             cols: np.ndarray, f11: np.ndarray,
                             cfg: ToleranceConfig) -> tuple[np.ndarray, float]:
    """Columns of the ideal made orthonormal for the expectation pairing.

    Symmetric orthogonalization; the Gram spectrum does not depend on the
    orthonormal spanning set chosen, so a near-singular Gram means the
    expectation is not faithful on the ideal and we give up.
    """
    g, extract_res = _expectation_gram(alg, exp_amb, cols, f11)
    g = (g + g.conj().T) / 2
    evals, evecs = np.linalg.eigh(g)
    if evals.min() <= cfg.rank_tol * max(evals.max(), 1.0):
        raise SolveError("expectation pairing is singular on a corner ideal")
    return cols @ (evecs / np.sqrt(evals)), extract_res


def _verify_module_basis(alg: FiniteStarAlgebra, exp_amb: np.ndarray,
                         emb_matrix: np.ndarray, rows: np.ndarray,
                         rep: Report, cfg: ToleranceConfig) -> None:
    n = rows.shape[0]
    stars = np.array([alg.star(x) for x in rows])
    prods = alg.product_table(stars, rows)
    pair = prods @ exp_amb.T
    delta = np.einsum("ab,c->abc", np.eye(n), alg.unit)
    rep.add("orthonormal", float(np.abs(pair - delta).max()), cfg.cluster_tol)

    recon = np.zeros((alg.dim, alg.dim), dtype=complex)
    for nu in range(n):
        recon += alg.lmat(rows[nu]) @ exp_amb @ alg.lmat(stars[nu])
    rep.add("reconstruction",
            float(np.abs(recon - np.eye(alg.dim)).max()), cfg.cluster_tol)

    index_el = np.zeros(alg.dim, dtype=complex)
    for nu in range(n):
        index_el += alg.mul(rows[nu], stars[nu])
    rep.add("index_scalar", float(np.abs(index_el - n * alg.unit).max()),
            cfg.cluster_tol)

    sub_dim = emb_matrix.shape[1]
    bmat = np.hstack([alg.lmat(rows[nu]) @ emb_matrix for nu in range(n)])
    rep.add_flag("independent_over_subalgebra",
                 linalg.rank(bmat, cfg.rank_tol) == n * sub_dim)


def source_expectation_basis(wka: WeakKacAlgebra, cartan: CartanPair,
                             expectations: CounitalExpectations, n: int,
                             cfg: ToleranceConfig) -> ModuleBasis:
    """Free module basis for the source expectation.

    Follows the corner-ideal construction: orthonormalize K f_11 for each
    Cartan block, translate along the block row with the matrix units, and
    mix the translates with roots of unity so the assembled family is
    orthonormal for the expectation pairing.
    """
    alg = wka.alg
    exp_amb = expectations.source.on_ambient()
    emb = cartan.source
    rep = Report(title="source module basis")

    pieces = []
    extract_worst = 0.0
    for bi, blk in enumerate(cartan.source_units.units):
        m = blk.shape[0]
        f_row = np.array([emb.embed(blk[0, t]) for t in range(m)])
        cols = linalg.orth(alg.rmat(f_row[0]), cfg.rank_tol)
        if cols.shape[1] != n * m:
            raise WkaError(
                f"corner ideal of Cartan block {bi} has dimension "
                f"{cols.shape[1]}, expected {n * m}")
        ortho, res = _orthonormal_ideal_basis(alg, exp_amb, cols, f_row[0], cfg)
        extract_worst = max(extract_worst, res)
        translates = np.stack([alg.rmat(f_row[t]) @ ortho for t in range(m)])
        pieces.append(translates)
    rep.add("pairing_scalar_on_ideals", extract_worst, cfg.cluster_tol)

    rows = np.zeros((n, alg.dim), dtype=complex)
    for translates in pieces:
        m = translates.shape[0]
        phase = np.exp(2j * np.pi * np.outer(np.arange(m), np.arange(m)) / m)
        phase = phase / np.sqrt(m)
        for nu in range(n):
            for s in range(m):
                for r in range(m):
                    rows[nu] += phase[s, r] * translates[r][:, nu + s * n]

    _verify_module_basis(alg, exp_amb, emb.matrix, rows, rep, cfg)
    rep.require(WkaError, "source module basis")
    return ModuleBasis(rows=rows, report=rep)


def target_basis_from_source(wka: WeakKacAlgebra, cartan: CartanPair,
                             expectations: CounitalExpectations,
                             source_rows: np.ndarray,
                             cfg: ToleranceConfig) -> ModuleBasis:
    """Module basis for the target expectation: antipode of the starred rows."""
    alg = wka.alg
    rows = np.array([wka.s_apply(alg.star(x)) for x in source_rows])
    rep = Report(title="target module basis")
    _verify_module_basis(alg, expectations.target.on_ambient(),
                         cartan.target.matrix, rows, rep, cfg)
    rep.require(WkaError, "target module basis")
    return ModuleBasis(rows=rows, report=rep)


def markov_trace_check(wka: WeakKacAlgebra, haar: HaarData,
                       incl: InclusionMatrix, lam: float, cfg: ToleranceConfig,
                       amb_units: MatrixUnitSystem | None = None) -> Report:
    """Trace vector lam * d is an eigenvector of the transposed product."""
    rep = Report(title="Markov trace vector")
    lmat = incl.entries.astype(float)
    d_vec = np.array(incl.amb_dims, dtype=float)
    t_vec = lam * d_vec
    rep.add("eigen_relation",
            float(np.abs(lmat.T @ (lmat @ t_vec) - t_vec / lam).max()),
            cfg.cluster_tol)
    if amb_units is not None:
        dev = 0.0
        for i, units in enumerate(amb_units.units):
            dev = max(dev, abs(complex(haar.trace @ units[0, 0]) - t_vec[i]))
        rep.add("trace_vector_matches", float(dev), cfg.cluster_tol)
    rep.values["trace_vector"] = tuple(float(t) for t in t_vec)
    return rep


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_dimension_report(wka: WeakKacAlgebra, cfg: ToleranceConfig,
                           counital: CounitalData | None = None) -> Report:
    """Structure forced by an indecomposable algebra of prime dimension.

    Applicable inputs must have trivial Cartan subalgebras and a basis of
    group-like elements closed under multiplication, which pins the algebra
    down as the group algebra of a cyclic group of prime order.
    """
    alg = wka.alg
    rep = Report(title="prime dimension structure")
    rep.values["dimension"] = wka.dim
    if counital is None:
        counital = counital_maps(wka, cfg)
    hyper = hypercenter(wka, counital, cfg)
    applicable = _is_prime(wka.dim) and hyper.shape[0] == 1
    rep.values["applicable"] = applicable
    if not applicable:
        return rep

    source_dim = linalg.orth(counital.source_mat.T, cfg.rank_tol).shape[1]
    rep.add_flag("cartan_trivial", source_dim == 1)
    rep.add("commutative",
            float(np.abs(alg.mult - alg.mult.transpose(1, 0, 2)).max()),
            cfg.cluster_tol)
    rep.add("cocommutative",
            float(np.abs(wka.comult - wka.comult.transpose(0, 2, 1)).max()),
            cfg.cluster_tol)

    dual_dec = block_decompose(dual(wka).alg, cfg)
    lines = (dual_dec.num_blocks == wka.dim
             and all(d == 1 for d in dual_dec.block_dims))
    rep.add_flag("dual_splits_into_lines", lines)
    if not lines:
        return rep

    # group-like elements are the characters of the dual algebra
    glikes = np.linalg.inv(dual_dec.central_projections).T
    coprod = max(float(np.abs(wka.comultiply(g) - np.outer(g, g)).max())
                 for g in glikes)
    rep.add("group_like_coproduct", coprod, cfg.cluster_tol)
    rep.add("group_like_counit",
            max(abs(wka.eps(g) - 1.0) for g in glikes), cfg.cluster_tol)
    rep.add("unit_is_group_like",
            min(float(np.abs(g - alg.unit).max()) for g in glikes),
            cfg.cluster_tol)
    closure = 0.0
    for g in glikes:
        for h in glikes:
            prod = alg.mul(g, h)
            closure = max(closure,
                          min(float(np.abs(prod - g2).max()) for g2 in glikes))
    rep.add("group_closure", closure, cfg.cluster_tol)
    rep.add("antipode_gives_inverses",
            max(float(np.abs(alg.mul(wka.s_apply(g), g) - alg.unit).max())
                for g in glikes),
            cfg.cluster_tol)
    rep.values["group_order"] = wka.dim
    return rep


def markov_analysis(wka: WeakKacAlgebra, cfg: ToleranceConfig,
                    counital: CounitalData | None = None,
                    cartan: CartanPair | None = None,
                    haar: HaarData | None = None,
                    expectations: CounitalExpectations | None = None) -> MarkovData:
    """Full Markov pipeline; precomputed analysis pieces may be passed in."""
    if counital is None:
        counital = counital_maps(wka, cfg)
    if cartan is None:
        cartan = cartan_subalgebras(wka, counital, cfg)
        cartan.report.require(WkaError, "Cartan subalgebras")
    if haar is None:
        haar = haar_data(wka, counital, cfg)
        haar.report.require(WkaError, "Haar data")
    if expectations is None:
        expectations = counital_expectations(wka, cartan, haar, cfg)
        expectations.report.require(WkaError, "counital expectations")

    alg = wka.alg
    amb_dec = block_decompose(alg, cfg)
    amb_units = matrix_units(alg, amb_dec, cfg)

    rep = Report(title="Markov analysis")
    rep.values["name"] = wka.name
    ml = markov_lambda(wka, haar, expectations, cfg, amb_dec, amb_units)
    rep.extend(ml.report, prefix="scalar.")
    rep.values["spectrum"] = ml.spectrum
    if ml.scalar is None:
        rep.values["markov"] = False
        return MarkovData(wka=wka, haar=haar, scalar=ml, equivalences=None,
                          source_basis=None, target_basis=None, report=rep)

    haar = replace(haar, lambda_candidate=complex(ml.scalar))
    eq = verify_equivalences(wka, haar, cartan, ml.scalar, cfg, amb_dec)
    rep.extend(eq.report, prefix="criteria.")
    rep.extend(markov_trace_check(wka, haar, eq.inclusion, eq.lam, cfg, amb_units),
               prefix="trace_vector.")
    sb = source_expectation_basis(wka, cartan, expectations, eq.n, cfg)
    rep.extend(sb.report, prefix="source_basis.")
    tb = target_basis_from_source(wka, cartan, expectations, sb.rows, cfg)
    rep.extend(tb.report, prefix="target_basis.")
    rep.extend(prime_dimension_report(wka, cfg, counital), prefix="prime.")
    rep.values["markov"] = True
    rep.values["lambda"] = eq.lam
    rep.values["index"] = eq.n
    return MarkovData(wka=wka, haar=haar, scalar=ml, equivalences=eq,
                      source_basis=sb, target_basis=tb, report=rep)
