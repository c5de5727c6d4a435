import numpy as np
import pytest

from weakkac import algebra
from weakkac.config import DimensionMismatch, NotStarAlgebra


def test_matrix_algebra_verifies(cfg):
    m2 = algebra.matrix_algebra(2)
    rep = algebra.verify_star_algebra(m2, cfg)
    assert rep.ok
    assert rep.max_residual < 1e-12


def test_matrix_algebra_products(cfg):
    m2 = algebra.matrix_algebra(2)
    # basis order is row-major matrix units: e00, e01, e10, e11
    e01 = np.array([0, 1, 0, 0], dtype=complex)
    e10 = np.array([0, 0, 1, 0], dtype=complex)
    e00 = np.array([1, 0, 0, 0], dtype=complex)
    e11 = np.array([0, 0, 0, 1], dtype=complex)
    assert np.allclose(m2.mul(e01, e10), e00)
    assert np.allclose(m2.mul(e10, e01), e11)
    assert np.allclose(m2.star(e01), e10)
    assert np.allclose(m2.mul(m2.unit, e01), e01)


def test_group_algebra_trace_form_eigenvalues(cfg, z2):
    # regular-representation Gram of the order-two group algebra is 2*I
    form = z2.alg.trace_form()
    eigs = np.sort(np.linalg.eigvalsh(form))
    assert np.allclose(eigs, [2.0, 2.0])


def test_broken_associativity_detected(cfg, z2):
    m = z2.alg.mult.copy()
    # one-sided unit-row defect; scaling m[1, 1, 0] alone would stay associative
    m[0, 1, 0] += 0.01
    broken = algebra.FiniteStarAlgebra(mult=m, unit=z2.alg.unit,
                                       invol=z2.alg.invol, name="broken")
    rep = algebra.verify_star_algebra(broken, cfg)
    assert not rep.ok
    failing = {c.name for c in rep.failures()}
    assert "associativity" in failing


def test_non_positive_trace_form_flagged(cfg):
    # nilpotent 2-dim algebra: span{1, v} with v^2 = 0 and v* = v
    m = np.zeros((2, 2, 2), dtype=complex)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 0, 1] = 1.0
    alg = algebra.FiniteStarAlgebra(mult=m, unit=np.array([1, 0], complex),
                                    invol=np.eye(2, dtype=complex))
    rep = algebra.verify_star_algebra(alg, cfg)
    failing = {c.name for c in rep.failures()}
    assert "trace_form_positive_definite" in failing
    with pytest.raises(NotStarAlgebra):
        algebra.require_star_algebra(alg, cfg)


def test_center_and_commutant(cfg):
    m2 = algebra.matrix_algebra(2)
    z = algebra.center(m2, cfg)
    assert z.shape[0] == 1
    diag = np.zeros((2, 4), dtype=complex)
    diag[0, 0] = diag[1, 3] = 1.0
    comm = algebra.commutant(m2, diag, cfg)
    assert comm.shape[0] == 2  # the diagonal is its own commutant


def test_traces(cfg):
    m2 = algebra.matrix_algebra(2)
    tr = algebra.regular_trace(m2)
    # left regular trace doubles the matrix trace in M_2
    e00 = np.array([1, 0, 0, 0], dtype=complex)
    assert abs(tr @ e00 - 2.0) < 1e-14
    ntr = algebra.normalized_trace(m2)
    assert abs(ntr @ m2.unit - 1.0) < 1e-14


def test_direct_sum_and_tensor(cfg):
    m1 = algebra.matrix_algebra(1)
    m2 = algebra.matrix_algebra(2)
    ds = algebra.direct_sum_algebra(m1, m2)
    assert ds.dim == 5
    assert algebra.verify_star_algebra(ds, cfg).ok
    tp = algebra.tensor_product_algebra(m2, m2)
    assert tp.dim == 16
    assert algebra.verify_star_algebra(tp, cfg).ok
    assert algebra.center(tp, cfg).shape[0] == 1


def test_tensor_square_operations(cfg):
    m2 = algebra.matrix_algebra(2)
    e00 = np.array([1, 0, 0, 0], dtype=complex)
    e01 = np.array([0, 1, 0, 0], dtype=complex)
    u = np.outer(e00, e00)
    v = np.outer(e01, e01)
    prod = algebra.tensor_square_mul(m2, u, v)
    assert np.allclose(prod, np.outer(e01, e01))
    starred = algebra.tensor_square_star(m2, v)
    e10 = np.array([0, 0, 1, 0], dtype=complex)
    assert np.allclose(starred, np.outer(e10, e10))


def test_shape_validation():
    with pytest.raises(DimensionMismatch):
        algebra.FiniteStarAlgebra(mult=np.zeros((2, 2, 3)),
                                  unit=np.zeros(2), invol=np.eye(2))
    with pytest.raises(DimensionMismatch):
        algebra.FiniteStarAlgebra(mult=np.full((1, 1, 1), np.nan),
                                  unit=np.ones(1), invol=np.eye(1))
