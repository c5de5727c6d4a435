import numpy as np
import pytest

from weakkac import algebra, wedderburn
from weakkac.config import WkaError


def test_blocks_of_matrix_algebra(cfg):
    m3 = algebra.matrix_algebra(3)
    dec = wedderburn.block_decompose(m3, cfg)
    assert dec.block_dims == (3,)
    assert np.allclose(dec.central_projections[0], m3.unit)


def test_blocks_of_group_algebra(cfg, z3):
    dec = wedderburn.block_decompose(z3.alg, cfg)
    assert dec.block_dims == (1, 1, 1)
    total = dec.central_projections.sum(axis=0)
    assert np.allclose(total, z3.alg.unit)


def test_blocks_of_mixed_sum(cfg):
    mix = algebra.direct_sum_algebra(algebra.matrix_algebra(1),
                                     algebra.matrix_algebra(2))
    dec = wedderburn.block_decompose(mix, cfg)
    assert dec.block_dims == (1, 2)


def test_matrix_units_relations(cfg):
    mix = algebra.direct_sum_algebra(algebra.matrix_algebra(2),
                                     algebra.matrix_algebra(2))
    dec = wedderburn.block_decompose(mix, cfg)
    mus = wedderburn.matrix_units(mix, dec, cfg)
    rep = wedderburn.verify_matrix_units(mix, dec, mus, cfg)
    assert rep.ok
    assert rep.max_residual < 1e-10


def test_diagonal_inclusion_matrix(cfg):
    m2 = algebra.matrix_algebra(2)
    rows = np.zeros((2, 4), dtype=complex)
    rows[0, 0] = rows[1, 3] = 1.0
    emb = wedderburn.subalgebra_from_basis(m2, rows, cfg, name="diag")
    lam = wedderburn.inclusion_matrix(emb, cfg)
    assert lam.entries.tolist() == [[1], [1]]
    assert lam.sub_dims == (1, 1)
    assert lam.amb_dims == (2,)


def test_scalar_inclusion_matrix(cfg):
    m2 = algebra.matrix_algebra(2)
    emb = wedderburn.subalgebra_from_basis(m2, m2.unit[None, :], cfg, name="scalars")
    lam = wedderburn.inclusion_matrix(emb, cfg)
    assert lam.entries.tolist() == [[2]]


def test_generated_subalgebra(cfg):
    m2 = algebra.matrix_algebra(2)
    e01 = np.array([[0, 1, 0, 0]], dtype=complex)
    emb = wedderburn.generated_subalgebra(m2, e01, cfg)
    assert emb.sub.dim == 4  # e01 generates all of M_2
    e00 = np.array([[1, 0, 0, 0]], dtype=complex)
    emb = wedderburn.generated_subalgebra(m2, e00, cfg)
    assert emb.sub.dim == 2  # unit and the projection span the diagonal


def test_nonclosed_span_rejected(cfg):
    m2 = algebra.matrix_algebra(2)
    rows = np.zeros((2, 4), dtype=complex)
    rows[0] = m2.unit
    rows[1, 1] = 1.0  # span{1, e01} is not closed under star
    with pytest.raises(WkaError):
        wedderburn.subalgebra_from_basis(m2, rows, cfg)


def test_corner_subalgebra_unit(cfg):
    mix = algebra.direct_sum_algebra(algebra.matrix_algebra(1),
                                     algebra.matrix_algebra(2))
    rows = np.zeros((1, 5), dtype=complex)
    rows[0, 0] = 1.0  # the one-dimensional corner
    emb = wedderburn.subalgebra_from_basis(mix, rows, cfg, unital=False)
    assert np.allclose(emb.embed(emb.sub.unit), rows[0])


def test_perron_eigen(cfg):
    val, vec, irreducible = wedderburn.perron_eigen(
        np.array([[1.0, 1.0], [1.0, 1.0]]), cfg)
    assert abs(val - 2.0) < 1e-9
    assert np.allclose(vec, [1.0, 1.0], atol=1e-8)
    assert irreducible
    val, _, irreducible = wedderburn.perron_eigen(np.eye(2), cfg)
    assert abs(val - 1.0) < 1e-9
    assert not irreducible
