import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakkac import weak_kac as wk
from weakkac.config import WkaError


def test_group_constructors_satisfy_axioms(cfg, z2, z3, z5):
    for k in (z2, z3, z5):
        rep = wk.verify_wka(k, cfg)
        assert rep.ok
        assert rep.max_residual < 1e-12


def test_pair_groupoid_satisfies_axioms(cfg, pair2, pair3):
    for k in (pair2, pair3):
        rep = wk.verify_wka(k, cfg)
        assert rep.ok
        assert rep.max_residual < 1e-12


def test_direct_sum_satisfies_axioms(cfg, ds23):
    assert wk.verify_wka(ds23, cfg).ok


def test_flipped_antipode_breaks_axioms(cfg, z2):
    bad = wk.WeakKacAlgebra(alg=z2.alg, comult=z2.comult, counit=z2.counit,
                            antipode=np.array([[1.0, 0.0], [0.0, -1.0]]))
    rep = wk.verify_wka(bad, cfg)
    assert not rep.ok
    failing = {c.name for c in rep.failures()}
    assert "antipode_yields_source_map" in failing
    worst = max(c.residual for c in rep.failures())
    assert worst > 0.01


def test_invalid_group_tables_rejected():
    with pytest.raises(WkaError):
        wk.from_group(np.array([[0, 0], [1, 1]]))  # not a Latin square
    with pytest.raises(WkaError):
        wk.from_group(np.array([[0, 1], [1, 2]]))  # entry out of range
    with pytest.raises(WkaError):
        wk.from_group(np.arange(4).reshape(2, 2))


def test_counital_maps_group(cfg, z2_data):
    # Kac algebra: source map collapses to eps(x) 1
    src = z2_data.counital.source_mat
    assert np.allclose(src, np.array([[1.0, 0.0], [1.0, 0.0]]))
    assert z2_data.counital.report.ok


def test_counital_maps_pair_groupoid(cfg, pair2_data):
    # arrow (k,l) goes to the loop at its source point l
    src = pair2_data.counital.source_mat
    expected = np.zeros((4, 4))
    loops = {0: 0, 1: 3}  # loop index for points 0 and 1
    for k in range(2):
        for l in range(2):
            expected[k * 2 + l, loops[l]] = 1.0
    assert np.allclose(src, expected)
    tgt = pair2_data.counital.target_mat
    expected_t = np.zeros((4, 4))
    for k in range(2):
        for l in range(2):
            expected_t[k * 2 + l, loops[k]] = 1.0
    assert np.allclose(tgt, expected_t)


def test_cartan_dimensions(cfg, z3_data, pair3_data):
    assert z3_data.cartan.block_sizes == (1,)
    assert z3_data.cartan.source.sub.dim == 1
    assert pair3_data.cartan.block_sizes == (1, 1, 1)
    assert pair3_data.cartan.source.sub.dim == 3
    assert pair3_data.cartan.report.ok


def test_haar_projection_closed_forms(cfg, z3_data, pair2_data):
    assert np.allclose(z3_data.haar.projection, np.full(3, 1 / 3))
    assert np.allclose(pair2_data.haar.projection, np.full(4, 1 / 2))
    for data in (z3_data, pair2_data):
        assert data.haar.report.ok


def test_haar_trace_closed_forms(cfg, z2_data, pair2_data):
    assert np.allclose(z2_data.haar.trace, [1.0, 0.0])
    assert np.allclose(pair2_data.haar.trace, [1.0, 0.0, 0.0, 1.0])
    tr1 = pair2_data.haar.report.values["trace.trace_of_unit"]
    assert abs(tr1 - 2.0) < 1e-9


def test_haar_uniqueness_flags(z2_data, pair3_data):
    for data in (z2_data, pair3_data):
        names = {c.name: c.passed for c in data.haar.report.checks}
        assert names["projection.unique"]
        assert names["trace.unique"]


def test_expectations_cross_checked(z2_data, pair2_data, pair3_data):
    for data in (z2_data, pair2_data, pair3_data):
        assert data.expectations.report.ok


def test_expectation_values_pair_groupoid(pair2_data):
    # E_s(g_kl) = tau(g_kl) g_kl picks out the loops
    es = pair2_data.expectations.source
    amb = es.emb.matrix @ es.matrix
    for k in range(2):
        for l in range(2):
            idx = k * 2 + l
            v = np.zeros(4, dtype=complex)
            v[idx] = 1.0
            image = amb @ v
            if k == l:
                assert np.allclose(image, v)
            else:
                assert np.allclose(image, 0.0)


def test_dual_structures(cfg, z2, pair2):
    for k in (z2, pair2):
        kd = wk.dual(k, cfg)  # cfg triggers verification
        mult = kd.alg.mult
        assert np.allclose(mult, mult.transpose(1, 0, 2))  # dual is commutative
        double = wk.dual(kd)
        assert np.allclose(double.alg.mult, k.alg.mult)
        assert np.allclose(double.comult, k.comult)
        assert np.allclose(double.antipode, k.antipode)
        assert np.allclose(double.alg.invol, k.alg.invol)


def test_dual_group_constructor(cfg):
    table = wk.cyclic_group_table(3)
    direct = wk.from_dual_group(table)
    via_dual = wk.dual(wk.from_group(table))
    assert np.allclose(direct.alg.mult, via_dual.alg.mult)
    assert wk.verify_wka(direct, cfg).ok


def test_haar_duality(z2_data, pair2_data):
    for data in (z2_data, pair2_data):
        names = {c.name: c for c in data.report.checks}
        assert names["dual_haar_projection_is_trace"].passed
        assert names["dual_haar_trace_is_projection"].passed
        assert names["double_dual_identity"].passed


def test_delta_unit_formulas(cfg, z2_data, pair2_data):
    w = z2_data.wka.delta_unit()
    unit = z2_data.wka.alg.unit
    assert np.allclose(w, np.outer(unit, unit))  # Kac case: coproduct of 1 is 1x1
    w = pair2_data.wka.delta_unit()
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 1.0  # sum of loop x loop terms
    assert np.allclose(w, expected)
    for data in (z2_data, pair2_data):
        names = {c.name: c for c in data.report.checks}
        assert names["coproduct_unit.source_units_formula"].passed
        assert names["coproduct_unit.target_units_formula"].passed
        assert names["coproduct_unit.haar_units_formula"].passed
        assert names["coproduct_unit.fold_antipode_left"].passed


def test_hypercenter_and_decomposition(cfg, z3_data, pair3_data, ds23_data):
    assert z3_data.hypercenter_dim == 1
    assert not z3_data.decomposable
    assert pair3_data.hypercenter_dim == 1
    assert ds23_data.hypercenter_dim == 2
    assert ds23_data.decomposable
    comps, rep = wk.decompose(ds23_data.wka, ds23_data.counital, cfg)
    assert rep.ok
    assert sorted(c.dim for c in comps) == [2, 3]
    for comp in comps:
        assert wk.verify_wka(comp, cfg).ok


def test_decompose_indecomposable_is_identity(cfg, z2_data):
    comps, _ = wk.decompose(z2_data.wka, z2_data.counital, cfg)
    assert len(comps) == 1
    assert comps[0] is z2_data.wka


def test_connectivity(cfg, z2_data, z3_data, pair2_data, ds23_data):
    assert z2_data.connected and z2_data.biconnected
    assert z3_data.connected and z3_data.biconnected
    assert pair2_data.connected
    assert not pair2_data.biconnected  # dual Cartan overlap is 2-dimensional
    assert not ds23_data.connected


def test_connectivity_criteria_recorded(pair2_data):
    names = dict(pair2_data.report.values)
    assert names["connected.center_criterion"] is True
    assert names["dual_connected.center_criterion"] is False


@st.composite
def _relabelled_tables(draw):
    n = draw(st.integers(2, 5))
    perm = np.array(draw(st.permutations(list(range(n)))))
    base = wk.cyclic_group_table(n)
    inv = np.argsort(perm)
    return perm[base[np.ix_(inv, inv)]]


@settings(max_examples=25, deadline=None)
@given(table=_relabelled_tables())
def test_relabelled_groups_satisfy_axioms(cfg, table):
    k = wk.from_group(table.astype(np.int64))
    rep = wk.verify_wka(k, cfg)
    assert rep.ok


@settings(max_examples=9, deadline=None)
@given(a=st.integers(1, 3), b=st.integers(1, 3))
def test_product_groups_satisfy_axioms(cfg, a, b):
    table = wk.direct_product_table(wk.cyclic_group_table(a),
                                    wk.cyclic_group_table(b))
    k = wk.from_group(table)
    rep = wk.verify_wka(k, cfg)
    assert rep.ok
    assert k.dim == a * b
