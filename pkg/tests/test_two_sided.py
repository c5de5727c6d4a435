import numpy as np
import pytest

from weakkac import algebra, wedderburn
from weakkac import crossed as cr
from weakkac import markov as mk
from weakkac import weak_kac as wk
from weakkac.config import WkaError


def _matrix_base_input(cfg, d=2):
    # trivial acting algebra: the double crossed product is then the base
    # tensored against itself through the separability twist
    one = wk.from_group(wk.cyclic_group_table(1), name="C")
    base = algebra.matrix_algebra(d)
    transpose = np.eye(d * d)[
        [i * d + j for j in range(d) for i in range(d)]]
    units = wedderburn.matrix_units(base, wedderburn.block_decompose(base, cfg),
                                    cfg)
    sep = cr.canonical_separability(base, transpose, units)
    act = cr.trivial_kac_action(one, base)
    return cr.TwoSidedInput(kac=one, base=base, left=act, right=act,
                            separability=sep, base_antipode=transpose,
                            name=f"M{d} two-sided")


def test_input_validation_dim8(cfg, dim8_input):
    rep = cr.validate_two_sided_input(dim8_input, cfg)
    assert rep.ok, rep.render()


def test_perturbed_separability_rejected(cfg, dim8_input):
    bad = dim8_input.separability.copy()
    bad[0, 0] += 0.01
    broken = cr.TwoSidedInput(kac=dim8_input.kac, base=dim8_input.base,
                              left=dim8_input.left, right=dim8_input.right,
                              separability=bad,
                              base_antipode=dim8_input.base_antipode)
    rep = cr.validate_two_sided_input(broken, cfg)
    assert not rep.ok
    with pytest.raises(WkaError):
        cr.two_sided_crossed_product(broken, cfg)


def test_dim8_is_weak_kac(cfg, dim8):
    rep = wk.verify_wka(dim8, cfg)
    assert rep.ok, rep.render()
    assert dim8.dim == 8
    # the coproduct of the unit is not the unit tensor square
    assert np.abs(dim8.delta_unit()
                  - np.outer(dim8.alg.unit, dim8.alg.unit)).max() > 0.1


def test_dim8_invariants(cfg, dim8, dim8_data):
    assert dim8_data.report.ok
    assert dim8_data.connected and dim8_data.biconnected
    dec = wedderburn.block_decompose(dim8.alg, cfg)
    assert tuple(sorted(dec.block_dims)) == (2, 2)
    md = mk.markov_analysis(dim8, cfg, counital=dim8_data.counital,
                            cartan=dim8_data.cartan, haar=dim8_data.haar,
                            expectations=dim8_data.expectations)
    assert md.index == 4
    assert md.equivalences.report.values["inclusion_matrix"] == ((1, 1), (1, 1))


def test_dim8_structure_report(cfg, dim8, dim8_input):
    rep = cr.two_sided_structure_report(dim8, dim8_input, cfg)
    assert rep.ok, rep.render()
    assert rep.values["left_fixed_dim"] == 1
    assert rep.values["right_fixed_dim"] == 1


def test_matrix_base_gives_full_matrix_dual(cfg):
    inp = _matrix_base_input(cfg, d=2)
    out, rep = cr.two_sided_crossed_product(inp, cfg)
    assert rep.ok, rep.render()
    assert out.dim == 16
    dec = wedderburn.block_decompose(out.alg, cfg)
    assert tuple(dec.block_dims) == (4,)
    dual = wk.dual(out, cfg)
    ddec = wedderburn.block_decompose(dual.alg, cfg)
    assert tuple(ddec.block_dims) == (4,)


def test_scalar_base_recovers_group_algebra(cfg, z3):
    dual3 = wk.dual(z3)
    inp = cr.kac_subalgebra_input(z3, dual3.alg.unit[None, :], cfg)
    out, rep = cr.two_sided_crossed_product(inp, cfg)
    assert rep.ok, rep.render()
    assert out.dim == 3
    md = mk.markov_analysis(out, cfg)
    assert md.index == 3


def test_index_is_product_of_dimensions(cfg, dim8, dim8_data):
    # base dim 2, acting dim 2: scalar index 4
    md = mk.markov_analysis(dim8, cfg, counital=dim8_data.counital,
                            cartan=dim8_data.cartan, haar=dim8_data.haar,
                            expectations=dim8_data.expectations)
    assert abs(md.lam - 0.25) < 1e-9
    assert dim8_data.cartan.source.sub.dim == 2


def test_double_dual_identity_dim8(cfg, dim8):
    dd = wk.dual(wk.dual(dim8))
    for got, want in ((dd.alg.mult, dim8.alg.mult),
                      (dd.comult, dim8.comult),
                      (dd.antipode, dim8.antipode),
                      (dd.counit, dim8.counit),
                      (dd.alg.unit, dim8.alg.unit),
                      (dd.alg.invol, dim8.alg.invol)):
        assert np.array_equal(got, want)
