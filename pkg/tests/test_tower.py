import numpy as np
import pytest

from weakkac import crossed as cr
from weakkac import tower as tw
from weakkac import weak_kac as wk
from weakkac.config import WkaError


@pytest.fixture(scope="module")
def z2_ctx(z2, cfg):
    return tw.tower_context(z2, cfg)


def test_tower_depth_two_dims_and_checks(cfg, z2, z2_ctx):
    t = tw.build_tower(z2, 2, cfg, ctx=z2_ctx)
    assert t.dims == (2, 4, 8)
    assert not t.capped
    assert t.index == 2 and abs(t.lam - 0.5) < 1e-12
    assert t.report.ok, t.report.render()
    names = {c.name: c for c in t.report.checks}
    for i in (1, 2):
        for stem in ("jones_idempotent", "jones_selfadjoint",
                     "jones_implements_expectation", "markov_extension_scalar",
                     "trace_extends", "trace_tracial"):
            check = names[f"stage{i}.{stem}"]
            assert check.passed and check.residual < 1e-8
        assert names[f"stage{i}.sub_times_jones_injective"].passed
        assert names[f"stage{i}.jones_conjugates_span"].passed
        assert names[f"stage{i}.dimension_growth_exact"].passed


def test_tower_inclusion_matrices(cfg, z2, z2_ctx):
    t = tw.build_tower(z2, 2, cfg, ctx=z2_ctx)
    assert t.report.values["stage1.inclusion"] == [[1], [1]]
    assert t.report.values["stage2.inclusion"] == [[1, 1]]
    # lower row stays one crossing behind with the same multiplicities
    assert t.report.values["stage1.lower_inclusion"] == [[1], [1]]
    assert t.report.values["stage2.lower_inclusion"] == [[1, 1]]
    assert t.stages[0].lower.sub.dim == 1
    assert t.stages[1].lower.sub.dim == 2
    assert t.stages[2].lower.sub.dim == 4


def test_tower_markov_scalar_per_stage(cfg, z2, z2_ctx):
    t = tw.build_tower(z2, 2, cfg, ctx=z2_ctx)
    for stage in t.stages[1:]:
        scalar = stage.expectation.apply(stage.jones)
        unit_prev = stage.expectation.emb.sub.unit
        assert np.abs(scalar - t.lam * unit_prev).max() < 1e-8


def test_tower_cap_truncates_with_warning(cfg, z2, z2_ctx):
    t = tw.build_tower(z2, 3, cfg, ctx=z2_ctx, cap=6)
    assert t.capped
    assert t.dims == (2, 4)
    assert any("cap" in w for w in t.report.warnings)
    assert t.report.ok


def test_tower_pair_groupoid(cfg, pair2):
    t = tw.build_tower(pair2, 2, cfg)
    assert t.dims == (4, 8, 16)
    assert t.report.ok, t.report.render()


def test_tower_needs_markov_index(cfg, ds23):
    with pytest.raises(WkaError):
        tw.tower_context(ds23, cfg)


@pytest.mark.parametrize("fixture", ["z2", "z3", "z5", "pair2", "pair3"])
def test_commuting_square_connected(fixture, cfg, request):
    wka = request.getfixturevalue(fixture)
    rep = tw.commuting_square_check(wka, cfg)
    assert rep.ok, rep.render()
    assert rep.max_residual < 1e-8


def test_commuting_square_dim8(cfg, dim8):
    rep = tw.commuting_square_check(dim8, cfg)
    assert rep.ok, rep.render()
    assert rep.max_residual < 1e-8


def test_left_right_iso_depths(cfg, z2, z2_ctx):
    for depth in (1, 2):
        rep = tw.left_right_iso_check(z2, cfg, depth=depth, ctx=z2_ctx)
        assert rep.ok, rep.render()
        assert rep.max_residual < 1e-8
    with pytest.raises(ValueError):
        tw.left_right_iso_check(z2, cfg, depth=3, ctx=z2_ctx)


def test_left_right_iso_other_objects(cfg, pair2, dim8):
    for wka in (pair2, dim8):
        rep = tw.left_right_iso_check(wka, cfg, depth=1)
        assert rep.ok, rep.render()


def test_left_right_iso_trivial_algebra(cfg):
    one = wk.from_group(wk.cyclic_group_table(1), name="C")
    rep = tw.left_right_iso_check(one, cfg, depth=2)
    assert rep.ok, rep.render()


def test_relative_commutant_triple_intersection(cfg, z2, z2_data, pair2,
                                                pair2_data):
    for wka, data in ((z2, z2_data), (pair2, pair2_data)):
        cp = cr.crossed_product(
            cr.dual_action(wka, data.dual_wka, side="left"), cfg)
        rep = tw.relative_commutant_checks(cp, cfg)
        assert rep.ok, rep.render()
        assert rep.values["intersection_dim"] == wka.dim


def test_dim8_tower_first_floor(cfg, dim8):
    ctx = tw.tower_context(dim8, cfg)
    t = tw.build_tower(dim8, 1, cfg, ctx=ctx)
    assert t.dims == (8, 32)
    assert t.report.ok, t.report.render()


def test_arithmetic_biconnected_dim8(cfg, dim8):
    ar = tw.arithmetic_report(dim8, cfg)
    assert ar.report.ok, ar.report.render()
    assert ar.index == 4 and ar.cartan_dim == 2
    assert ar.cartan_blocks == (1, 1)
    assert ar.ambient_blocks == (2, 2)
    assert ar.first_kind == (1, 1)
    assert ar.second_kind == (1, 1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_arithmetic_prime_index_is_group_algebra(cfg, p):
    g = wk.from_group(wk.cyclic_group_table(p))
    ar = tw.arithmetic_report(g, cfg)
    assert ar.report.ok
    assert ar.report.values["index_prime"]
    assert ar.cartan_dim == 1 and g.dim == ar.index


def test_arithmetic_connected_not_biconnected(cfg, pair2):
    # the pair groupoid is connected but not biconnected, so the first-kind
    # reduced indices are allowed to be fractional and the flag records that
    ar = tw.arithmetic_report(pair2, cfg)
    flags = {c.name: c.passed for c in ar.report.checks}
    assert not flags["cartan_square_divides_reduced_indices"]
    assert flags["cartan_dim_divides_block_dims"]
    assert flags["cartan_square_divides_dimension"]
    assert flags["cartan_dim_divides_index"]


def test_arithmetic_rejects_decomposable(cfg, ds23):
    with pytest.raises(WkaError):
        tw.arithmetic_report(ds23, cfg)
