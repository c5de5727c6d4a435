import numpy as np
import pytest

from weakkac import markov as mk
from weakkac import weak_kac as wk
from weakkac.config import WkaError


def _analysis(wka, data, cfg):
    return mk.markov_analysis(wka, cfg, counital=data.counital,
                              cartan=data.cartan, haar=data.haar,
                              expectations=data.expectations)


def test_cyclic_scalar_and_index(cfg, z2, z2_data):
    md = _analysis(z2, z2_data, cfg)
    assert md.report.ok
    assert abs(md.lam - 0.5) < 1e-9
    assert md.index == 2
    assert md.equivalences.report.values["inclusion_matrix"] == ((1, 1),)
    assert md.haar.lambda_candidate == pytest.approx(0.5)


def test_pair_groupoid_scalar(cfg, pair2, pair2_data, pair3, pair3_data):
    md2 = _analysis(pair2, pair2_data, cfg)
    assert abs(md2.lam - 0.5) < 1e-9
    assert md2.equivalences.report.values["inclusion_matrix"] == ((1,), (1,))
    md3 = _analysis(pair3, pair3_data, cfg)
    assert abs(md3.lam - 1 / 3) < 1e-9
    assert md3.index == 3


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cyclic_family_pipeline(cfg, n):
    wka = wk.from_group(wk.cyclic_group_table(n))
    md = mk.markov_analysis(wka, cfg)
    assert md.report.ok
    assert abs(md.lam - 1 / n) < 1e-9
    assert md.index == n


def test_decomposable_input_reports_spectrum(cfg, ds23, ds23_data):
    md = _analysis(ds23, ds23_data, cfg)
    assert md.report.ok
    assert md.lam is None
    assert md.report.values["markov"] is False
    assert md.equivalences is None and md.source_basis is None
    spectrum = sorted(round(s, 9) for s in md.scalar.spectrum)
    assert spectrum == sorted(round(s, 9) for s in [0.5, 0.5, 1 / 3, 1 / 3, 1 / 3])


def test_block_trace_formula_checked(cfg, z3, z3_data):
    md = _analysis(z3, z3_data, cfg)
    names = {c.name for c in md.scalar.report.checks}
    assert "block_trace_formula" in names
    assert "source_target_agree" in names


def test_stated_exponent_differs(cfg, z3, z3_data):
    # with lam = 1/3 the relation holds for 1/lam on the right, not lam
    md = _analysis(z3, z3_data, cfg)
    assert md.equivalences.report.values["stated_exponent_residual"] > 1.0


def test_wrong_scalar_raises_consistency_error(cfg, z3, z3_data):
    # lam = 1/2 fails four criteria but 1/lam is still integral
    with pytest.raises(WkaError):
        mk.verify_equivalences(z3, z3_data.haar, z3_data.cartan, 0.5, cfg)


def test_source_basis_orthonormal_cyclic(cfg, z2, z2_data):
    md = _analysis(z2, z2_data, cfg)
    rows = md.source_basis.rows
    assert rows.shape == (2, 2)
    es = z2_data.expectations.source.on_ambient()
    alg = z2.alg
    for a in range(2):
        for b in range(2):
            got = es @ alg.mul(alg.star(rows[a]), rows[b])
            want = (alg.unit if a == b else np.zeros(2))
            assert np.abs(got - want).max() < 1e-9


def test_source_basis_reconstructs_pair_groupoid(cfg, pair2, pair2_data):
    md = _analysis(pair2, pair2_data, cfg)
    rows = md.source_basis.rows
    assert rows.shape == (2, 4)
    es = pair2_data.expectations.source.on_ambient()
    alg = pair2.alg
    for j in range(4):
        x = np.eye(4, dtype=complex)[j]
        recon = np.zeros(4, dtype=complex)
        for nu in range(2):
            recon += alg.mul(rows[nu], es @ alg.mul(alg.star(rows[nu]), x))
        assert np.abs(recon - x).max() < 1e-9


def test_index_element_is_scalar(cfg, pair3, pair3_data):
    md = _analysis(pair3, pair3_data, cfg)
    alg = pair3.alg
    total = np.zeros(alg.dim, dtype=complex)
    for x in md.source_basis.rows:
        total += alg.mul(x, alg.star(x))
    assert np.abs(total - 3 * alg.unit).max() < 1e-9


def test_target_basis_is_antipode_of_starred_source(cfg, pair2, pair2_data):
    md = _analysis(pair2, pair2_data, cfg)
    alg = pair2.alg
    for x, y in zip(md.source_basis.rows, md.target_basis.rows):
        assert np.abs(y - pair2.s_apply(alg.star(x))).max() < 1e-12
    et = pair2_data.expectations.target.on_ambient()
    rows = md.target_basis.rows
    for a in range(2):
        for b in range(2):
            got = et @ alg.mul(alg.star(rows[a]), rows[b])
            want = (alg.unit if a == b else np.zeros(4))
            assert np.abs(got - want).max() < 1e-9


def test_trace_vector_values(cfg, pair2, pair2_data, z3, z3_data):
    md2 = _analysis(pair2, pair2_data, cfg)
    assert md2.report.values["trace_vector.trace_vector"] == pytest.approx((1.0,))
    md3 = _analysis(z3, z3_data, cfg)
    assert md3.report.values["trace_vector.trace_vector"] == pytest.approx(
        (1 / 3, 1 / 3, 1 / 3))


def test_prime_dimension_confirmed_for_cyclic(cfg, z5):
    rep = mk.prime_dimension_report(z5, cfg)
    assert rep.values["applicable"] is True
    assert rep.values["group_order"] == 5
    assert rep.ok
    names = {c.name for c in rep.checks}
    assert {"group_like_coproduct", "group_closure",
            "antipode_gives_inverses"} <= names


def test_prime_dimension_skips_when_not_applicable(cfg, pair2, ds23):
    rep = mk.prime_dimension_report(pair2, cfg)
    assert rep.values["applicable"] is False
    assert not rep.checks
    # dimension 5 is prime but the algebra is decomposable
    rep = mk.prime_dimension_report(ds23, cfg)
    assert rep.values["applicable"] is False
