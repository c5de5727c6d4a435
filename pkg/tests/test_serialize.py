"""Round trips and error reporting for the JSON object format."""

import json

import numpy as np
import pytest

from weakkac import crossed as cr
from weakkac import markov as mk
from weakkac import serialize as sz
from weakkac.config import ParseError


def _round_trip(obj):
    text = sz.to_json(obj)
    back = sz.from_json(text)
    # serializing the decoded object must reproduce the input byte for byte
    assert sz.to_json(back) == text
    return back


def test_star_algebra_round_trip(z2):
    back = _round_trip(z2.alg)
    assert back.dim == 2
    assert back.name == z2.alg.name
    assert np.array_equal(back.mult, z2.alg.mult)
    assert np.array_equal(back.invol, z2.alg.invol)


@pytest.mark.parametrize("name", ["z2", "pair2", "dim8"])
def test_weak_kac_round_trip(name, request):
    wka = request.getfixturevalue(name)
    back = _round_trip(wka)
    for got, want in ((back.alg.mult, wka.alg.mult),
                      (back.alg.unit, wka.alg.unit),
                      (back.alg.invol, wka.alg.invol),
                      (back.comult, wka.comult),
                      (back.counit, wka.counit),
                      (back.antipode, wka.antipode)):
        assert np.array_equal(got, want)


def test_action_round_trip(z2, z2_data):
    act = cr.dual_action(z2, z2_data.dual_wka, side="left")
    back = _round_trip(act)
    assert back.side == "left"
    assert np.array_equal(back.tensor, act.tensor)
    assert np.array_equal(back.module.mult, act.module.mult)


def test_crossed_product_round_trip(z2, z2_data, cfg):
    act = cr.dual_action(z2, z2_data.dual_wka, side="left")
    cp = cr.crossed_product(act, cfg)
    back = _round_trip(cp)
    assert back.algebra.dim == cp.algebra.dim
    assert np.array_equal(back.projection, cp.projection)
    # the include maps are not stored; decoding must recompute them
    assert np.allclose(back.include_kac, cp.include_kac)
    assert np.allclose(back.include_module, cp.include_module)


def test_report_round_trip(z2, cfg):
    md = mk.markov_analysis(z2, cfg)
    back = _round_trip(md.report)
    assert back.title == md.report.title
    assert [c.name for c in back.checks] == [c.name for c in md.report.checks]
    assert back.ok == md.report.ok


def test_complex_entries_survive():
    arr = np.array([[1 + 2j, -0.5j], [3.25, 1e-17 + 1j]])
    node = sz._encode_array(arr)
    back = sz._decode_array(node, arr.shape, "$")
    assert np.array_equal(back, arr)


def test_float_repr_is_shortest_round_trip(z3, cfg):
    md = mk.markov_analysis(z3, cfg)
    text = sz.to_json(md.report)
    lam = json.loads(text)["values"]["lambda"]
    assert lam == md.lam


def test_file_round_trip(tmp_path, pair2):
    path = tmp_path / "pair2.json"
    sz.serialize(pair2, str(path))
    text = path.read_text()
    assert text.endswith("\n")
    back = sz.parse(str(path))
    assert np.array_equal(back.comult, pair2.comult)


def test_malformed_json_positions_error():
    with pytest.raises(ParseError, match=r"line 2 column"):
        sz.from_json('{"kind":\n "weak_kac",,}')


@pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_tokens_rejected(token):
    with pytest.raises(ParseError, match="non-finite number token"):
        sz.from_json(f'{{"kind": "report", "x": {token}}}')


def test_unknown_kind_rejected():
    with pytest.raises(ParseError, match=r"\$\.kind: unknown kind 'blob'"):
        sz.from_json('{"kind": "blob", "format_version": "1"}')


def test_unsupported_version_rejected(z2):
    doc = sz.to_document(z2)
    doc["format_version"] = "99"
    with pytest.raises(ParseError, match=r"\$\.format_version"):
        sz.from_document(doc)


def test_top_level_must_be_object():
    with pytest.raises(ParseError, match=r"\$: top level"):
        sz.from_json("[1, 2]")


def test_missing_field_names_path(z2):
    doc = sz.to_document(z2)
    del doc["tensors"]["antipode"]
    with pytest.raises(ParseError, match=r"\$\.tensors: missing field 'antipode'"):
        sz.from_document(doc)


def test_truncated_array_names_position(z2):
    doc = sz.to_document(z2)
    doc["tensors"]["counit"][1] = [1.0]
    with pytest.raises(ParseError, match=r"\$\.tensors\.counit\[1\]"):
        sz.from_document(doc)


def test_wrong_length_reports_expected(z2):
    doc = sz.to_document(z2)
    doc["tensors"]["counit"].append([0.0, 0.0])
    with pytest.raises(ParseError, match="expected length 2, got 3"):
        sz.from_document(doc)


def test_bool_is_not_a_number(z2):
    doc = sz.to_document(z2)
    doc["tensors"]["unit"][0] = [True, 0.0]
    with pytest.raises(ParseError, match=r"\[re, im\] pair"):
        sz.from_document(doc)


def test_bool_dim_rejected(z2):
    doc = sz.to_document(z2)
    doc["dim"] = True
    with pytest.raises(ParseError, match=r"\$\.dim: expected int"):
        sz.from_document(doc)


def test_nonpositive_dim_rejected(z2):
    doc = sz.to_document(z2)
    doc["dim"] = 0
    with pytest.raises(ParseError, match="must be positive"):
        sz.from_document(doc)


def test_bad_action_side_rejected(z2, z2_data):
    act = cr.dual_action(z2, z2_data.dual_wka, side="left")
    doc = sz.to_document(act)
    doc["side"] = "sideways"
    with pytest.raises(ParseError, match=r"\$\.side"):
        sz.from_document(doc)


def test_unserializable_object_rejected():
    with pytest.raises(ParseError, match="cannot serialize"):
        sz.to_json(object())


def test_metadata_only_when_named(z2):
    doc = sz.to_document(z2)
    assert doc.get("metadata", {}).get("name") == z2.name
    import dataclasses
    anon = dataclasses.replace(z2.alg, name="")
    assert "metadata" not in sz.to_document(anon)
