"""End-to-end command line pipelines driven through main()."""

import io
import json

import numpy as np
import pytest

from weakkac import cli
from weakkac import serialize as sz


@pytest.fixture
def run(capsys, monkeypatch):
    def _run(*argv, stdin_text=""):
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin_text))
        code = cli.main(list(argv))
        cap = capsys.readouterr()
        return code, cap.out, cap.err
    return _run


def test_command_table_matches_parser():
    # every wired subcommand must appear in the dispatch table and vice versa
    parser = cli.build_parser()
    sub = next(a for a in parser._actions
               if a.__class__.__name__ == "_SubParsersAction")
    assert set(sub.choices) == set(cli.COMMANDS)


def test_gen_group_then_markov(run):
    code, out, _ = run("gen", "group", "--cyclic", "3")
    assert code == 0
    code, out2, err = run("markov", stdin_text=out)
    assert code == 0
    rep = sz.from_json(out2)
    assert abs(rep.values["lambda"] - 1 / 3) < 1e-9
    assert rep.values["index"] == 3
    assert "[ok ]" in err


def test_gen_pairgroupoid_verify(run):
    code, out, _ = run("gen", "pairgroupoid", "2")
    assert code == 0
    code, _, _ = run("verify", stdin_text=out)
    assert code == 0


def test_gen_dualgroup_verify(run):
    code, out, _ = run("gen", "dualgroup", "--cyclic", "4")
    assert code == 0
    code, _, _ = run("verify", stdin_text=out)
    assert code == 0


def test_twosided_example_tower(run):
    code, out, _ = run("gen", "twosided-example", "--order", "2")
    assert code == 0
    code, out2, _ = run("tower", "--depth", "1", stdin_text=out)
    assert code == 0
    rep = sz.from_json(out2)
    assert rep.values["dims"] == [8, 32]


def test_double_dual_restores_tensors(run):
    code, out, _ = run("gen", "group", "--cyclic", "2")
    code1, out1, _ = run("dual", stdin_text=out)
    code2, out2, _ = run("dual", stdin_text=out1)
    assert code == code1 == code2 == 0
    orig, back = sz.from_json(out), sz.from_json(out2)
    for got, want in ((back.alg.mult, orig.alg.mult),
                      (back.comult, orig.comult),
                      (back.antipode, orig.antipode)):
        assert np.array_equal(got, want)


def test_haar_reports_projection_and_trace(run):
    _, out, _ = run("gen", "group", "--cyclic", "2")
    code, out2, _ = run("haar", stdin_text=out)
    assert code == 0
    rep = sz.from_json(out2)
    assert "projection" in rep.values and "trace" in rep.values


def test_cross_output_verifies(run):
    _, out, _ = run("gen", "group", "--cyclic", "2")
    code, crossed, _ = run("cross", stdin_text=out)
    assert code == 0
    assert json.loads(crossed)["kind"] == "crossed_product"
    code, _, _ = run("verify", stdin_text=crossed)
    assert code == 0


def test_duality_exit_ok(run):
    _, out, _ = run("gen", "group", "--cyclic", "2")
    code, out2, _ = run("duality", stdin_text=out)
    assert code == 0
    assert sz.from_json(out2).ok


def test_report_aggregates_checks(run):
    _, out, _ = run("gen", "group", "--cyclic", "2")
    code, out2, _ = run("report", stdin_text=out)
    assert code == 0
    rep = sz.from_json(out2)
    assert len(rep.checks) > 50
    assert any(c.name.startswith("markov.") for c in rep.checks)
    assert any(c.name.startswith("arithmetic.") for c in rep.checks)


def test_output_is_deterministic(run):
    first = [run("gen", "group", "--cyclic", "3")[1]]
    first.append(run("markov", stdin_text=first[0])[1])
    second = [run("gen", "group", "--cyclic", "3")[1]]
    second.append(run("markov", stdin_text=second[0])[1])
    assert first == second


def test_out_flag_writes_file(run, tmp_path):
    path = tmp_path / "z2.json"
    code, out, _ = run("gen", "group", "--cyclic", "2", "--out", str(path))
    assert code == 0 and out == ""
    assert sz.parse(str(path)).dim == 2


def _perturbed_z2(run, eps):
    _, out, _ = run("gen", "group", "--cyclic", "2")
    doc = json.loads(out)
    doc["tensors"]["antipode"][0][0][0] += eps
    return json.dumps(doc)


def test_failed_check_exits_one_and_names_it(run):
    bad = _perturbed_z2(run, 0.1)
    code, _, err = run("verify", stdin_text=bad)
    assert code == 1
    assert "first failed check: " in err
    assert "residual" in err


def test_tol_flag_loosens_verification(run):
    tiny = _perturbed_z2(run, 1e-8)
    assert run("verify", stdin_text=tiny)[0] == 1
    assert run("--tol", "1e-6", "verify", stdin_text=tiny)[0] == 0


def test_tol_env_var_honored(run, monkeypatch):
    tiny = _perturbed_z2(run, 1e-8)
    monkeypatch.setenv("WKA_TOL", "1e-6")
    assert run("verify", stdin_text=tiny)[0] == 0
    # an explicit flag wins over the environment
    assert run("--tol", "1e-10", "verify", stdin_text=tiny)[0] == 1


def test_parse_error_exits_two(run):
    code, _, err = run("verify", stdin_text="{not json")
    assert code == 2
    assert err.startswith("error: line 1 column")


def test_unknown_kind_exits_two(run):
    code, _, err = run("verify", stdin_text='{"kind": "blob"}')
    assert code == 2
    assert "$.kind" in err


def test_missing_file_exits_two(run, tmp_path):
    code, _, err = run("verify", str(tmp_path / "absent.json"))
    assert code == 2
    assert err.startswith("error:")


def test_gen_needs_its_parameter(run):
    code, _, err = run("gen", "group")
    assert code == 2
    assert "--cyclic" in err


def test_wrong_kind_for_dual_exits_two(run):
    _, out, _ = run("gen", "group", "--cyclic", "2")
    _, crossed, _ = run("cross", stdin_text=out)
    code, _, err = run("dual", stdin_text=crossed)
    assert code == 2
    assert "expected WeakKacAlgebra" in err
