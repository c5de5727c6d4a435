"""Smoke test for the kernel benchmark entry point."""

from weakkac import bench


def test_bench_runs_and_reports(capsys):
    assert bench.main(["--dim", "6", "--repeat", "1"]) == 0
    out = capsys.readouterr().out
    for name in ("multiply", "product_table", "assoc_residual"):
        assert name in out


def test_bench_rows_cover_all_kernels():
    rows = bench.run(dim=5, repeat=1)
    assert [r[0] for r in rows] == ["multiply", "product_table",
                                    "assoc_residual"]
    assert all(r[1] > 0 for r in rows)
