from __future__ import annotations

import json

from click.testing import CliRunner

from leir.cli import main

MM = ("L^{8}_{i=0}L^{8}_{j=0}L^{8}_{k=0}"
      "[C^{f32,g}_{i,j}=C^{f32,g}_{i,j}+A^{f32,g}_{i,k}*D^{f32,g}_{k,j};];")


def invoke(*args, inp=None):
    return CliRunner().invoke(main, list(args), input=inp)


def test_fmt_canonicalizes_stdin():
    res = invoke("fmt", "-", inp=MM)
    assert res.exit_code == 0
    assert res.output == MM


def test_check_reports_ok_and_errors():
    assert invoke("check", "-", inp=MM).exit_code == 0
    bad = invoke("check", "-", inp="T^{f32,g}")
    assert bad.exit_code == 2
    reserved = invoke("check", "-", inp=MM.replace("D^", "T^"))
    assert reserved.exit_code == 2


def test_run_json_outputs_shapes(tmp_path):
    f = tmp_path / "p.leir"
    f.write_text(MM)
    res = invoke("run", str(f), "--seed", "1", "--json")
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert len(out["C"]) == 8


def test_apply_accepts_snake_case_alias(tmp_path):
    f = tmp_path / "p.leir"
    f.write_text(MM)
    res = invoke("apply", str(f), "loop_vectorization")
    assert res.exit_code == 0
    assert "V^{" in res.output


def test_apply_unknown_strategy_is_usage_error(tmp_path):
    f = tmp_path / "p.leir"
    f.write_text(MM)
    assert invoke("apply", str(f), "nonsense").exit_code == 1


def test_verify_exit_codes(tmp_path):
    a = tmp_path / "a.leir"
    b = tmp_path / "b.leir"
    a.write_text(MM)
    b.write_text(MM.replace("*", "+"))
    assert invoke("verify", str(a), str(a)).exit_code == 0
    assert invoke("verify", str(a), str(b)).exit_code == 3


def test_missing_file_is_io_error():
    assert invoke("fmt", "/no/such/file.leir").exit_code == 4


def test_score_lists_all_strategies():
    res = invoke("score", "--json")
    assert res.exit_code == 0
    rows = json.loads(res.output)
    assert len(rows) == 43


def test_gen_and_search(tmp_path):
    res = invoke("gen", "--seed", "2", "--count", "3", "--out",
                 str(tmp_path / "corpus"))
    assert res.exit_code == 0
    files = sorted((tmp_path / "corpus").glob("*.leir"))
    assert len(files) == 3
    search = invoke("search", str(files[0]), "--algorithm", "greedy",
                    "--seed", "1", "--json")
    assert search.exit_code == 0
    assert json.loads(search.output)["best_speedup"] >= 1.0


def test_stats_json():
    res = invoke("stats", "-", "--json", inp=MM)
    assert res.exit_code == 0
    info = json.loads(res.output)
    assert info["equations"] == 1 and info["tensors"] == 3
