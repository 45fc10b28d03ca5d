"""Command-line surface: formats, exit codes, reports."""

import json

import pytest

from fullshift.cli import run
from fullshift.sft import format_clopen_text, format_matrix_text
from fullshift.tables import format_table_text, validate_table

from helpers import FULL2, FULL3, FULL4, GOLDEN, cylinder_swap


@pytest.fixture
def files(tmp_path):
    paths = {}

    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
        return str(p)

    write("full2.mat", format_matrix_text(FULL2))
    write("full3.mat", format_matrix_text(FULL3))
    write("full4.mat", format_matrix_text(FULL4))
    write("golden.mat", format_matrix_text(GOLDEN))
    write("perm.mat", "2\n0 1\n1 0\n")
    write("u1.clo", "D 1\n1\n")
    write("u2.clo", "D 1\n2\n")
    write("u11.clo", "D 2\n1,1\n")
    swap = validate_table(FULL2, {(1,): (2,), (2,): (1,)})
    write("swap.tbl", format_table_text(swap))
    paths["tmp"] = str(tmp_path)
    return paths


def test_validate_matrix(files, capsys):
    assert run(["validate-matrix", files["full2.mat"]]) == 0
    out = capsys.readouterr().out
    assert "RESULT: valid" in out
    assert run(["validate-matrix", files["perm.mat"]]) == 1
    out = capsys.readouterr().out
    assert "ConditionIFails" in out


def test_usage_error_exit_code():
    assert run(["no-such-command"]) == 2
    assert run([]) == 2


def test_words(files, capsys):
    assert run(["words", files["golden.mat"], "2"]) == 0
    out = capsys.readouterr().out
    assert "COUNT: 3" in out


def test_decide_iso_full_shifts(files, capsys):
    assert run(["decide-iso", files["full3.mat"], files["full4.mat"]]) == 0
    out = capsys.readouterr().out
    assert "VERDICT: NOT_ISOMORPHIC" in out
    assert run(["decide-iso", files["full2.mat"], files["golden.mat"]]) == 0
    out = capsys.readouterr().out
    assert "VERDICT: ISOMORPHIC" in out


def test_compose_identity(files, tmp_path, capsys):
    out_path = str(tmp_path / "out.tbl")
    code = run(["compose", files["full2.mat"], files["swap.tbl"], files["swap.tbl"], "-o", out_path])
    assert code == 0
    assert (tmp_path / "out.tbl").read_text() == "L 0\nEMPTY -> EMPTY\n"


def test_construct_involution(files, tmp_path, capsys):
    out_path = str(tmp_path / "alpha.tbl")
    code = run(
        [
            "construct",
            "2.1",
            files["full2.mat"],
            "--U",
            files["u1.clo"],
            "--Y",
            files["u2.clo"],
            "--x",
            "|1",
            "-o",
            out_path,
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") == 5 and "FAIL" not in out
    # emitted table re-parses and re-validates
    assert run(["table-validate", files["full2.mat"], out_path]) == 0


def test_construct_free_pair(files, tmp_path, capsys):
    stem = str(tmp_path / "fp")
    code = run(["construct", "2.4", files["full2.mat"], "--O", files["u1.clo"], "-o", stem])
    out = capsys.readouterr().out
    assert code == 0
    assert "FAIL" not in out
    assert run(["order", files["full2.mat"], f"{stem}.phi.tbl", "--bound", "4"]) == 0
    out = capsys.readouterr().out
    assert "ORDER: 3" in out


def test_clopen_ops_and_roundtrip(files, tmp_path, capsys):
    out_path = str(tmp_path / "c.clo")
    assert run(["clopen", files["full2.mat"], "complement", files["u1.clo"], "-o", out_path]) == 0
    assert (tmp_path / "c.clo").read_text() == "D 1\n2\n"
    assert run(["clopen", files["full2.mat"], "compare", files["u11.clo"], files["u1.clo"]]) == 0
    assert "RELATION: subset" in capsys.readouterr().out


def test_support_and_verify(files, capsys, tmp_path):
    worked = validate_table(
        FULL2, {(1, 1): (1, 1, 1), (1, 2): (1, 1, 2), (2, 1): (1, 2), (2, 2): (2,)}
    )
    path = tmp_path / "worked.tbl"
    path.write_text(format_table_text(worked))
    assert run(["verify", files["full2.mat"], str(path)]) == 0
    out = capsys.readouterr().out
    assert "SUPPORT: FULL" in out
    assert "FIXED-POINT: |1" in out
    assert "FIXED-POINT: |2" in out
    assert "COCYCLE: 1,1 k=3 l=2" in out


def test_split_and_local_member(files, tmp_path, capsys):
    inner = cylinder_swap(FULL2, (1, 1), (1, 2))
    path = tmp_path / "inner.tbl"
    path.write_text(format_table_text(inner))
    assert run(["local-member", files["full2.mat"], str(path), files["u1.clo"]]) == 0
    assert "MEMBER: True" in capsys.readouterr().out
    a = str(tmp_path / "in.tbl")
    b = str(tmp_path / "out.tbl")
    code = run(
        ["split", files["full2.mat"], str(path), files["u1.clo"], "--out-inside", a, "--out-outside", b]
    )
    assert code == 0
    assert "FAIL" not in capsys.readouterr().out


def test_witness_search_cli(files, tmp_path, capsys):
    out_path = str(tmp_path / "w.tbl")
    code = run(
        [
            "witness-search",
            files["full2.mat"],
            "--depth-bound",
            "1",
            "--image-bound",
            "1",
            "--maps-onto",
            files["u1.clo"],
            files["u2.clo"],
            "-o",
            out_path,
        ]
    )
    assert code == 0
    assert "RESULT: FOUND" in capsys.readouterr().out
    assert run(["table-validate", files["full2.mat"], out_path]) == 0


def test_gamma_equiv_cli(files, tmp_path, capsys):
    out_path = str(tmp_path / "wit.tbl")
    u11 = tmp_path / "u11f3.clo"
    u11.write_text("D 2\n1,1\n")
    code = run(["gamma-equiv", files["full3.mat"], files["u1.clo"], str(u11), "-o", out_path])
    assert code == 0
    out = capsys.readouterr().out
    assert "STATUS: equivalent" in out
    assert "witness carries U onto V: PASS" in out


def test_json_reports(files, capsys):
    assert run(["--json", "bf", files["full3.mat"]]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["report"]["GROUP"] == "Z/2"
    assert run(["bf", files["full3.mat"], "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["report"]["UNIT-ORDER"] == "2"


def test_bad_table_diagnosis(files, tmp_path, capsys):
    path = tmp_path / "bad.tbl"
    path.write_text("L 1\n1 -> 2\n2 -> 1\n")
    assert run(["table-validate", files["golden.mat"], str(path)]) == 1
    assert "RowMismatch" in capsys.readouterr().out


def test_construct_missing_argument(files, capsys):
    assert run(["construct", "2.1", files["full2.mat"]]) == 1
    assert "needs --U" in capsys.readouterr().out


def test_malformed_inputs_never_traceback(files, tmp_path, capsys):
    bad = tmp_path / "garbage.mat"
    bad.write_text("not a matrix\nat all\n")
    assert run(["validate-matrix", str(bad)]) == 1
    assert "ERROR" in capsys.readouterr().out
    missing = str(tmp_path / "does-not-exist.mat")
    assert run(["bf", missing]) == 1
    capsys.readouterr()
    bad_clo = tmp_path / "bad.clo"
    bad_clo.write_text("D two\n1\n")
    assert run(["clopen", files["full2.mat"], "canon", str(bad_clo)]) == 1
    assert "ERROR" in capsys.readouterr().out


def test_construct_outputs_deterministic(files, tmp_path, capsys):
    paths = []
    for name in ("a1.tbl", "a2.tbl"):
        out = str(tmp_path / name)
        assert (
            run(
                [
                    "construct", "2.1", files["full2.mat"],
                    "--U", files["u1.clo"], "--Y", files["u2.clo"],
                    "--x", "|1", "-o", out,
                ]
            )
            == 0
        )
        capsys.readouterr()
        paths.append(out)
    first, second = (open(p).read() for p in paths)
    assert first == second


def test_construct_rejects_inadmissible_point(files, tmp_path, capsys):
    code = run(
        [
            "construct", "2.1", files["golden.mat"],
            "--U", files["u2.clo"], "--Y", files["u1.clo"],
            "--x", "|2",
        ]
    )
    assert code == 1
    assert "not admissible" in capsys.readouterr().out
