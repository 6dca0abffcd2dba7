"""Command-line front end: subcommands, exit codes and document round trips."""

import io
import json
import subprocess
import sys

import numpy as np
import pytest

from auerbach import BasisMatrix, is_auerbach
from auerbach.cli import main, parse_document


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv, **kw):
    code, out, err = run(capsys, *argv, **kw)
    return code, json.loads(out) if out.strip() else None, err


@pytest.fixture
def write_doc(tmp_path):
    def write(name, rows, p):
        path = tmp_path / name
        path.write_text(json.dumps({"p": str(p), "n": len(rows), "rows": np.asarray(rows, float).tolist()}))
        return str(path)
    return write


# -- verify -------------------------------------------------------------------------


def test_verify_identity(capsys, write_doc):
    code, report, _ = run_json(capsys, "verify", write_doc("i3.json", np.eye(3), 3))
    assert code == 0 and report["auerbach"] is True
    assert set(report["residuals"]) == {"row_norm", "dual_norm", "cross"}


def test_verify_jinf_half(capsys, write_doc):
    rows = [[1, 1, 1], [-1, 1, 1], [0.5, 1, -1]]
    code, report, _ = run_json(capsys, "verify", write_doc("j.json", rows, "inf"))
    assert code == 0 and report["p"] == "inf"


def test_verify_singular(capsys, write_doc):
    code, report, _ = run_json(capsys, "verify", write_doc("s.json", [[1, 0], [1, 0]], 3))
    assert code == 1 and report["reason"] == "singular"


def test_verify_failure_reports_residuals(capsys, write_doc):
    rows = np.array([[1.0, 0.3], [0.0, 1.0]])
    rows /= np.sum(np.abs(rows) ** 3, axis=1, keepdims=True) ** (1 / 3)
    code, report, _ = run_json(capsys, "verify", write_doc("f.json", rows, 3))
    assert code == 1 and report["residuals"]["dual_norm"] > 1e-3


def test_verify_reads_stdin_json_and_text(capsys, monkeypatch):
    doc = json.dumps({"p": "3", "n": 2, "rows": [[1, 0], [0, 1]]})
    assert run(capsys, "verify", "-", stdin=doc, monkeypatch=monkeypatch)[0] == 0
    assert run(capsys, "verify", "-", "--p", "4", stdin="1 0\n0 1\n", monkeypatch=monkeypatch)[0] == 0


@pytest.mark.parametrize("text", [
    "{not json",
    json.dumps({"p": "3", "n": 2}),
    json.dumps({"p": "3", "n": 3, "rows": [[1, 0], [0, 1]]}),
    json.dumps({"p": "0.5", "n": 1, "rows": [[1]]}),
    json.dumps({"p": "banana", "n": 1, "rows": [[1]]}),
    "1 0\n0 1\n",
    "1 x\n0 1\n",
])
def test_verify_parse_errors_exit_2(capsys, monkeypatch, text):
    code, out, err = run(capsys, "verify", "-", stdin=text, monkeypatch=monkeypatch)
    assert code == 2 and out == "" and err.startswith("auerbach verify:")


def test_missing_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "verify", str(tmp_path / "absent.json"))
    assert code == 2 and "cannot read" in err


def test_env_tolerance(capsys, write_doc, monkeypatch):
    rows = np.eye(2) + 1e-7 * np.array([[0, 1], [1, 0]])
    path = write_doc("near.json", rows, 3)
    assert run(capsys, "verify", path)[0] == 1
    monkeypatch.setenv("AUERBACH_TOL", "1e-5")
    code, report, _ = run_json(capsys, "verify", path)
    assert code == 0 and report["tolerance"] == 1e-5
    monkeypatch.setenv("AUERBACH_TOL", "loose")
    assert run(capsys, "verify", path)[0] == 2


# -- construct ------------------------------------------------------------------------


CONSTRUCT_CASES = [
    ("identity", "--n", "4", "--p", "3"),
    ("identity", "--n", "2", "--p", "inf"),
    ("hadamard2", "--p", "1"),
    ("hadamard2", "--p", "2.5"),
    ("jp", "--p", "3"),
    ("jp", "--p", "1.5"),
    ("jp", "--p", "10"),
    ("jinf", "--t", "1"),
    ("jinf", "--t", "-0.5"),
]


@pytest.mark.parametrize("args", CONSTRUCT_CASES)
def test_construct_then_verify(capsys, tmp_path, args):
    code, doc, _ = run_json(capsys, "construct", *args)
    assert code == 0 and doc["residual"] <= 1e-10
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(doc))
    assert run(capsys, "verify", str(path))[0] == 0


def test_construct_jinf_t1_matrix(capsys):
    _, doc, _ = run_json(capsys, "construct", "jinf", "--t", "1")
    assert doc["rows"] == [[1, 1, 1], [-1, 1, 1], [1, 1, -1]] and doc["p"] == "inf"


def test_construct_sylvester_and_block_from_files(capsys, tmp_path):
    _, jp3, _ = run_json(capsys, "construct", "jp", "--p", "3")
    (tmp_path / "jp3.json").write_text(json.dumps(jp3))
    code, syl, _ = run_json(capsys, "construct", "sylvester", "--input", str(tmp_path / "jp3.json"))
    assert code == 0 and syl["n"] == 6 and syl["residual"] <= 1e-10
    _, i1, _ = run_json(capsys, "construct", "identity", "--n", "1", "--p", "3")
    (tmp_path / "i1.json").write_text(json.dumps(i1))
    code, blk, _ = run_json(capsys, "construct", "block", "--input", str(tmp_path / "i1.json"),
                            "--input", str(tmp_path / "jp3.json"))
    assert code == 0 and blk["n"] == 4
    for doc in (syl, blk):
        (tmp_path / "out.json").write_text(json.dumps(doc))
        assert run(capsys, "verify", str(tmp_path / "out.json"))[0] == 0


def test_construct_text_format(capsys, monkeypatch):
    code, out, _ = run(capsys, "construct", "jp", "--p", "4", "--format", "text")
    assert code == 0 and out.startswith("# p=4 n=3")
    code, report, _ = run_json(capsys, "verify", "-", "--p", "4", stdin=out, monkeypatch=monkeypatch)
    assert code == 0


@pytest.mark.parametrize("args", [
    ("jp",),
    ("jp", "--p", "inf"),
    ("jinf",),
    ("jinf", "--t", "2"),
    ("identity", "--p", "3"),
    ("identity", "--n", "0", "--p", "3"),
    ("block",),
    ("sylvester",),
    ("pentagon", "--p", "3"),
])
def test_construct_invalid_parameters_exit_2(capsys, args):
    assert run(capsys, "construct", *args)[0] == 2


def test_documents_reparse_losslessly(capsys):
    for p in ("2.2", "3", "7.25", "1.5"):
        _, doc, _ = run_json(capsys, "construct", "jp", "--p", p)
        B, _ = parse_document(json.dumps(doc))
        expected = np.array(doc["rows"])
        assert np.array_equal(B.rows, expected)
        text = json.dumps(doc)
        assert json.dumps(json.loads(text)) == text


# -- enumerate ------------------------------------------------------------------------


def test_enumerate_n2(capsys):
    code, report, _ = run_json(capsys, "enumerate", "--n", "2", "--p", "4", "--seeds", "200")
    assert code == 0 and report["count"] == 2
    assert sorted(c["name"] for c in report["classes"]) == ["H2", "I2"]
    assert all(c["residual"] <= 1e-10 for c in report["classes"])


def test_enumerate_is_byte_deterministic(capsys):
    outs = {run(capsys, "enumerate", "--n", "3", "--p", "3", "--seeds", "300", "--rng", "5", *w)[1]
            for w in ((), (), ("--workers", "2"))}
    assert len(outs) == 1


def test_enumerate_below_two_uses_duality(capsys):
    code, report, _ = run_json(capsys, "enumerate", "--n", "2", "--p", "1.5", "--seeds", "100")
    assert code == 0 and report["via_duality"] is True and report["solved_at"] == "3"
    assert report["count"] == 2 and all(c["p"] == "1.5" for c in report["classes"])


@pytest.mark.parametrize("args", [
    ("--n", "3", "--p", "2"),
    ("--n", "3", "--p", "2.01"),
    ("--n", "5", "--p", "3"),
    ("--n", "3", "--p", "3", "--seeds", "0"),
    ("--n", "3", "--p", "inf"),
    ("--p", "3"),
])
def test_enumerate_errors(capsys, args):
    code, out, err = run(capsys, "enumerate", *args)
    assert code == 2 and out == ""


def test_enumerate_p2_message(capsys):
    _, _, err = run(capsys, "enumerate", "--n", "3", "--p", "2")
    assert "continuum at p=2" in err


# -- classify, rp, strong, continuation -------------------------------------------------------


def test_classify_jp(capsys, tmp_path):
    _, doc, _ = run_json(capsys, "construct", "jp", "--p", "4")
    (tmp_path / "jp.json").write_text(json.dumps(doc))
    code, out, _ = run_json(capsys, "classify", str(tmp_path / "jp.json"))
    assert code == 0 and out["label"] == "JP" and out["rows"] == ["JP_TYPE"] * 3


def test_classify_jinf_via_duality(capsys, tmp_path):
    from auerbach import dual_basis, jinf_basis
    D = dual_basis(jinf_basis(0.7)).as_basis()
    (tmp_path / "d.json").write_text(json.dumps({"p": "1", "n": 3, "rows": D.rows.tolist()}))
    code, out, _ = run_json(capsys, "classify", str(tmp_path / "d.json"))
    assert code == 0 and out["label"] == "JINF_FAMILY" and out["via_duality"] is True
    assert abs(abs(out["t"]) - 0.7) < 1e-8


def test_classify_non_auerbach_exits_1(capsys, write_doc):
    rows = np.array([[1.0, 0.3], [0.0, 1.0]])
    rows /= np.sum(np.abs(rows) ** 3, axis=1, keepdims=True) ** (1 / 3)
    assert run(capsys, "classify", write_doc("f.json", rows, 3))[0] == 1


def test_classify_larger_n(capsys, write_doc):
    code, out, _ = run_json(capsys, "classify", write_doc("i4.json", np.eye(4), 3))
    assert code == 0 and out["label"] == "IDENTITY"


@pytest.mark.parametrize("p, expected", [("2", 0.5), ("3", 0.618033988749895)])
def test_rp(capsys, p, expected):
    code, out, _ = run(capsys, "rp", "--p", p, "--format", "text")
    assert code == 0 and abs(float(out) - expected) <= 1e-14
    code, doc, _ = run_json(capsys, "rp", "--p", p)
    assert doc["r"] == float(out) and doc["residual"] <= 1e-15


@pytest.mark.parametrize("p", ["1", "inf", "0.3", "x"])
def test_rp_domain(capsys, p):
    assert run(capsys, "rp", "--p", p)[0] == 2


def test_strong(capsys, write_doc):
    c = 2 ** (-1 / 3)
    rows = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, c, c], [0, 0, c, -c]]
    code, out, _ = run_json(capsys, "strong", write_doc("s.json", rows, 3))
    assert code == 0 and out["strong"] is True and out["rows"] == ["AXIS", "AXIS", "PAIR", "PAIR"]


def test_not_strong(capsys, tmp_path):
    _, jp, _ = run_json(capsys, "construct", "jp", "--p", "3")
    (tmp_path / "jp.json").write_text(json.dumps(jp))
    code, out, _ = run_json(capsys, "strong", str(tmp_path / "jp.json"))
    assert code == 1 and out["strong"] is False


def test_continuation_n2(capsys):
    code, out, _ = run_json(capsys, "continuation", "--p0", "2.5", "--p1", "4", "--steps", "8",
                            "--n", "2", "--seeds", "100")
    assert code == 0 and out["constant_count"] and out["all_survive"]
    assert out["class_counts"] == [2] * 9
    assert all(path["max_residual"] <= 1e-10 for path in out["paths"])


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "auerbach", "rp", "--p", "3", "--format", "text"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0.6180339887498949"
    res = subprocess.run([sys.executable, "-m", "auerbach", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
