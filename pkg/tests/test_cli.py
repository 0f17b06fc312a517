import json
import math

import pytest

from ultraborel.cli import main


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


class TestAnalyze:
    def test_gevrey2(self, capsys):
        code, out = run_json(capsys, "analyze", "gevrey:s=2", "--horizon", "5000")
        assert code == 0
        assert out["gamma"]["1"]["verdict"] == "holds"
        assert out["gamma"]["2"]["verdict"] == "fails"
        assert out["lower_order"]["omega"] == pytest.approx(2.0, abs=0.05)
        assert out["manifest"]["horizons"]

    def test_qgevrey(self, capsys):
        _, out = run_json(capsys, "analyze", "qgevrey:q=2", "--horizon", "2000")
        assert out["mg"]["verdict"] == "fails"
        assert out["dc"]["verdict"] == "holds"

    def test_bad_table(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("p,M\n0,1\n1,2\n2,0\n")
        assert main(["analyze", f"table:{path}"]) == 2
        assert "M_2" in capsys.readouterr().err

    def test_bad_spec(self, capsys):
        assert main(["analyze", "gevrey:s=x"]) == 2


class TestCheck:
    @pytest.mark.parametrize("argv,code", [
        (["sv_r", "--M", "gevrey:s=2", "--N", "gevrey:s=2", "--r", "1"], 0),
        (["gamma_r", "--M", "gevrey:s=1", "--N", "gevrey:s=1", "--r", "1"], 1),
        (["integral", "--M", "gevrey:s=3", "--N", "gevrey:s=3", "--r", "2"], 0),
        (["quasianalytic", "--M", "gevrey:s=1"], 0),
        (["mg", "--M", "qgevrey:q=2"], 1),
    ])
    def test_exit_codes(self, argv, code, capsys):
        assert main(["check", *argv]) == code

    def test_undetermined(self, tmp_path, capsys):
        path = tmp_path / "t.csv"
        path.write_text("p,logM\n" + "".join(f"{p},{2 * math.lgamma(p + 1)!r}\n" for p in range(9)))
        assert main(["check", "nq", "--M", f"table:{path}", "--horizon", "8"]) == 3

    def test_json_report(self, capsys):
        code, out = run_json(capsys, "check", "gamma_r", "--M", "gevrey:s=2")
        assert code == 0
        assert out["report"]["condition"] == "gamma_r"
        assert out["manifest"]["parameters"]["condition"] == "gamma_r"


class TestCsvCommands:
    def test_interpolate(self, capsys):
        assert main(["interpolate", "gevrey:s=1", "--r", "2", "--n", "4"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "p,logM"
        assert float(lines[4].split(",")[1]) == pytest.approx(math.log(2) / 2)

    def test_assoc(self, capsys):
        assert main(["assoc", "gevrey:s=1", "--points", "5"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 6

    def test_bump_sidecar(self, tmp_path, capsys):
        out = tmp_path / "bump.csv"
        assert main(["bump", "gevrey:s=2", "--grid", str(1 << 16), "--K", "20", "--orders", "4",
                     "--out", str(out)]) == 0
        header = out.read_text().splitlines()[0]
        assert header == "x,re_f,im_f"
        side = json.loads(out.with_suffix(".json").read_text())
        assert side["manifest"]["grid_sizes"]
        assert all(e["ratio"] <= 1.05 for e in side["bound_ledger"])

    def test_extend(self, tmp_path, capsys):
        jet = tmp_path / "jet.json"
        jet.write_text(json.dumps({"r": 1, "coeffs": [[1, 0], [0, 0]]}))
        out = tmp_path / "f.csv"
        assert main(["extend", "--jet", str(jet), "--M", "gevrey:s=3", "--out", str(out)]) == 0
        side = json.loads(out.with_suffix(".json").read_text())
        for key in ("jet_errors", "bound_ledger", "truncation_report", "parameters"):
            assert key in side
        assert max(e["error"] for e in side["jet_errors"]) <= 1e-6

    def test_extend_sv_fails(self, tmp_path, capsys):
        jet = tmp_path / "jet.json"
        jet.write_text(json.dumps({"r": 1, "coeffs": [[1, 0]]}))
        assert main(["extend", "--jet", str(jet), "--M", "gevrey:s=1", "--out", str(tmp_path / "f.csv")]) == 1

    def test_jets_classify(self, tmp_path, capsys):
        jet = tmp_path / "jet.json"
        jet.write_text(json.dumps({"coeffs": [[1, 0]], "envelope": {"C": 1, "h": 1}}))
        code, out = run_json(capsys, "jets", "classify", "--jet", str(jet), "--M", "gevrey:s=2")
        assert code == 0
        assert out["kind"] == "roumieu" and out["h_star"] == 1.0


def test_reproducible(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    outs = []
    for _ in range(2):
        main(["analyze", "gevrey:s=1.5", "--horizon", "2000", "--json"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["manifest"]["wall_clock"] == "1970-01-01T00:00:00Z"


def test_accept_quick(capsys):
    assert main(["accept", "--quick"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 11
