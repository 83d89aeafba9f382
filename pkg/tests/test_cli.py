import json

import pytest

from funlog import fileio
from funlog.cli import main, build_parser, RunReport
from funlog.syntax import parse_expr
from funlog.semantics import satisfies_theory


TOY_FLS = """\
sort a
varsort a
op ca : a
op cb : a
op f : (a)a
carrier a = 0,1
interp ca = 0
interp cb = 1
interp f { (0) -> 1, (1) -> 0 }
"""

TOY_FLT = """\
sort a
varsort a
op ca : a
op cb : a
op f : (a)a
axiom eq_a(f(ca),cb)
axiom forall v0^a. eq_a(f(f(v0^a)),v0^a)
"""

TOY_FLP = """\
1. eq_a(f(ca),cb) ; axiom 0
2. imp(eq_a(f(ca),cb),or(eq_a(f(ca),cb),bot)) ; taut
3. or(eq_a(f(ca),cb),bot) ; mp 1 2
4. forall v1^a. or(eq_a(f(ca),cb),bot) ; gen 3 v1^a
"""


@pytest.fixture
def files(tmp_path):
    fls = tmp_path / "toy.fls"
    flt = tmp_path / "toy.flt"
    flp = tmp_path / "toy.flp"
    fls.write_text(TOY_FLS)
    flt.write_text(TOY_FLT)
    flp.write_text(TOY_FLP)
    return {"fls": str(fls), "flt": str(flt), "flp": str(flp), "dir": tmp_path}


class TestCheck:
    def test_valid_proof(self, files, capsys):
        assert main(["check", files["flt"], files["flp"]]) == 0
        out = capsys.readouterr().out
        assert "verdict:  ok" in out
        assert "used_axioms" in out

    def test_broken_proof(self, files, capsys):
        bad = files["dir"] / "bad.flp"
        bad.write_text("1. bot ; taut\n")
        assert main(["check", files["flt"], str(bad)]) == 1
        assert "Taut" in capsys.readouterr().out

    def test_unknown_symbol_is_usage_error(self, files, capsys):
        bad = files["dir"] / "bad.flp"
        bad.write_text("1. zap(ca) ; taut\n")
        assert main(["check", files["flt"], str(bad)]) == 2

    def test_missing_file(self, files):
        assert main(["check", files["flt"], "/nonexistent.flp"]) == 2


class TestEval:
    def test_closed_value(self, files, capsys):
        assert main(["eval", files["fls"], "--expr", "f(ca)"]) == 0
        assert "value: 1" in capsys.readouterr().out

    def test_top_is_true(self, files, capsys):
        assert main(["eval", files["fls"], "--expr", "top"]) == 0
        assert "value: 1" in capsys.readouterr().out

    def test_table(self, files, capsys):
        assert main(["eval", files["fls"], "--expr", "f(v0^a)",
                     "--persp", "v0^a"]) == 0
        assert "'0': '1'" in capsys.readouterr().out

    def test_apply_args(self, files, capsys):
        assert main(["eval", files["fls"], "--expr", "f(v0^a)",
                     "--persp", "v0^a", "--args", "1"]) == 0
        assert "value: 0" in capsys.readouterr().out

    def test_uncovered_variable(self, files, capsys):
        assert main(["eval", files["fls"], "--expr", "f(v0^a)"]) == 2
        assert "perspective" in capsys.readouterr().err


class TestSat:
    def test_model(self, files):
        assert main(["sat", files["fls"], files["flt"]]) == 0

    def test_empty_theory(self, files):
        empty = files["dir"] / "empty.flt"
        empty.write_text("sort a\nvarsort a\nop ca : a\nop cb : a\nop f : (a)a\n")
        assert main(["sat", files["fls"], str(empty)]) == 0

    def test_falsum_fails(self, files, capsys):
        bad = files["dir"] / "bad.flt"
        bad.write_text(TOY_FLT.replace("axiom eq_a(f(ca),cb)", "axiom bot"))
        assert main(["sat", files["fls"], str(bad)]) == 1
        assert "axiom 0" in capsys.readouterr().out


class TestFuzz:
    def test_each_suite_clean(self, capsys):
        for suite in ("subst", "soundness", "closure", "eval-invariance"):
            n = "20" if suite == "closure" else "60"
            assert main(["fuzz", suite, "--n", n, "--seed", "5"]) == 0, suite

    def test_unknown_suite(self, capsys):
        assert main(["fuzz", "bogus"]) == 2
        assert "unknown suite" in capsys.readouterr().err

    def test_json_and_determinism(self, capsys):
        assert main(["--json", "fuzz", "subst", "--n", "60", "--seed", "3"]) == 0
        doc1 = json.loads(capsys.readouterr().out)
        assert main(["--json", "fuzz", "subst", "--n", "60", "--seed", "3"]) == 0
        doc2 = json.loads(capsys.readouterr().out)
        doc1.pop("seconds"), doc2.pop("seconds")
        assert doc1 == doc2
        assert doc1["verdict"] == "ok" and doc1["cases"] == 60


class TestHenkin:
    def test_emits_reparsable_theory(self, files, capsys):
        out = files["dir"] / "ext.flt"
        assert main(["henkin", files["flt"], "--levels", "1", "--depth", "3",
                     "--out", str(out)]) == 0
        ext = fileio.parse_theory(out.read_text())
        assert len(ext.axioms) > 2

    def test_level_zero(self, files):
        out = files["dir"] / "same.flt"
        assert main(["henkin", files["flt"], "--levels", "0", "--depth", "3",
                     "--out", str(out)]) == 0
        assert fileio.parse_theory(out.read_text()) == \
            fileio.parse_theory(TOY_FLT)

    def test_malformed_theory(self, files):
        bad = files["dir"] / "bad.flt"
        bad.write_text("axiom zap\n")
        assert main(["henkin", str(bad)]) == 2


class TestTermmodel:
    def test_pipeline_and_roundtrip(self, files, capsys):
        out = files["dir"] / "tm.fls"
        assert main(["termmodel", files["fls"], "--depth", "4",
                     "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "failures: 0" in text
        tm = fileio.parse_structure(out.read_text())
        thy = fileio.parse_theory(TOY_FLT)
        assert satisfies_theory(tm, thy)

    def test_unnamed_element_rejected(self, files, capsys):
        bad = files["dir"] / "bad.fls"
        bad.write_text(TOY_FLS.replace("carrier a = 0,1", "carrier a = 0,1,2")
                       .replace("interp f { (0) -> 1, (1) -> 0 }",
                                "interp f { (0) -> 1, (1) -> 0, (2) -> 2 }"))
        assert main(["termmodel", str(bad), "--depth", "3"]) == 2
        assert "element-not-named" in capsys.readouterr().err

    def test_env_depth_default(self, files, monkeypatch, capsys):
        monkeypatch.setenv("FLC_DEPTH_DEFAULT", "3")
        out = files["dir"] / "tm3.fls"
        assert main(["termmodel", files["fls"], "--out", str(out)]) == 0
        assert "depth: 3" in capsys.readouterr().out


def test_report_stable_view():
    r = RunReport("x", cases=3, seconds=1.25)
    assert "seconds" not in r.stable()


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit) as e:
        build_parser().parse_args([])
    assert e.value.code == 2
