from pathlib import Path

import pytest
from conftest import TOY

from raystab.cli import main

DATA = Path(__file__).resolve().parents[1] / "data"
DIHEDRAL = ["--group", str(DATA / "dihedral.grp"), "--period", "1"]
IMG = ["--group", str(DATA / "img_z2_i.grp"), "--period", "10"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_member_exit_codes(capsys):
    assert run(capsys, "member", *DIHEDRAL, "--word", "b")[0] == 0
    assert run(capsys, "member", *DIHEDRAL, "--word", "a")[0] == 1
    assert run(capsys, "member", *DIHEDRAL, "--word", "eps")[0] == 0
    assert run(capsys, "member", *DIHEDRAL, "--word", "q")[0] == 2


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "member", "--group", str(tmp_path / "missing.grp"), "--period", "1", "--word", "b")
    assert code == 2 and "error" in err
    assert run(capsys, "member", "--group", str(DATA / "dihedral.grp"), "--word", "b")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
    bad = tmp_path / "bad.grammar"
    bad.write_text("terminals: a\n")
    assert run(capsys, "lang", "--grammar", str(bad), "--max-len", "2")[0] == 2


def test_classify_csv(capsys):
    code, out, _ = run(capsys, "classify", "--group", str(DATA / "dihedral.grp"), "--csv")
    assert code == 0
    assert out.splitlines() == [
        "generator,tag,depth,spine_u,spine_v,bounded",
        "a,Finitary,1,,,yes",
        "b,Directed,,eps,1,yes",
    ]


def test_enum_wp(capsys):
    code, out, _ = run(capsys, "enum-wp", *DIHEDRAL, "--max-len", "3", "--format", "csv")
    assert code == 0
    rows = out.splitlines()
    assert rows[-5:] == ["length,count", "0,1", "1,1", "2,2", "3,3"]
    code, out, _ = run(capsys, "enum-wp", *DIHEDRAL, "--max-len", "3", "--complement", "--format", "csv")
    assert out.splitlines()[-4:] == ["0,0", "1,1", "2,2", "3,5"]


def test_gfun_csv(capsys):
    code, out, _ = run(capsys, "gfun", *DIHEDRAL, "--max-deg", "4", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["m,coefficient", "0,1", "1,1", "2,2", "3,3", "4,6"]


@pytest.mark.parametrize("argv", [DIHEDRAL + ["--max-len", "6"], DIHEDRAL + ["--max-len", "0"], IMG + ["--max-len", "4"]])
def test_xval_passes(capsys, argv):
    code, out, _ = run(capsys, "xval", *argv)
    assert code == 0
    rows = out.splitlines()
    assert len(rows) == 8
    assert all(r.split()[1] == "pass" for r in rows)


def test_xval_detects_corrupted_grammar(capsys, tmp_path):
    path = tmp_path / "e.grammar"
    assert run(capsys, "grammar", *DIHEDRAL, "--out", str(path))[0] == 0
    text = path.read_text()
    assert "edge 1 b 0" in text
    path.write_text(text.replace("edge 1 b 0", "edge 1 a 0", 1))
    code, out, _ = run(capsys, "xval", *DIHEDRAL, "--max-len", "4", "--grammar", str(path))
    assert code == 1
    status = {r.split()[0]: r for r in out.splitlines()}
    assert "FAIL" in status["grammar_E"] and "a" in status["grammar_E"]
    assert "FAIL" in status["partition"]


def test_grammar_round_trip_through_files(capsys, tmp_path):
    path = tmp_path / "e.grammar"
    run(capsys, "grammar", *DIHEDRAL, "--out", str(path))
    code, out, _ = run(capsys, "lang", "--grammar", str(path), "--max-len", "3")
    assert code == 0
    direct = run(capsys, "lang", *DIHEDRAL, "--max-len", "3")[1]
    assert out == direct
    assert run(capsys, "check-grammar", "--grammar", str(path), "--max-len", "4", "--rounds", "4")[0] == 0


def test_transduce(capsys, tmp_path):
    g = tmp_path / "toy.grammar"
    g.write_text(TOY)
    gsm = tmp_path / "bc.gsm"
    gsm.write_text("inputs: a\noutputs: b c\ninitial: 0\nstate 0\naccept 0\nedge 0 a/b,c 0\n")
    code, out, _ = run(capsys, "transduce", "--grammar", str(g), "--gsm", str(gsm), "--max-len", "4")
    assert code == 0
    assert out.split("\n")[:3] == ["eps", "b c", "b c b c"]


def test_restrict(capsys):
    code, out, _ = run(capsys, "restrict", *DIHEDRAL, "--subgroup", "B=b", "--max-len", "3")
    assert code == 0
    assert "B B B" in out


def test_export_dot_matches_golden(capsys):
    golden = (Path(__file__).parent / "golden" / "dihedral_level3.dot").read_text()
    code, out, _ = run(capsys, "export-dot", *DIHEDRAL, "--level", "3")
    assert code == 0 and out == golden


def test_output_is_deterministic(tmp_path):
    paths = [tmp_path / "one.txt", tmp_path / "two.txt"]
    for p in paths:
        assert main(["grammar", *DIHEDRAL, "--seed", "7", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
