import json

import pytest

from semiflag.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_act_writes_a_point_file(tmp_path, capsys):
    out = tmp_path / "p.json"
    code, _, _ = run(capsys, "act", "--type", "A1", "--semifield", "rational", "--word", "-1:2/3",
                     "--point", "base", "--out", str(out))
    assert code == 0
    d = json.loads(out.read_text())
    assert d["components"]["1"] == {"b0": "1", "b1": "2/3"}
    code, text, _ = run(capsys, "check", "--type", "A1", "--point", str(out))
    assert code == 0 and "consistent" in text


def test_map_and_normalize(tmp_path, capsys):
    p = tmp_path / "p.json"
    run(capsys, "act", "--type", "A2", "--semifield", "tropical", "--word", "-1:3 -2:-4", "--out", str(p))
    code, text, _ = run(capsys, "map", "--type", "A2", "--point", str(p))
    assert code == 0 and json.loads(text)["semifield"] == "one"
    code, text, _ = run(capsys, "normalize", "--point", str(p))
    assert code == 0 and json.loads(text)["normalized"]


def test_conjecture_exit_zero(capsys):
    code, text, _ = run(capsys, "conjecture", "--type", "A2", "--depth", "4")
    assert code == 0
    assert "19" in text and "note:" in text


def test_enumerate_json(capsys):
    code, text, _ = run(capsys, "enumerate", "--type", "A1", "--json")
    assert code == 0 and json.loads(text)["count"] == 3


def test_fiber(capsys):
    code, text, _ = run(capsys, "fiber", "--type", "A1", "--target", "1:b0,b1", "--params", "-5..5", "--json")
    assert code == 0 and json.loads(text)["count"] == 11


def test_verify_relations(capsys):
    code, text, _ = run(capsys, "verify-relations", "--trials", "200", "--seed", "7")
    assert code == 0
    assert text.count("PASS") == 6


def test_generate_then_use_data_dir(tmp_path, capsys):
    d = tmp_path / "data"
    code, _, _ = run(capsys, "generate", "--type", "A2", "--lambda", "1,1", "--depth", "2", "--out", str(d))
    assert code == 0
    assert (d / "V_A2_1_1.json").exists() and (d / "G_A2_1_0__0_1.json").exists()
    code, _, _ = run(capsys, "check", "--type", "A2", "--data-dir", str(d), "--depth", "2")
    assert code == 0


def test_mmul_and_mchar(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"components": {"1": {"b1": "1"}}}))
    code, text, _ = run(capsys, "mmul", "--type", "A1", "--a", str(m), "--b", str(m))
    assert code == 0 and json.loads(text)["components"] == {"2": {"b2": "1"}}
    p = tmp_path / "p.json"
    run(capsys, "act", "--type", "A1", "--word", "-1:2/3", "--out", str(p))
    code, text, _ = run(capsys, "mchar", "--type", "A1", "--point", str(p), "--m", str(m))
    assert code == 0 and text.strip() == "2/3"


def test_validation_failure_exit_one(tmp_path, capsys):
    code, _, err = run(capsys, "act", "--type", "A1", "--word", "-1:-2/3")
    assert code == 1 and "ValueError" in err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"cartan": "A2", "J": [], "semifield": "one",
                               "components": {"1": {"b0": 1}, "2": {"b2": 1}}}))
    code, _, _ = run(capsys, "check", "--point", str(bad), "--depth", "2")
    assert code == 1


@pytest.mark.parametrize("argv", [["bogus"], [], ["act", "--nope"], ["fiber", "--type", "A1"]])
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2
