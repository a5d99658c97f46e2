import json

import pytest

from polyhom.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_homology_bubble_and_sphere(capsys, data):
    code, out, _ = run(capsys, "homology", "--polygraph", str(data / "bubble.json"))
    assert code == 0 and out.strip() == "H0=Z H1=0 H2=Z"
    code, out, _ = run(capsys, "homology", "--polygraph", str(data / "sphere2.json"))
    assert code == 0 and out.strip() == "H0=Z H1=0 H2=Z"


def test_parse_error_exit_3(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "homology", "--polygraph", str(bad))
    assert code == 3 and "parse error" in err
    code, _, _ = run(capsys, "homology", "--polygraph", str(tmp_path / "missing.json"))
    assert code == 3
    code, _, _ = run(capsys, "homology")
    assert code == 3


def test_validation_error_exit_2(capsys, tmp_path, data):
    obj = json.loads((data / "disk2.json").read_text())
    for g in obj["generators"]:
        if g["name"] == "x":
            g["tgt"] = {"gen": "t0"}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, _, err = run(capsys, "homology", "--polygraph", str(bad))
    assert code == 2 and "EndpointMismatch" in err and "x" in err


def test_entry_bits_exit_2(capsys, data, monkeypatch):
    monkeypatch.setenv("POLYHOM_MAX_ENTRY_BITS", "1")
    code, _, err = run(capsys, "simplicial", "--space", str(data / "nerve_c2.json"),
                       "--system", str(data / "nerve_c2_sign.json"))
    assert code == 2 and "POLYHOM_MAX_ENTRY_BITS" in err


def test_simplicial(capsys, data):
    code, out, _ = run(capsys, "simplicial", "--space", str(data / "nerve_c2.json"),
                       "--system", str(data / "nerve_c2_sign.json"), "--max-degree", "2")
    assert code == 0 and out.strip() == "H0=Z/2 H1=0 H2=Z/2"
    code, out, _ = run(capsys, "simplicial", "--space", str(data / "simplex0.json"))
    assert out.strip() == "H0=Z"
    code, out, _ = run(capsys, "simplicial", "--space", str(data / "boundary_simplex2.json"))
    assert out.strip() == "H0=Z H1=Z"


def test_reports_are_deterministic(capsys, data, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "homology", "--polygraph", str(data / "z2_resolution.json"), "--report", str(a))
    run(capsys, "homology", "--polygraph", str(data / "z2_resolution.json"), "--report", str(b))
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert "timing" not in rep and len(rep["inputs"]["polygraph"]["sha256"]) == 64
    run(capsys, "homology", "--polygraph", str(data / "bubble.json"), "--report", str(a), "--timing")
    assert "timing" in json.loads(a.read_text())


@pytest.mark.parametrize("what,inputs", [
    ("prop4_7", ["simplex2.json"]),
    ("lemma3_12", ["cylinder_point.json"]),
    ("lemma3_12", ["cylinder_o2.json"]),
    ("adjunction", ["oriental2.json"]),
    ("grothendieck", ["disk1.json", "d1_set_functor.json"]),
    ("globularity", ["oriental3.json"]),
])
def test_checks_pass(capsys, data, what, inputs):
    code, out, _ = run(capsys, "check", "--what", what, "--samples", "5",
                       "--inputs", *[str(data / i) for i in inputs])
    assert code == 0 and out.startswith("PASS")


def test_check_fails_with_location(capsys, data, tmp_path):
    obj = json.loads((data / "oriental2.json").read_text())
    for g in obj["generators"]:
        if g["name"] == "012":
            g["src"] = {"gen": "01"}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "check", "--what", "globularity", "--inputs", str(bad))
    assert code == 1 and out.startswith("FAIL") and "012" in out
    obj = json.loads((data / "cylinder_point.json").read_text())
    obj["alpha"]["x"] = {"id": {"gen": "s0"}}
    bad.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "check", "--what", "lemma3_12", "--inputs", str(bad))
    assert code == 1 and "FAIL" in out and "x" in out


def test_compare(capsys, data, tmp_path):
    z, n, b, s = (tmp_path / f"{k}.json" for k in "znbs")
    run(capsys, "homology", "--polygraph", str(data / "z2_resolution.json"), "--report", str(z))
    run(capsys, "simplicial", "--space", str(data / "nerve_c2.json"),
        "--system", str(data / "nerve_c2_constant.json"), "--report", str(n))
    code, out, _ = run(capsys, "compare", "--left", str(z), "--right", str(n), "--max-degree", "3")
    assert code == 0 and out.strip().endswith("equal")
    run(capsys, "homology", "--polygraph", str(data / "bubble.json"), "--report", str(b))
    run(capsys, "homology", "--polygraph", str(data / "sphere2.json"), "--report", str(s))
    code, out, _ = run(capsys, "compare", "--left", str(b), "--right", str(s))
    assert code == 0 and out.count("==") == 3
    run(capsys, "homology", "--polygraph", str(data / "disk2.json"), "--report", str(s))
    code, out, _ = run(capsys, "compare", "--left", str(b), "--right", str(s))
    assert code == 1 and "differ" in out
    e = tmp_path / "empty.json"
    e.write_text(json.dumps({"command": "homology", "inputs": {}, "results": {"homology": {}}}))
    code, out, _ = run(capsys, "compare", "--left", str(e), "--right", str(e))
    assert code == 0


def test_map_reports_degree_two(capsys, data):
    code, out, _ = run(capsys, "map", "--functor", str(data / "sphere2_to_bubble.json"))
    assert code == 0 and out.splitlines()[0] == "H0: Z -> Z [[1]]"


def test_fixtures_listing(capsys):
    code, out, _ = run(capsys, "fixtures")
    assert code == 0 and "bubble.json" in out
