import json
import subprocess
import sys

import pytest

from lepage.cli import main
from lepage.presets import fixture_text

MAXWELL2 = json.loads(fixture_text("maxwell2"))["problem"]
DIRAC2 = json.loads(fixture_text("dirac2"))["problem"]
DIRAC1D = {"n": 2, "m": 1, "lagrangian": {"expr": "y1*y1_1 + x1*y1_2"}}


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
        return str(p)

    return {
        "maxwell2": write("maxwell2.json", MAXWELL2),
        "dirac2": write("dirac2.json", DIRAC2),
        "dirac1d": write("dirac1d.json", DIRAC1D),
        "linear": write("linear.json", {"fields": ["x2", "2*x1"]}),
        "trig": write("trig.json", {"fields": ["sin(x1)", "cos(x2)"]}),
        "bad_section": write("bad.json", {"fields": ["x2^2", "0"]}),
        "coupled": write("coupled.json", {"fields": ["exp(x1)*sin(x2)", "-exp(x1)*cos(x2)"]}),
        "broken": write("broken.json", {"n": 2, "m": 2, "lagrangian": {"expr": "(y1_1"}}),
        "sigma_eq_nu": write("seq.json", {**MAXWELL2, "g": {"mode": "explicit", "components": [
            {"sigma": 2, "nu": 2, "i": 1, "j": 2, "expr": "1"}]}}),
        "not_json": write("nj.json", "{oops"),
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_info(capsys, files):
    code, out, _ = run(capsys, "info", files["maxwell2"])
    assert code == 0
    assert "rank 1/4" in out and "degenerate" in out
    code, out, _ = run(capsys, "--format", "json", "info", files["dirac2"])
    data = json.loads(out)
    assert data["class"] == "affine"
    assert data["standard_regularity"]["rank"] == 0


def test_regularize_canonical(capsys, files):
    code, out, _ = run(capsys, "--format", "json", "regularize", files["maxwell2"], "--strategy", "canonical")
    assert code == 0
    data = json.loads(out)
    assert data["det"] == "128"
    assert data["closed"] and data["regular"]
    assert data["g"]["components"] == [{"sigma": 1, "nu": 2, "i": 1, "j": 2, "expr": "-1"}]


def test_regularize_random_is_seeded(capsys, files, monkeypatch):
    _, a, _ = run(capsys, "--format", "json", "regularize", files["dirac2"])
    _, b, _ = run(capsys, "regularize", files["dirac2"], "--format", "json", "--seed", "42")
    assert a == b
    monkeypatch.setenv("LEPAGE_SEED", "43")
    _, c, _ = run(capsys, "--format", "json", "regularize", files["dirac2"])
    assert json.loads(c)["regular"]
    assert json.loads(c)["g"] != json.loads(a)["g"]


def test_regularize_m1_fails(capsys, files):
    code, out, err = run(capsys, "regularize", files["dirac1d"])
    assert code == 1
    assert "DimensionTooSmall" in err
    code, _, err = run(capsys, "--format", "json", "regularize", files["dirac1d"])
    assert code == 1
    assert json.loads(err)["error"] == "DimensionTooSmall"


def test_legendre_text_has_legend_and_matrix(capsys, files):
    code, out, _ = run(capsys, "legendre", files["maxwell2"])
    assert code == 0
    assert "index order (s,i): (1,1) (1,2) (2,1) (2,2)" in out
    assert "p1_1 = 4*y2_2" in out
    code, out, _ = run(capsys, "--format", "json", "legendre", files["maxwell2"])
    data = json.loads(out)
    assert data["K"] == [["0", "0", "0", "4"], ["0", "1", "-3", "0"], ["0", "-3", "1", "0"], ["4", "0", "0", "0"]]


def test_equations(capsys, files):
    code, out, _ = run(capsys, "--format", "json", "equations", files["maxwell2"])
    data = json.loads(out)
    assert code == 0 and data["reduced"]
    assert len(data["p2_first"]) == 2 and len(data["p2_second"]) == 4


def test_verify_linear_solution(capsys, files):
    code, out, _ = run(capsys, "--format", "json", "verify", files["maxwell2"], "--section", files["linear"])
    assert code == 0
    data = json.loads(out)
    assert data["el_residual"] <= 1e-10 and data["p2_residual"] <= 1e-10


def test_verify_non_solution(capsys, files):
    code, out, _ = run(capsys, "verify", files["maxwell2"], "--section", files["bad_section"])
    assert code == 1
    assert "Euler-Lagrange residual (sup over probes): 2.000e+00" in out
    assert out.rstrip().endswith("FAIL")


def test_verify_with_grid(capsys, files):
    code, out, _ = run(capsys, "--format", "json", "verify", files["maxwell2"], "--section", files["coupled"],
                       "--grid", "33")
    assert code == 0
    grid = json.loads(out)["grid"]
    assert 1.7 <= grid["order_estimate"] <= 2.3
    code, out, _ = run(capsys, "verify", files["maxwell2"], "--section", files["trig"], "--grid", "33")
    assert code == 0
    assert "order undefined" in out


def test_verify_singular_system(capsys, files, tmp_path):
    doc = {**DIRAC2, "parameters": [p if p["name"] != "u" else {"name": "u", "default": ["0", "0"]}
                                     for p in DIRAC2["parameters"]]}
    path = tmp_path / "sing.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", str(path), "--section", files["linear"])
    assert code == 1
    assert "not regular" in out


@pytest.mark.parametrize("name", ["dirac2", "dirac4", "affine_toy"])
def test_example_passing_presets(capsys, name):
    code, out, _ = run(capsys, "example", name)
    assert code == 0
    assert out.rstrip().endswith("PASS")


@pytest.mark.parametrize("name", ["maxwell2", "maxwell4"])
def test_example_maxwell_fails_only_on_krupka(capsys, name):
    code, out, _ = run(capsys, "--format", "json", "example", name)
    assert code == 1
    data = json.loads(out)
    assert [e["tag"] for e in data["entries"] if not e["passed"]] == ["krupka_matrix_singular"]


def test_example_maxwell2_prints_reference_quantities(capsys):
    _, out, _ = run(capsys, "example", "maxwell2")
    assert "[  0   0   0   4 ]" in out
    assert "p2_1 = -3*y1_2 + y2_1" in out
    assert "H (Legendre coordinates) =" in out
    assert "[pass] regularity_det (det = 128)" in out


@pytest.mark.parametrize(
    "argv, kind",
    [
        (["example", "nope"], None),
        (["info"], None),
        (["frobnicate"], None),
    ],
)
def test_usage_errors(capsys, argv, kind):
    assert main(argv) == 2


def test_input_errors(capsys, files):
    code, _, err = run(capsys, "--format", "json", "info", files["broken"])
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "ExprSyntaxError" and payload["position"] == 5
    code, _, err = run(capsys, "--format", "json", "info", files["sigma_eq_nu"])
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "SchemaError" and payload["path"] == "g/components/0"
    code, _, err = run(capsys, "info", files["not_json"])
    assert code == 2 and "SchemaError" in err
    code, _, err = run(capsys, "--format", "json", "info", "/nonexistent/p.json")
    assert code == 2 and json.loads(err)["error"] == "IoError"


def test_bad_env_seed(capsys, files, monkeypatch):
    monkeypatch.setenv("LEPAGE_SEED", "abc")
    assert main(["info", files["maxwell2"]]) == 2


def test_json_output_is_byte_identical(files):
    cmd = [sys.executable, "-m", "lepage.cli", "--format", "json", "legendre", files["dirac2"]]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    json.loads(a)
