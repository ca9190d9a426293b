import json

import pytest

from orbidisk import fans
from orbidisk.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def fan_path(tmp_path, name):
    p = tmp_path / f"{name}.json"
    p.write_text(fans.read(name))
    return str(p)


def test_analyze_c3z3(capsys, tmp_path):
    code, out, err = run(capsys, "analyze", fan_path(tmp_path, "c3z3"),
                         "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["boxes"] == [
        {"vector": [0, 0, 1], "age": "1", "cone": [0, 1, 2],
         "coefficients": ["1/3", "1/3", "1/3"]},
        {"vector": [0, 0, 2], "age": "2", "cone": [0, 1, 2],
         "coefficients": ["2/3", "2/3", "2/3"]},
    ]
    assert rep["cy_covector"] == [0, 0, 1]
    assert rep["semi_fano"]["holds"] is True


def test_analyze_text(capsys, tmp_path):
    code, out, err = run(capsys, "analyze", fan_path(tmp_path, "c3z3"))
    assert code == 0
    assert "box [0, 0, 1] age 1" in out
    assert "Calabi-Yau covector" in out


def test_bundled_name_resolution(capsys):
    code, out, _ = run(capsys, "analyze", "kp2", "--format", "json")
    assert code == 0
    assert json.loads(out)["kernel_basis"] == [[-3, 1, 1, 1]]


def test_mirror_map_kp2(capsys):
    code, out, _ = run(capsys, "mirror-map", "kp2", "--order", "4",
                       "--format", "json")
    assert code == 0
    rep = json.loads(out)
    inv = rep["inverse"]["y1"]["terms"]
    assert {"exponents": {"q1": "2"}, "coeff": "6"} in inv
    assert {"exponents": {"q1": "4"}, "coeff": "56"} in inv


def test_invariants_kp2(capsys):
    code, out, _ = run(capsys, "invariants", "kp2", "--disk", "ray:0",
                       "--order", "3", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert {"alpha": [3], "insertions": {}, "value": "-32"} in rep["invariants"]


def test_invariants_text(capsys):
    code, out, _ = run(capsys, "invariants", "c3z3", "--disk", "box:3",
                       "--order", "4/3")
    assert code == 0
    assert "value=1/27" in out


def test_syz_kp2(capsys):
    code, out, _ = run(capsys, "syz", "kp2", "--order", "3",
                       "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["equation"] == "uv = G"
    assert len(rep["terms"]) == 4
    c3 = next(t for t in rep["terms"] if t["column"] == 3)
    assert c3["C"] == {"q1": "1"}


def test_oracle_kp2(capsys):
    code, out, _ = run(capsys, "oracle", "kp2", "--bar", "kp2_bar",
                       "--disk", "ray:0", "--order", "3")
    assert code == 0
    assert out.startswith("MATCH")
    assert "1 - 2*q1 + 5*q1^2 - 32*q1^3" in out


def test_validation_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "rank": 2, "rays": [[2, 0], [0, 1]], "cones": [[0, 1]]}))
    code, out, err = run(capsys, "analyze", str(bad))
    assert code == 2
    assert "non-primitive" in err


def test_missing_file_exit_code(capsys):
    code, out, err = run(capsys, "analyze", "/nonexistent/xyz.json")
    assert code == 2


def test_disk_required_validation(capsys):
    code, out, err = run(capsys, "invariants", "kp2", "--disk", "ray:9",
                         "--order", "2")
    assert code == 2
    assert "out of range" in err


@pytest.mark.parametrize("argv", [
    ("analyze", "c3z3", "--format", "json"),
    ("mirror-map", "kp2", "--order", "3", "--format", "json"),
    ("invariants", "kp2", "--disk", "ray:0", "--order", "3",
     "--format", "json"),
    ("syz", "c3z3", "--order", "4/3", "--format", "json"),
    ("oracle", "c3z3", "--bar", "c3z3_bar", "--disk", "box:3",
     "--order", "4/3", "--format", "json"),
])
def test_byte_determinism(capsys, argv):
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_output_file_atomic(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "analyze", "c3", "--format", "json",
                       "--output", str(target))
    assert code == 0
    assert out == ""
    rep = json.loads(target.read_text())
    assert rep["kernel_rank"] == 0
    leftovers = [p for p in tmp_path.iterdir() if p.name != "report.json"]
    assert leftovers == []


def test_series_round_trip_through_cli(capsys):
    from orbidisk.series import Series
    code, out, _ = run(capsys, "invariants", "c3z3", "--disk", "box:3",
                       "--order", "4/3", "--format", "json")
    rep = json.loads(out)
    s = Series.from_json(rep["potential"]["series"])
    assert s.to_json() == rep["potential"]["series"]


def test_consistency_error_exit_code(capsys, monkeypatch):
    from orbidisk import cli
    from orbidisk.errors import ConsistencyError

    def boom(cd, order):
        raise ConsistencyError("invariants", "compare_potentials",
                               "potential disagrees", ("q1", 1))

    monkeypatch.setattr(cli, "compare_potentials", boom)
    code = main(["oracle", "kp2", "--bar", "kp2_bar", "--disk", "ray:0",
                 "--order", "2"])
    err = capsys.readouterr().err
    assert code == 3
    payload = json.loads(err)["error"]
    assert payload["module"] == "invariants"
    assert payload["operation"] == "compare_potentials"
    assert "datum" in payload


def test_order_must_be_positive(capsys):
    code, _, err = run(capsys, "invariants", "kp2", "--disk", "ray:0",
                       "--order", "0")
    assert code == 2
    assert "order must be positive" in err
    code, _, err = run(capsys, "mirror-map", "kp2", "--order", "-2")
    assert code == 2
