import json

import pytest

from odeinv import cli
from odeinv.genwilczynski import default_convention
from odeinv.jets import OdeSystem, PointMap, pullback


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(p)

    return _write


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def system(m, order, *rhs):
    return OdeSystem.from_strings(m, order, list(rhs)).to_json()


def test_invariants_on_trivial(capsys, write):
    code, out, _ = run(capsys, "invariants", write("s.json", OdeSystem.trivial(2, 4).to_json()))
    assert code == 0
    rep = json.loads(out)
    assert all(t["is_zero"] for t in rep["invariants"])


def test_invariants_lists_nonzero_component(capsys, write):
    code, out, _ = run(capsys, "invariants", write("s.json", system(2, 4, "y2_3^2", "0")))
    assert code == 0
    I2 = next(t for t in json.loads(out)["invariants"] if t["name"] == "I_2")
    assert not I2["is_zero"] and I2["components"]["1;22"] == "2"


def test_malformed_expression(capsys, write):
    path = write("s.json", {"m": 1, "order": 2, "rhs": ["y1_1 + * 2"]})
    code, _, err = run(capsys, "invariants", path)
    assert code == cli.EXIT_INPUT
    assert "^" in err and "position" in err


def test_bad_files(capsys, write, tmp_path):
    assert run(capsys, "invariants", str(tmp_path / "missing.json"))[0] == cli.EXIT_INPUT
    assert run(capsys, "invariants", write("bad.json", "{not json"))[0] == cli.EXIT_INPUT
    assert run(capsys, "invariants", write("shape.json", {"m": 2, "order": 2, "rhs": ["0"]}))[0] == cli.EXIT_INPUT


def test_trivializable_exit_codes(capsys, write):
    pm = PointMap.from_strings(2, "x", ["y1_0 + x^2", "y2_0"])
    path = write("pb.json", pullback(pm, OdeSystem.trivial(2, 4)).to_json())
    assert run(capsys, "trivializable", path)[0] == cli.EXIT_OK

    code, out, _ = run(capsys, "trivializable", write("i2.json", system(2, 4, "y2_3^2", "0")))
    assert code == cli.EXIT_NOT_TRIVIALIZABLE
    assert {"invariant": "I_2", "index": "1;22", "value": "2"} in json.loads(out)["witnesses"]

    conics = system(1, 5, "5*y1_3*y1_4/y1_2 - 40*y1_3^3/(9*y1_2^2)")
    code, out, _ = run(capsys, "trivializable", write("conics.json", conics))
    assert code == cli.EXIT_UNDECIDED
    assert json.loads(out)["blocked_by"] == ["J_6"]


def test_trivializable_scalar_third_order_reports_both(capsys, write):
    code, out, _ = run(capsys, "trivializable", write("s.json", system(1, 3, "y1_0")))
    data = json.loads(out)
    assert code == cli.EXIT_NOT_TRIVIALIZABLE
    assert data["equivalence_kind"] == "point" and "contact" in data["other"]


def test_transform(capsys, write):
    pm = PointMap.from_strings(1, "x", ["y1_0 + x^2"])
    code, out, _ = run(capsys, "transform", write("m.json", pm.to_json()),
                       write("s.json", OdeSystem.trivial(1, 2).to_json()))
    assert code == 0 and json.loads(out)["rhs"] == ["-2"]


def test_singular_map(capsys, write):
    path = write("m.json", {"m": 1, "x": "x", "y": ["x"]})
    code, _, err = run(capsys, "transform", path, write("s.json", OdeSystem.trivial(1, 2).to_json()))
    assert code == cli.EXIT_INPUT and "Jacobian" in err


def test_prolong(capsys, write):
    pm = PointMap.from_strings(1, "x", ["y1_0 + x^2"])
    code, out, _ = run(capsys, "prolong", write("m.json", pm.to_json()), "--order", "2")
    assert code == 0
    assert json.loads(out)["levels"] == [["x^2 + y1_0"], ["y1_1 + 2*x"], ["y1_2 + 2"]]


def test_theta(capsys, write):
    zero = {"m": 2, "order": 3, "coeffs": [[["0", "0"], ["0", "0"]]] * 3}
    code, out, _ = run(capsys, "theta", write("op.json", zero), "2")
    assert code == 0 and json.loads(out)["theta"] == [["0", "0"], ["0", "0"]]
    not_lf = {"m": 1, "order": 2, "coeffs": [[["x"]], [["1"]]]}
    assert run(capsys, "theta", write("nlf.json", not_lf), "2")[0] == cli.EXIT_INPUT
    assert run(capsys, "theta", write("op.json", zero), "7")[0] == cli.EXIT_INPUT


def test_cohomology(capsys):
    code, out, _ = run(capsys, "cohomology", "3", "2")
    rows = json.loads(out)["table"]
    assert code == 0
    assert {"q": 2, "degree": 2, "dim": 6, "source": "effective"} in rows
    assert run(capsys, "cohomology", "0", "2")[0] == cli.EXIT_INPUT


def test_text_format_either_position(capsys, write):
    path = write("s.json", system(2, 4, "y2_3^2", "0"))
    a = run(capsys, "--format", "text", "trivializable", path)
    b = run(capsys, "trivializable", path, "--format", "text")
    assert a == b
    assert a[1].startswith("verdict: NotTrivializable")


def test_deterministic_output(capsys, write):
    path = write("s.json", system(2, 3, "y1_2*y2_2 + y2_1", "x*y1_1"))
    first = run(capsys, "invariants", path)
    second = run(capsys, "invariants", path)
    assert first == second


def test_expansion_cap(capsys, write, monkeypatch):
    monkeypatch.setenv("ODEINV_MAX_DEGREE", "1")
    path = write("s.json", system(2, 3, "y1_2^3*y2_2^2 + y2_1", "x*y1_1"))
    code, _, err = run(capsys, "invariants", path)
    assert code == cli.EXIT_LIMIT and "ODEINV_MAX_DEGREE" in err
    monkeypatch.setenv("ODEINV_MAX_DEGREE", "lots")
    assert run(capsys, "invariants", path)[0] == cli.EXIT_INPUT


def test_convention_file(capsys, write):
    good = write("conv.json", default_convention().to_json())
    path = write("s.json", system(2, 2, "y2_0", "0"))
    assert run(capsys, "--convention", good, "invariants", path)[0] == 0
    data = default_convention().to_json()
    data["constants"]["fels_W2"] = "5"
    assert run(capsys, "--convention", write("bad.json", data), "invariants", path)[0] == cli.EXIT_INPUT
    assert run(capsys, "--convention", write("junk.json", {"side": "up"}), "invariants", path)[0] == cli.EXIT_INPUT


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--criteria", "6,7")
    assert code == 0
    summaries = [line for line in out.splitlines() if line.startswith("criterion ")]
    assert [line.split()[1] for line in summaries] == ["6", "7"]
    assert all(" PASS" in line for line in summaries)
