import json
import subprocess
import sys

import pytest

from racgdiv.cli import main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def rows(path):
    return [r for r in path.read_text().splitlines() if not r.startswith("#")]


def header(path):
    first = path.read_text().splitlines()[0]
    assert first.startswith("# ")
    return json.loads(first[2:])


def test_ball_grid(tmp_path):
    assert run(tmp_path, "ball", "--family", "gamma:1", "--radius", "3") == 0
    p = tmp_path / "ball.csv"
    assert rows(p) == ["r,sphere_size,ball_size", "0,1,1", "1,4,5", "2,8,13", "3,12,25"]
    meta = header(p)
    assert meta["tool"] == "racgdiv" and meta["config"]["radius"] == 3 and "seed" in meta["config"]


def test_ball_radius0(tmp_path):
    assert run(tmp_path, "ball", "--family", "omega:2", "--radius", "0") == 0
    assert rows(tmp_path / "ball.csv")[1:] == ["0,1,1"]


def test_ball_budget_partial(tmp_path):
    code = run(tmp_path, "ball", "--family", "omega:2", "--radius", "8", "--max-vertices", "500")
    assert code == 1
    p = tmp_path / "ball.csv"
    assert header(p)["partial"] is True
    assert rows(p)[1:3] == ["0,1,1", "1,8,9"]


def test_malformed_graph(tmp_path, capsys):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"generators": ["s", "t"], "edges": [["s", "t"], ["s", "q"]]}))
    assert run(tmp_path, "ball", "--graph", str(g)) == 2
    err = capsys.readouterr().err
    assert "edges[1]" in err and "q" in err


def test_ldiv_grid(tmp_path):
    assert run(tmp_path, "ldiv", "--family", "gamma:1", "--word", "a0 b0", "--r-max", "4") == 0
    body = rows(tmp_path / "ldiv.csv")
    assert body[0] == "family,geodesic,r,t,status,value,truncation,wall_ms"
    assert [int(r.split(",")[5]) for r in body[1:]] == [4, 8, 12, 16]
    fit = json.loads((tmp_path / "ldiv_fit.json").read_text())
    assert fit["model"] == "polynomial"


def test_ldiv_custom_edgeless(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"generators": ["s", "t"], "edges": []}))
    assert run(tmp_path, "ldiv", "--graph", str(g), "--word", "s t", "--r-max", "1") == 0
    assert rows(tmp_path / "ldiv.csv")[1].split(",")[4] == "no_path_within_truncation"


def test_ldiv_unreduced(tmp_path, capsys):
    assert run(tmp_path, "ldiv", "--family", "gamma:1", "--word", "a0 a1") == 2
    assert "period not reduced" in capsys.readouterr().err


@pytest.mark.parametrize("args", [
    ["ldiv", "--family", "gamma:1"],
    ["ball", "--family", "gamma:0"],
    ["ball"],
    ["ldiv", "--family", "gamma:1", "--word", "a0 b0", "--r-min", "3", "--r-max", "2"],
    ["gersten", "--family", "gamma:1", "--rho", "2"],
    ["ldiv", "--family", "gamma:1", "--word", "a0 zz"],
])
def test_invalid_input(tmp_path, args):
    assert run(tmp_path, *args) == 2


def test_gersten(tmp_path):
    assert run(tmp_path, "gersten", "--family", "gamma:1", "--r-max", "3") == 0
    assert [int(r.split(",")[5]) for r in rows(tmp_path / "gersten.csv")[1:]] == [4, 8, 12]


def test_cone(tmp_path):
    assert run(tmp_path, "cone", "--family", "omega:1", "--radius", "1") == 0
    data = json.loads((tmp_path / "cone.json").read_text())
    assert len(data["group_vertices"]) == 7
    assert [c["min_rep"] for c in data["cone_vertices"]] == ["", "c1", "c2"]
    assert data["coned_distance_from_base"][0] == "0"
    assert data["config"]["family"] == "omega:1"


def test_transitions(tmp_path):
    assert run(tmp_path, "transitions", "--family", "omega:1", "--word", "a1 b1") == 0
    body = rows(tmp_path / "transitions.csv")
    assert [r.split(",")[1] for r in body[1:]].count("deep") == 6
    assert run(tmp_path, "transitions", "--family", "omega:1", "--word", "a1 b1", "--length", "4") == 0
    body = rows(tmp_path / "transitions.csv")
    assert {r.split(",")[1] for r in body[1:]} == {"transition"}


def test_experiment_deterministic(tmp_path):
    args = ["experiment", "spectrum", "--d", "1,2", "--r-max", "3"]
    assert run(tmp_path, *args) == 0
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert run(tmp_path, *args) == 0
    second = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert first == second and len(first) == 2


def test_experiment_gap_and_budget(tmp_path):
    assert run(tmp_path / "a", "experiment", "gap", "--d", "1", "--r-max", "2") == 0
    assert run(tmp_path / "b", "experiment", "gap", "--d", "1,2") == 2
    code = run(tmp_path / "c", "experiment", "spectrum", "--d", "2", "--r-max", "4",
               "--max-vertices", "400")
    assert code == 1
    body = json.loads(next((tmp_path / "c").glob("*.json")).read_text())
    assert body["report"]["complete"] is False


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "racgdiv.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "racgdiv" in out.stdout
