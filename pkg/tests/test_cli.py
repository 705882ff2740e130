import json

import pytest

import common
from polytrack.cli import main
from polytrack.io import dumps, read_json


def _write_fixture(tmp_path, payload, name="scene.json"):
    path = tmp_path / name
    path.write_text(dumps(payload) + "\n")
    return str(path)


def test_analyze_trackable(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["analyze", "--scenario", common.fixture_path("lshape"),
                 "--out", str(out)])
    assert code == 0
    assert "trackable" in capsys.readouterr().out
    names = {p.name for p in out.iterdir()}
    assert names == {"classification.json", "curves.json", "partition.json",
                     "automaton.json", "report.json"}
    assert read_json(str(out / "report.json"))["trackable"] is True


def test_analyze_not_trackable(tmp_path, capsys):
    res = common.get_speedratio("lshape")
    code = main(["analyze", "--scenario", common.fixture_path("lshape"),
                 "--out", str(tmp_path), "--ratio", str(res.r_max * 1.05)])
    assert code == 2
    text = capsys.readouterr().out
    assert "not trackable" in text and "witness" in text
    assert read_json(str(tmp_path / "report.json"))["trackable"] is False


def test_analyze_reruns_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["analyze", "--scenario", common.fixture_path("deadlock"),
                     "--out", str(out)]) == 0
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_analyze_rejects_bad_inputs(tmp_path, capsys):
    bowtie = {"version": 1,
              "vertices": [[0, 0], [2, 2], [2, 0], [0, 2]], "ratio": 0.3}
    code = main(["analyze", "--scenario", _write_fixture(tmp_path, bowtie),
                 "--out", str(tmp_path)])
    assert code == 1
    assert "error:" in capsys.readouterr().err

    missing = str(tmp_path / "nope.json")
    assert main(["analyze", "--scenario", missing, "--out", str(tmp_path)]) == 1

    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert main(["analyze", "--scenario", str(garbled), "--out", str(tmp_path)]) == 1


def test_analyze_requires_some_ratio(tmp_path, capsys):
    scn, _ = common.get_scenario("lshape")
    payload = json.loads(dumps({
        "version": 1,
        "vertices": [[float(x), float(y)] for x, y in scn.poly.vertices],
        "guards": [[int(a), int(b)] for a, b in scn.guards],
    }))
    path = _write_fixture(tmp_path, payload)
    assert main(["analyze", "--scenario", path, "--out", str(tmp_path)]) == 1
    assert "ratio" in capsys.readouterr().err
    assert main(["analyze", "--scenario", path, "--out", str(tmp_path),
                 "--ratio", "0.3"]) == 0


def test_analyze_deploys_guards_when_missing(tmp_path, capsys):
    scn, _ = common.get_scenario("lshape")
    payload = {"version": 1,
               "vertices": [[float(x), float(y)] for x, y in scn.poly.vertices],
               "ratio": 0.2}
    code = main(["analyze", "--scenario", _write_fixture(tmp_path, payload),
                 "--out", str(tmp_path)])
    assert code == 0
    data = read_json(str(tmp_path / "classification.json"))
    assert data["guards"]


def test_speedratio_command(tmp_path, capsys):
    code = main(["speedratio", "--scenario", common.fixture_path("pentagon"),
                 "--out", str(tmp_path)])
    assert code == 0
    assert "unbounded" in capsys.readouterr().out
    data = read_json(str(tmp_path / "speedratio.json"))
    assert data["unbounded"] is True and data["r_max"] is None


def test_simulate_script_policy(tmp_path, capsys):
    scn, _ = common.get_scenario("lshape")
    start = scn.poly.shapely.representative_point()
    script = tmp_path / "script.json"
    script.write_text(dumps({"waypoints": [[start.x + 0.05, start.y]]}))
    argv = ["simulate", "--scenario", common.fixture_path("lshape"),
            "--out", str(tmp_path), "--policy", f"script:{script}",
            "--steps", "50", "--seed", "3"]
    assert main(argv) == 0
    assert "TRACKED" in capsys.readouterr().out
    first = (tmp_path / "trace.jsonl").read_bytes()
    lines = first.decode().splitlines()
    assert len(lines) == 52                       # initial + 50 steps + verdict
    assert json.loads(lines[-1]) == {"verdict": "TRACKED", "breach": None}
    for line in lines[:-1]:
        rec = json.loads(line)
        assert list(rec) == ["t", "p_I", "s", "mode", "covered", "guards"]
    # identical invocation, identical bytes
    assert main(argv) == 0
    assert (tmp_path / "trace.jsonl").read_bytes() == first


def test_simulate_breach_exit_code(tmp_path, capsys):
    res = common.get_speedratio("lshape")
    code = main(["simulate", "--scenario", common.fixture_path("lshape"),
                 "--out", str(tmp_path), "--policy", "witness",
                 "--ratio", str(res.r_max * 1.05), "--steps", "4000"])
    assert code == 2
    assert "BREACH" in capsys.readouterr().out
    last = (tmp_path / "trace.jsonl").read_text().splitlines()[-1]
    assert json.loads(last)["verdict"] == "BREACH"


def test_simulate_unknown_policy(tmp_path, capsys):
    code = main(["simulate", "--scenario", common.fixture_path("lshape"),
                 "--out", str(tmp_path), "--policy", "zigzag"])
    assert code == 1
    assert "policy" in capsys.readouterr().err
