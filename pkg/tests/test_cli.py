import json
import subprocess
import sys

import pytest

from epitopo.action import action_to_dict
from epitopo.cli import main
from epitopo.generators import binary_inputs
from epitopo.protocols import immediate_snapshot
from epitopo.tasks import consensus, task_to_dict


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    sq, b3 = tmp_path / "sq.json", tmp_path / "bin3.json"
    assert run(capsys, "model", "gen", "binary-inputs", "--agents", 2, "--out", sq)[0] == 0
    assert run(capsys, "model", "gen", "binary-inputs", "--agents", 3, "--out", b3)[0] == 0
    return tmp_path, sq, b3


def test_check_prints_false(files, capsys):
    _, sq, _ = files
    code, out, _ = run(capsys, "check", "--model", sq, "--facet", "01", "--formula", "K[g] p[w,1]")
    assert (code, out) == (0, "false\n")
    code, out, _ = run(capsys, "--json", "check", "--model", sq, "--facet", "01", "--formula", "p[g,0]")
    assert json.loads(out) == {"value": True}


def test_solve_consensus(files, capsys):
    _, _, b3 = files
    code, out, err = run(capsys, "solve", "--input", b3, "--protocol", "is:1", "--task", "consensus")
    assert (code, out) == (0, "UNSOLVABLE\n")
    assert "seconds=" in err


def test_solve_json_with_certificate(files, capsys):
    _, _, b3 = files
    code, out, _ = run(
        capsys, "solve", "--json", "--input", b3, "--task", "consensus", "--obstruction",
        "logic:C[b,g,w] (p[b,0] | p[g,0] | p[w,0]) | C[b,g,w] (p[b,1] | p[g,1] | p[w,1])",
    )
    data = json.loads(out)
    assert code == 0 and data["status"] == "UNSOLVABLE" and data["verified"]
    assert data["certificate"]["kind"] == "logic"


def test_solve_approx_delta(files, capsys):
    _, sq, _ = files
    code, out, _ = run(capsys, "solve", "--json", "--input", sq, "--protocol", "is:1", "--task", "approx:3")
    data = json.loads(out)
    assert data["status"] == "SOLVABLE" and data["verified"] and len(data["delta"]) == 12


def test_output_is_reproducible(files, capsys):
    _, sq, _ = files
    args = ("solve", "--json", "--input", sq, "--protocol", "is:2", "--task", "approx:9")
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first


def test_validate_broken(files, capsys):
    tmp, sq, _ = files
    data = json.loads(sq.read_text())
    data["facets"][0] = [data["facets"][0][0], data["facets"][0][0]]
    broken = tmp / "broken.json"
    broken.write_text(json.dumps(data))
    code, _, err = run(capsys, "model", "validate", broken)
    assert code == 1 and err.startswith("NonChromatic")
    assert run(capsys, "model", "validate", sq)[0] == 0


def test_missing_file_is_domain_error(capsys, tmp_path):
    code, _, err = run(capsys, "stats", "--model", tmp_path / "nope.json")
    assert code == 1 and "no such file" in err


def test_usage_errors(files, capsys):
    _, sq, _ = files
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    code, _, _ = run(capsys, "solve", "--input", sq, "--protocol", "xyz", "--task", "consensus")
    assert code == 2
    code, _, _ = run(capsys, "solve", "--input", sq, "--task", "nonsense")
    assert code == 2


def test_entry_point_exit_codes(files):
    _, sq, _ = files
    ok = subprocess.run([sys.executable, "-m", "epitopo.cli", "stats", "--model", str(sq)], capture_output=True, text=True)
    assert ok.returncode == 0 and "euler_characteristic" in ok.stdout
    bad = subprocess.run([sys.executable, "-m", "epitopo.cli", "bogus"], capture_output=True, text=True)
    assert bad.returncode == 2


def test_dualize_roundtrip(files, capsys):
    tmp, sq, _ = files
    k = tmp / "k.json"
    assert run(capsys, "model", "dualize", sq, "--out", k)[0] == 0
    assert "states" in json.loads(k.read_text())
    code, out, _ = run(capsys, "check", "--model", k, "--state", "01", "--formula", "K[g] p[w,1]")
    assert out == "false\n"
    code, out, _ = run(capsys, "model", "dualize", k)
    assert len(json.loads(out)["facets"]) == 4
    assert run(capsys, "check", "--model", k, "--formula", "true")[0] == 2


def test_protocol_and_update(files, capsys):
    tmp, sq, _ = files
    proto = tmp / "p.json"
    assert run(capsys, "protocol", "is", "--rounds", 2, "--input", sq, "--out", proto)[0] == 0
    data = json.loads(proto.read_text())
    assert len(data["facets"]) == 36 and data["rounds"] == 2
    assert set(data["projection"].values()) <= set(json.loads(sq.read_text())["vertices"][i]["id"] for i in range(4))
    act = tmp / "is.json"
    act.write_text(json.dumps(action_to_dict(immediate_snapshot(binary_inputs(2)))))
    code, out, _ = run(capsys, "update", "--model", sq, "--action", act)
    assert code == 0 and len(json.loads(out)["facets"]) == 12


def test_task_commands(files, capsys):
    tmp, _, b3 = files
    code, out, _ = run(capsys, "task", "ksa:1", "--input", b3)
    assert code == 0 and len(json.loads(out)["facets"]) == 2
    spec = tmp / "cons.json"
    spec.write_text(json.dumps(task_to_dict(consensus(binary_inputs(3)))))
    code, out, _ = run(capsys, "solve", "--input", b3, "--task", spec)
    assert out == "UNSOLVABLE\n"
    code, out, _ = run(capsys, "task", "consensus", "--input", b3, "--product")
    assert len(json.loads(out)["facets"]) == 14


def test_model_gen_variants(capsys):
    code, out, _ = run(capsys, "model", "gen", "cards", "--deck", 4)
    assert len(json.loads(out)["facets"]) == 24
    code, out, _ = run(capsys, "model", "gen", "strip")
    assert len(json.loads(out)["facets"]) == 3
    code, out, _ = run(capsys, "model", "gen", "inputs", "--agents", 3, "--values", "0,1,2")
    assert len(json.loads(out)["facets"]) == 27


def test_model_build(tmp_path, capsys):
    rows = tmp_path / "rows.json"
    rows.write_text(json.dumps({"agents": ["g", "w"], "rows": [{"g": "0", "w": "0"}, {"g": "0", "w": "1"}]}))
    code, out, _ = run(capsys, "model", "build", rows)
    assert code == 0 and len(json.loads(out)["vertices"]) == 3
    rows.write_text(json.dumps({"agents": ["g", "w"], "rows": [{"g": "0"}]}))
    code, _, err = run(capsys, "model", "build", rows)
    assert code == 1 and err.startswith("NonPure")


def test_export_dot_parses(files, capsys):
    pydot = pytest.importorskip("pydot")
    _, _, b3 = files
    code, out, _ = run(capsys, "export", "--dot", "--model", b3, "--agents", "b,g")
    (graph,) = pydot.graph_from_dot_data(out)
    assert len(graph.get_nodes()) == 8
    assert all(e.get("label").strip('"') in {"b", "g", "b,g"} for e in graph.get_edges())


def test_stats_json(files, capsys):
    _, _, b3 = files
    code, out, _ = run(capsys, "stats", "--json", "--model", b3)
    data = json.loads(out)
    assert data["euler_characteristic"] == 2 and data["counts"] == [6, 12, 8]
