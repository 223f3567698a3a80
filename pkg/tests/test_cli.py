from __future__ import annotations

import json
from fractions import Fraction

import pytest

from graphon_commons import graphs
from graphon_commons.cli import InputError, main, parse_graph, parse_graphon
from graphon_commons.graphon import StepGraphon
from graphon_commons.reduction import Certificate


def _run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def _json(capsys, *argv) -> tuple[int, dict]:
    code, out = _run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_parse_graph_expressions():
    assert parse_graph("2*K3+3*K2") == graphs.triangles_and_edges(2, 3)
    assert parse_graph("W5") == graphs.wheel5()
    assert parse_graph("C5") == graphs.cycle(5)
    assert parse_graph("paw") == graphs.paw()
    assert parse_graph(json.dumps(graphs.paw().to_json())) == graphs.paw()
    with pytest.raises(InputError):
        parse_graph("Q7")


def test_parse_graphon_specs():
    assert parse_graphon("const:1/2").values == ((0.5,),)
    assert parse_graphon("turan:4").n == 3
    assert parse_graphon("zy:0.28,0.42").mode == "rational"
    with pytest.raises(InputError):
        parse_graphon("zy:0.28")


def test_density_constant(capsys):
    code, out = _json(capsys, "density", "K2", "const:1/2")
    assert code == 0
    assert out["t_w"]["value"] == "1/2"
    assert out["threshold"] == "1"


def test_density_k3_pair_from_file(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"weights": ["1/2", "1/2"], "matrix": [["1/3", "1"], ["1", "1/3"]]}))
    code, out = _json(capsys, "density", "2*K3", str(path))
    assert code == 0
    assert out["mono"]["value"] == "53/729"


def test_density_paw(capsys):
    code, out = _json(capsys, "density", "paw", "zy:0.266491,0.2187477")
    assert code == 0
    assert abs(float(Fraction(out["mono"]["value"])) - 0.121415) < 1e-6


def test_density_float_mode_reports_error_bound(capsys):
    code, out = _json(capsys, "density", "K3", "p:0.3", "--mode", "float")
    assert code == 0
    assert out["t_w"]["mode"] == "float" and "error_bound" in out["t_w"]


def test_density_exit_codes(capsys):
    assert _run(capsys, "density", "K3", "nonsense")[0] == 2
    assert _run(capsys, "density", "K5", "turan:6", "--budget", "10")[0] == 3
    assert _run(capsys, "density", "K3", "p:0.3", "--mode", "rational")[0] == 0
    assert _run(capsys, "frobnicate")[0] == 2


def test_verify_exit_codes(capsys):
    assert _run(capsys, "verify", "--k3", "2", "2")[0] == 0
    assert _run(capsys, "verify", "--k3", "2", "3", "--rho", "zero")[0] == 1
    assert _run(capsys, "verify", "--k3", "2", "0", "--rho", "zero")[0] == 4
    assert _run(capsys, "verify")[0] == 2


def test_verify_three_triangle_family(capsys):
    code, out = _json(capsys, "verify", "--k3", "3", "5", "--rho", "bollobas_linear")
    assert code == 0
    x0 = [r for r in out["records"] if r["condition"] == "x0"]
    assert float(Fraction(x0[-1]["x_hi"])) >= 0.14


def test_verify_replays_certificates(capsys, tmp_path):
    code, out = _json(capsys, "verify", "--k3", "2", "1", "--strategy", "interval")
    assert code == 0
    assert Certificate.from_json(out).holds
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(out))
    code, rep = _json(capsys, "verify", str(path))
    assert code == 0 and rep["replay"]
    out["records"] = out["records"][1:]
    path.write_text(json.dumps(out))
    assert _run(capsys, "verify", str(path))[0] == 1


def test_verify_problem_file_and_csv(capsys, tmp_path):
    problem = {"k": "2", "l": "3", "g": {"kind": "power", "exponent": "3"}, "rho": {"kind": "zero"}, "c": "2"}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(problem))
    csv_path = tmp_path / "curves.csv"
    code, out = _json(capsys, "verify", str(path), "--csv", str(csv_path))
    assert code == 1 and out["verdict"] == "fails_at"
    header = csv_path.read_text().splitlines()[0]
    assert header.split(",")[0] == "x" and "x0" in header


def test_reproduce_single_targets(capsys):
    code, out = _json(capsys, "reproduce", "--id", "11", "--id", "wheel5-chromatic")
    assert code == 0
    assert len(out["results"]) == 1
    assert _run(capsys, "reproduce", "--id", "1")[0] == 1
    assert _run(capsys, "reproduce", "--id", "no-such-target")[0] == 2


def test_search_outcomes(capsys):
    code, out = _json(capsys, "search", "K3+K2", "--seed", "0")
    assert code == 0
    assert out["search_value"] <= 0.121450
    code, out = _json(capsys, "search", "W5", "--family", "turan")
    assert code == 0 and out["verdict"] == "not_strongly_common_witness"
    assert _run(capsys, "search", "K3")[0] == 1
    assert _run(capsys, "search", "K3+K2", "--budget", "20")[0] == 3


def test_classify(capsys):
    code, out = _json(capsys, "classify", "2", "3", "--check")
    assert code == 0
    assert (out["status"], out["certificate_ok"]) == ("uncommon", True)
    code, out = _json(capsys, "classify", "4", "7")
    assert code == 0 and out["status"] == "unknown"
    assert _run(capsys, "classify", "-1", "2")[0] == 2


def test_tree(capsys, tmp_path):
    tree = graphs.K3Tree(graphs.Graph(2, ((0, 1),)), ({0, 1, 2}, {0, 1, 2}), {(0, 1): {0, 1}})
    path = tmp_path / "t.json"
    path.write_text(json.dumps(tree.to_json()))
    code, out = _json(capsys, "tree", str(path), "--sidorenko-edges", "3")
    assert code == 0
    assert (out["k"], out["l"]) == (2, -1)
    assert out["with_sidorenko"]["status"] == "common"
    star = tmp_path / "s.json"
    star.write_text(json.dumps(graphs.star_k3_tree(2).to_json()))
    code, out = _json(capsys, "tree", str(star), "--sidorenko-edges", "0")
    assert out["vertex_gluing"]["status"] == "unknown"


def test_json_outputs_round_trip(capsys):
    _, out = _json(capsys, "search", "2*K3+3*K2", "--seed", "1")
    w = StepGraphon.from_json(out["graphon"])
    assert StepGraphon.from_json(w.to_json()) == w
    assert graphs.Graph.from_json(out["graph"]) == graphs.triangles_and_edges(2, 3)
