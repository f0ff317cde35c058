import json

import pytest

from coarsesep.cli import main
from coarsesep.graphs import graph, graph_to_json
from coarsesep.groups import abstract, cyclic

from conftest import write_graph_file


def run(args):
    return main([str(a) for a in args])


def read_json(path):
    return json.loads(path.read_text())


def test_classify_pentagon_z2(tmp_path, pentagon_z2, capsys):
    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon-Z2.json")
    code = run(["classify", "--graph", gfile, "--output-dir", tmp_path])
    assert code == 0
    rep = read_json(tmp_path / "classify.json")
    v = rep["verdicts"]
    assert v["virtual_surface"]["value"] == "yes"
    assert v["coarsely_separable_subexp"]["value"] == "yes"
    assert v["hyperbolic"]["value"] == "yes"
    assert v["one_ended"]["value"] == "yes"
    assert rep["skipped"] == {}


def test_classify_pentagon_one_z3(tmp_path, pentagon_one_z3):
    gfile = write_graph_file(tmp_path, pentagon_one_z3, "pentagon-one-Z3.json")
    assert run(["classify", "--graph", gfile, "--output-dir", tmp_path]) == 0
    v = read_json(tmp_path / "classify.json")["verdicts"]
    assert v["virtual_surface"]["value"] == "no"
    assert v["hyperbolic"]["value"] == "yes"
    assert v["one_ended"]["value"] == "yes"


def test_classify_square_z2(tmp_path, square_z2):
    gfile = write_graph_file(tmp_path, square_z2, "square-Z2.json")
    assert run(["classify", "--graph", gfile, "--output-dir", tmp_path]) == 0
    rep = read_json(tmp_path / "classify.json")
    assert rep["verdicts"]["hyperbolic"]["value"] == "no"
    # the subexponential-separability criterion needs a square-free graph
    assert "coarsely_separable_subexp" in rep["skipped"]


def test_classify_undecided_exit_code(tmp_path):
    g = graph([abstract(order=None)], [])
    gfile = write_graph_file(tmp_path, g, "abstract.json")
    assert run(["classify", "--graph", gfile, "--output-dir", tmp_path]) == 2


def test_classify_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["classify", "--graph", bad, "--output-dir", tmp_path]) == 1
    assert run(["classify", "--graph", tmp_path / "missing.json"]) == 1


def test_classify_report_schema(tmp_path, pentagon_z2):
    jsonschema = pytest.importorskip("jsonschema")
    from importlib import resources

    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon-Z2.json")
    run(["classify", "--graph", gfile, "--output-dir", tmp_path])
    schema = json.loads(
        resources.files("coarsesep").joinpath("schemas/classify_report.schema.json").read_text()
    )
    jsonschema.validate(read_json(tmp_path / "classify.json"), schema)


def test_grow_dihedral(tmp_path, dihedral_graph):
    gfile = write_graph_file(tmp_path, dihedral_graph, "dihedral.json")
    assert run(["grow", "--graph", gfile, "--n-max", 10, "--output-dir", tmp_path]) == 0
    lines = (tmp_path / "grow.csv").read_text().strip().splitlines()
    assert lines[0] == "n,ball,sphere"
    spheres = [int(ln.split(",")[2]) for ln in lines[2:]]
    assert spheres == [2] * 10


def test_grow_k2_stabilizes(tmp_path, k2_z2_z3):
    gfile = write_graph_file(tmp_path, k2_z2_z3, "k2.json")
    run(["grow", "--graph", gfile, "--n-max", 5, "--output-dir", tmp_path])
    lines = (tmp_path / "grow.csv").read_text().strip().splitlines()
    balls = [int(ln.split(",")[1]) for ln in lines[1:]]
    assert balls[-1] == 6 and balls[-2] == 6


def test_grow_pentagon_increasing(tmp_path, pentagon_z2):
    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon.json")
    run(["grow", "--graph", gfile, "--n-max", 8, "--output-dir", tmp_path])
    lines = (tmp_path / "grow.csv").read_text().strip().splitlines()
    spheres = [int(ln.split(",")[2]) for ln in lines[2:]]
    assert all(a < b for a, b in zip(spheres, spheres[1:]))


def test_cut_spheres_requires_seed(tmp_path, pentagon_z2):
    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon.json")
    assert run(["cut-spheres", "--graph", gfile, "--n-max", 4]) == 1


def test_cut_spheres_manifest_and_determinism(tmp_path, pentagon_z2):
    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon.json")
    manifest = tmp_path / "m.json"
    manifest.write_text(
        json.dumps(
            {
                "graph": str(gfile),
                "command": "cut-spheres",
                "params": {"n_min": 3, "n_max": 4, "t": 2, "delta": 0.5, "seed": 7, "pairs": 3},
                "output_dir": str(tmp_path / "out"),
            }
        )
    )
    assert run(["cut-spheres", "--manifest", manifest]) == 0
    first_csv = (tmp_path / "out" / "cut_spheres.csv").read_bytes()
    first_dat = (tmp_path / "out" / "cut_spheres.dat").read_bytes()
    assert run(["cut-spheres", "--manifest", manifest]) == 0
    assert (tmp_path / "out" / "cut_spheres.csv").read_bytes() == first_csv
    assert (tmp_path / "out" / "cut_spheres.dat").read_bytes() == first_dat
    header = first_csv.decode().splitlines()[0]
    assert header == "n,t,delta,size_subject,upper,lower,exact,lambda_fit_flag,runtime_ms,seed"


def test_cut_spheres_manifest_command_mismatch(tmp_path, pentagon_z2):
    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon.json")
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({"graph": str(gfile), "command": "grow"}))
    assert run(["cut-spheres", "--manifest", manifest]) == 1


def test_persist_dihedral(tmp_path, dihedral_graph):
    gfile = write_graph_file(tmp_path, dihedral_graph, "dihedral.json")
    code = run(
        ["persist", "--graph", gfile, "--r", 5, "--t", 1, "--pairs", 8, "--seed", 3,
         "--output-dir", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "persist.csv").read_text().strip().splitlines()
    assert lines[0].startswith("x,y,overlap")
    for ln in lines[1:]:
        parts = ln.split(",")
        assert float(parts[4]) >= 1 / 3
        assert parts[6] == "1"


def test_distort_self_pair(tmp_path, pentagon_z2):
    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon.json")
    code = run(
        ["distort", "--graph", gfile, "--n", 5, "--t", 2, "--pairs", 6, "--seed", 1,
         "--min-extrinsic", 4, "--self-pair", "--output-dir", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "distort.csv").read_text().strip().splitlines()
    assert lines[1] == "0,0,0,0"


def test_sep_profile_finite_group_warns(tmp_path, k2_z2_z3, capsys):
    gfile = write_graph_file(tmp_path, k2_z2_z3, "k2.json")
    code = run(
        ["sep-profile", "--graph", gfile, "--n-max", 6, "--t", 1, "--seed", 2,
         "--output-dir", tmp_path]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "warning" in out
    assert (tmp_path / "sep_profile.csv").exists()


def test_element_cap_flag(tmp_path, pentagon_z2):
    gfile = write_graph_file(tmp_path, pentagon_z2, "pentagon.json")
    code = run(
        ["grow", "--graph", gfile, "--n-max", 10, "--element-cap", 50,
         "--output-dir", tmp_path]
    )
    assert code == 1
