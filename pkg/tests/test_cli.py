import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from bvtwist.cli import RunConfig, main, run


def schema(name):
    return json.loads(resources.files("bvtwist").joinpath(f"schemas/{name}").read_text())


def invoke(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_fact_hom_example(capsys):
    code, out = invoke(capsys, "fact-hom", "--manifold", "S4", "--algebra", "sl2")
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["d_M"] == -6 and doc["result"]["parity_ok"]


def test_anomaly_example(capsys):
    code, out = invoke(capsys, "anomaly", "--algebra", "sl2", "--delta-degree", "1", "--vmax", "5")
    doc = json.loads(out)
    assert code == 0
    assert doc["result"]["all_zero"]
    assert doc["seed"] == 0


def test_cohomology_example(capsys):
    code, out = invoke(capsys, "cohomology", "--algebra", "sl2")
    assert code == 0
    assert json.loads(out)["result"]["dims"] == [1, 0, 0, 1]


def test_catalogue_lists_and_validates(capsys):
    code, out = invoke(capsys, "catalogue")
    doc = json.loads(out)
    assert code == 0
    text = json.dumps(doc["result"])
    assert "sl2" in text and "T4" in text
    jsonschema.validate(doc["result"], schema("catalogue.schema.json"))


@pytest.mark.parametrize("argv", [
    ["fact-hom", "--manifold", "S4", "--algebra", "sl2"],
    ["anomaly", "--algebra", "gl2", "--seed", "5", "--samples", "3"],
    ["vacua", "--algebra", "gl2", "--vacuum-label", "regular-semisimple", "--twist", "1", "1", "0"],
    ["propagator", "--dim", "2", "--lambda", "1.0", "--z", "1+1j", "0", "--w", "0", "0.5j"],
    ["spectral", "--seed", "3"],
])
def test_byte_identical_and_schema(capsys, argv):
    c1, a = invoke(capsys, *argv)
    c2, b = invoke(capsys, *argv)
    assert c1 == c2 == 0
    assert a == b
    doc = json.loads(a)
    jsonschema.validate(doc, schema("report.schema.json"))
    assert "conventions" in doc and "caps" in doc
    assert doc["conventions"]["normal_order"] == "derivatives-right"


def test_unknown_names_exit_1_with_catalogue(capsys):
    code, out = invoke(capsys, "fact-hom", "--manifold", "RP4", "--algebra", "sl2")
    assert code == 1 and "S4" in json.loads(out)["error"]
    code, out = invoke(capsys, "cohomology", "--algebra", "e8")
    assert code == 1 and "sl2" in json.loads(out)["error"]


def test_invalid_config_exit_1():
    code, rep = run(RunConfig(command="vacua", algebra="gl2", vacuum=["x", "1", "0", "0"]))
    assert code == 1
    code, rep = run(RunConfig(command="cohomology", algebra="sl2", caps={"max_weight": 0}))
    assert code == 1


def test_check_failure_exit_2(capsys):
    code, out = invoke(capsys, "vacua", "--algebra", "gl2", "--vacuum-label", "nilpotent", "--twist", "1", "1", "1")
    assert code == 2


def test_table_format(capsys):
    code, out = invoke(capsys, "cohomology", "--algebra", "sl2", "--format", "table")
    assert code == 0
    assert any(line.startswith("result.by_degree.3") for line in out.splitlines())


def test_graph_input(capsys, tmp_path):
    doc = {"graphs": [{"name": "theta", "vertices": [0, 1], "edges": [[0, 1]] * 3, "directed": False},
                      {"name": "bad", "vertices": ["a", "b", "c"], "edges": [["a", "c"], ["b", "c"]]}]}
    path = tmp_path / "g.json"
    path.write_text(json.dumps(doc))
    code, out = invoke(capsys, "anomaly", "--algebra", "sl2", "--samples", "1", "--graph", str(path))
    rows = json.loads(out)["result"]["graphs"]
    assert code == 0
    assert rows[0]["admissible_orientations"] == 0
    assert rows[1]["kind"] == "inadmissible"
    path.write_text(json.dumps({"graphs": [{"vertices": [0]}]}))
    code, _ = invoke(capsys, "anomaly", "--algebra", "sl2", "--graph", str(path))
    assert code == 1


def test_catalogue_env_override(capsys, tmp_path, monkeypatch):
    doc = {"manifolds": [{"name": "Pt4", "dim": 4, "flavor": "deRham", "betti": [1, 0, 0, 0, 0], "chi": 1}]}
    (tmp_path / "manifolds.json").write_text(json.dumps(doc))
    monkeypatch.setenv("BVTWIST_CATALOGUE", str(tmp_path))
    code, out = invoke(capsys, "fact-hom", "--manifold", "Pt4", "--algebra", "sl2")
    assert code == 0 and json.loads(out)["result"]["d_M"] == 3
    code, _ = invoke(capsys, "fact-hom", "--manifold", "S4", "--algebra", "sl2")
    assert code == 1


def test_compactify(capsys):
    code, out = invoke(capsys, "compactify", "--manifold", "S3", "--algebra", "abelian:1", "--cap", "3")
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bvtwist", "cohomology", "--algebra", "abelian:2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
