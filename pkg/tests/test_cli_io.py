import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from curvetree import canonical_code, parse_polynomial, analyze_level
from curvetree.cli import main
from curvetree.errors import UsageError
from curvetree.io import atomic_write, render_svg, tree_from_dict, tree_to_dict, trees_equal
from curvetree.reeb import ReebTree

from conftest import analysis

GOLDEN = Path(__file__).parent / "golden" / "coste_tree.json"
DOCS = Path(__file__).parent.parent / "docs" / "tree-code.md"
COSTE = "x^2 + (y^2 - x)^2"


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def load(path):
    return json.loads(Path(path).read_text())


def test_analyze_coste(tmp_path):
    assert run(tmp_path, "analyze", "--poly", COSTE, "--eps", "0.1") == 0
    report = load(tmp_path / "report.json")
    assert report["is_convex"] is False
    assert report["code"] == "R(L[1])(R[1](R[2])(R[2]))"
    assert report["witness"]["f_Q"] == pytest.approx(0.2)
    tree = tree_from_dict(load(tmp_path / "tree.json"))
    assert canonical_code(tree) == report["code"]
    m = load(tmp_path / "manifest.json")
    assert m["command"] == "analyze" and m["poly_text"] == COSTE and m["tool_version"]
    assert sorted(Path(p).name for p in m["outputs"]) == ["report.json", "tree.json"]


def test_analyze_circle(tmp_path):
    assert run(tmp_path, "analyze", "--poly", "x^2 + y^2", "--eps", "0.04") == 0
    assert load(tmp_path / "report.json")["is_convex"] is True


def test_syntax_error_exit_code(tmp_path, capsys):
    assert run(tmp_path, "analyze", "--poly", "x^2 +", "--eps", "0.1") == 1
    err = capsys.readouterr().err
    assert "offset 5" in err or "5" in err


@pytest.mark.parametrize("argv", [
    ["analyze", "--poly", "x^2 + y^2"],
    ["analyze", "--poly", "x^2 + y^2", "--eps", "-1"],
    ["stabilize", "--poly", "x^2 + y^2", "--ratio", "1.5"],
    ["frobnicate"],
    ["kernel", "--poly", "x^2 + y^2", "--eps", "0.04", "--grid", "many"],
])
def test_usage_errors(tmp_path, argv):
    assert run(tmp_path, *argv) == 1


@pytest.mark.parametrize("argv", [
    ["analyze", "--poly", "x^2 - y^2", "--eps", "0.1"],
    ["analyze", "--poly", COSTE, "--eps", "10"],
    ["polar", "--poly", "x + y^2"],
])
def test_geometry_errors(tmp_path, argv):
    assert run(tmp_path, *argv) == 2


def test_stabilize_coste(tmp_path):
    assert run(tmp_path, "stabilize", "--poly", COSTE, "--eps-start", "0.1", "--ratio", "0.5", "--steps", "8") == 0
    data = load(tmp_path / "stabilisation.json")
    assert data["stable_from"] == 0 and data["monotone_geodesics"] is True
    assert len(data["codes"]) == 8 and data["asymptotic_tree"]["root"] is not None


def test_stabilize_circle(tmp_path):
    assert run(tmp_path, "stabilize", "--poly", "x^2 + y^2", "--steps", "5") == 0
    data = load(tmp_path / "stabilisation.json")
    assert data["stable_from"] == 0 and data["asymptotic_code"] == "R(L[1])(R[1])"


def test_polar_and_kernel(tmp_path):
    assert run(tmp_path, "polar", "--poly", COSTE, "--eps", "0.1") == 0
    data = load(tmp_path / "polar.json")
    assert len(data["half_branches"]) == 4 and data["divisible_by_x"] is False
    assert len(data["tangencies"]) == 4
    assert run(tmp_path, "kernel", "--poly", COSTE, "--eps", "0.1") == 0
    k = load(tmp_path / "kernel.json")
    assert k["is_star"] is True and k["meets_axis"] is True


def test_json_stdout(tmp_path, capsys):
    assert run(tmp_path, "kernel", "--poly", "x^2 + y^2", "--eps", "0.04", "--json") == 0
    assert json.loads(capsys.readouterr().out)["is_star"] is True


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid_n = 256\n")
    assert run(tmp_path, "analyze", "--poly", "x^2 + y^2", "--eps", "0.04", "--config", str(cfg)) == 0
    assert load(tmp_path / "manifest.json")["config"]["grid_n"] == 256


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["analyze", "--poly", COSTE, "--eps", "0.1", "--svg", "--out", str(d)]) == 0
    for name in ("tree.json", "report.json", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    strip = re.compile(rb"<!-- generated .*? -->")
    assert strip.sub(b"", (a / "analysis.svg").read_bytes()) == strip.sub(b"", (b / "analysis.svg").read_bytes())


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "curvetree", "analyze", "--poly", "x^2 +", "--eps", "0.1",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 1 and "error" in proc.stderr


# -- JSON --------------------------------------------------------------------

def test_golden_round_trip():
    data = load(GOLDEN)
    assert tree_to_dict(tree_from_dict(data)) == data


def test_golden_matches_fresh_tree():
    fresh = tree_to_dict(analysis("banana", 0.1).rooted)
    gold = load(GOLDEN)
    assert fresh["edges"] == gold["edges"] and fresh["embedding"] == gold["embedding"]
    assert fresh["root"] == gold["root"]
    for v, w in zip(fresh["vertices"], gold["vertices"]):
        assert (v["id"], v["kind"], v["preorder_class"]) == (w["id"], w["kind"], w["preorder_class"])
        assert v["x"] == pytest.approx(w["x"], abs=1e-12)
    assert canonical_code(tree_from_dict(gold)) == analysis("banana", 0.1).code


def test_trees_equal():
    t = analysis("banana", 0.1).rooted
    assert trees_equal(t, tree_from_dict(tree_to_dict(t)))
    assert not trees_equal(t, analysis("circle", 0.04).rooted)


def test_malformed_tree_json():
    with pytest.raises(UsageError):
        tree_from_dict({"vertices": [{"id": 0}]})


def test_documented_codes():
    text = DOCS.read_text()
    block = re.search(r"```codes\n(.*?)```", text, re.S).group(1)
    rows = [re.split(r"\s{2,}", line.strip()) for line in block.strip().splitlines()]
    assert len(rows) >= 5
    for poly_text, eps, code in rows:
        a = analyze_level(parse_polynomial(poly_text), float(eps), shape=False)
        assert a.code == code, poly_text


# -- SVG and files ------------------------------------------------------------

def svg_counts(path):
    text = Path(path).read_text()
    return {k: len(re.findall(f'class="{k}"', text)) for k in ("curve", "polar", "tree-edge", "vertex", "root")}, text


def test_svg_circle(tmp_path):
    a = analysis("circle", 0.04)
    counts, text = svg_counts(render_svg(a.curve, a.branches, a.rooted, tmp_path / "c.svg"))
    assert counts == {"curve": 1, "polar": 2, "tree-edge": 1, "vertex": 2, "root": 1}
    assert 'd="M ' in text and " Z" in text
    assert 'viewBox="-1 -1 2 2"' in text and "scale(1,-1)" in text
    edge = re.search(r'class="tree-edge" points="([^"]+)"', text).group(1)
    ys = {p.split(",")[1] for p in edge.split()}
    assert ys == {"0"}  # a straight edge along the axis


def test_svg_coste(tmp_path):
    a = analysis("banana", 0.1)
    counts, _ = svg_counts(render_svg(a.curve, a.branches, a.rooted, tmp_path / "y.svg"))
    assert counts == {"curve": 1, "polar": 4, "tree-edge": 3, "vertex": 4, "root": 1}


def test_svg_empty_tree(tmp_path):
    with pytest.raises(UsageError):
        render_svg(None, [], ReebTree([], [], {}), tmp_path / "e.svg")
    assert not (tmp_path / "e.svg").exists()


def test_render_command(tmp_path):
    assert run(tmp_path, "render", "--poly", COSTE, "--eps", "0.1") == 0
    counts, _ = svg_counts(tmp_path / "render.svg")
    assert counts["tree-edge"] == 3


def test_atomic_write_leaves_old_file_on_failure(tmp_path):
    target = tmp_path / "out.json"
    atomic_write(target, "old\n")

    class Boom:
        def __len__(self):
            return 1

    with pytest.raises(TypeError):
        atomic_write(target, Boom())
    assert target.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]
