import json

import pytest

from colordsp.bench import gnm_colored
from colordsp.cli import main
from colordsp.graph_model import serialize_edge_list
from colordsp.ilp import parse_lp

TRI = "a b 1\nb c 1\na c 2\nd e 3\n"


@pytest.fixture
def tri_file(tmp_path):
    p = tmp_path / "tri.txt"
    p.write_text(TRI)
    return str(p)


@pytest.fixture
def rand_file(tmp_path):
    p = tmp_path / "rand.txt"
    p.write_text(serialize_edge_list(gnm_colored(40, 70, colors=3, seed=1, planted=8,
                                                 planted_p=0.9)))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_stats(capsys, tri_file):
    code, out, _ = run(capsys, "stats", tri_file, "--dsp", "--format", "json")
    row = json.loads(out)
    assert code == 0 and row["nodes"] == 5 and row["edges"] == 4
    assert row["dsp_density"] == "1.0" and row["dsp_provenance"] == "exact"


def test_dsp_csv(capsys, tri_file):
    code, out, _ = run(capsys, "dsp", tri_file)
    header, line = out.strip().splitlines()
    row = dict(zip(header.split(","), line.split(",")))
    assert code == 0 and row["density"] == "3/3" and row["nodes"] == "a b c"


def test_dsp_greedy(capsys, tri_file):
    code, out, _ = run(capsys, "dsp", tri_file, "--greedy", "--format", "json")
    assert code == 0 and json.loads(out)["algorithm"] == "greedy"


def test_alhe(capsys, tri_file):
    code, out, _ = run(capsys, "alhe", tri_file, "--h", "4", "--exact", "--format", "json")
    assert code == 0 and json.loads(out)["density"] == "4/5"


def test_alhc_algorithms(capsys, tri_file):
    got = {}
    for algo in ("colapprox", "heuristic", "brute"):
        code, out, _ = run(capsys, "alhc", tri_file, "--h", "1=1,2=1,3=1", "--algo", algo,
                           "--format", "json")
        assert code == 0
        got[algo] = json.loads(out)["density"]
    assert got["colapprox"] == got["brute"] == "4/5"


def test_alhc_multi(capsys, tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("u v 1,2\n")
    code, out, _ = run(capsys, "alhc", str(p), "--h", "1=1,2=1", "--format", "json")
    row = json.loads(out)
    assert code == 0 and row["density"] == "2/2"


def test_ladder(capsys, rand_file):
    code, out, _ = run(capsys, "ladder", rand_file, "--steps", "4", "--augment")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 1 + 4 * 2
    assert all(line.endswith(",1") for line in lines[1:])


def test_sweep(capsys, rand_file):
    code, out, _ = run(capsys, "sweep", rand_file, "--steps", "5", "--repeats", "1")
    assert code == 0 and out.startswith("# schema: colordsp-runs/1")
    assert "time_mean" not in out
    code, out, _ = run(capsys, "sweep", rand_file, "--steps", "5", "--repeats", "2", "--timing")
    assert "time_mean" in out


def test_ilp_export(capsys, tri_file, tmp_path):
    out_dir = tmp_path / "lp"
    code, out, _ = run(capsys, "ilp-export", tri_file, "--h", "2", "--out", str(out_dir),
                       "--instance", "tri")
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["tri_k3.lp", "tri_k4.lp", "tri_k5.lp"]
    assert parse_lp((out_dir / "tri_k3.lp").read_text()).k == 3


def test_bench(capsys, tmp_path):
    spec = {"seed": 3, "oracle": True, "instances": [
        {"id": "g", "graph": {"n": 10, "m": 18}, "algorithms": ["greedy", "exact_flow"]}]}
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(spec))
    code, first, _ = run(capsys, "bench", str(p), "--repeats", "1")
    code2, second, _ = run(capsys, "bench", str(p), "--repeats", "1")
    assert code == code2 == 0 and first == second
    code, out, err = run(capsys, "bench", str(p), "--repeats", "1", "--summary", "--format",
                         "json")
    assert json.loads(out)["schema"] == "colordsp-runs/1"
    assert json.loads(err)["exact_flow"]["optimal_pct"] == 100.0


def test_exit_parse_error(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("a b 1\na a 1\n")
    code, _, err = run(capsys, "stats", str(p))
    assert code == 3 and "line 2" in err


def test_exit_infeasible(capsys, tri_file):
    code, _, err = run(capsys, "alhe", tri_file, "--h", "9")
    assert code == 2 and "infeasible" in err
    code, _, _ = run(capsys, "alhc", tri_file, "--h", "1=5")
    assert code == 2


def test_exit_cap(capsys, rand_file):
    code, _, err = run(capsys, "alhe", rand_file, "--h", "3", "--exact", "--oracle-cap", "10")
    assert code == 4 and "cap" in err


def test_input_format_multiplex(capsys, tmp_path):
    p = tmp_path / "mp.edges"
    p.write_text("1 a b 1\n2 a b 1\n2 b c 1\n")
    code, out, _ = run(capsys, "stats", str(p), "--input-format", "multiplex", "--format", "json")
    row = json.loads(out)
    assert code == 0 and row["edges"] == 2 and row["max_colors_per_edge"] == 2
