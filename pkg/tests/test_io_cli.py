import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggmrecon import io as gio
from ggmrecon.cli import main, parse_grid
from ggmrecon.errors import InputError, ParseError
from ggmrecon.ggm import GgmParams
from ggmrecon.graph import Graph, make_lattice


def lines(text):
    return [(k, ln.strip()) for k, ln in enumerate(text.splitlines(), 1) if ln.strip()]


def test_parse_minimal_graph():
    g = gio.parse_graph(lines("n 2\ne 0 1"))
    assert g.n == 2 and g.edge_set() == {(0, 1)}


def test_self_loop_names_line_two():
    with pytest.raises(ParseError, match="line 2") as info:
        gio.parse_graph(lines("n 2\ne 0 0"), "g.txt")
    assert info.value.line == 2 and "self-loop" in str(info.value)


def test_parse_errors_have_locations(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# comment\nn 3\n\ne 0 x\n")
    with pytest.raises(ParseError, match=r"g.txt:line 4:column 3"):
        gio.parse_graph_file(path)
    path.write_text("n 3\ne 0 1\ne 1 0\n")
    with pytest.raises(ParseError, match="line 3.*duplicate"):
        gio.parse_graph_file(path)
    path.write_text("n 3\ne 0 7\n")
    with pytest.raises(ParseError, match="column 3"):
        gio.parse_graph_file(path)
    with pytest.raises(InputError):
        gio.parse_graph_file(tmp_path / "absent.txt")


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 12))
    pairs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                         .filter(lambda e: e[0] != e[1]).map(lambda e: tuple(sorted(e)))))
    return n, sorted(pairs)


@settings(max_examples=60, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_graph_round_trip_is_canonical(spec, rnd):
    n, pairs = spec
    shuffled = [(j, i) if rnd.random() < 0.5 else (i, j) for i, j in pairs]
    rnd.shuffle(shuffled)
    text = "n %d\n" % n + "".join(f"e {i} {j}\n" for i, j in shuffled)
    g = gio.parse_graph(lines(text))
    canonical = "n %d\n" % n + "".join(f"e {i} {j}\n" for i, j in pairs)
    assert gio.format_graph(g) == canonical
    assert gio.parse_graph(lines(gio.format_graph(g))) == g


def test_road_description_file(tmp_path):
    path = tmp_path / "roads.txt"
    path.write_text("road a\nroad b\nroad c\nx a b\nx b c  # second\n")
    desc = gio.parse_road_description_file(path)
    assert desc.roads == ("a", "b", "c") and len(desc.intersections) == 2
    path.write_text("road a\nlane b\n")
    with pytest.raises(ParseError, match="line 2"):
        gio.parse_road_description_file(path)


def test_params_round_trip_exact(tmp_path):
    p = GgmParams(np.array([0.1, 1 / 3, -2e-17]), xi=0.2, j=1.0 / 7)
    gio.write_params(tmp_path / "p.json", p)
    q = gio.read_params(tmp_path / "p.json")
    assert q.h.tobytes() == p.h.tobytes() and (q.xi, q.j) == (p.xi, p.j)
    (tmp_path / "bad.json").write_text('{"xi": 1, "h": []}')
    with pytest.raises(ParseError, match="j"):
        gio.read_params(tmp_path / "bad.json")


def test_matrix_csv_round_trip_exact(tmp_path, rng):
    data = rng.normal(size=(4, 3)) * 1e3
    path = tmp_path / "x.csv"
    with open(path, "w") as fh:
        gio.write_matrix_csv(fh, data)
    assert gio.read_matrix_csv(path).tobytes() == data.tobytes()
    path.write_text("x0,x1\n1,\n")
    got = gio.read_matrix_csv(path)
    assert got[0, 0] == 1.0 and np.isnan(got[0, 1])
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ParseError):
        gio.read_matrix_csv(path)


def test_float_format_is_full_precision():
    assert gio.fmt(0.1) == "0.10000000000000001"
    assert float(gio.fmt(1 / 3)) == 1 / 3
    assert gio.fmt(None) == "" and gio.fmt(np.int64(3)) == "3"
    assert gio.fmt("r") == "r"


def test_parse_grid():
    assert np.allclose(parse_grid("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1.0])
    assert parse_grid("0.2,0.4").tolist() == [0.2, 0.4]
    assert len(parse_grid("0:1:0.1")) == 11


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_matched_is_flat(capsys):
    code, out, _ = run(["analyze", "--j", 1, "--xi", 0.2, "--j0", 1, "--xi0", 0.2, "--mu-h", 1,
                        "--sigma-h", 0.5, "--mu-eps", 0, "--sigma-eps", 0, "--sweep", "p",
                        "--grid", "0:1:0.1"], capsys)
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "x,analytic_E" and len(rows) == 12
    values = {float(r.split(",")[1]) for r in rows[1:]}
    assert len(values) == 1 and values.pop() == pytest.approx(1 / 1.2, rel=1e-15)


def test_missing_required_flag_is_usage_error(capsys):
    code, _, err = run(["analyze", "--j", 1, "--xi", 0.2], capsys)
    assert code == 1
    assert "--mu-h" in err and "--sweep" in err


def test_unknown_subcommand_suggests(capsys):
    code, out, err = run(["analyse"], capsys)
    assert code == 1 and "analyze" in err and out == ""


@pytest.mark.parametrize("cmd", ["sample", "learn", "reconstruct", "evaluate", "sweep-p", "analyze"])
def test_help_exits_zero(cmd, capsys):
    code, out, _ = run([cmd, "--help"], capsys)
    assert code == 0 and "usage" in out


def test_missing_file_is_data_error(tmp_path, capsys):
    code, _, err = run(["sample", "--graph", tmp_path / "none", "--params", tmp_path / "p",
                        "--count", 1], capsys)
    assert code == 2 and "cannot read" in err


@pytest.fixture
def workspace(tmp_path):
    g = make_lattice(4, 5)
    gio.write_graph(tmp_path / "graph.txt", g)
    gio.write_params(tmp_path / "true.json", GgmParams(np.linspace(0.2, 1.2, 20), xi=0.5, j=0.8))
    (tmp_path / "mask.txt").write_text("\n".join(map(str, [1, 4, 7, 12, 18])) + "\n")
    return tmp_path


def pipeline(ws, capsys, suffix=""):
    d = ws
    steps = [
        ["sample", "--graph", d / "graph.txt", "--params", d / "true.json", "--count", 300,
         "--seed", 5, "--out", d / f"samples{suffix}.csv"],
        ["learn", "--graph", d / "graph.txt", "--data", d / f"samples{suffix}.csv",
         "--out", d / f"fit{suffix}.json", "--report", d / f"report{suffix}.json"],
        ["reconstruct", "--graph", d / "graph.txt", "--params", d / f"fit{suffix}.json",
         "--obs", d / f"samples{suffix}.csv", "--row", 3, "--mask", d / "mask.txt",
         "--out", d / f"recon{suffix}.csv"],
        ["evaluate", "--graph", d / "graph.txt", "--params", d / f"fit{suffix}.json",
         "--data", d / f"samples{suffix}.csv", "--row", 3, "--p", 0.5, "--seed", 2,
         "--quantize", d / f"bins{suffix}.csv", "--out", d / f"eval{suffix}.csv"],
        ["sweep-p", "--graph", d / "graph.txt", "--params", d / f"fit{suffix}.json",
         "--data", d / f"samples{suffix}.csv", "--grid", "0.2,0.8", "--trials", 10,
         "--out", d / f"sweep{suffix}.csv"],
    ]
    for argv in steps:
        code, _, err = run(argv, capsys)
        assert code == 0, err
    return [f"{stem}{suffix}.{ext}" for stem, ext in (
        ("samples", "csv"), ("fit", "json"), ("report", "json"), ("recon", "csv"),
        ("eval", "csv"), ("bins", "csv"), ("sweep", "csv"))]


def test_full_pipeline(workspace, capsys):
    names = pipeline(workspace, capsys)
    for name in names:
        path = workspace / name
        assert path.stat().st_size > 0
        assert gio.manifest_path(path).exists()
    recon = gio.read_matrix_csv(workspace / "recon.csv")
    truth = gio.read_matrix_csv(workspace / "samples.csv")[3]
    observed = np.setdiff1d(np.arange(20), [1, 4, 7, 12, 18])
    assert recon[0, observed].tobytes() == truth[observed].tobytes()
    header = (workspace / "eval.csv").read_text().splitlines()[0]
    assert header == "mse,correlation,n_missing,redraws"
    assert (workspace / "sweep.csv").read_text().startswith("p,mse_mean,mse_stderr,trials\n")
    assert (workspace / "bins.csv").read_text().startswith("vertex,value,bin\n")
    report = json.loads((workspace / "report.json").read_text())
    assert report["converged"] is True


def test_reruns_are_byte_identical(workspace, capsys):
    names = pipeline(workspace, capsys, "")
    first = {n: (workspace / n).read_bytes() for n in names}
    pipeline(workspace, capsys, "")
    second = {n: (workspace / n).read_bytes() for n in names}
    assert first == second


def test_manifest_contents(workspace, capsys):
    run(["sample", "--graph", workspace / "graph.txt", "--params", workspace / "true.json",
         "--count", 3, "--seed", 9, "--out", workspace / "s.csv"], capsys)
    man = json.loads(gio.manifest_path(workspace / "s.csv").read_text())
    assert man["subcommand"] == "sample" and man["seed"] == 9
    assert man["flags"]["count"] == 3
    digest = gio.file_digest(workspace / "graph.txt")
    assert man["inputs"][str(workspace / "graph.txt")] == digest
    assert "version" in man


def test_different_seed_changes_samples(workspace, capsys):
    for seed in (1, 2):
        run(["sample", "--graph", workspace / "graph.txt", "--params", workspace / "true.json",
             "--count", 2, "--seed", seed, "--out", workspace / f"s{seed}.csv"], capsys)
    assert (workspace / "s1.csv").read_bytes() != (workspace / "s2.csv").read_bytes()


def test_reconstruct_reports_to_stderr(workspace, capsys):
    run(["sample", "--graph", workspace / "graph.txt", "--params", workspace / "true.json",
         "--count", 2, "--out", workspace / "s.csv"], capsys)
    code, out, err = run(["reconstruct", "--graph", workspace / "graph.txt", "--params",
                          workspace / "true.json", "--obs", workspace / "s.csv", "--mask",
                          workspace / "mask.txt"], capsys)
    assert code == 0
    assert out.startswith("x0,") and "sweeps=" in err and "residual=" in err
    code, _, err = run(["reconstruct", "--graph", workspace / "graph.txt", "--params",
                        workspace / "true.json", "--obs", workspace / "s.csv", "--mask",
                        workspace / "mask.txt", "--max-sweeps", 1], capsys)
    assert code == 2 and "converged=False" in err


def test_road_graph_command(tmp_path, capsys):
    (tmp_path / "r.txt").write_text(
        "road 1\nroad 2\nroad 3\nroad 4\nroad 5\nroad 6\nx 1 2 3 4\nx 3 4 5 6\n")
    code, out, _ = run(["road-graph", "--roads", tmp_path / "r.txt"], capsys)
    assert code == 0
    g = gio.parse_graph(lines(out))
    assert g.n == 6 and g.num_edges == 11


def test_explicit_empty_mask_is_data_error(workspace, capsys):
    run(["sample", "--graph", workspace / "graph.txt", "--params", workspace / "true.json",
         "--count", 1, "--out", workspace / "s.csv"], capsys)
    (workspace / "empty.txt").write_text("")
    code, _, err = run(["evaluate", "--graph", workspace / "graph.txt", "--params",
                        workspace / "true.json", "--data", workspace / "s.csv",
                        "--mask", workspace / "empty.txt"], capsys)
    assert code == 2 and "empty" in err


def test_graph_with_isolated_vertex_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("n 3\ne 0 1\n")
    assert gio.parse_graph_file(path) == Graph.from_edges(3, [(0, 1)])
