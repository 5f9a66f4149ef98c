import subprocess
import sys

import pytest

from mrsekit import SingleRelationalGraph, multirank, build_multirel_transitions
from mrsekit.cli import main
from mrsekit.entropy import EntropyTerms, objective_model
from mrsekit.io import (assignment_to_labels, load_edge_list, read_assignment, read_csv,
                        write_assignment, write_edge_list)
from mrsekit.minimize import MinimizeConfig, minimize_2d
from mrsekit.tree import EncodingTree, Partition


def body(path):
    return [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]


def k4_file(tmp_path):
    p = tmp_path / "k4.tsv"
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    write_edge_list(SingleRelationalGraph.from_edges(4, edges).as_multi(), p)
    return p


def two_cliques_file(tmp_path, m=4):
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    edges += [(i + m, j + m) for i, j in edges]
    p = tmp_path / "cliques.tsv"
    write_edge_list(SingleRelationalGraph.from_edges(2 * m, edges + [(0, m)]).as_multi(), p)
    return p


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    for out in (a, b):
        assert main(["generate", "--ba", "-n", "100", "-m", "3", "--seed", "7", "-o", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    g = load_edge_list(a)
    assert g.node_count == 100 and g.relation(0).edge_count() == 294


def test_generate_planted_with_labels(tmp_path):
    out, lab = tmp_path / "p.tsv", tmp_path / "labels.tsv"
    assert main(["generate", "--planted", "--sizes", "10,10", "--relations", "2",
                 "--labels", str(lab), "-o", str(out)]) == 0
    assert load_edge_list(out).relation_count == 2
    assert lab.read_text().splitlines()[0] == "node\tclass"
    assert len(read_assignment(lab)) == 20


def test_generate_relations(tmp_path):
    out = tmp_path / "m.tsv"
    assert main(["generate", "-n", "30", "-m", "2", "--relations", "3", "--sparsity", "0.9",
                 "-o", str(out)]) == 0
    assert load_edge_list(out).relation_count == 3


def test_entropy_k4(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["entropy", str(k4_file(tmp_path)), "--objective", "se", "--dim", "1",
                 "-o", str(out)]) == 0
    (row,) = read_csv(out)
    assert row["metric"] == "se" and row["dimension"] == "1"
    assert float(row["value"]) == pytest.approx(2.0, abs=1e-12)


def test_mrse_of_single_relation_equals_rsse(tmp_path):
    src = tmp_path / "g.tsv"
    assert main(["generate", "-n", "40", "-m", "2", "--seed", "3", "-o", str(src)]) == 0
    red = tmp_path / "red.tsv"
    assert main(["reduce", str(src), "-o", str(red)]) == 0
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["entropy", str(src), "--objective", "mrse", "-o", str(a)])
    main(["entropy", str(red), "--objective", "rsse", "-o", str(b)])
    assert float(read_csv(a)[0]["value"]) == pytest.approx(float(read_csv(b)[0]["value"]),
                                                           abs=1e-9)


def test_partition_evaluation_matches_library(tmp_path):
    gfile = two_cliques_file(tmp_path)
    part = tmp_path / "part.tsv"
    g = load_edge_list(gfile)
    labels = [0, 0, 0, 1, 1, 1, 2, 2]
    write_assignment(part, g.node_labels, labels)
    out, stat = tmp_path / "e.csv", tmp_path / "x.csv"
    assert main(["entropy", str(gfile), "--partition", str(part), "--export-stationary", str(stat),
                 "-o", str(out)]) == 0
    rows = {(r["metric"], r["dimension"]): float(r["value"]) for r in read_csv(out)}
    tree = EncodingTree.from_partition(Partition.from_labels(labels))
    for obj in ("se", "rsse", "mrse"):
        om = objective_model(g, obj)
        assert rows[(obj, "1")] == pytest.approx(om.one_d, abs=1e-12)
        assert rows[(obj, "2")] == pytest.approx(EntropyTerms(om.model, tree).objective(),
                                                 abs=1e-12)
    mr = multirank(build_multirel_transitions(g))
    node_rows = [r for r in read_csv(stat) if r["metric"] == "mrse" and r["kind"] == "node"]
    assert [float(r["probability"]) for r in node_rows] == pytest.approx(mr.x.tolist(), abs=1e-12)


def test_entropy_dim2_needs_partition(tmp_path, capsys):
    assert main(["entropy", str(k4_file(tmp_path)), "--dim", "2"]) == 2
    assert "partition" in capsys.readouterr().err


def test_minimize_matches_library_and_trace(tmp_path):
    out, trace = tmp_path / "part.tsv", tmp_path / "trace.csv"
    gfile = two_cliques_file(tmp_path)
    assert main(["minimize", str(gfile), "--objective", "se",
                 "-o", str(out), "--trace", str(trace)]) == 0
    g = load_edge_list(gfile)
    want = minimize_2d(g, MinimizeConfig(objective="se")).partition
    got = assignment_to_labels(read_assignment(out), g.node_labels)
    assert Partition.from_labels(got.tolist()) == want
    rows = read_csv(trace)
    assert list(rows[0]) == ["step", "cluster_a", "cluster_b", "delta", "objective"]
    start = float(rows[0]["objective"])
    total = sum(float(r["delta"]) for r in rows[1:])
    assert start + total == pytest.approx(float(rows[-1]["objective"]), abs=1e-8)


def test_minimize_hierarchical_and_depth(tmp_path):
    src = tmp_path / "g.tsv"
    main(["generate", "-n", "120", "-m", "2", "--relations", "2", "--sparsity", "0.97",
          "-o", str(src)])
    trace, out = tmp_path / "t.csv", tmp_path / "p.tsv"
    assert main(["minimize", str(src), "--strategy", "hierarchical", "-n", "30",
                 "--trace", str(trace), "-o", str(out)]) == 0
    assert list(read_csv(trace)[0]) == ["pass", "subgraph_size", "groups", "merges", "clusters"]
    assert len(read_assignment(out)) == 120
    deep = tmp_path / "deep.tsv"
    assert main(["minimize", str(src), "--depth", "2", "-o", str(deep)]) == 0
    assert deep.read_text().splitlines()[0].startswith("node\tlevel_1")


def test_closed_form_delta_mode_runs(tmp_path):
    out = tmp_path / "p.tsv"
    assert main(["minimize", str(two_cliques_file(tmp_path)), "--delta", "paper",
                 "-o", str(out)]) == 0


def test_exit_codes(tmp_path, capsys):
    assert main(["entropy", str(tmp_path / "missing.tsv")]) == 2
    bad = tmp_path / "bad.tsv"
    bad.write_text("a b\n")
    assert main(["entropy", str(bad)]) == 2
    path = tmp_path / "path.tsv"
    write_edge_list(SingleRelationalGraph.from_edges(3, [(0, 1), (1, 2)]).as_multi(), path)
    assert main(["entropy", str(path), "--objective", "rsse", "--teleport", "1",
                 "--max-iter", "20"]) == 3
    assert "converge" in capsys.readouterr().err
    with pytest.raises(SystemExit) as err:
        main(["minimize"])
    assert err.value.code == 2


def test_eval_identical_and_shuffled(tmp_path):
    a, b, c = tmp_path / "a.tsv", tmp_path / "b.tsv", tmp_path / "c.tsv"
    write_assignment(a, ["x", "y", "z", "w"], [0, 0, 1, 1])
    write_assignment(b, ["w", "z", "y", "x"], [7, 7, 3, 3])
    write_assignment(c, ["x", "y", "z", "w"], [0, 0, 0, 1])
    out = tmp_path / "m.csv"
    assert main(["eval", "--partition", str(a), "--labels", str(b), "-o", str(out)]) == 0
    assert all(float(r["value"]) == 1.0 for r in read_csv(out))
    assert main(["eval", "--partition", str(a), "--labels", str(c), "-o", str(out)]) == 0
    got = {r["metric"]: float(r["value"]) for r in read_csv(out)}
    assert got["acc"] == 0.75 and got["ari"] == pytest.approx(0.0, abs=1e-12)
    write_assignment(c, ["x", "y", "z"], [0, 0, 1])
    assert main(["eval", "--partition", str(a), "--labels", str(c)]) == 2


def test_experiment_rows_and_reproducibility(tmp_path, monkeypatch):
    args = ["experiment", "--axis", "size", "--grid", "40", "--seeds", "1", "--relations", "2",
            "--no-timing"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["-o", str(a)]) == 0
    monkeypatch.setenv("MRSEKIT_THREADS", "2")
    assert main(args + ["-o", str(b)]) == 0
    rows = read_csv(a)
    assert [r["objective"] for r in rows] == ["se", "rsse", "mrse"]
    assert all(r["status"] == "ok" and r["wall_time"] == "" for r in rows)
    assert body(a) == body(b)
    monkeypatch.setenv("MRSEKIT_THREADS", "many")
    assert main(args + ["-o", str(b)]) == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "mrsekit", "entropy", str(k4_file(tmp_path)),
                          "--objective", "se"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "se,1,2.0" in res.stdout
