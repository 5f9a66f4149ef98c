import numpy as np
import pytest
from hypothesis import given, strategies as st

from mrsekit import InputError, MultiRelationalGraph
from mrsekit.io import (
    assignment_to_labels,
    load_edge_list,
    read_assignment,
    read_csv,
    write_assignment,
    write_csv,
    write_edge_list,
)


def write(tmp_path, text, name="g.tsv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_five_node_tensor_entries(tmp_path):
    p = write(tmp_path, "v1,v2,R1\nv1,v5,R1\nv1,v2,R2\nv1,v5,R2\nv1,v3,R3\n")
    g = load_edge_list(p)
    a = g.dense()
    idx, rel = g.node_index(), {n: i for i, n in enumerate(g.relation_names)}
    for dst, r in (("v2", "R1"), ("v5", "R1"), ("v2", "R2"), ("v5", "R2"), ("v3", "R3")):
        assert a[idx[dst], idx["v1"], rel[r]] == 1.0
    assert a.sum() == 5
    assert g.node_labels == ("v1", "v2", "v5", "v3")


def test_empty_file_has_no_arcs(tmp_path):
    with pytest.raises(InputError, match="no arcs"):
        load_edge_list(write(tmp_path, "# nothing here\n"))


def test_duplicate_row_aggregates(tmp_path):
    g = load_edge_list(write(tmp_path, "a\tb\tR1\t1.0\na\tb\tR1\t1.0\n"))
    assert list(g.arcs()) == [(0, 1, 0, 2.0)]


def test_errors_report_line_numbers(tmp_path):
    with pytest.raises(InputError, match="line 3"):
        load_edge_list(write(tmp_path, "a b R\n# c\na b\n"))
    with pytest.raises(InputError, match="negative"):
        load_edge_list(write(tmp_path, "a b R -1\n"))
    with pytest.raises(InputError, match="unknown header"):
        load_edge_list(write(tmp_path, "from,to,kind,strength\na,b,R,1\n"))


def test_known_header_and_whitespace(tmp_path):
    g = load_edge_list(write(tmp_path, "src dst rel weight\na  b  R  2.5\n"))
    assert list(g.arcs()) == [(0, 1, 0, 2.5)]


def test_undirected_option_mirrors(tmp_path):
    p = write(tmp_path, "a,b,R\n")
    g = load_edge_list(p, directed=False)
    assert sorted((s, d) for s, d, _, _ in g.arcs()) == [(0, 1), (1, 0)]
    assert not g.directed


labels = st.text(alphabet="abcxyz019_", min_size=1, max_size=4)


@given(st.integers(1, 6), st.integers(1, 3), st.booleans(),
       st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 2),
                          st.floats(0.001, 1e6, allow_nan=False)), min_size=1, max_size=25))
def test_round_trip_identity(tmp_path_factory, n, k, directed, arcs):
    arcs = [(s % n, d % n, r % k, w) for s, d, r, w in arcs]
    g = MultiRelationalGraph.from_arcs(n, k, *zip(*arcs), directed=directed,
                                       node_labels=[f"n{i}" for i in range(n)],
                                       relation_names=[f"r{i}" for i in range(k)])
    path = tmp_path_factory.mktemp("rt") / "g.tsv"
    write_edge_list(g, path)
    h = load_edge_list(path, require_nonempty_slices=False)
    assert h.same_as(g)


def test_assignment_files(tmp_path):
    p = tmp_path / "part.tsv"
    write_assignment(p, ["a", "b", "c"], [1, 0, 1])
    got = read_assignment(p)
    assert got == {"a": "1", "b": "0", "c": "1"}
    assert assignment_to_labels(got, ["c", "b", "a"]).tolist() == [0, 1, 0]
    with pytest.raises(InputError, match="mismatch"):
        assignment_to_labels(got, ["a", "b"])


def test_csv_header_and_floats(tmp_path):
    p = tmp_path / "r.csv"
    write_csv(p, ("metric", "value"), [("x", 0.1), ("y", None)], {"b": 1, "a": 2})
    lines = p.read_text().splitlines()
    assert lines[0] == '# mrse-kit v0.1.0 config={"a": 2, "b": 1}'
    assert lines[1:] == ["metric,value", "x,0.1", "y,"]
    assert read_csv(p) == [{"metric": "x", "value": "0.1"}, {"metric": "y", "value": ""}]
    assert float(np.float64(read_csv(p)[0]["value"])) == 0.1
