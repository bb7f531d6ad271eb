import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classcontrast.graph import AttributedGraph, GraphFormatError, load_graph, one_hot_encode, write_graph


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_triangle_from_files(tmp_path):
    edges = write(tmp_path, "e.tsv", "a\tb\nb\tc\na\tc\n")
    attrs = write(tmp_path, "x.tsv", "a\tx\t1\nb\tx\t1\nc\tx\t1\n")
    g = load_graph(edges, attrs)
    assert g.node_count == 3
    assert g.total_edge_weight == 3
    np.testing.assert_array_equal(g.degrees, [2, 2, 2])
    assert g.node_names == ("a", "b", "c")


def test_missing_attribute_entry_is_zero(tmp_path):
    edges = write(tmp_path, "e.tsv", "# comment\na\tb\nb\tc\n")
    attrs = write(tmp_path, "x.tsv", "a\tx\t1\nb\ty\t2.5\n")
    g = load_graph(edges, attrs)
    np.testing.assert_array_equal(g.attributes, [[1, 0], [0, 2.5], [0, 0]])
    dense = write(tmp_path, "x.csv", "node,x,y\na,1,\nb,,2.5\n")
    g2 = load_graph(edges, dense)
    np.testing.assert_array_equal(g2.attributes, g.attributes)


def test_self_loop_rejected(tmp_path):
    edges = write(tmp_path, "e.tsv", "a\tb\na\ta\n")
    attrs = write(tmp_path, "x.tsv", "a\tx\t1\n")
    with pytest.raises(GraphFormatError, match=r"e\.tsv:2: self-loop"):
        load_graph(edges, attrs)


def test_duplicate_edge_rejected_with_line(tmp_path):
    edges = write(tmp_path, "e.tsv", "a\tb\nb\tc\nb\ta\t2\n")
    attrs = write(tmp_path, "x.tsv", "a\tx\t1\n")
    with pytest.raises(GraphFormatError, match=r":3: duplicate edge"):
        load_graph(edges, attrs)


def test_dangling_attribute_node(tmp_path):
    edges = write(tmp_path, "e.tsv", "a\tb\n")
    attrs = write(tmp_path, "x.tsv", "a\tx\t1\nzz\tx\t1\n")
    with pytest.raises(GraphFormatError, match=r"x\.tsv:2: .*unknown node 'zz'"):
        load_graph(edges, attrs)


@pytest.mark.parametrize("line", ["a\tb\tc\td", "a\tb\tnotanumber", "a\tb\t-1"])
def test_bad_edge_lines(tmp_path, line):
    edges = write(tmp_path, "e.tsv", f"a\tb\n{line}\n")
    attrs = write(tmp_path, "x.tsv", "a\tx\t1\n")
    with pytest.raises(GraphFormatError, match=":2:"):
        load_graph(edges, attrs)


def test_weighted_degrees(tmp_path):
    edges = write(tmp_path, "e.tsv", "a\tb\t3\nb\tc\t0.5\nd\n")
    attrs = write(tmp_path, "x.tsv", "a\tx\t1\n")
    g = load_graph(edges, attrs)
    np.testing.assert_allclose(g.degrees, [3, 3.5, 0.5, 0])
    assert g.total_edge_weight == 3.5


def test_dense_csv_categorical_columns_are_one_hot(tmp_path):
    edges = write(tmp_path, "e.tsv", "a\tb\nb\tc\n")
    attrs = write(tmp_path, "x.csv", "node,age,party\na,30,D\nb,41,R\nc,,D\n")
    g = load_graph(edges, attrs)
    assert g.attribute_names == ("age", "party=D", "party=R")
    np.testing.assert_array_equal(g.attributes, [[30, 1, 0], [41, 0, 1], [0, 1, 0]])


def test_graph_is_read_only(triangle):
    with pytest.raises(ValueError):
        triangle.attributes[0, 0] = 5
    with pytest.raises(ValueError):
        triangle.degrees[0] = 1


def test_one_hot_examples():
    labels, cols = one_hot_encode(["x", "y", "x"])
    assert labels == ["x", "y"]
    np.testing.assert_array_equal(cols[:, 0], [1, 0, 1])
    np.testing.assert_array_equal(cols[:, 1], [0, 1, 0])

    labels, cols = one_hot_encode(["q"] * 4)
    assert labels == ["q"] and cols.shape == (4, 1) and cols.all()

    labels, cols = one_hot_encode(["r", "g", "b", "g", "r"])
    assert len(labels) == 3
    np.testing.assert_array_equal(cols.sum(axis=1), np.ones(5))


def test_one_hot_needs_a_label():
    with pytest.raises(ValueError):
        one_hot_encode(["", None])


@st.composite
def graphs(draw):
    n = draw(st.integers(2, 9))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    weights = draw(st.lists(st.integers(1, 5), min_size=len(chosen), max_size=len(chosen)))
    d = draw(st.integers(1, 4))
    vals = draw(st.lists(st.sampled_from([0.0, 1.0, 0.5, 2.25]), min_size=n * d, max_size=n * d))
    edges = [(i, j, float(w)) for (i, j), w in zip(chosen, weights)]
    return AttributedGraph.from_edges(n, edges, np.reshape(vals, (n, d)), node_names=[f"n{i}" for i in range(n)])


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_degree_and_edge_consistency(g):
    recomputed = np.zeros(g.node_count)
    for i, j, w in g.edges():
        recomputed[i] += w
        recomputed[j] += w
    np.testing.assert_allclose(g.degrees, recomputed)
    assert np.isclose(2 * g.total_edge_weight, g.degrees.sum())


@settings(max_examples=40, deadline=None)
@given(graphs(), st.sampled_from([".tsv", ".csv"]))
def test_round_trip(tmp_path_factory, g, ext):
    d = tmp_path_factory.mktemp("rt")
    write_graph(g, d / "e.tsv", d / f"x{ext}")
    h = load_graph(d / "e.tsv", d / f"x{ext}")
    assert h.node_names == g.node_names
    assert h.attribute_names == g.attribute_names
    np.testing.assert_array_equal(h.degrees, g.degrees)
    assert h.total_edge_weight == g.total_edge_weight
    np.testing.assert_array_equal(h.attributes, g.attributes)
    assert h.edges() == g.edges()
