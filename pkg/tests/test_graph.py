import io
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commex.errors import DomainError, DuplicateEdgeError, InputError, ParseError
from commex.graph import (AVERAGE_DIRECTED, Graph, degree_vector, karate_club, labels_for,
                          load_edge_list, load_labels, write_edge_list)


def test_path_from_text():
    g = load_edge_list("0 1\n1 2\n")
    assert g.n == 3
    assert g.dense()[0, 1] == g.dense()[1, 2] == 1
    np.testing.assert_array_equal(g.degrees, [1, 2, 1])
    assert g.two_m == 4


def test_average_directed_mode():
    g = load_edge_list("0 1 4\n1 0 2\n", AVERAGE_DIRECTED)
    assert g.dense()[0, 1] == g.dense()[1, 0] == 3


def test_average_directed_missing_direction_counts_zero():
    g = load_edge_list("a b 4\n", AVERAGE_DIRECTED)
    assert g.dense()[0, 1] == 2


def test_self_loop_only(caplog):
    with caplog.at_level(logging.WARNING):
        g = load_edge_list("0 0 5\n")
    assert g.n == 1 and g.num_edges == 0
    assert g.self_loops_dropped == 1
    assert "self-loop" in caplog.text


def test_ids_compacted_in_first_appearance_order():
    g = load_edge_list("# header\nz x 2\n\nx y  # trailing comment\n")
    assert g.labels == ("z", "x", "y")
    assert g.dense()[0, 1] == 2 and g.dense()[1, 2] == 1
    assert g.index_of("y") == 2


@pytest.mark.parametrize("text, lineno", [("0 1\n0\n", 2), ("0 1 2 3\n", 1), ("0 1 abc\n", 1),
                                          ("0 1\n1 2 nan\n", 2)])
def test_malformed_line_reports_line_number(text, lineno):
    with pytest.raises(ParseError) as err:
        load_edge_list(text)
    assert err.value.lineno == lineno


def test_negative_weight():
    with pytest.raises(DomainError):
        load_edge_list("0 1 -1\n")


def test_duplicate_undirected_pair():
    with pytest.raises(DuplicateEdgeError):
        load_edge_list("0 1\n1 0\n")
    with pytest.raises(DuplicateEdgeError):
        load_edge_list("0 1\n0 1\n", AVERAGE_DIRECTED)


def test_unknown_mode():
    with pytest.raises(InputError):
        load_edge_list("0 1\n", "bogus")


def test_degree_vector_examples(g1):
    np.testing.assert_array_equal(degree_vector(g1), [2, 2, 3, 1])
    assert g1.two_m == 8
    np.testing.assert_array_equal(degree_vector(Graph.empty(4)), [0, 0, 0, 0])


def test_graph_rejects_bad_adjacency():
    with pytest.raises(InputError):
        Graph.from_dense([[0, 1], [0, 0]])
    with pytest.raises(InputError):
        Graph.from_dense([[1, 0], [0, 0]])
    with pytest.raises(DomainError):
        Graph.from_dense([[0, -1], [-1, 0]])


def test_graph_is_immutable(g1):
    with pytest.raises(ValueError):
        g1.adjacency.data[0] = 5
    with pytest.raises(ValueError):
        g1.degrees[0] = 5


def test_subgraph_keeps_labels(g1):
    sub = g1.subgraph([3, 2])
    assert sub.labels == (2, 3)
    assert sub.dense()[0, 1] == 1
    np.testing.assert_array_equal(sub.degrees, [1, 1])


def _label_adjacency(g):
    return {(g.labels[i], g.labels[j]): w
            for i, j, w in zip(*g.adjacency.nonzero(), g.adjacency.data)}


edge_lists = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 12),
              st.floats(0.0, 10.0, allow_nan=False).map(lambda w: round(w, 3))),
    max_size=40,
)


@settings(max_examples=60, deadline=None)
@given(edge_lists)
def test_load_invariants_and_roundtrip(records):
    seen, lines = set(), []
    for u, v, w in records:
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"n{u} n{v} {w}")
    g = load_edge_list("\n".join(lines))
    a = g.dense()
    assert np.array_equal(a, a.T)
    assert not np.diag(a).any()
    assert (a >= 0).all()
    assert abs(g.degrees.sum() - g.two_m) <= 1e-12 * max(1, g.two_m)
    np.testing.assert_allclose(g.degrees, a.sum(1), atol=1e-12)

    buf = io.StringIO()
    write_edge_list(g, buf)
    g2 = load_edge_list(buf.getvalue())
    assert set(g2.labels) == set(g.labels)
    assert _label_adjacency(g2) == _label_adjacency(g)
    buf2 = io.StringIO()
    write_edge_list(g2, buf2)
    assert _label_adjacency(load_edge_list(buf2.getvalue())) == _label_adjacency(g)


def test_isolated_node_survives_roundtrip():
    g = Graph.from_edges(3, [(0, 1)], labels=("a", "b", "c"))
    buf = io.StringIO()
    write_edge_list(g, buf)
    g2 = load_edge_list(buf.getvalue())
    assert g2.n == 3 and g2.degrees[g2.index_of("c")] == 0


def test_labels_alignment():
    g = load_edge_list("b a\na c\n")
    lab = labels_for(g, load_labels("a 1\nb 2\nc 1\n"))
    np.testing.assert_array_equal(lab, [2, 1, 1])
    with pytest.raises(InputError):
        labels_for(g, {"a": 1})


def test_karate_data():
    g, factions = karate_club()
    assert g.n == 34 and g.num_edges == 78
    assert np.bincount(factions).tolist() == [16, 18]
    _, clubs = karate_club("clubs")
    differ = [g.labels[i] for i in np.flatnonzero(factions != clubs)]
    assert differ == [8]
