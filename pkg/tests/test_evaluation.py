import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commex.errors import InfeasibleError, InputError
from commex.evaluation import block_edge_counts, confusion_matrix, match_and_score
from commex.graph import Graph
from oracles import er_graph

TRUTH10 = np.array([0] * 5 + [1] * 5)


def test_confusion_examples():
    c = np.array([0] * 3 + [1] * 7)
    np.testing.assert_allclose(confusion_matrix(c, c, 10).r, np.diag([0.3, 0.7]))
    r = confusion_matrix(np.zeros(10, int), c).r
    np.testing.assert_allclose(r, [[0.3, 0.7], [0, 0]])
    np.testing.assert_allclose(confusion_matrix([1, 1, 2, 2], [1, 2, 1, 2], 4).r, 0.25)
    with pytest.raises(InputError):
        confusion_matrix([1, 2], [1, 2, 3])
    with pytest.raises(InputError):
        confusion_matrix([1, 2], [1, 2], n=3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=60))
def test_confusion_marginals(pairs):
    s, c = map(np.array, zip(*pairs))
    cm = confusion_matrix(s, c)
    assert cm.r.sum() == pytest.approx(1, abs=1e-12)
    for i, lab in enumerate(cm.classes):
        assert cm.r[:, i].sum() == pytest.approx(np.mean(c == lab), abs=1e-12)
        assert cm.r[i, :].sum() == pytest.approx(np.mean(s == lab), abs=1e-12)


def test_block_edge_counts_examples(g1):
    o = block_edge_counts(g1, [1, 1, 1, 2]).o
    np.testing.assert_array_equal(o, [[6, 1], [1, 0]])
    assert block_edge_counts(g1, [0, 0, 0, 0]).o[0, 0] == g1.two_m
    assert not block_edge_counts(Graph.empty(4), [0, 1, 0, 1]).o.any()


def test_block_edge_counts_total():
    rng = np.random.default_rng(1)
    for _ in range(10):
        g = er_graph(25, 0.3, rng)
        o = block_edge_counts(g, rng.integers(0, 4, g.n)).o
        assert o.sum() == pytest.approx(g.two_m, abs=1e-12)
        assert np.array_equal(o, o.T)


def test_match_exact():
    m = match_and_score(range(5), TRUTH10)
    assert (m.ppv, m.npv, m.matched_class) == (1.0, 1.0, 0)


def test_match_partial():
    m = match_and_score({0, 1, 2, 3, 5, 6}, TRUTH10)
    assert m.matched_class == 0
    assert m.ppv == pytest.approx(4 / 6)
    assert m.npv == pytest.approx(0.75)


def test_match_background_eligible():
    m = match_and_score({5, 6}, TRUTH10, background_label=1)
    assert m.matched_class == 1
    assert m.ppv == 1.0 and m.npv == pytest.approx(1 - 3 / 8)
    m = match_and_score({5, 6}, TRUTH10, background_label=1, match_background=False)
    assert m.matched_class == 0 and m.ppv == 0.0 and m.npv == pytest.approx(1 - 5 / 8)


def test_match_tie_goes_to_lowest_class():
    assert match_and_score({4, 5}, TRUTH10).matched_class == 0


def test_match_errors():
    with pytest.raises(InfeasibleError):
        match_and_score(set(), TRUTH10)
    with pytest.raises(InfeasibleError):
        match_and_score(range(10), TRUTH10)
    with pytest.raises(InputError):
        match_and_score({12}, TRUTH10)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=2, max_size=30), st.data())
def test_ppv_npv_bounds_and_exactness(labels, data):
    labels = np.array(labels)
    n = labels.size
    s = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    m = match_and_score(s, labels)
    assert 0 <= m.ppv <= 1 and 0 <= m.npv <= 1
    exact = set(np.flatnonzero(labels == m.matched_class)) == s
    assert (m.ppv == 1 and m.npv == 1) == exact
