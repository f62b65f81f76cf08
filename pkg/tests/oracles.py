"""Independent reference implementations used as test oracles."""

import itertools

import numpy as np

from commex.graph import Graph


def two_cliques(k=5, bridge=True):
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    edges += [(i + k, j + k) for i, j in edges]
    if bridge:
        edges.append((k - 1, k))
    return Graph.from_edges(2 * k, edges)


def er_graph(n, p, rng):
    a = np.triu(rng.random((n, n)) < p, 1).astype(float)
    return Graph.from_dense(a + a.T)


def enumerate_best(g, criterion="adjusted"):
    """Exhaustive maximum of an extraction criterion over all feasible subsets.

    Scores are computed from a dense matrix, independently of the incremental code.
    """
    a = g.dense()
    n = g.n
    best, arg = -np.inf, []
    for mask in itertools.product([False, True], repeat=n):
        s = np.array(mask)
        k = int(s.sum())
        if k in (0, n):
            continue
        o = a[np.ix_(s, s)].sum()
        b = a[np.ix_(s, ~s)].sum()
        w = o / k**2 - b / (k * (n - k))
        val = w * k * (n - k) if criterion == "adjusted" else w
        if val > best + 1e-12:
            best, arg = val, [frozenset(np.flatnonzero(s).tolist())]
        elif abs(val - best) <= 1e-12:
            arg.append(frozenset(np.flatnonzero(s).tolist()))
    return best, arg


def dense_modularity(a, labels):
    """Indicator-form modularity straight from the definition."""
    k = a.sum(1)
    two_m = k.sum()
    same = np.equal.outer(labels, labels)
    return float(((a - np.outer(k, k) / two_m) * same).sum() / two_m)
