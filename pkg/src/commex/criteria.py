"""Scoring functions: extraction criteria, modularity and the cut family.

Two-way labelings are boolean membership vectors (``True`` = in S).  Arrays
of +1/-1 and iterables of node indices are accepted wherever a labeling is
expected; see :func:`as_membership`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InfeasibleError, InputError, UndefinedScoreError
from .graph import Graph

ORIGINAL = "original"
ADJUSTED = "adjusted"
MODULARITY2 = "modularity2"
EXTRACTION_CRITERIA = (ORIGINAL, ADJUSTED)


@dataclass(frozen=True)
class SubsetStats:
    """``size_s`` = |S|, ``o`` = O(S) (twice the internal weight), ``b`` = B(S)."""

    size_s: int
    o: float
    b: float


def as_membership(s, n: int) -> np.ndarray:
    """Coerce a two-way labeling to a boolean vector of length ``n``."""
    if isinstance(s, np.ndarray) and s.dtype == bool:
        if s.shape != (n,):
            raise InputError(f"labeling has shape {s.shape}, expected ({n},)")
        return s
    if isinstance(s, (set, frozenset)):
        out = np.zeros(n, dtype=bool)
        idx = np.fromiter(s, dtype=np.int64, count=len(s))
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise InputError("node index out of range")
        out[idx] = True
        return out
    arr = np.asarray(s)
    if arr.shape != (n,):
        raise InputError(f"labeling has shape {arr.shape}, expected ({n},)")
    if arr.dtype == bool:
        return arr
    vals = set(np.unique(arr).tolist())
    if not vals <= {-1, 1} and not vals <= {0, 1}:
        raise InputError(f"two-way labeling must be boolean, 0/1 or +1/-1, got {sorted(vals)}")
    return arr > 0


def subset_stats(g: Graph, s) -> SubsetStats:
    x = as_membership(s, g.n).astype(np.float64)
    ax = g.adjacency @ x
    o = float(x @ ax)
    b = float(x @ g.degrees) - o
    return SubsetStats(int(x.sum()), o, b)


def _check_sizes(size_s: int, n: int):
    if not 1 <= size_s <= n - 1:
        raise InfeasibleError(f"criterion undefined for |S|={size_s} with n={n}")


def extraction_score(stats: SubsetStats, n: int) -> float:
    """W(S) = O(S)/|S|^2 - B(S)/(|S||S^c|)."""
    _check_sizes(stats.size_s, n)
    s, sc = stats.size_s, n - stats.size_s
    return stats.o / (s * s) - stats.b / (s * sc)


def adjusted_score(stats: SubsetStats, n: int) -> float:
    """W_a(S) = |S||S^c| * W(S)."""
    _check_sizes(stats.size_s, n)
    s, sc = stats.size_s, n - stats.size_s
    return s * sc * (stats.o / (s * s) - stats.b / (s * sc))


def score_stats(criterion: str, stats: SubsetStats, n: int) -> float:
    if criterion == ORIGINAL:
        return extraction_score(stats, n)
    if criterion == ADJUSTED:
        return adjusted_score(stats, n)
    raise InputError(f"unknown extraction criterion {criterion!r}")


def switch_delta(g: Graph, s, stats: SubsetStats, node: int, criterion: str = ADJUSTED):
    """Score and stats after moving ``node`` to the other side.

    Only the node's own adjacency row is touched.  ``s`` is not modified.
    """
    x = as_membership(s, g.n)
    nbrs, w = g.neighbors(node)
    w_in = float(w[x[nbrs]].sum())
    k = float(g.degrees[node])
    if x[node]:
        new = SubsetStats(stats.size_s - 1, stats.o - 2.0 * w_in, stats.b - (k - w_in) + w_in)
    else:
        new = SubsetStats(stats.size_s + 1, stats.o + 2.0 * w_in, stats.b + (k - w_in) - w_in)
    if not 1 <= new.size_s <= g.n - 1:
        raise InfeasibleError(f"switching node {node} would leave |S|={new.size_s}")
    return score_stats(criterion, new, g.n), new


def _require_edges(g: Graph):
    if g.total <= 0:
        raise UndefinedScoreError("score undefined on a graph with no edge weight")


def modularity_score(g: Graph, labels) -> float:
    """Newman-Girvan modularity.

    Boolean or +1/-1 labelings use Q = (1/4m) sum_ij (A_ij - k_i k_j/2m) s_i s_j;
    any other integer labeling uses (1/2m) sum_ij (A_ij - k_i k_j/2m) [c_i = c_j].
    The two coincide for K = 2.
    """
    _require_edges(g)
    arr = np.asarray(labels)
    if arr.shape != (g.n,):
        raise InputError(f"labeling has shape {arr.shape}, expected ({g.n},)")
    two_m = g.total
    if arr.dtype == bool or set(np.unique(arr).tolist()) <= {-1, 1}:
        spin = np.where(arr > 0, 1.0, -1.0) if arr.dtype != bool else np.where(arr, 1.0, -1.0)
        sas = float(spin @ (g.adjacency @ spin))
        ks = float(g.degrees @ spin)
        return (sas - ks * ks / two_m) / (2.0 * two_m)
    _, c = np.unique(arr, return_inverse=True)
    k = c.max() + 1
    onehot = np.zeros((g.n, k))
    onehot[np.arange(g.n), c] = 1.0
    within = float(np.einsum("ik,ik->", onehot, g.adjacency @ onehot))
    vol = onehot.T @ g.degrees
    return (within - float(vol @ vol) / two_m) / two_m


def config_null_prob(g: Graph, i: int, j: int) -> float:
    """Configuration-model edge probability k_i k_j / 2m (not clipped to 1)."""
    _require_edges(g)
    return float(g.degrees[i] * g.degrees[j] / g.total)


class CutScores(NamedTuple):
    cut: float
    ratio_cut: float
    normalized_cut: float


def cut_scores(g: Graph, s) -> CutScores:
    x = as_membership(s, g.n)
    n1 = int(x.sum())
    n2 = g.n - n1
    if n1 == 0 or n2 == 0:
        raise InfeasibleError("cut scores need both sides nonempty")
    st = subset_stats(g, x)
    r = st.b
    d1 = float(g.degrees[x].sum())
    d2 = float(g.degrees[~x].sum())
    if d1 <= 0 or d2 <= 0:
        raise UndefinedScoreError("normalized cut undefined: a side has zero volume")
    return CutScores(r, r / (n1 * n2), r / d1 + r / d2)
