"""Modularity partition baselines.

* :func:`leading_eigenvector_split` - sign split of the leading eigenvector
  of the modularity matrix, by power iteration.
* :func:`modularity_two_way` - tabu-refined two-way modularity.
* :func:`sequential_modularity_partition` - greedy repeated bisection.

Splitting a community ``c`` of a larger graph uses the generalized
modularity matrix ``B_ij - delta_ij sum_{l in c} B_il`` restricted to ``c``,
so every candidate split is scored by its change in the global modularity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .criteria import MODULARITY2, modularity_score
from .errors import ConvergenceError, UndefinedScoreError
from .graph import Graph
from .tabu import SearchResult, TabuConfig, child_rng, derive_seed, multi_start


@dataclass
class SpectralSplit:
    eigvec: np.ndarray
    labeling: np.ndarray
    eigval_estimate: float
    iterations: int = 0
    residual: float = 0.0


@dataclass
class KWayLabeling:
    assignment: np.ndarray
    modularity: float
    history: list  # global Q after each committed split, starting with K = 1

    @property
    def k(self) -> int:
        return int(self.assignment.max()) + 1 if self.assignment.size else 0

    def communities(self) -> list[frozenset]:
        return [frozenset(np.flatnonzero(self.assignment == c).tolist()) for c in range(self.k)]


def _shift(g: Graph, null_deg: np.ndarray, two_m: float, diag_corr: np.ndarray) -> float:
    """Gershgorin bound on the row sums of |B^(c)|, computed in O(edges + nodes)."""
    a = g.adjacency
    bound = 0.0
    null_total = float(null_deg.sum())
    for i in range(g.n):
        lo, hi = a.indptr[i], a.indptr[i + 1]
        nb, w = a.indices[lo:hi], a.data[lo:hi]
        p_nb = null_deg[i] * null_deg[nb] / two_m
        off = null_deg[i] * (null_total - null_deg[nb].sum()) / two_m
        row = off + np.abs(w - p_nb).sum() + abs(diag_corr[i])
        bound = max(bound, row)
    return bound


def _power_iteration(g: Graph, null_deg, two_m, tol, max_iter):
    n = g.n
    a = g.adjacency
    k = np.asarray(null_deg, dtype=float)
    # row sums of B restricted to the node set; zero for a whole graph
    diag_corr = g.degrees - k * k.sum() / two_m
    sigma = _shift(g, k, two_m, diag_corr)

    def bmul(x):
        return a @ x - k * (k @ x) / two_m - diag_corr * x

    x = np.random.default_rng(0).standard_normal(n)
    x /= np.linalg.norm(x)
    resid = np.inf
    for it in range(1, max_iter + 1):
        bx = bmul(x)
        y = bx + sigma * x
        lam = float(x @ bx)
        resid = float(np.max(np.abs(bx - lam * x)))
        norm = np.linalg.norm(y)
        if norm == 0:
            return x, lam, it, resid
        y /= norm
        diff = float(np.max(np.abs(y - x)))
        x = y
        if diff < tol and resid < 10 * tol:
            bx = bmul(x)
            lam = float(x @ bx)
            return x, lam, it, float(np.max(np.abs(bx - lam * x)))
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (residual {resid:.3g})",
        last_iterate=x, iterations=max_iter,
    )


def leading_eigenvector_split(g: Graph, tol: float = 1e-8, max_iter: int = 10_000, *,
                              null_degrees=None, two_m=None) -> SpectralSplit:
    """Power iteration on ``B + sigma I``; labeling from component signs.

    Components with ``|x_i| < tol`` go to the positive side.  The sign of
    the returned vector is fixed so that its largest-magnitude component is
    positive.
    """
    tm = g.total if two_m is None else float(two_m)
    if tm <= 0:
        raise UndefinedScoreError("modularity matrix undefined on a graph with no edge weight")
    k = g.degrees if null_degrees is None else np.asarray(null_degrees, dtype=float)
    x, lam, iters, resid = _power_iteration(g, k, tm, tol, max_iter)
    if x.size and x[np.argmax(np.abs(x))] < 0:
        x = -x
    labeling = (x > 0) | (np.abs(x) < tol)
    return SpectralSplit(x, labeling, lam, iters, resid)


def modularity_two_way(g: Graph, cfg: TabuConfig = TabuConfig(), *,
                       null_degrees=None, two_m=None) -> SearchResult:
    """Two-way modularity: tabu search seeded by the spectral split plus random starts."""
    tm = g.total if two_m is None else float(two_m)
    if tm <= 0:
        raise UndefinedScoreError("modularity undefined on a graph with no edge weight")
    try:
        split = leading_eigenvector_split(g, null_degrees=null_degrees, two_m=two_m)
        seed_labeling = split.labeling
    except ConvergenceError as err:
        seed_labeling = err.last_iterate >= 0
    order = child_rng(cfg.seed, cfg.restarts).permutation(g.n)
    return multi_start(g, MODULARITY2, cfg, null_degrees=null_degrees, two_m=two_m,
                       extra_starts=[(seed_labeling, order)])


def _split_gain(g: Graph, nodes: np.ndarray, cfg: TabuConfig):
    """Best split of community ``nodes`` and its global modularity gain."""
    sub = g.subgraph(nodes)
    k = g.degrees[nodes]
    res = modularity_two_way(sub, cfg, null_degrees=k, two_m=g.total)
    # Q of the sub-labeling relative to leaving the community whole
    vol = k.sum()
    whole = (sub.total - vol * vol / g.total) / (2.0 * g.total)
    x = res.best_labeling
    if x.all() or not x.any():
        return x, 0.0
    return x, res.best_score - whole


def sequential_modularity_partition(g: Graph, cfg: TabuConfig = TabuConfig(),
                                    max_k: int | None = None) -> KWayLabeling:
    """Greedy bisection: commit the split with the largest modularity gain.

    Stops when no split increases modularity or when ``max_k`` communities
    exist.  Ties go to the lowest community id.
    """
    if g.total <= 0:
        raise UndefinedScoreError("modularity undefined on a graph with no edge weight")
    assign = np.zeros(g.n, dtype=np.int64)
    history = [modularity_score(g, assign)]
    cache: dict[int, tuple] = {}
    step = 0
    while max_k is None or assign.max() + 1 < max_k:
        k_now = int(assign.max()) + 1
        best_c, best_gain, best_x = -1, 0.0, None
        for c in range(k_now):
            if c not in cache:
                nodes = np.flatnonzero(assign == c)
                if nodes.size < 2:
                    cache[c] = (None, 0.0)
                else:
                    sub_cfg = replace(cfg, seed=derive_seed(cfg.seed, step * 1_000_003 + c))
                    cache[c] = _split_gain(g, nodes, sub_cfg)
            x, gain = cache[c]
            if gain > best_gain + 1e-12:
                best_c, best_gain, best_x = c, gain, x
        if best_c < 0:
            break
        nodes = np.flatnonzero(assign == best_c)
        assign[nodes[~best_x]] = k_now
        cache.pop(best_c, None)
        step += 1
        history.append(modularity_score(g, assign))
    return KWayLabeling(assign, history[-1], history)
