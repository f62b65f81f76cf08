"""Tabu search over two-way labelings with incremental score updates.

One iteration scans the non-tabu nodes in the current order.  The first
node whose switch beats the best score seen so far is switched and the scan
restarts at the head of the order.  Otherwise the node with the largest
resulting score is switched (largest increase, or smallest decrease).
A switched node stays tabu for ``tenure`` iterations.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .criteria import ADJUSTED, MODULARITY2, ORIGINAL, as_membership
from .errors import InfeasibleError, InputError, UndefinedScoreError
from .graph import Graph

CRITERIA = {ORIGINAL: 0, ADJUSTED: 1, MODULARITY2: 2}


@dataclass(frozen=True)
class TabuConfig:
    """``tenure`` and ``max_iters`` default to max(5, n // 50) and 50 * n."""

    tenure: int | None = None
    max_iters: int | None = None
    restarts: int = 10
    seed: int = 0
    min_side: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.tenure is not None and self.tenure < 1:
            raise InputError("tenure must be >= 1")
        if self.max_iters is not None and self.max_iters < 1:
            raise InputError("max_iters must be >= 1")
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.min_side < 0:
            raise InputError("min_side must be >= 0")

    def resolved_tenure(self, n: int) -> int:
        return self.tenure if self.tenure is not None else max(5, n // 50)

    def resolved_max_iters(self, n: int) -> int:
        return self.max_iters if self.max_iters is not None else 50 * n


@dataclass
class SearchResult:
    best_labeling: np.ndarray
    best_score: float
    trace: np.ndarray = field(repr=False, default=None)
    moves: np.ndarray = field(repr=False, default=None)
    run_index: int = 0

    @property
    def members(self) -> frozenset:
        return frozenset(np.flatnonzero(self.best_labeling).tolist())


@njit(cache=True, nogil=True)
def _score(crit, size, o, b, vol, n, adj_total, null_vol, two_m):
    if crit == 0:
        return o / (size * size) - b / (size * (n - size))
    if crit == 1:
        sc = n - size
        return size * sc * (o / (size * size) - b / (size * sc))
    ks = 2.0 * vol - null_vol
    return (adj_total - 4.0 * b - ks * ks / two_m) / (2.0 * two_m)


@njit(cache=True, nogil=True)
def _tabu_kernel(indptr, indices, data, adj_deg, null_deg, two_m, crit,
                 member, order, tenure, max_iters, min_side):
    n = member.shape[0]
    adj_total = 0.0
    null_vol = 0.0
    for i in range(n):
        adj_total += adj_deg[i]
        null_vol += null_deg[i]

    # w_in[i] = weight from node i into S
    w_in = np.zeros(n)
    size = 0
    o = 0.0
    vol = 0.0
    for i in range(n):
        if member[i]:
            size += 1
            vol += null_deg[i]
            for p in range(indptr[i], indptr[i + 1]):
                w_in[indices[p]] += data[p]
    for i in range(n):
        if member[i]:
            o += w_in[i]
    b = 0.0
    for i in range(n):
        if member[i]:
            b += adj_deg[i] - w_in[i]

    current = _score(crit, size, o, b, vol, n, adj_total, null_vol, two_m)
    best = current
    best_member = member.copy()
    trace = np.empty(max_iters + 1)
    trace[0] = best
    moves = np.full(max_iters, -1, np.int64)
    tabu_until = np.zeros(n, np.int64)
    done = max_iters

    for it in range(max_iters):
        thresh = best + 1e-12 * max(1.0, abs(best))
        chosen = -1
        cand_best = -np.inf
        cand_node = -1
        oldest = -1
        oldest_until = np.int64(2 ** 62)
        for pos in range(n):
            v = order[pos]
            if member[v]:
                if size - 1 < min_side:
                    continue
                ns = size - 1
                no = o - 2.0 * w_in[v]
                nb = b - (adj_deg[v] - w_in[v]) + w_in[v]
                nv = vol - null_deg[v]
            else:
                if n - size - 1 < min_side:
                    continue
                ns = size + 1
                no = o + 2.0 * w_in[v]
                nb = b + (adj_deg[v] - w_in[v]) - w_in[v]
                nv = vol + null_deg[v]
            if it < tabu_until[v]:
                if tabu_until[v] < oldest_until:
                    oldest_until = tabu_until[v]
                    oldest = v
                continue
            val = _score(crit, ns, no, nb, nv, n, adj_total, null_vol, two_m)
            if val > thresh:
                chosen = v
                break
            if val > cand_best:
                cand_best = val
                cand_node = v
        if chosen < 0:
            chosen = cand_node
        if chosen < 0:
            # every feasible node is tabu: release the one switched longest ago
            chosen = oldest
        if chosen < 0:
            done = it
            break

        v = chosen
        if member[v]:
            member[v] = False
            size -= 1
            o -= 2.0 * w_in[v]
            b += w_in[v] - (adj_deg[v] - w_in[v])
            vol -= null_deg[v]
            sign = -1.0
        else:
            member[v] = True
            size += 1
            o += 2.0 * w_in[v]
            b += (adj_deg[v] - w_in[v]) - w_in[v]
            vol += null_deg[v]
            sign = 1.0
        for p in range(indptr[v], indptr[v + 1]):
            w_in[indices[p]] += sign * data[p]
        tabu_until[v] = it + tenure
        moves[it] = v
        current = _score(crit, size, o, b, vol, n, adj_total, null_vol, two_m)
        if current > best:
            best = current
            best_member[:] = member
        trace[it + 1] = best

    return best_member, best, trace[: done + 1], moves[:done]


def _run(adjacency, adj_deg, null_deg, two_m, criterion, init, order, tenure, max_iters, min_side):
    crit = CRITERIA[criterion]
    member = np.array(init, dtype=np.bool_)
    return _tabu_kernel(
        adjacency.indptr.astype(np.int64), adjacency.indices.astype(np.int64),
        np.asarray(adjacency.data, dtype=np.float64),
        np.asarray(adj_deg, dtype=np.float64), np.asarray(null_deg, dtype=np.float64),
        float(two_m), crit, member, np.asarray(order, dtype=np.int64),
        int(tenure), int(max_iters), int(min_side),
    )


def _min_side(criterion: str, cfg: TabuConfig) -> int:
    # modularity is defined for the one-group labeling, extraction criteria are not
    if criterion == MODULARITY2:
        return 0
    return max(cfg.min_side, 1)


def _check_feasible(n: int, x: np.ndarray, min_side: int):
    if n < 2 * min_side:
        raise InfeasibleError(f"n={n} is smaller than 2*min_side={2 * min_side}")
    size = int(x.sum())
    if size < min_side or n - size < min_side:
        raise InfeasibleError(
            f"initial labeling has |S|={size}, |S^c|={n - size}; need >= {min_side}"
        )


def tabu_maximize(g: Graph, criterion: str, init, order, cfg: TabuConfig = TabuConfig(),
                  *, null_degrees=None, two_m=None) -> SearchResult:
    """Run one tabu search from ``init`` scanning nodes in ``order``.

    ``null_degrees``/``two_m`` override the configuration-model degrees and
    total weight used by the modularity criterion (used when splitting a
    community of a larger graph).
    """
    if criterion not in CRITERIA:
        raise InputError(f"unknown criterion {criterion!r}")
    n = g.n
    x = as_membership(init, n)
    order = np.asarray(order, dtype=np.int64)
    if order.shape != (n,) or not np.array_equal(np.sort(order), np.arange(n)):
        raise InputError("order must be a permutation of 0..n-1")
    min_side = _min_side(criterion, cfg)
    _check_feasible(n, x, min_side)
    null_deg = g.degrees if null_degrees is None else np.asarray(null_degrees, dtype=np.float64)
    tm = g.total if two_m is None else float(two_m)
    if criterion == MODULARITY2 and tm <= 0:
        raise UndefinedScoreError("modularity undefined on a graph with no edge weight")
    best_member, best, trace, moves = _run(
        g.adjacency, g.degrees, null_deg, tm, criterion, x, order,
        cfg.resolved_tenure(n), cfg.resolved_max_iters(n), min_side,
    )
    return SearchResult(best_member, float(best), trace, moves)


def child_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for run ``index`` derived from ``seed`` (independent of scheduling)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def derive_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0] >> 1)


def random_start(n: int, rng: np.random.Generator, min_side: int = 1):
    """Random membership (each node in S w.p. 1/2, redrawn until feasible) and node order."""
    if n < 2 * min_side:
        raise InfeasibleError(f"n={n} is smaller than 2*min_side={2 * min_side}")
    while True:
        x = rng.random(n) < 0.5
        size = int(x.sum())
        if size >= min_side and n - size >= min_side:
            break
    return x, rng.permutation(n)


def multi_start(g: Graph, criterion: str, cfg: TabuConfig = TabuConfig(), *,
                null_degrees=None, two_m=None, extra_starts=()) -> SearchResult:
    """Best of ``cfg.restarts`` tabu runs from random starts.

    Run ``r`` draws its start and order from :func:`child_rng(cfg.seed, r)`.
    ``extra_starts`` are additional ``(init, order)`` pairs indexed after
    the random runs.  Ties go to the lowest run index.
    """
    min_side = _min_side(criterion, cfg)
    starts = [random_start(g.n, child_rng(cfg.seed, r), min_side) for r in range(cfg.restarts)]
    starts.extend(extra_starts)

    def one(r):
        init, order = starts[r]
        res = tabu_maximize(g, criterion, init, order, cfg, null_degrees=null_degrees, two_m=two_m)
        res.run_index = r
        return res

    if cfg.workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(one, range(len(starts))))
    else:
        results = [one(r) for r in range(len(starts))]
    return max(results, key=lambda res: (res.best_score, -res.run_index))


def with_seed(cfg: TabuConfig, seed: int) -> TabuConfig:
    return replace(cfg, seed=seed)
