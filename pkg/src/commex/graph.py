"""Undirected weighted networks: construction, edge-list I/O and subgraphs."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, DuplicateEdgeError, InputError, ParseError

log = logging.getLogger(__name__)

UNDIRECTED = "undirected"
AVERAGE_DIRECTED = "average_directed"


@dataclass(frozen=True)
class EdgeRecord:
    u: str
    v: str
    w: float = 1.0


@dataclass(frozen=True, eq=False)
class Graph:
    """Symmetric nonnegative adjacency with cached degrees.

    ``adjacency`` is a CSR matrix with sorted indices and a zero diagonal.
    ``labels`` maps compact index -> original node id.
    """

    adjacency: sp.csr_matrix
    labels: tuple = ()
    self_loops_dropped: int = 0
    degrees: np.ndarray = field(init=False, repr=False)
    total: float = field(init=False)

    def __post_init__(self):
        a = sp.csr_matrix(self.adjacency, dtype=np.float64)
        a.sum_duplicates()
        a.sort_indices()
        n = a.shape[0]
        if a.shape != (n, n):
            raise InputError(f"adjacency must be square, got {a.shape}")
        if a.nnz and a.data.min() < 0:
            raise DomainError("negative edge weight")
        if a.diagonal().any():
            raise InputError("adjacency has a nonzero diagonal")
        if (abs(a - a.T) > 0).nnz:
            raise InputError("adjacency is not symmetric")
        a.eliminate_zeros()
        a.data.setflags(write=False)
        a.indices.setflags(write=False)
        a.indptr.setflags(write=False)
        labels = tuple(self.labels) if self.labels else tuple(range(n))
        if len(labels) != n:
            raise InputError("labels length does not match node count")
        deg = np.asarray(a.sum(axis=1)).ravel()
        deg.setflags(write=False)
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "degrees", deg)
        object.__setattr__(self, "total", float(deg.sum()))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def two_m(self) -> float:
        return self.total

    @property
    def num_edges(self) -> int:
        return self.adjacency.nnz // 2

    @classmethod
    def from_dense(cls, matrix, labels: Sequence | None = None) -> "Graph":
        m = np.array(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"adjacency must be square, got shape {m.shape}")
        if np.any(np.diag(m) != 0):
            raise InputError("adjacency has a nonzero diagonal; drop self-loops first")
        return cls(sp.csr_matrix(m), tuple(labels) if labels is not None else ())

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, labels: Sequence | None = None) -> "Graph":
        """Build from ``(u, v)`` or ``(u, v, w)`` index tuples; each pair listed once."""
        rows, cols, vals = [], [], []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if u == v:
                continue
            rows += [u, v]
            cols += [v, u]
            vals += [w, w]
        a = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        return cls(a, tuple(labels) if labels is not None else ())

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(sp.csr_matrix((n, n)))

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def neighbors(self, i: int):
        a = self.adjacency
        lo, hi = a.indptr[i], a.indptr[i + 1]
        return a.indices[lo:hi], a.data[lo:hi]

    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        """Induced subgraph on ``nodes`` (kept in ascending order)."""
        idx = np.array(sorted(set(int(i) for i in nodes)), dtype=np.int64)
        sub = self.adjacency[idx][:, idx]
        return Graph(sub, tuple(self.labels[i] for i in idx))

    def index_of(self, label) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise InputError(f"unknown node id {label!r}") from None

    @property
    def _label_index(self) -> dict:
        cache = self.__dict__.get("_lbl")
        if cache is None:
            cache = {str(lbl): i for i, lbl in enumerate(self.labels)}
            cache.update({lbl: i for i, lbl in enumerate(self.labels)})
            object.__setattr__(self, "_lbl", cache)
        return cache


def degree_vector(g: Graph) -> np.ndarray:
    return np.array(g.degrees)


def _parse_lines(stream: TextIO):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(lineno, raw.rstrip("\n"))
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(lineno, raw.rstrip("\n"), "bad weight") from None
            if not np.isfinite(w):
                raise ParseError(lineno, raw.rstrip("\n"), "non-finite weight")
            if w < 0:
                raise DomainError(f"line {lineno}: negative weight {w}")
        else:
            w = 1.0
        yield lineno, EdgeRecord(parts[0], parts[1], w)


def load_edge_list(stream: TextIO | str, directed_mode: str = UNDIRECTED) -> Graph:
    """Read ``u v [w]`` lines into a :class:`Graph`.

    Node ids are compacted to ``0..n-1`` in order of first appearance.
    In ``average_directed`` mode each line is a directed edge ``u -> v`` and
    the undirected weight is the mean of the two directions (a missing
    direction counts as 0).  Self-loops are dropped and counted.
    """
    if directed_mode not in (UNDIRECTED, AVERAGE_DIRECTED):
        raise InputError(f"unknown directed_mode {directed_mode!r}")
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    index: dict[str, int] = {}
    seen: dict[tuple, int] = {}
    weights: dict[tuple, float] = {}
    loops = 0
    for lineno, rec in _parse_lines(stream):
        for node in (rec.u, rec.v):
            if node not in index:
                index[node] = len(index)
        u, v = index[rec.u], index[rec.v]
        if u == v:
            loops += 1
            continue
        if directed_mode == UNDIRECTED:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdgeError(
                    f"line {lineno}: duplicate edge {rec.u}-{rec.v} (first on line {seen[key]})"
                )
            seen[key] = lineno
            weights[key] = rec.w
        else:
            if (u, v) in seen:
                raise DuplicateEdgeError(
                    f"line {lineno}: duplicate directed edge {rec.u}->{rec.v} "
                    f"(first on line {seen[(u, v)]})"
                )
            seen[(u, v)] = lineno
            key = (min(u, v), max(u, v))
            weights[key] = weights.get(key, 0.0) + rec.w / 2.0

    if loops:
        log.warning("dropped %d self-loop record(s)", loops)
    n = len(index)
    labels = tuple(parse_id(lbl) for lbl in index)
    edges = [(u, v, w) for (u, v), w in weights.items()]
    g = Graph.from_edges(n, edges, labels)
    object.__setattr__(g, "self_loops_dropped", loops)
    return g


def parse_id(label: str):
    """Integer if the token parses as one, else the string itself."""
    try:
        return int(label)
    except ValueError:
        return label


def read_edge_list(path, directed_mode: str = UNDIRECTED) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh, directed_mode)


def write_edge_list(g: Graph, stream: TextIO) -> None:
    """Write ``u v w`` lines using original labels.

    Isolated nodes are written as zero-weight self-loops so that they
    survive a reload.
    """
    a = g.adjacency
    for i in range(g.n):
        lo, hi = a.indptr[i], a.indptr[i + 1]
        if lo == hi:
            stream.write(f"{g.labels[i]} {g.labels[i]} 0\n")
            continue
        for j, w in zip(a.indices[lo:hi], a.data[lo:hi]):
            if j > i:
                stream.write(f"{g.labels[i]} {g.labels[j]} {float(w)!r}\n")


def load_labels(stream: TextIO | str) -> dict:
    """Read ``node_id label`` pairs; returns ``{node_id: label}`` with natural types."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    out = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(lineno, raw.rstrip("\n"))
        out[parse_id(parts[0])] = parse_id(parts[1])
    return out


def labels_for(g: Graph, label_map: dict) -> np.ndarray:
    """Align a ``{node_id: label}`` map to the graph's node order."""
    missing = [lbl for lbl in g.labels if lbl not in label_map]
    if missing:
        raise InputError(f"no label for node(s) {missing[:5]}")
    return np.array([label_map[lbl] for lbl in g.labels])


def karate_club(truth: str = "factions") -> tuple[Graph, np.ndarray]:
    """Zachary's karate club and its two groups (0 = instructor, 1 = administrator).

    ``truth="factions"`` gives the factions by ties; ``truth="clubs"`` the
    clubs joined after the split.  They differ only at node 8.
    """
    if truth not in ("factions", "clubs"):
        raise InputError(f"unknown karate labeling {truth!r}")
    data = resources.files("commex") / "data"
    g = load_edge_list((data / "karate.txt").read_text(encoding="utf-8"))
    groups = load_labels((data / f"karate_{truth}.txt").read_text(encoding="utf-8"))
    return g, labels_for(g, groups)
