"""Agreement between detected communities and ground truth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InfeasibleError, InputError
from .graph import Graph


@dataclass(frozen=True)
class ConfusionMatrix:
    """``r[a, b]`` = fraction of nodes with proposed label ``classes[a]`` and true label ``classes[b]``."""

    r: np.ndarray
    classes: tuple


@dataclass(frozen=True)
class BlockEdgeCounts:
    """``o[k, l]`` = sum of A_ij over ordered pairs with i in block k, j in block l."""

    o: np.ndarray
    blocks: tuple


def confusion_matrix(s, c, n: int | None = None) -> ConfusionMatrix:
    s = np.asarray(s)
    c = np.asarray(c)
    if s.shape != c.shape or s.ndim != 1:
        raise InputError(f"labelings differ in length: {s.shape} vs {c.shape}")
    if n is not None and n != s.size:
        raise InputError(f"n={n} does not match labeling length {s.size}")
    classes = tuple(sorted(set(s.tolist()) | set(c.tolist())))
    pos = {lab: i for i, lab in enumerate(classes)}
    r = np.zeros((len(classes), len(classes)))
    np.add.at(r, ([pos[x] for x in s.tolist()], [pos[x] for x in c.tolist()]), 1.0)
    return ConfusionMatrix(r / max(s.size, 1), classes)


def block_edge_counts(g: Graph, s) -> BlockEdgeCounts:
    s = np.asarray(s)
    if s.shape != (g.n,):
        raise InputError(f"labeling has shape {s.shape}, expected ({g.n},)")
    blocks, idx = np.unique(s, return_inverse=True)
    onehot = np.zeros((g.n, blocks.size))
    onehot[np.arange(g.n), idx] = 1.0
    o = onehot.T @ (g.adjacency @ onehot)
    return BlockEdgeCounts(np.asarray(o), tuple(blocks.tolist()))


class MatchScore(NamedTuple):
    ppv: float
    npv: float
    matched_class: object
    size: int
    matched_size: int


def match_and_score(extracted: Iterable[int], true_labels, background_label=None,
                    match_background: bool = True) -> MatchScore:
    """PPV and NPV of an extracted set against its best-matching true class.

    The matched class C_S holds the plurality of ``extracted`` (ties go to the
    lowest class id).  PPV = |C_S & S| / |S|; NPV = 1 - |C_S & S^c| / |S^c|.
    A designated ``background_label`` is eligible as C_S unless
    ``match_background`` is False.
    """
    labels = np.asarray(true_labels)
    n = labels.size
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter((int(i) for i in extracted), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise InputError("extracted node index out of range")
    mask[idx] = True
    size = int(mask.sum())
    if size == 0 or size == n:
        raise InfeasibleError("PPV/NPV need a nonempty S and a nonempty complement")
    classes = sorted(set(labels.tolist()))
    if not match_background and background_label is not None:
        eligible = [k for k in classes if k != background_label] or classes
    else:
        eligible = classes
    inside = labels[mask]
    counts = [int(np.count_nonzero(inside == k)) for k in eligible]
    best = eligible[int(np.argmax(counts))]
    hit = int(np.count_nonzero(inside == best))
    missed = int(np.count_nonzero(labels[~mask] == best))
    return MatchScore(hit / size, 1.0 - missed / (n - size), best, size, hit + missed)
