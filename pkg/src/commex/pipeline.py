"""Sequential extraction: extract a community, remove it, repeat on the rest."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .criteria import ADJUSTED, EXTRACTION_CRITERIA
from .errors import InfeasibleError, InputError
from .graph import Graph
from .tabu import TabuConfig, derive_seed, multi_start


@dataclass(frozen=True)
class Community:
    rank: int
    members: frozenset
    score: float


@dataclass
class ExtractionResult:
    communities: list = field(default_factory=list)
    background: frozenset = frozenset()
    criterion_used: str = ADJUSTED

    def assignment(self, n: int, background_label: int = -1) -> np.ndarray:
        """Per-node community rank (1-based) or ``background_label``."""
        out = np.full(n, background_label, dtype=np.int64)
        for c in self.communities:
            out[list(c.members)] = c.rank
        return out

    def to_dict(self, labels=None) -> dict:
        name = (lambda i: labels[i]) if labels is not None else (lambda i: i)
        return {
            "criterion": self.criterion_used,
            "communities": [
                {"rank": c.rank, "score": c.score, "size": len(c.members),
                 "members": [name(i) for i in sorted(c.members)]}
                for c in self.communities
            ],
            "background": [name(i) for i in sorted(self.background)],
        }

    def to_json(self, labels=None) -> str:
        return json.dumps(self.to_dict(labels), indent=2, default=_jsonable)

    @classmethod
    def from_dict(cls, doc: dict, g: Graph | None = None) -> "ExtractionResult":
        """Inverse of :meth:`to_dict`; member labels are mapped through ``g`` when given."""
        index = g.index_of if g is not None else int
        try:
            comms = [Community(int(c["rank"]), frozenset(index(m) for m in c["members"]),
                               float(c["score"])) for c in doc["communities"]]
            bg = frozenset(index(m) for m in doc.get("background", []))
            return cls(comms, bg, doc.get("criterion", ADJUSTED))
        except (KeyError, TypeError, ValueError) as err:
            raise InputError(f"malformed extraction result: {err}") from None


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def extract_one(g: Graph, active, criterion: str = ADJUSTED,
                cfg: TabuConfig = TabuConfig()) -> tuple[frozenset, float]:
    """Best community within ``active``, scored on the induced subgraph only."""
    if criterion not in EXTRACTION_CRITERIA:
        raise InputError(f"unknown extraction criterion {criterion!r}")
    nodes = np.array(sorted(int(i) for i in active), dtype=np.int64)
    if nodes.size < 2:
        raise InfeasibleError(f"need at least 2 active nodes, got {nodes.size}")
    sub = g.subgraph(nodes)
    res = multi_start(sub, criterion, cfg)
    return frozenset(nodes[res.best_labeling].tolist()), res.best_score


def extract_sequence(g: Graph, criterion: str = ADJUSTED, cfg: TabuConfig = TabuConfig(),
                     min_size: int = 5, max_communities: int | None = None) -> ExtractionResult:
    """Extract communities until one smaller than ``min_size`` is proposed.

    A proposal with ``size >= min_size`` is kept; a smaller proposal stops the
    procedure and is discarded.  Round ``r`` runs with seed
    ``derive_seed(cfg.seed, r)``.
    """
    if max_communities is not None and max_communities < 0:
        raise InputError("max_communities must be >= 0")
    active = set(range(g.n))
    found = []
    rnd = 0
    while len(active) >= 2 and (max_communities is None or len(found) < max_communities):
        round_cfg = replace(cfg, seed=derive_seed(cfg.seed, rnd))
        members, score = extract_one(g, active, criterion, round_cfg)
        rnd += 1
        if len(members) < min_size:
            break
        found.append(Community(len(found) + 1, members, score))
        active -= members
    return ExtractionResult(found, frozenset(active), criterion)
