"""Block-model sampling and the two-block population criteria.

The population functions are written in the reduced coordinates
``t1 = r11 / (r11 + r12)`` and ``t2 = r22 / (r21 + r22)`` of a 2x2
confusion matrix ``R`` whose columns sum to ``(pi, 1 - pi)``; ``t1 = t2 = 1``
is the truthful labeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .criteria import ADJUSTED, ORIGINAL
from .errors import DegenerateError, DomainError, InputError, SingularPointError
from .graph import Graph


@dataclass(frozen=True)
class BlockModelParams:
    """Block model with ``K`` blocks.

    Give either ``pi`` (labels drawn i.i.d.) or ``sizes`` (fixed block sizes,
    nodes laid out block by block); a single block needs neither.  Effective
    edge probabilities are ``rho * p``.
    """

    n: int
    p: tuple
    pi: tuple | None = None
    sizes: tuple | None = None
    rho: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DomainError(f"P must be square, got shape {p.shape}")
        if not np.allclose(p, p.T, rtol=0, atol=0):
            raise DomainError("P must be symmetric")
        k = p.shape[0]
        object.__setattr__(self, "p", tuple(map(tuple, p)))
        if self.n < 1:
            raise DomainError("n must be positive")
        if k == 1 and self.pi is None and self.sizes is None:
            object.__setattr__(self, "pi", (1.0,))
        if (self.pi is None) == (self.sizes is None):
            raise DomainError("give exactly one of pi or sizes")
        if self.pi is not None:
            pi = np.asarray(self.pi, dtype=float)
            if pi.shape != (k,) or np.any(pi < 0) or abs(pi.sum() - 1) > 1e-12:
                raise DomainError("pi must be a probability vector matching P")
            object.__setattr__(self, "pi", tuple(pi.tolist()))
        else:
            sizes = tuple(int(s) for s in self.sizes)
            if len(sizes) != k or any(s < 0 for s in sizes) or sum(sizes) != self.n:
                raise DomainError(f"sizes {sizes} must be {k} nonnegative counts summing to n={self.n}")
            object.__setattr__(self, "sizes", sizes)
        if self.rho <= 0:
            raise DomainError("rho must be positive")
        eff = self.rho * p
        if np.any(eff < 0) or np.any(eff > 1):
            raise DomainError("scaled edge probabilities must lie in [0, 1]")

    @property
    def k(self) -> int:
        return len(self.p)

    @property
    def effective_p(self) -> np.ndarray:
        return self.rho * np.asarray(self.p)

    @property
    def expected_degree(self) -> float:
        """lambda_n = n * rho."""
        return self.n * self.rho


def sample_block_model(params: BlockModelParams, seed=None) -> tuple[Graph, np.ndarray]:
    """Draw ``(graph, true_labels)``; labels are block indices ``0..K-1``."""
    rng = np.random.default_rng(seed)
    n = params.n
    if params.sizes is not None:
        labels = np.repeat(np.arange(params.k), params.sizes)
    else:
        labels = rng.choice(params.k, size=n, p=params.pi)
    prob = params.effective_p
    rows, cols = [], []
    for i in range(n - 1):
        pr = prob[labels[i], labels[i + 1:]]
        hit = np.flatnonzero(rng.random(n - i - 1) < pr)
        if hit.size:
            rows.append(np.full(hit.size, i))
            cols.append(hit + i + 1)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
    else:
        r = c = np.empty(0, dtype=np.int64)
    data = np.ones(2 * r.size)
    a = sp.csr_matrix((data, (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n, n))
    return Graph(a), labels


def check_consistency_conditions(p11: float, p12: float, p22: float) -> bool:
    """True iff p11 > p12, p11 > p22 and p11 + p22 > 2 p12."""
    return p11 > p12 and p11 > p22 and p11 + p22 > 2 * p12


def in_region(t1: float, t2: float, pi: float, tol: float = 1e-12) -> bool:
    """(t1, t2) in [0, pi] x [0, 1-pi]  or  [pi, 1] x [1-pi, 1]."""
    lower = -tol <= t1 <= pi + tol and -tol <= t2 <= 1 - pi + tol
    upper = pi - tol <= t1 <= 1 + tol and 1 - pi - tol <= t2 <= 1 + tol
    return lower or upper


def _bracket(t1, t2):
    return t1 * (t1 + t2 - 1) - 0.5 * (t1 + t2)


def population_original(t1, t2, p11, p12, p22, pi=None):
    """Population value of the original criterion at (t1, t2).

    Without ``pi`` only the unit square is checked.
    """
    if pi is not None:
        if not in_region(t1, t2, pi):
            raise DomainError(f"({t1}, {t2}) outside the feasible region for pi={pi}")
    elif not (0 <= t1 <= 1 and 0 <= t2 <= 1):
        raise DomainError(f"({t1}, {t2}) outside the unit square")
    return (p22 - p12 + (p11 - 2 * p12 + p22) * _bracket(t1, t2)
            + 0.5 * (p11 - p22) * (t1 + t2))


def population_adjusted(t1, t2, pi, p11, p12, p22):
    """Population value of the adjusted criterion; singular on t1 + t2 = 1."""
    if not in_region(t1, t2, pi):
        raise DomainError(f"({t1}, {t2}) outside the feasible region for pi={pi}")
    d = t1 + t2 - 1
    if d == 0:
        raise SingularPointError("adjusted population criterion is singular on t1 + t2 = 1")
    size_factor = (t1 - pi) * (t2 - (1 - pi)) / (d * d)
    return size_factor * population_original(t1, t2, p11, p12, p22)


def interior_stationary_point(p11, p12, p22) -> tuple[float, float]:
    den = p11 + p22 - 2 * p12
    if den == 0:
        raise DegenerateError("p11 + p22 = 2 p12: no isolated stationary point")
    return (p22 - p12) / den, (p11 - p12) / den


class GridArgmax(NamedTuple):
    t1: float
    t2: float
    value: float
    consistent: bool
    unique: bool


def feasible_grid(pi: float, step: float, exclude_diagonal: bool = False):
    """Grid points of the feasible region (``pi`` and ``1 - pi`` always included)."""
    base = np.round(np.arange(0.0, 1.0 + step / 2, step), 12)
    base = base[base <= 1.0]
    ax1 = np.union1d(base, [pi])
    ax2 = np.union1d(base, [1 - pi])
    t1, t2 = np.meshgrid(ax1, ax2, indexing="ij")
    t1, t2 = t1.ravel(), t2.ravel()
    keep = ((t1 <= pi) & (t2 <= 1 - pi)) | ((t1 >= pi) & (t2 >= 1 - pi))
    if exclude_diagonal:
        keep &= np.abs(t1 + t2 - 1) >= step / 2
    return t1[keep], t2[keep]


def population_grid_argmax(criterion, pi, p11, p12, p22, step=0.01) -> GridArgmax:
    """Maximize a population criterion over a grid of the feasible region.

    ``consistent`` reports whether the consistency conditions hold; ``unique``
    whether the maximum is attained at a single grid point.
    """
    if not 0 < step <= 0.1:
        raise DomainError("step must lie in (0, 0.1]")
    if not 0 < pi < 1:
        raise DomainError("pi must lie in (0, 1)")
    t1, t2 = feasible_grid(pi, step, exclude_diagonal=criterion == ADJUSTED)
    bracket = _bracket(t1, t2)
    f = p22 - p12 + (p11 - 2 * p12 + p22) * bracket + 0.5 * (p11 - p22) * (t1 + t2)
    if criterion == ADJUSTED:
        d = t1 + t2 - 1
        f = (t1 - pi) * (t2 - (1 - pi)) / (d * d) * f
    elif criterion != ORIGINAL:
        raise InputError(f"unknown criterion {criterion!r}")
    best = int(np.argmax(f))
    fmax = f[best]
    ties = np.count_nonzero(f >= fmax - 1e-12 * max(1.0, abs(fmax)))
    return GridArgmax(float(t1[best]), float(t2[best]), float(fmax),
                      check_consistency_conditions(p11, p12, p22), ties == 1)


def confusion_from_t(t1: float, t2: float, pi: float) -> np.ndarray:
    """A 2x2 confusion matrix with column sums (pi, 1-pi) mapping to (t1, t2).

    Inverse of the reduced coordinates; undefined on t1 + t2 = 1 unless at
    the corner (pi, 1 - pi).
    """
    d = t1 + t2 - 1
    if d == 0:
        raise SingularPointError("t1 + t2 = 1 does not determine a confusion matrix")
    a = (t2 - (1 - pi)) / d  # proportion labeled as S
    return np.array([[t1 * a, (1 - t1) * a],
                     [pi - t1 * a, (1 - pi) - (1 - t1) * a]])


def sizes_from_fractions(n: int, fractions: Sequence[float]) -> tuple:
    """Round block fractions to integer sizes summing to ``n``."""
    raw = np.asarray(fractions, dtype=float) * n
    sizes = np.floor(raw).astype(int)
    sizes[np.argmax(raw - sizes)] += n - sizes.sum()
    return tuple(int(s) for s in sizes)
