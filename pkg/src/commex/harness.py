"""Simulation scenarios, replication runner, CSV output and SVG box plots."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import TextIO
from xml.sax.saxutils import escape

import numpy as np

from .blockmodel import BlockModelParams, sample_block_model
from .criteria import ADJUSTED, ORIGINAL, adjusted_score, subset_stats
from .errors import CommexError, ConvergenceError, ScenarioError
from .evaluation import match_and_score
from .partition import leading_eigenvector_split, modularity_two_way
from .pipeline import extract_one, extract_sequence
from .tabu import TabuConfig, derive_seed

MODULARITY = "modularity"
METHODS = (MODULARITY, ORIGINAL, ADJUSTED)
MODULARITY_SOLVERS = ("spectral", "tabu")
DESIGNS = ("toy", "two_communities", "one_community_bg", "two_communities_bg", "custom")

CSV_FIELDS = ("scenario", "rep", "method", "rank", "ppv", "npv", "matched_class",
              "size", "matched_size")


@dataclass(frozen=True)
class Scenario:
    id: str
    design: str
    params: BlockModelParams
    reps: int = 10
    methods: tuple = METHODS
    seed: int = 0
    background: int | None = None
    tabu: TabuConfig = field(default_factory=TabuConfig)
    communities: int = 1
    match_background: bool = False
    modularity_solver: str = "spectral"

    def __post_init__(self):
        if self.modularity_solver not in MODULARITY_SOLVERS:
            raise ScenarioError(f"modularity_solver must be one of {MODULARITY_SOLVERS}")
        if self.design not in DESIGNS:
            raise ScenarioError(f"unknown design {self.design!r}; choose from {DESIGNS}")
        if self.reps < 1:
            raise ScenarioError("reps must be >= 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ScenarioError(f"unknown method(s) {bad}; choose from {METHODS}")
        if self.communities < 1:
            raise ScenarioError("communities must be >= 1")
        if self.background is not None and not 0 <= self.background < self.params.k:
            raise ScenarioError(f"background block {self.background} out of range")


def _params(n, p, sizes, rho=1.0):
    try:
        return BlockModelParams(n=n, p=p, sizes=sizes, rho=rho)
    except CommexError as err:
        raise ScenarioError(str(err)) from None


def make_scenario(design: str, id: str | None = None, *, reps=10, seed=0,
                  methods=METHODS, tabu: TabuConfig | None = None, communities=1,
                  match_background=False, modularity_solver="spectral", **knobs) -> Scenario:
    """Build one of the stock designs; ``knobs`` override its parameters.

    =====================  ====================================================
    ``toy``                n=60, n1=15, p_in=0.5, p_out=0.1; block 1 background
    ``two_communities``    n=1000, n1=100, p11=0.5, p22=0.4, p12=0.05
    ``one_community_bg``   n=1000, n1=100, p11=0.1, p=0.05; block 1 background
    ``two_communities_bg`` n=1000, size=100, x=2 (p11=0.05x, p22=0.04x),
                           p=0.05; block 2 background
    ``custom``             n, p, and sizes or pi given explicitly
    =====================  ====================================================
    """
    k = dict(knobs)
    rho = k.pop("rho", 1.0)
    background = k.pop("background", None)

    def take(name, default):
        return k.pop(name, default)

    if design == "toy":
        n, n1 = take("n", 60), take("n1", 15)
        p_in, p_out = take("p_in", 0.5), take("p_out", 0.1)
        params = _params(n, [[p_in, p_out], [p_out, p_out]], (n1, n - n1), rho)
        background = 1 if background is None else background
    elif design == "two_communities":
        n, n1 = take("n", 1000), take("n1", 100)
        p11, p22, p12 = take("p11", 0.5), take("p22", 0.4), take("p12", 0.05)
        params = _params(n, [[p11, p12], [p12, p22]], (n1, n - n1), rho)
    elif design == "one_community_bg":
        n, n1 = take("n", 1000), take("n1", 100)
        p11, p = take("p11", 0.1), take("p", 0.05)
        params = _params(n, [[p11, p], [p, p]], (n1, n - n1), rho)
        background = 1 if background is None else background
    elif design == "two_communities_bg":
        n, size = take("n", 1000), take("size", 100)
        x, p = take("x", 2), take("p", 0.05)
        p11, p22 = take("p11", 0.05 * x), take("p22", 0.04 * x)
        params = _params(n, [[p11, p, p], [p, p22, p], [p, p, p]], (size, size, n - 2 * size), rho)
        background = 2 if background is None else background
    elif design == "custom":
        n, p = take("n", None), take("p", None)
        sizes, pi = take("sizes", None), take("pi", None)
        if n is None or p is None:
            raise ScenarioError("custom design needs n and p")
        try:
            params = BlockModelParams(n=n, p=p, sizes=sizes, pi=pi, rho=rho)
        except CommexError as err:
            raise ScenarioError(str(err)) from None
    else:
        raise ScenarioError(f"unknown design {design!r}; choose from {DESIGNS}")
    if k:
        raise ScenarioError(f"unknown parameter(s) for design {design!r}: {sorted(k)}")
    return Scenario(id or design, design, params, reps, tuple(methods), seed, background,
                    tabu or TabuConfig(), communities, match_background, modularity_solver)


def load_scenario(stream: TextIO | str) -> Scenario:
    """Read a JSON scenario: ``design`` plus any :func:`make_scenario` keys.

    A ``tabu`` object may set ``restarts``, ``tenure``, ``max_iters``,
    ``workers`` (its ``seed`` is ignored; seeds derive from the scenario seed).
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    try:
        doc = json.load(stream)
    except json.JSONDecodeError as err:
        raise ScenarioError(f"scenario is not valid JSON: {err}") from None
    if not isinstance(doc, dict) or "design" not in doc:
        raise ScenarioError("scenario must be a JSON object with a 'design' key")
    doc = dict(doc)
    tabu_doc = doc.pop("tabu", {}) or {}
    try:
        tabu = TabuConfig(**{k: v for k, v in tabu_doc.items() if k != "seed"})
    except (TypeError, CommexError) as err:
        raise ScenarioError(f"bad tabu settings: {err}") from None
    if "methods" in doc:
        doc["methods"] = tuple(doc["methods"])
    for key in ("sizes", "pi"):
        if key in doc and doc[key] is not None:
            doc[key] = tuple(doc[key])
    design = doc.pop("design")
    try:
        return make_scenario(design, tabu=tabu, **doc)
    except TypeError as err:
        raise ScenarioError(str(err)) from None


def modularity_extracted_side(g, labeling: np.ndarray) -> frozenset:
    """The side of a two-way modularity split reported as its extracted set.

    The side with the larger adjusted extraction score; ties go to the side
    holding node 0.
    """
    n = g.n
    if labeling.all() or not labeling.any():
        return frozenset(range(n))
    a = adjusted_score(subset_stats(g, labeling), n)
    b = adjusted_score(subset_stats(g, ~labeling), n)
    side = labeling if (a > b or (a == b and labeling[0])) else ~labeling
    return frozenset(np.flatnonzero(side).tolist())


def _spectral_labeling(g) -> np.ndarray:
    try:
        return leading_eigenvector_split(g).labeling
    except ConvergenceError as err:
        return err.last_iterate >= 0


def _rep_rows(sc: Scenario, rep: int) -> list[dict]:
    rep_seed = derive_seed(sc.seed, rep)
    g, truth = sample_block_model(sc.params, derive_seed(rep_seed, 0))
    rows = []
    for mi, method in enumerate(METHODS):
        if method not in sc.methods:
            continue
        cfg = replace(sc.tabu, seed=derive_seed(rep_seed, mi + 1))
        if method == MODULARITY:
            if sc.modularity_solver == "spectral":
                labeling = _spectral_labeling(g)
            else:
                labeling = modularity_two_way(g, cfg).best_labeling
            sets = [modularity_extracted_side(g, labeling)]
        elif sc.communities == 1:
            sets = [extract_one(g, range(g.n), method, cfg)[0]]
        else:
            out = extract_sequence(g, method, cfg, min_size=1, max_communities=sc.communities)
            sets = [c.members for c in out.communities]
        for rank, members in enumerate(sets, start=1):
            if len(members) in (0, g.n):
                ppv = npv = float("nan")
                matched, size, msize = "", len(members), 0
            else:
                m = match_and_score(members, truth, sc.background, sc.match_background)
                ppv, npv, matched, size, msize = m
            rows.append({"scenario": sc.id, "rep": rep, "method": method, "rank": rank,
                         "ppv": ppv, "npv": npv, "matched_class": matched,
                         "size": size, "matched_size": msize})
    return rows


def run_scenario(sc: Scenario, workers: int = 1) -> list[dict]:
    """One row per (replication, method, extracted community), sorted."""
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(lambda r: _rep_rows(sc, r), range(sc.reps)))
    else:
        chunks = [_rep_rows(sc, r) for r in range(sc.reps)]
    rows = [row for chunk in chunks for row in chunk]
    order = {m: i for i, m in enumerate(METHODS)}
    rows.sort(key=lambda r: (r["rep"], order[r["method"]], r["rank"]))
    return rows


def write_csv(rows: list[dict], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([f"{r[k]:.6f}" if k in ("ppv", "npv") else r[k] for k in CSV_FIELDS])


def summarize(rows: list[dict], rank: int = 1) -> dict:
    """``{method: {"ppv": (mean, sd), "npv": (mean, sd), "n": count}}`` for one rank."""
    out = {}
    for method in METHODS:
        sel = [r for r in rows if r["method"] == method and r["rank"] == rank]
        if not sel:
            continue
        entry = {"n": len(sel)}
        for key in ("ppv", "npv"):
            vals = np.array([r[key] for r in sel], dtype=float)
            entry[key] = (float(np.nanmean(vals)), float(np.nanstd(vals, ddof=1)) if len(vals) > 1 else 0.0)
        out[method] = entry
    return out


def five_number(values) -> tuple:
    v = np.asarray(values, dtype=float)
    v = v[~np.isnan(v)]
    if v.size == 0:
        return (math.nan,) * 5
    return tuple(float(x) for x in np.percentile(v, [0, 25, 50, 75, 100]))


_COLORS = {MODULARITY: "#4c72b0", ORIGINAL: "#dd8452", ADJUSTED: "#55a868"}
_SHORT = {MODULARITY: "M", ORIGINAL: "O", ADJUSTED: "A"}


def boxplot_svg(rows: list[dict], title: str = "", rank: int = 1) -> str:
    """Side-by-side box plots of PPV and NPV per method (values in [0, 1])."""
    methods = [m for m in METHODS if any(r["method"] == m and r["rank"] == rank for r in rows)]
    width, height = 120 + 2 * 40 * max(len(methods), 1) + 60, 300
    top, bottom, left = 40, 250, 50

    def y(v):
        return bottom - (bottom - top) * v

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'font-family="sans-serif" font-size="11">',
             f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>']
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(f'<line x1="{left}" x2="{width - 10}" y1="{y(tick):.1f}" y2="{y(tick):.1f}" '
                     f'stroke="#ddd"/>')
        parts.append(f'<text x="{left - 6}" y="{y(tick) + 4:.1f}" text-anchor="end">{tick:.2f}</text>')
    x = left + 20
    for metric in ("ppv", "npv"):
        start = x
        for m in methods:
            vals = [r[metric] for r in rows if r["method"] == m and r["rank"] == rank]
            lo, q1, med, q3, hi = five_number(vals)
            cx = x + 15
            if not math.isnan(med):
                parts += [
                    f'<line x1="{cx}" x2="{cx}" y1="{y(hi):.1f}" y2="{y(lo):.1f}" stroke="#333"/>',
                    f'<rect x="{x + 3}" y="{y(q3):.1f}" width="24" height="{max(y(q1) - y(q3), 0.5):.1f}" '
                    f'fill="{_COLORS[m]}" stroke="#333"/>',
                    f'<line x1="{x + 3}" x2="{x + 27}" y1="{y(med):.1f}" y2="{y(med):.1f}" '
                    f'stroke="#000" stroke-width="2"/>',
                ]
            parts.append(f'<text x="{cx}" y="{bottom + 14}" text-anchor="middle">{_SHORT[m]}</text>')
            x += 40
        parts.append(f'<text x="{(start + x) / 2 - 5:.1f}" y="{bottom + 32}" text-anchor="middle">'
                     f'{metric.upper()}</text>')
        x += 40
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

