"""Accuracy vs. sustainability re-ranking of per-user candidate pools.

Each user's pool is the set of items with a relevance judgment. A list is
scored on two objectives, both in [0, 1]:

* accuracy: NDCG@k against the pool's relevance judgments;
* sustainability: mean per-item sustainability score over the k slots,
  where the score is the green flag, or ``1 - value / pool_max`` for the
  carbon and life-cycle objectives.

Weighted-sum scalarization over a grid of weights traces the trade-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import PoolTooSmall, RangeError
from .model import Dataset

OBJECTIVES = ("green", "carbon", "lci")
METHODS = ("exact", "greedy")


@dataclass(frozen=True)
class RerankProblem:
    user_id: str
    candidates: Tuple[str, ...]
    relevance: Mapping[str, float]
    sustainability: Mapping[str, float]
    green: frozenset
    k: int
    objective: str = "green"


@dataclass(frozen=True)
class FrontierPoint:
    weight: float
    items: Tuple[str, ...]
    accuracy: float
    sustainability: float


@dataclass(frozen=True)
class GreenFilterResult:
    items: Tuple[str, ...]
    n_non_green: int
    note: Optional[str] = None


def _discount(rank: int) -> float:
    return 1.0 / math.log2(rank + 1)


def _ideal_dcg(relevance: Mapping[str, float], k: int) -> float:
    gains = sorted(relevance.values(), reverse=True)[:k]
    return sum(g * _discount(r) for r, g in enumerate(gains, 1))


def ndcg_at_k(items: Sequence[str], relevance: Mapping[str, float], k: int) -> float:
    """NDCG@k with linear gain; the ideal ordering is taken over the whole pool.

    Returns 0 when no pool item has positive relevance.
    """
    if k < 1:
        raise RangeError(f"k must be >= 1, got {k}")
    idcg = _ideal_dcg(relevance, k)
    if idcg == 0:
        return 0.0
    dcg = sum(relevance.get(i, 0.0) * _discount(r) for r, i in enumerate(items[:k], 1))
    return dcg / idcg


def sustainability_score(problem: RerankProblem, items: Sequence[str]) -> float:
    return sum(problem.sustainability[i] for i in items) / problem.k


def objectives(problem: RerankProblem, items: Sequence[str]) -> Tuple[float, float]:
    return ndcg_at_k(items, problem.relevance, problem.k), sustainability_score(problem, items)


def _item_scores(ds: Dataset, pool: Sequence[str], objective: str) -> Dict[str, float]:
    index = ds.item_index
    if objective == "green":
        return {i: 1.0 if index[i].is_green else 0.0 for i in pool}
    attr = "carbon_footprint" if objective == "carbon" else "lci_score"
    raw = {i: getattr(index[i], attr) for i in pool}
    top = max((v for v in raw.values() if v is not None), default=0.0)
    if top == 0:
        return {i: 1.0 for i in pool}
    # unknown footprint scores as the worst item in the pool
    return {i: 0.0 if v is None else 1.0 - v / top for i, v in raw.items()}


def build_problem(ds: Dataset, user_id: str, k: int, objective: str = "green") -> RerankProblem:
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    rel = {i: r for (u, i), r in ds.relevance.items() if u == user_id}
    pool = tuple(sorted(rel))
    index = ds.item_index
    return RerankProblem(
        user_id=user_id,
        candidates=pool,
        relevance=rel,
        sustainability=_item_scores(ds, pool, objective),
        green=frozenset(i for i in pool if index[i].is_green),
        k=k,
        objective=objective,
    )


def _check(problem: RerankProblem, weight: float):
    if not 0.0 <= weight <= 1.0:
        raise RangeError(f"weight {weight} outside [0, 1]")
    if problem.k < 1:
        raise RangeError(f"k must be >= 1, got {problem.k}")
    if len(problem.candidates) < problem.k:
        raise PoolTooSmall(f"pool of {len(problem.candidates)} < k={problem.k} for user {problem.user_id!r}")


def _gains(problem, weight, idcg):
    """Per-slot gain of putting item ``i`` at 0-based position ``p``.

    Returned as a tuple compared lexicographically: the weighted score,
    then the dominant objective, then the other one. The trailing
    components only break exact ties, which keeps endpoint weights from
    returning a list dominated on the ignored objective.
    """
    k = problem.k
    rel, sus = problem.relevance, problem.sustainability

    def gain(i, p):
        acc = rel[i] * _discount(p + 1) / idcg if idcg > 0 else 0.0
        sust = sus[i] / k
        scalar = weight * acc + (1.0 - weight) * sust
        return (scalar, acc, sust) if weight >= 0.5 else (scalar, sust, acc)

    return gain


def _exact(problem, weight):
    # Once a selection is fixed, relevance-descending order maximizes both
    # objectives, so a DP over candidates in that order solves the weighted
    # sum exactly: best[j] is the best selection of j items seen so far.
    idcg = _ideal_dcg(problem.relevance, problem.k)
    gain = _gains(problem, weight, idcg)
    rel, sus = problem.relevance, problem.sustainability
    order = sorted(problem.candidates, key=lambda i: (-rel[i], -sus[i], i))
    zero = (0.0, 0.0, 0.0)
    best = {0: (zero, ())}
    for i in order:
        nxt = dict(best)
        for j, (key, picks) in best.items():
            if j == problem.k:
                continue
            g = gain(i, j)
            cand = (tuple(a + b for a, b in zip(key, g)), picks + (i,))
            if j + 1 not in nxt or cand[0] > nxt[j + 1][0]:
                nxt[j + 1] = cand
        best = nxt
    return best[problem.k][1]


def _greedy(problem, weight):
    idcg = _ideal_dcg(problem.relevance, problem.k)
    gain = _gains(problem, weight, idcg)
    chosen: List[str] = []
    remaining = sorted(problem.candidates)
    for p in range(problem.k):
        # max gain; ties go to the lexicographically smaller item id
        pick = max(remaining, key=lambda i: (gain(i, p), _neg_id(i)))
        chosen.append(pick)
        remaining.remove(pick)
    return tuple(chosen)


def _neg_id(item_id):
    return tuple(-ord(c) for c in item_id) + (1,)


def scalarized_rerank(problem: RerankProblem, weight: float, method: str = "exact") -> Tuple[str, ...]:
    """Best list of length k for ``weight * accuracy + (1 - weight) * sustainability``.

    ``method="exact"`` solves the weighted sum optimally. ``method="greedy"``
    appends, k times, the candidate with the largest marginal weighted gain;
    it is cheaper to reason about but may return lists that another list
    dominates on both objectives.
    """
    _check(problem, weight)
    if method == "exact":
        return _exact(problem, weight)
    if method == "greedy":
        return _greedy(problem, weight)
    raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def weight_grid(n: int = 11) -> Tuple[float, ...]:
    if n < 1:
        raise RangeError("grid needs at least one weight")
    if n == 1:
        return (0.0,)
    return tuple(j / (n - 1) for j in range(n))


def _dominates(a: FrontierPoint, b: FrontierPoint) -> bool:
    return (
        a.accuracy >= b.accuracy
        and a.sustainability >= b.sustainability
        and (a.accuracy > b.accuracy or a.sustainability > b.sustainability)
    )


def non_dominated(points: Sequence[FrontierPoint]) -> List[FrontierPoint]:
    """Drop dominated points and repeated objective vectors (first one wins)."""
    kept = []
    seen = set()
    for p in points:
        vec = (p.accuracy, p.sustainability)
        if vec in seen or any(_dominates(q, p) for q in points):
            continue
        seen.add(vec)
        kept.append(p)
    return kept


def pareto_frontier(problem: RerankProblem, weights: Optional[Sequence[float]] = None, method: str = "exact") -> List[FrontierPoint]:
    """Re-rank at every grid weight and keep the non-dominated lists.

    Identical lists are reported once, under the first weight producing
    them. Points are sorted by ascending accuracy.
    """
    grid = weight_grid() if weights is None else tuple(weights)
    if not grid:
        raise RangeError("weight grid is empty")
    points = []
    seen_lists = set()
    for w in grid:
        items = scalarized_rerank(problem, w, method)
        if items in seen_lists:
            continue
        seen_lists.add(items)
        acc, sust = objectives(problem, items)
        points.append(FrontierPoint(w, items, acc, sust))
    front = non_dominated(points)
    return sorted(front, key=lambda p: (p.accuracy, -p.sustainability, p.weight))


def green_filter_rerank(problem: RerankProblem) -> GreenFilterResult:
    """Green candidates by relevance first, topped up with the best non-green ones."""
    if problem.k < 1:
        raise RangeError(f"k must be >= 1, got {problem.k}")
    rel = problem.relevance

    def by_relevance(items):
        return sorted(items, key=lambda i: (-rel[i], i))

    green = by_relevance(i for i in problem.candidates if i in problem.green)
    other = by_relevance(i for i in problem.candidates if i not in problem.green)
    items = green[: problem.k]
    fill = other[: problem.k - len(items)]
    note = None
    if not green:
        note = "no green candidates: pure relevance ranking"
    elif fill:
        note = f"only {len(green)} green candidate(s); {len(fill)} non-green item(s) added"
    if len(items) + len(fill) < problem.k:
        extra = f"pool has only {len(problem.candidates)} candidate(s) for k={problem.k}"
        note = f"{note}; {extra}" if note else extra
    return GreenFilterResult(tuple(items + fill), len(fill), note)
