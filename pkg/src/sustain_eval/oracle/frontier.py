"""Exhaustive objective space of small re-rank problems.

Works on any object exposing ``candidates``, ``relevance``,
``sustainability`` and ``k`` so it does not depend on the re-ranker.
"""

import math
from itertools import combinations

from ..errors import InstanceTooLarge

MAX_POOL = 12
MAX_K = 4


def _ndcg(ordered, relevance, k):
    ideal = sorted(relevance.values(), reverse=True)[:k]
    idcg = 0.0
    for pos, g in enumerate(ideal):
        idcg += g / math.log2(pos + 2)
    if idcg == 0:
        return 0.0
    dcg = 0.0
    for pos, item in enumerate(ordered[:k]):
        dcg += relevance[item] / math.log2(pos + 2)
    return dcg / idcg


def all_objective_vectors(problem):
    """(accuracy, sustainability) of every k-subset, each ordered by relevance."""
    pool = list(problem.candidates)
    k = problem.k
    if len(pool) > MAX_POOL or k > MAX_K:
        raise InstanceTooLarge(f"pool {len(pool)} / k {k} exceeds {MAX_POOL} / {MAX_K}")
    vectors = []
    for subset in combinations(pool, k):
        ordered = sorted(subset, key=lambda i: -problem.relevance[i])
        acc = _ndcg(ordered, problem.relevance, k)
        sust = sum(problem.sustainability[i] for i in subset) / k
        vectors.append((acc, sust))
    return vectors


def oracle_frontier(problem):
    """Non-dominated objective vectors of the exhaustive enumeration."""
    vectors = all_objective_vectors(problem)
    front = []
    for v in vectors:
        beaten = False
        for w in vectors:
            if w[0] >= v[0] and w[1] >= v[1] and (w[0] > v[0] or w[1] > v[1]):
                beaten = True
                break
        if not beaten and v not in front:
            front.append(v)
    return sorted(front)


def is_dominated(vector, space, tol=0.0):
    """True if some vector in ``space`` beats ``vector`` by more than ``tol``."""
    a, s = vector
    for x, y in space:
        if x >= a - tol and y >= s - tol and (x > a + tol or y > s + tol):
            return True
    return False
