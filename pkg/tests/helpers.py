"""Small builders for in-memory test datasets."""

from sustain_eval.model import (
    Dataset,
    DatasetConfig,
    ItemRecord,
    PairedObservation,
    RecommendationSet,
    RelevanceJudgment,
    UserRecord,
)


def make_dataset(recs, items=None, users=None, judgments=None, config=None, **tables):
    """``recs`` maps user id -> list of item ids; ``items`` maps item id -> ItemRecord kwargs."""
    items = dict(items or {})
    for lst in recs.values():
        for i in lst:
            items.setdefault(i, {})
    users = dict(users or {})
    for u in recs:
        users.setdefault(u, {})
    return Dataset(
        items=tuple(ItemRecord(i, **kw) for i, kw in items.items()),
        users=tuple(
            UserRecord(
                u,
                group_ids=frozenset(kw.get("groups", ())),
                region=kw.get("region"),
                familiar_items=frozenset(kw.get("familiar", ())),
            )
            for u, kw in users.items()
        ),
        recommendations=tuple(RecommendationSet(u, tuple(lst)) for u, lst in recs.items()),
        judgments=None if judgments is None else tuple(
            RelevanceJudgment(u, i, r) for (u, i), r in judgments.items()
        ),
        config=config or DatasetConfig(),
        **tables,
    )


def paired(kind, baseline, treatment, **kw):
    return PairedObservation(kind, baseline, treatment, **kw)


def random_problem(rng, max_pool=12, max_k=4, objective="green"):
    """A random re-rank problem; relevance and scores come from coarse grids so ties occur."""
    from sustain_eval.rerank import RerankProblem

    k = rng.randint(1, max_k)
    n = rng.randint(k, max_pool)
    pool = tuple(f"i{j:02d}" for j in range(n))
    rel = {i: rng.choice((0.0, 0.25, 0.5, 0.75, 1.0)) for i in pool}
    if objective == "green":
        green = frozenset(i for i in pool if rng.random() < 0.5)
        sus = {i: 1.0 if i in green else 0.0 for i in pool}
    else:
        green = frozenset()
        sus = {i: rng.choice((0.0, 0.2, 0.5, 0.9, 1.0)) for i in pool}
    return RerankProblem("u", pool, rel, sus, green, k, objective)
