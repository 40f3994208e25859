"""Social metrics: parity, diversity, serendipity, accessibility, harm, health."""

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Optional, Tuple

from ..errors import (
    EmptyGroupError,
    FewerThanTwoGroups,
    MissingScore,
    MissingSimilarity,
    MissingTable,
    UndefinedMetric,
)
from ..model import AccessibilityAudit, Dataset, MetricReport, PairedObservation
from ._kernels import slot_rate


@dataclass(frozen=True)
class ParityReport:
    per_item_gap: Dict[str, float]
    max_gap: float
    mean_gap: float
    epsilon: float
    satisfied: bool
    groups: Tuple[str, ...] = ()


def _rec_sets(ds: Dataset):
    return {rs.user_id: set(rs.items) for rs in ds.recommendations}


def exposure_probability(ds: Dataset, group: str, item: str, _recs=None) -> float:
    """Share of the group's members whose list contains ``item``.

    Members without any list stay in the denominator.
    """
    members = ds.group_members.get(group, ())
    if not members:
        raise EmptyGroupError(f"group {group!r} has no members")
    recs = _recs if _recs is not None else _rec_sets(ds)
    hits = sum(1 for u in members if item in recs.get(u, ()))
    return hits / len(members)


def demographic_parity(ds: Dataset, epsilon: Optional[float] = None) -> ParityReport:
    """Largest per-item gap in exposure probability between any two groups.

    Only items that appear in at least one list are examined.
    """
    eps = ds.config.epsilon if epsilon is None else epsilon
    groups = tuple(g for g in ds.group_universe if ds.group_members.get(g))
    if len(groups) < 2:
        raise FewerThanTwoGroups(f"{len(groups)} nonempty group(s)")
    recs = _rec_sets(ds)
    items = sorted({i for rs in ds.recommendations for i in rs.items})
    if not items:
        raise UndefinedMetric("no recommendations")
    gaps = {}
    for i in items:
        probs = [exposure_probability(ds, g, i, recs) for g in groups]
        gaps[i] = max(probs) - min(probs)
    max_gap = max(gaps.values())
    return ParityReport(
        per_item_gap=gaps,
        max_gap=max_gap,
        mean_gap=sum(gaps.values()) / len(gaps),
        epsilon=eps,
        satisfied=max_gap <= eps,
        groups=groups,
    )


def intra_list_diversity(ds: Dataset, user: str) -> float:
    items = ds.recommended(user)
    n = len(items)
    if n < 2:
        raise UndefinedMetric(f"list of {user!r} has fewer than 2 items")
    if ds.similarity is None:
        raise MissingTable("missing table: similarity")
    total = 0.0
    for a in items:
        for b in items:
            if a != b:
                total += ds.similarity.sim(a, b)
    return 1.0 - total / (n * (n - 1))


def mean_intra_list_diversity(ds: Dataset) -> MetricReport:
    if ds.similarity is None:
        return MetricReport.undefined("listd", "missing table")
    per_user = {}
    skipped_short = skipped_sim = 0
    for rs in ds.recommendations:
        if len(rs.items) < 2:
            skipped_short += 1
            continue
        try:
            per_user[rs.user_id] = intra_list_diversity(ds, rs.user_id)
        except MissingSimilarity:
            skipped_sim += 1
    if not per_user:
        return MetricReport.undefined("listd", "no list with at least 2 items and known similarities")
    report = MetricReport(
        name="listd",
        value=sum(per_user.values()) / len(per_user),
        coverage=len(per_user) / len(ds.recommendations),
        per_user=per_user,
    )
    if skipped_short:
        report.notes.append(f"{skipped_short} single-item list(s) skipped")
    if skipped_sim:
        report.notes.append(f"{skipped_sim} list(s) skipped for missing similarity")
    return report


def _serendipity_parts(ds: Dataset, user: str):
    items = ds.recommended(user)
    if not items:
        raise UndefinedMetric(f"no recommendations for {user!r}")
    rec = ds.user_index.get(user)
    familiar = set(rec.familiar_items if rec else ()) | set(ds.config.popular_items)
    rel = ds.relevance
    total = 0.0
    known = 0
    for i in items:
        r = rel.get((user, i))
        if r is None:
            continue
        known += 1
        if i not in familiar:
            total += r
    return total / len(items), known, len(items)


def serendipity(ds: Dataset, user: str) -> float:
    """Relevance-weighted share of recommended items outside the familiar set.

    Unknown relevance counts as 0.
    """
    return _serendipity_parts(ds, user)[0]


def mean_serendipity(ds: Dataset) -> MetricReport:
    if ds.judgments is None:
        return MetricReport.undefined("ser", "missing table")
    if not ds.recommendations:
        return MetricReport.undefined("ser", "no recommendations")
    per_user = {}
    known = total = 0
    for rs in ds.recommendations:
        value, k, n = _serendipity_parts(ds, rs.user_id)
        per_user[rs.user_id] = value
        known += k
        total += n
    report = MetricReport(
        name="ser",
        value=sum(per_user.values()) / len(per_user),
        coverage=known / total,
        per_user=per_user,
    )
    if known < total:
        report.notes.append(f"{total - known} of {total} slots lack relevance and count as 0")
    return report


def accessibility_score(audit: AccessibilityAudit, group: str) -> float:
    if not audit.artifacts:
        raise UndefinedMetric("audit has no artifacts")
    smap = audit.score_map
    total = 0.0
    for a in audit.artifacts:
        if (a, group) not in smap:
            raise MissingScore(f"({a}, {group}) not scored")
        total += smap[(a, group)]
    return total / len(audit.artifacts)


def inclusivity_gap(audit: AccessibilityAudit, epsilon: float) -> Tuple[float, bool]:
    groups = audit.groups
    if len(groups) < 2:
        raise FewerThanTwoGroups(f"{len(groups)} group(s) scored")
    acc = {g: accessibility_score(audit, g) for g in groups}
    gap = max(abs(acc[a] - acc[b]) for a, b in combinations(groups, 2))
    return gap, gap <= epsilon


def harmful_exposure_rate(ds: Dataset) -> float:
    value, _, _ = slot_rate(ds, lambda u, it: it.is_harmful)
    if value is None:
        raise UndefinedMetric("no harmful flags known")
    return value


def health_improvement(obs: PairedObservation) -> float:
    """Relative change of a health outcome with vs. without the recommender.

    For outcomes where lower is better the sign is flipped so that a
    positive value always means improvement.
    """
    if obs.baseline == 0:
        raise UndefinedMetric("outcome without recommender is zero")
    change = (obs.treatment - obs.baseline) / obs.baseline
    return change if obs.higher_is_better else -change
