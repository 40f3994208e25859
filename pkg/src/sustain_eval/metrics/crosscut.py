"""Cross-cutting metrics: sustainable behavior, interpretability, life-cycle impact."""

from ..errors import MissingTable, UndefinedMetric
from ..model import BehaviorEvent, Dataset, MetricReport
from ._kernels import double_average


def is_sustainable(ds: Dataset, event: BehaviorEvent) -> bool:
    """An event is sustainable if its kind is configured as such, or, when
    enabled, if it references a green item."""
    cfg = ds.config
    if event.behavior_kind in cfg.sustainable_behaviors:
        return True
    if cfg.green_item_behaviors and event.item_id is not None:
        item = ds.item_index.get(event.item_id)
        return bool(item is not None and item.is_green)
    return False


def behavior_counts(ds: Dataset):
    """Per-user ``(sustainable, total)`` counts with bag semantics."""
    if ds.behaviors is None:
        raise MissingTable("missing table")
    counts = {}
    for ev in ds.behaviors:
        hit, n = counts.get(ev.user_id, (0, 0))
        counts[ev.user_id] = (hit + is_sustainable(ds, ev), n + 1)
    return counts


def sustainable_behavior_score(ds: Dataset) -> float:
    counts = behavior_counts(ds)
    total = sum(n for _, n in counts.values())
    if total == 0:
        raise UndefinedMetric("empty behavior log")
    return sum(h for h, _ in counts.values()) / total


def interpretability_per_user(ds: Dataset):
    if ds.explanations is None:
        raise MissingTable("missing table")
    scores = {}
    for e in ds.explanations:
        scores.setdefault(e.user_id, []).append(e.interpret_score)
    return {u: sum(v) / len(v) for u, v in scores.items()}


def avg_interpretability(ds: Dataset) -> float:
    per_user = interpretability_per_user(ds)
    if not per_user:
        raise UndefinedMetric("no explanations")
    return sum(per_user.values()) / len(per_user)


def avg_life_cycle_impact(ds: Dataset) -> MetricReport:
    return double_average(ds, "avglci", lambda it: it.lci_score)
