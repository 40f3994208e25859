"""Economic metrics: local business share, loyalty, producer exposure fairness."""

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

from ..errors import FewerThanTwoProducers, IncompleteSeries, MissingTable, RangeError, UndefinedMetric
from ..model import Dataset, ItemRecord, SatisfactionSeries
from ._kernels import slot_rate


def is_local(ds: Dataset, user_id: str, item: ItemRecord) -> Optional[bool]:
    """Locality of ``item`` for ``user_id``; ``None`` when it cannot be resolved.

    An explicit ``is_local`` value on the item wins. Otherwise the item is
    local iff its producer region equals the user's region, ignoring case.
    """
    if item.is_local is not None:
        return item.is_local
    user = ds.user_index.get(user_id)
    if user is None or user.region is None or item.producer_region is None:
        return None
    return user.region.casefold() == item.producer_region.casefold()


def local_business_rate(ds: Dataset) -> float:
    value, _, _ = slot_rate(ds, lambda u, it: is_local(ds, u, it))
    if value is None:
        raise UndefinedMetric("locality never resolvable")
    return value


def user_loyalty(series: SatisfactionSeries, decay: Optional[float] = None) -> float:
    """Mean satisfaction over the horizon, optionally recency-weighted.

    With ``decay`` set, period t gets weight ``decay ** (T - t)`` so the
    latest period has weight 1.
    """
    if decay is not None and not 0.0 < decay <= 1.0:
        raise RangeError(f"decay {decay} outside (0, 1]")
    if not series.complete:
        raise IncompleteSeries(f"series of {series.user_id!r} does not cover 1..{series.horizon}")
    values = series.values
    if decay is None:
        return sum(values) / len(values)
    T = series.horizon
    weights = [decay ** (T - t) for t in range(1, T + 1)]
    return sum(w * v for w, v in zip(weights, values)) / sum(weights)


def loyalty_per_user(ds: Dataset, decay: Optional[float] = None) -> Tuple[Dict[str, float], int]:
    """Loyalty of every user with a complete series, plus the number rejected."""
    if ds.satisfaction is None:
        raise MissingTable("missing table")
    out = {}
    rejected = 0
    for s in ds.satisfaction:
        try:
            out[s.user_id] = user_loyalty(s, decay)
        except IncompleteSeries:
            rejected += 1
    return out, rejected


def avg_loyalty(ds: Dataset, decay: Optional[float] = None) -> float:
    per_user, _ = loyalty_per_user(ds, decay)
    if not per_user:
        raise UndefinedMetric("no complete satisfaction series")
    return sum(per_user.values()) / len(per_user)


@dataclass(frozen=True)
class ExposureHistogram:
    counts: Dict[str, int]


def exposure_histogram(ds: Dataset, scope: Optional[str] = None) -> ExposureHistogram:
    """Recommendation-slot count per producer.

    Every producer with at least one catalog item in scope is listed, with
    zero when never recommended. ``scope`` restricts to one item category.
    """
    def in_scope(it):
        return it.producer_id is not None and (scope is None or it.category == scope)

    counts = {p: 0 for p in sorted({it.producer_id for it in ds.items if in_scope(it)})}
    index = ds.item_index
    for rs in ds.recommendations:
        for i in rs.items:
            it = index[i]
            if in_scope(it):
                counts[it.producer_id] += 1
    return ExposureHistogram(counts)


def pef_from_counts(counts: Sequence[float]) -> Tuple[float, bool]:
    """Mean over max of pairwise absolute exposure differences.

    Returns ``(value, uniform)``; perfectly uniform exposure has no finite
    ratio and yields ``(0.0, True)``.
    """
    if len(counts) < 2:
        raise FewerThanTwoProducers(f"{len(counts)} producer(s) in scope")
    dists = [abs(a - b) for a, b in combinations(counts, 2)]
    largest = max(dists)
    if largest == 0:
        return 0.0, True
    return (sum(dists) / len(dists)) / largest, False


def producer_exposure_fairness(ds: Dataset, scope: Optional[str] = None) -> float:
    hist = exposure_histogram(ds, scope)
    return pef_from_counts(list(hist.counts.values()))[0]
