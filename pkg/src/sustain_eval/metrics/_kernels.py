"""Aggregation kernels shared by several metrics."""

from ..model import Dataset, MetricReport


def double_average(ds: Dataset, name: str, value_of) -> MetricReport:
    """Mean over users of the mean per-item value within each list.

    ``value_of(item_record)`` returns a number or ``None``. Items returning
    ``None`` are dropped from their list and users left with no valued item
    are dropped from the outer mean; both counts are reported.
    """
    if not ds.recommendations:
        return MetricReport.undefined(name, "no recommendations")
    index = ds.item_index
    per_user = {}
    n_slots = n_valued = 0
    for rs in ds.recommendations:
        vals = [value_of(index[i]) for i in rs.items]
        vals = [v for v in vals if v is not None]
        n_slots += len(rs.items)
        n_valued += len(vals)
        if vals:
            per_user[rs.user_id] = sum(vals) / len(vals)
    n_users = len(ds.recommendations)
    if not per_user:
        return MetricReport.undefined(name, "no user has a valued recommendation")
    value = sum(per_user.values()) / len(per_user)
    report = MetricReport(
        name=name,
        value=value,
        coverage=len(per_user) / n_users,
        per_user=per_user,
    )
    skipped = n_users - len(per_user)
    if skipped:
        report.notes.append(f"{skipped} of {n_users} users excluded: no valued recommendation")
    report.details["slot_coverage"] = n_valued / n_slots
    return report


def slot_rate(ds: Dataset, flag_of):
    """Share of recommendation slots whose flag is true, among slots with a known flag.

    Returns ``(value_or_None, n_known, n_slots)``.
    """
    index = ds.item_index
    hits = known = total = 0
    for rs in ds.recommendations:
        for i in rs.items:
            total += 1
            flag = flag_of(rs.user_id, index[i])
            if flag is None:
                continue
            known += 1
            hits += bool(flag)
    return (hits / known if known else None), known, total
