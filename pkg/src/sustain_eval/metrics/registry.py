"""Named metric registry used by the CLI and by oracle-equivalence tests."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional

from ..errors import EmptyCatalogError, MissingTable, UndefinedMetric, UnknownMetric
from ..ingest import label_coverage
from ..model import Dataset, MetricReport, SUSTAINABILITY_FIELDS
from . import crosscut, economic, environmental, social
from ._kernels import slot_rate

METRIC_NAMES = (
    "avgcarfi", "girec", "ecrec", "ectrain", "ecpdat", "estrec", "rtr",
    "parity", "listd", "ser", "acc", "inclusivity", "hier", "hirec",
    "lbpr", "loyalty", "avgloyalty", "pef", "sbs", "intp", "avglci",
    "labelcoverage",
)


def _field_coverage(ds, field):
    try:
        return label_coverage(ds.items, field)
    except EmptyCatalogError:
        return 0.0


def _ledger(ds):
    if ds.energy is None:
        raise MissingTable("missing table")
    return ds.energy


def _paired(ds, kind):
    if ds.paired is None:
        raise MissingTable("missing table")
    obs = ds.paired_observation(kind)
    if obs is None:
        raise UndefinedMetric(f"no {kind} observation")
    return obs


def _energy(name, fn, unit_of):
    def build(ds, opts):
        value = fn(_ledger(ds))
        return MetricReport(name=name, value=value, details={"unit": unit_of(ds.config)})
    return build


def _avgcarfi(ds, opts):
    r = environmental.avg_carbon_footprint(ds)
    r.details["label_coverage"] = {"carbon_footprint": _field_coverage(ds, "carbon_footprint")}
    return r


def _girec(ds, opts):
    r = environmental.green_item_rate(ds)
    r.details["label_coverage"] = {"is_green": _field_coverage(ds, "is_green")}
    return r


def _estrec(ds, opts):
    obs = _paired(ds, "energy")
    return MetricReport(name="estrec", value=environmental.energy_savings(obs), details={"unit": obs.unit})


def _rtr(ds, opts):
    return MetricReport(name="rtr", value=environmental.reuse_gain(_paired(ds, "reuse_rate")))


def _hirec(ds, opts):
    obs = _paired(ds, "health")
    return MetricReport(
        name="hirec",
        value=social.health_improvement(obs),
        details={"unit": obs.unit, "higher_is_better": obs.higher_is_better},
    )


def _parity(ds, opts):
    p = social.demographic_parity(ds, opts.get("epsilon"))
    return MetricReport(
        name="parity",
        value=p.max_gap,
        per_item=p.per_item_gap,
        details={
            "epsilon": p.epsilon,
            "satisfied": p.satisfied,
            "mean_gap": p.mean_gap,
            "groups": list(p.groups),
        },
    )


def _listd(ds, opts):
    return social.mean_intra_list_diversity(ds)


def _ser(ds, opts):
    return social.mean_serendipity(ds)


def _audit(ds):
    if ds.accessibility is None:
        raise MissingTable("missing table")
    return ds.accessibility


def _acc(ds, opts):
    audit = _audit(ds)
    per_group = {g: social.accessibility_score(audit, g) for g in audit.groups}
    if not per_group:
        raise UndefinedMetric("no group scored")
    r = MetricReport(name="acc", value=sum(per_group.values()) / len(per_group), per_group=per_group)
    r.notes.append("value is the unweighted mean over groups; see per_group")
    return r


def _inclusivity(ds, opts):
    audit = _audit(ds)
    eps = opts.get("epsilon") or ds.config.epsilon
    gap, ok = social.inclusivity_gap(audit, eps)
    per_group = {g: social.accessibility_score(audit, g) for g in audit.groups}
    return MetricReport(
        name="inclusivity",
        value=gap,
        per_group=per_group,
        details={"epsilon": eps, "satisfied": ok},
    )


def _hier(ds, opts):
    value = social.harmful_exposure_rate(ds)
    _, known, total = slot_rate(ds, lambda u, it: it.is_harmful)
    return MetricReport(
        name="hier",
        value=value,
        coverage=known / total,
        details={"label_coverage": {"is_harmful": _field_coverage(ds, "is_harmful")}},
    )


def _lbpr(ds, opts):
    value = economic.local_business_rate(ds)
    _, known, total = slot_rate(ds, lambda u, it: economic.is_local(ds, u, it))
    return MetricReport(name="lbpr", value=value, coverage=known / total)


def _loyalty_report(name, ds, opts):
    decay = opts.get("decay")
    per_user, rejected = economic.loyalty_per_user(ds, decay)
    if not per_user:
        raise UndefinedMetric("no complete satisfaction series")
    r = MetricReport(
        name=name,
        value=economic.avg_loyalty(ds, decay),
        coverage=len(per_user) / (len(per_user) + rejected),
        per_user=per_user if name == "loyalty" else None,
        details={"decay": decay},
    )
    if rejected:
        r.notes.append(f"{rejected} incomplete series rejected")
    return r


def _pef(ds, opts):
    scope = opts.get("scope")
    hist = economic.exposure_histogram(ds, scope)
    value, uniform = economic.pef_from_counts(list(hist.counts.values()))
    r = MetricReport(name="pef", value=value, details={"exposure": hist.counts, "scope": scope})
    if uniform:
        r.notes.append("uniform exposure: all pairwise distances are zero, reported as 0")
    r.notes.append("lower = more uniform pairwise spread")
    return r


def _sbs(ds, opts):
    value = crosscut.sustainable_behavior_score(ds)
    counts = crosscut.behavior_counts(ds)
    return MetricReport(name="sbs", value=value, per_user={u: h / n for u, (h, n) in counts.items()})


def _intp(ds, opts):
    return MetricReport(
        name="intp",
        value=crosscut.avg_interpretability(ds),
        per_user=crosscut.interpretability_per_user(ds),
    )


def _avglci(ds, opts):
    r = crosscut.avg_life_cycle_impact(ds)
    r.details["label_coverage"] = {"lci_score": _field_coverage(ds, "lci_score")}
    return r


def _labelcoverage(ds, opts):
    per_field = {f: label_coverage(ds.items, f) for f in SUSTAINABILITY_FIELDS}
    return MetricReport(
        name="labelcoverage",
        value=per_field["sustainability_label"],
        details={"per_field": per_field},
    )


BUILDERS = {
    "avgcarfi": _avgcarfi,
    "girec": _girec,
    "ecrec": _energy("ecrec", environmental.energy_per_recommendation, lambda c: f"{c.energy_unit}/recommendation"),
    "ectrain": _energy("ectrain", environmental.energy_per_epoch, lambda c: f"{c.energy_unit}/epoch"),
    "ecpdat": _energy("ecpdat", environmental.energy_per_data_unit, lambda c: f"{c.energy_unit}/{c.data_unit}"),
    "estrec": _estrec,
    "rtr": _rtr,
    "parity": _parity,
    "listd": _listd,
    "ser": _ser,
    "acc": _acc,
    "inclusivity": _inclusivity,
    "hier": _hier,
    "hirec": _hirec,
    "lbpr": _lbpr,
    "loyalty": lambda ds, opts: _loyalty_report("loyalty", ds, opts),
    "avgloyalty": lambda ds, opts: _loyalty_report("avgloyalty", ds, opts),
    "pef": _pef,
    "sbs": _sbs,
    "intp": _intp,
    "avglci": _avglci,
    "labelcoverage": _labelcoverage,
}


def compute_metric(name: str, ds: Dataset, **opts) -> MetricReport:
    """Compute one named metric; unmet preconditions become an undefined report."""
    try:
        build = BUILDERS[name]
    except KeyError:
        raise UnknownMetric(name) from None
    try:
        return build(ds, opts)
    except (UndefinedMetric, EmptyCatalogError) as exc:
        reason = exc.reason if isinstance(exc, UndefinedMetric) else exc.code
        return MetricReport.undefined(name, reason)


def thread_count(default: int = 1) -> int:
    raw = os.environ.get("SUSTAIN_EVAL_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def evaluate(ds: Dataset, metrics: Optional[Iterable[str]] = None, threads: Optional[int] = None, **opts) -> List[MetricReport]:
    """Compute the selected metrics (all by default) in the requested order."""
    names = list(metrics) if metrics is not None else list(METRIC_NAMES)
    for n in names:
        if n not in BUILDERS:
            raise UnknownMetric(n)
    workers = threads if threads is not None else thread_count()
    if workers <= 1 or len(names) <= 1:
        return [compute_metric(n, ds, **opts) for n in names]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda n: compute_metric(n, ds, **opts), names))
