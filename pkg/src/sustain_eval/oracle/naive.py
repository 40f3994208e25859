"""Brute-force reference implementations of every metric.

Deliberately written from the formulas with plain nested loops and no
shared code with :mod:`sustain_eval.metrics`. ``None`` means undefined.
"""

import math

from ..errors import UnknownMetric

_FIELDS = (
    "carbon_footprint",
    "is_green",
    "is_harmful",
    "lci_score",
    "producer_id",
    "producer_region",
    "sustainability_label",
)


def _lookup_item(ds, item_id):
    for it in ds.items:
        if it.item_id == item_id:
            return it
    return None


def _lookup_user(ds, user_id):
    for u in ds.users:
        if u.user_id == user_id:
            return u
    return None


def _double_average(ds, attr):
    means = {}
    for rs in ds.recommendations:
        total = 0.0
        n = 0
        for i in rs.items:
            v = getattr(_lookup_item(ds, i), attr)
            if v is not None:
                total += v
                n += 1
        if n > 0:
            means[rs.user_id] = total / n
    if not means:
        return None, None
    return sum(means.values()) / len(means), means


def _flag_share(ds, flag):
    num = 0
    den = 0
    for rs in ds.recommendations:
        for i in rs.items:
            f = flag(rs.user_id, _lookup_item(ds, i))
            if f is None:
                continue
            den += 1
            if f:
                num += 1
    return None if den == 0 else num / den


def _ratio(num, den):
    return None if den == 0 else num / den


def _paired(ds, kind):
    if ds.paired is None:
        return None
    for p in ds.paired:
        if p.kind == kind:
            return p
    return None


def _groups(ds):
    if ds.config.groups:
        return list(ds.config.groups)
    found = []
    for u in ds.users:
        for g in u.group_ids:
            if g not in found:
                found.append(g)
    return sorted(found)


def _parity(ds):
    groups = []
    for g in _groups(ds):
        members = [u.user_id for u in ds.users if g in u.group_ids]
        if members:
            groups.append((g, members))
    if len(groups) < 2:
        return None, None
    items = []
    for rs in ds.recommendations:
        for i in rs.items:
            if i not in items:
                items.append(i)
    if not items:
        return None, None
    gaps = {}
    for i in items:
        worst = 0.0
        for g1, m1 in groups:
            for g2, m2 in groups:
                p1 = sum(1 for u in m1 if i in _rec_list(ds, u)) / len(m1)
                p2 = sum(1 for u in m2 if i in _rec_list(ds, u)) / len(m2)
                worst = max(worst, abs(p1 - p2))
        gaps[i] = worst
    return max(gaps.values()), gaps


def _rec_list(ds, user_id):
    for rs in ds.recommendations:
        if rs.user_id == user_id:
            return rs.items
    return ()


def _sim(ds, a, b):
    if a == b:
        return 1.0
    sp = ds.similarity
    if sp.pairs is not None:
        for x, y, s in sp.pairs:
            if (x, y) == (a, b) or (x, y) == (b, a):
                return s
        return None
    vecs = dict(sp.features)
    if a not in vecs or b not in vecs:
        return None
    u, v = vecs[a], vecs[b]
    dot = sum(p * q for p, q in zip(u, v))
    norm = math.sqrt(sum(p * p for p in u)) * math.sqrt(sum(q * q for q in v))
    return 0.0 if norm == 0 else min(1.0, dot / norm)


def _listd(ds):
    if ds.similarity is None:
        return None, None
    per_user = {}
    for rs in ds.recommendations:
        n = len(rs.items)
        if n < 2:
            continue
        total = 0.0
        ok = True
        for a in rs.items:
            for b in rs.items:
                if a == b:
                    continue
                s = _sim(ds, a, b)
                if s is None:
                    ok = False
                else:
                    total += s
        if ok:
            per_user[rs.user_id] = 1.0 - total / (n * (n - 1))
    if not per_user:
        return None, None
    return sum(per_user.values()) / len(per_user), per_user


def _ser(ds):
    if ds.judgments is None or not ds.recommendations:
        return None, None
    per_user = {}
    for rs in ds.recommendations:
        user = _lookup_user(ds, rs.user_id)
        familiar = set(user.familiar_items) if user else set()
        familiar |= set(ds.config.popular_items)
        total = 0.0
        for i in rs.items:
            rel = 0.0
            for j in ds.judgments:
                if j.user_id == rs.user_id and j.item_id == i:
                    rel = j.relevance
            if i not in familiar:
                total += rel
        per_user[rs.user_id] = total / len(rs.items)
    return sum(per_user.values()) / len(per_user), per_user


def _acc_per_group(ds):
    audit = ds.accessibility
    if audit is None or not audit.artifacts:
        return None
    groups = sorted({g for _, g, _ in audit.scores})
    out = {}
    for g in groups:
        total = 0.0
        for a in audit.artifacts:
            hit = [s for x, y, s in audit.scores if x == a and y == g]
            if not hit:
                return None
            total += hit[0]
        out[g] = total / len(audit.artifacts)
    return out


def _acc(ds):
    per_group = _acc_per_group(ds)
    if not per_group:
        return None, None
    return sum(per_group.values()) / len(per_group), per_group


def _inclusivity(ds):
    per_group = _acc_per_group(ds)
    if per_group is None or len(per_group) < 2:
        return None, None
    vals = list(per_group.values())
    gap = max(abs(x - y) for x in vals for y in vals)
    return gap, per_group


def _local(ds, user_id, item):
    if item.is_local is not None:
        return item.is_local
    user = _lookup_user(ds, user_id)
    if user is None or user.region is None or item.producer_region is None:
        return None
    return user.region.lower() == item.producer_region.lower()


def _loyalty(ds, decay):
    if ds.satisfaction is None:
        return None, None
    per_user = {}
    for s in ds.satisfaction:
        ts = [t for t, _ in s.points]
        if sorted(ts) != list(range(1, s.horizon + 1)) or len(ts) != s.horizon:
            continue
        values = dict(s.points)
        num = 0.0
        den = 0.0
        for t in range(1, s.horizon + 1):
            w = 1.0 if decay is None else decay ** (s.horizon - t)
            num += w * values[t]
            den += w
        per_user[s.user_id] = num / den
    if not per_user:
        return None, None
    return sum(per_user.values()) / len(per_user), per_user


def _pef(ds, scope=None):
    counts = {}
    for it in ds.items:
        if it.producer_id is not None and (scope is None or it.category == scope):
            counts[it.producer_id] = 0
    for rs in ds.recommendations:
        for i in rs.items:
            it = _lookup_item(ds, i)
            if it.producer_id is not None and (scope is None or it.category == scope):
                counts[it.producer_id] += 1
    values = list(counts.values())
    if len(values) < 2:
        return None, None
    dists = []
    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            dists.append(abs(values[a] - values[b]))
    if max(dists) == 0:
        return 0.0, counts
    return (sum(dists) / len(dists)) / max(dists), counts


def _sbs(ds):
    if ds.behaviors is None or not ds.behaviors:
        return None, None
    good = 0
    for b in ds.behaviors:
        hit = b.behavior_kind in ds.config.sustainable_behaviors
        if not hit and ds.config.green_item_behaviors and b.item_id is not None:
            it = _lookup_item(ds, b.item_id)
            hit = it is not None and it.is_green is True
        good += 1 if hit else 0
    return good / len(ds.behaviors), None


def _intp(ds):
    if ds.explanations is None:
        return None, None
    per_user = {}
    users = []
    for e in ds.explanations:
        if e.user_id not in users:
            users.append(e.user_id)
    for u in users:
        scores = [e.interpret_score for e in ds.explanations if e.user_id == u]
        per_user[u] = sum(scores) / len(scores)
    if not per_user:
        return None, None
    return sum(per_user.values()) / len(per_user), per_user


def _labelcoverage(ds, field="sustainability_label"):
    if not ds.items:
        return None, None
    per_field = {}
    for f in _FIELDS:
        per_field[f] = sum(1 for it in ds.items if getattr(it, f) is not None) / len(ds.items)
    return per_field[field], per_field


def _energy(ds, num_attr, den_attr):
    if ds.energy is None:
        return None, None
    return _ratio(getattr(ds.energy, num_attr), getattr(ds.energy, den_attr)), None


def _estrec(ds):
    p = _paired(ds, "energy")
    if p is None or p.baseline == 0:
        return None, None
    return (p.baseline - p.treatment) / p.baseline, None


def _rtr(ds):
    p = _paired(ds, "reuse_rate")
    return (None if p is None else p.treatment - p.baseline), None


def _hirec(ds):
    p = _paired(ds, "health")
    if p is None or p.baseline == 0:
        return None, None
    v = (p.treatment - p.baseline) / p.baseline
    return (v if p.higher_is_better else -v), None


def _evaluate(name, ds, decay=None, scope=None):
    if name == "avgcarfi":
        return _double_average(ds, "carbon_footprint")
    if name == "avglci":
        return _double_average(ds, "lci_score")
    if name == "girec":
        return _flag_share(ds, lambda u, it: it.is_green), None
    if name == "hier":
        return _flag_share(ds, lambda u, it: it.is_harmful), None
    if name == "lbpr":
        return _flag_share(ds, lambda u, it: _local(ds, u, it)), None
    if name == "ecrec":
        return _energy(ds, "e_inference_kwh", "n_rec")
    if name == "ectrain":
        return _energy(ds, "ec_build_kwh", "n_epoch")
    if name == "ecpdat":
        return _energy(ds, "ec_build_kwh", "n_data_processed")
    if name == "estrec":
        return _estrec(ds)
    if name == "rtr":
        return _rtr(ds)
    if name == "hirec":
        return _hirec(ds)
    if name == "parity":
        return _parity(ds)
    if name == "listd":
        return _listd(ds)
    if name == "ser":
        return _ser(ds)
    if name == "acc":
        return _acc(ds)
    if name == "inclusivity":
        return _inclusivity(ds)
    if name in ("loyalty", "avgloyalty"):
        return _loyalty(ds, decay)
    if name == "pef":
        return _pef(ds, scope)
    if name == "sbs":
        return _sbs(ds)
    if name == "intp":
        return _intp(ds)
    if name == "labelcoverage":
        return _labelcoverage(ds)
    raise UnknownMetric(name)


def oracle_metric(name, ds, decay=None, scope=None):
    """Reference value of metric ``name`` on ``ds``, or ``None`` if undefined."""
    return _evaluate(name, ds, decay, scope)[0]


def oracle_breakdown(name, ds, decay=None, scope=None):
    """Per-user / per-group / per-item / per-field breakdown, where the metric has one."""
    return _evaluate(name, ds, decay, scope)[1]


def oracle_label_coverage(ds, field):
    return _labelcoverage(ds, field)[0]
