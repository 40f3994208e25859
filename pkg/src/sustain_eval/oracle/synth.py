"""Deterministic synthetic datasets for oracle and property tests.

Every random draw comes from one :class:`SplitMix64` stream consumed in a
fixed order, and missingness draws happen whether or not a field ends up
missing, so changing one rate never shifts the rest of the stream.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

from ..model import (
    AccessibilityAudit,
    BehaviorEvent,
    Dataset,
    DatasetConfig,
    EnergyLedger,
    ExplanationRecord,
    ItemRecord,
    PairedObservation,
    RecommendationSet,
    RelevanceJudgment,
    SatisfactionSeries,
    SimilarityProvider,
    UserRecord,
)
from .rng import SplitMix64

ITEM_FIELDS = (
    "carbon_footprint",
    "is_green",
    "is_harmful",
    "lci_score",
    "producer_id",
    "producer_region",
    "sustainability_label",
)
# Non-catalog missingness keys.
OTHER_MISSING = ("relevance", "user_region", "satisfaction_period")
OPTIONAL_TABLES = (
    "relevance", "similarity", "energy", "paired", "accessibility",
    "satisfaction", "behaviors", "explanations",
)
SUSTAINABLE_KINDS = ("eco_buy", "eco_click")
OTHER_KINDS = ("buy", "click", "view")


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_users: int = 8
    n_items: int = 20
    n_groups: int = 2
    n_producers: int = 3
    n_regions: int = 2
    list_length: Tuple[int, int] = (2, 5)
    missingness: Dict[str, float] = field(default_factory=dict)
    sustainable_fraction: float = 0.5
    green_item_behaviors: bool = False
    n_artifacts: int = 3
    horizon: int = 4
    extra_candidates: int = 3
    zero_energy_rate: float = 0.0
    drop_tables: Tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("n_users", "n_items", "n_groups", "n_producers", "n_regions", "horizon"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        lo, hi = self.list_length
        if not 1 <= lo <= hi <= self.n_items:
            raise ValueError("list_length must satisfy 1 <= lo <= hi <= n_items")
        for key, rate in self.missingness.items():
            if key not in ITEM_FIELDS + OTHER_MISSING:
                raise ValueError(f"unknown missingness key {key!r}")
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"missingness {key}={rate} outside [0, 1]")
        for t in self.drop_tables:
            if t not in OPTIONAL_TABLES:
                raise ValueError(f"cannot drop table {t!r}")


def generate(cfg: SynthConfig) -> Dataset:
    rng = SplitMix64(cfg.seed)
    miss = cfg.missingness

    def keep(key, value):
        return None if rng.chance(miss.get(key, 0.0)) else value

    item_ids = [f"i{n:03d}" for n in range(cfg.n_items)]
    items = []
    for iid in item_ids:
        raw = {
            "carbon_footprint": 10.0 * rng.random(),
            "is_green": rng.chance(0.5),
            "is_harmful": rng.chance(0.2),
            "lci_score": 10.0 * rng.random(),
            "producer_id": f"p{rng.below(cfg.n_producers)}",
            "producer_region": f"r{rng.below(cfg.n_regions)}",
            "sustainability_label": rng.chance(0.5),
        }
        items.append(ItemRecord(item_id=iid, **{f: keep(f, raw[f]) for f in ITEM_FIELDS}))

    groups = tuple(f"g{n}" for n in range(cfg.n_groups))
    users = []
    recs = []
    judgments = []
    for n in range(cfg.n_users):
        uid = f"u{n:03d}"
        member = {groups[rng.below(cfg.n_groups)]}
        if rng.chance(0.25):
            member.add(groups[rng.below(cfg.n_groups)])
        region = keep("user_region", f"r{rng.below(cfg.n_regions)}")
        familiar = frozenset(i for i in item_ids if rng.chance(0.1))
        users.append(UserRecord(uid, frozenset(member), region, familiar))

        lo, hi = cfg.list_length
        length = lo + rng.below(hi - lo + 1)
        pool = rng.sample(item_ids, min(cfg.n_items, length + cfg.extra_candidates))
        recs.append(RecommendationSet(uid, tuple(pool[:length])))
        for iid in sorted(pool):
            rel = rng.random()
            if not rng.chance(miss.get("relevance", 0.0)):
                judgments.append(RelevanceJudgment(uid, iid, rel))

    pairs = []
    for a in range(cfg.n_items):
        for b in range(a + 1, cfg.n_items):
            pairs.append((item_ids[a], item_ids[b], rng.random()))

    def count(scale):
        value = int(rng.random() * scale) + 1
        return 0 if rng.chance(cfg.zero_energy_rate) else value

    energy = EnergyLedger(
        e_inference_kwh=100.0 * rng.random(),
        n_rec=count(1000),
        ec_build_kwh=500.0 * rng.random(),
        n_epoch=count(50),
        n_data_processed=count(10000),
    )

    def baseline(scale):
        value = scale * rng.random()
        return 0.0 if rng.chance(cfg.zero_energy_rate) else value

    paired = (
        PairedObservation("energy", baseline(100.0), 100.0 * rng.random(), "kWh"),
        PairedObservation("reuse_rate", rng.random(), rng.random(), "share"),
        PairedObservation("health", baseline(50.0), 50.0 * rng.random(), "score", rng.chance(0.5)),
    )

    artifacts = tuple(f"a{n}" for n in range(cfg.n_artifacts))
    audit = AccessibilityAudit(
        artifacts,
        ("readability", "screen-reader"),
        tuple((a, g, rng.random()) for g in groups for a in artifacts),
    )

    series = []
    for u in users:
        if not rng.chance(0.8):
            continue
        points = []
        for t in range(1, cfg.horizon + 1):
            v = rng.random()
            if not rng.chance(miss.get("satisfaction_period", 0.0)):
                points.append((t, v))
        if points:
            series.append(SatisfactionSeries(u.user_id, cfg.horizon, tuple(points)))

    behaviors = []
    for u, rs in zip(users, recs):
        for _ in range(rng.below(6)):
            kinds = SUSTAINABLE_KINDS if rng.chance(cfg.sustainable_fraction) else OTHER_KINDS
            kind = kinds[rng.below(len(kinds))]
            item = rs.items[rng.below(len(rs.items))] if rng.chance(0.7) else None
            behaviors.append(BehaviorEvent(u.user_id, kind, item))

    explanations = []
    for u in users:
        for e in range(rng.below(4)):
            explanations.append(ExplanationRecord(u.user_id, f"e{e}", rng.random()))

    tables = {
        "relevance": tuple(judgments),
        "similarity": SimilarityProvider(pairs=tuple(pairs)),
        "energy": energy,
        "paired": paired,
        "accessibility": audit,
        "satisfaction": tuple(series),
        "behaviors": tuple(behaviors),
        "explanations": tuple(explanations),
    }
    for t in cfg.drop_tables:
        tables[t] = None

    return Dataset(
        items=tuple(items),
        users=tuple(users),
        recommendations=tuple(recs),
        judgments=tables["relevance"],
        similarity=tables["similarity"],
        energy=tables["energy"],
        paired=tables["paired"],
        accessibility=tables["accessibility"],
        satisfaction=tables["satisfaction"],
        behaviors=tables["behaviors"],
        explanations=tables["explanations"],
        config=DatasetConfig(
            groups=groups,
            sustainable_behaviors=SUSTAINABLE_KINDS,
            green_item_behaviors=cfg.green_item_behaviors,
        ),
    )


def random_config(seed: int) -> SynthConfig:
    """A varied small config (<= 20 users, <= 50 items, <= 4 groups, <= 6 producers).

    Used to sweep the oracle-equivalence suite across shapes, including
    degenerate ones (single group or producer, heavy missingness, zero
    denominators, absent tables).
    """
    r = SplitMix64(seed ^ 0x5EED)
    n_items = 2 + r.below(49)
    lo = 1 + r.below(min(4, n_items))
    hi = lo + r.below(min(6, n_items) - lo + 1)
    miss = {}
    for key in ITEM_FIELDS + OTHER_MISSING:
        roll = r.random()
        miss[key] = 1.0 if roll < 0.08 else (0.0 if roll < 0.4 else round(r.random(), 3))
    drops = tuple(t for t in OPTIONAL_TABLES if r.chance(0.08))
    return SynthConfig(
        seed=seed,
        n_users=1 + r.below(20),
        n_items=n_items,
        n_groups=1 + r.below(4),
        n_producers=1 + r.below(6),
        n_regions=1 + r.below(3),
        list_length=(lo, hi),
        missingness=miss,
        sustainable_fraction=r.random(),
        green_item_behaviors=r.chance(0.5),
        n_artifacts=r.below(4),
        horizon=1 + r.below(6),
        zero_energy_rate=0.15,
        drop_tables=drops,
    )
