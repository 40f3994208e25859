"""Shared data model and dataset-level validation.

All records are frozen dataclasses. A :class:`Dataset` is an immutable
snapshot: tables are tuples in file order, optional tables are ``None``
when absent (which is different from present-but-empty).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from .errors import MissingSimilarity

PAIRED_KINDS = ("energy", "reuse_rate", "health")

# Catalog columns whose coverage is audited.
SUSTAINABILITY_FIELDS = (
    "carbon_footprint",
    "is_green",
    "is_harmful",
    "lci_score",
    "producer_id",
    "producer_region",
    "sustainability_label",
)


@dataclass(frozen=True)
class ItemRecord:
    item_id: str
    carbon_footprint: Optional[float] = None
    is_green: Optional[bool] = None
    is_harmful: Optional[bool] = None
    lci_score: Optional[float] = None
    producer_id: Optional[str] = None
    producer_region: Optional[str] = None
    sustainability_label: Optional[bool] = None
    # Dataset-wide locality override; when known it wins over region matching.
    is_local: Optional[bool] = None
    category: Optional[str] = None


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    group_ids: FrozenSet[str] = frozenset()
    region: Optional[str] = None
    familiar_items: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class RecommendationSet:
    user_id: str
    items: Tuple[str, ...]
    timestamp: Optional[str] = None


@dataclass(frozen=True)
class RelevanceJudgment:
    user_id: str
    item_id: str
    relevance: float


@dataclass(frozen=True)
class SimilarityProvider:
    """Item-item similarity backed by a pairwise table or by feature vectors.

    Exactly one of ``pairs`` / ``features`` is set. Pair lookups are
    order-insensitive and ``sim(i, i)`` is always 1. Feature vectors must be
    nonnegative, which keeps cosine similarity inside [0, 1].
    """

    pairs: Optional[Tuple[Tuple[str, str, float], ...]] = None
    features: Optional[Tuple[Tuple[str, Tuple[float, ...]], ...]] = None

    @cached_property
    def _table(self) -> Dict[Tuple[str, str], float]:
        table = {}
        for a, b, s in self.pairs or ():
            table[(a, b)] = s
            table.setdefault((b, a), s)
        return table

    @cached_property
    def _vectors(self) -> Dict[str, Tuple[float, ...]]:
        return dict(self.features or ())

    def sim(self, a: str, b: str) -> float:
        if a == b:
            return 1.0
        if self.pairs is not None:
            try:
                return self._table[(a, b)]
            except KeyError:
                raise MissingSimilarity(f"no similarity for ({a}, {b})") from None
        try:
            u, v = self._vectors[a], self._vectors[b]
        except KeyError as exc:
            raise MissingSimilarity(f"no feature vector for {exc.args[0]}") from None
        nu = math.sqrt(sum(x * x for x in u))
        nv = math.sqrt(sum(x * x for x in v))
        if nu == 0.0 or nv == 0.0:
            return 0.0
        return min(1.0, sum(x * y for x, y in zip(u, v)) / (nu * nv))


@dataclass(frozen=True)
class EnergyLedger:
    e_inference_kwh: float = 0.0
    n_rec: int = 0
    ec_build_kwh: float = 0.0
    n_epoch: int = 0
    n_data_processed: int = 0


@dataclass(frozen=True)
class PairedObservation:
    kind: str
    baseline: float
    treatment: float
    unit: str = ""
    # Only meaningful for health outcomes where lower can be better (e.g. BMI).
    higher_is_better: bool = True


@dataclass(frozen=True)
class AccessibilityAudit:
    artifacts: Tuple[str, ...]
    criteria: Tuple[str, ...]
    scores: Tuple[Tuple[str, str, float], ...]

    @cached_property
    def score_map(self) -> Dict[Tuple[str, str], float]:
        return {(a, g): s for a, g, s in self.scores}

    @cached_property
    def groups(self) -> Tuple[str, ...]:
        return tuple(sorted({g for _, g, _ in self.scores}))


@dataclass(frozen=True)
class SatisfactionSeries:
    """Per-period satisfaction for one user, already normalized to [0, 1].

    ``points`` holds ``(t, value)`` pairs sorted by t; the series is complete
    when it covers every period 1..horizon exactly once.
    """

    user_id: str
    horizon: int
    points: Tuple[Tuple[int, float], ...]

    @property
    def complete(self) -> bool:
        return [t for t, _ in self.points] == list(range(1, self.horizon + 1))

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(v for _, v in self.points)


@dataclass(frozen=True)
class BehaviorEvent:
    user_id: str
    behavior_kind: str
    item_id: Optional[str] = None
    timestamp: Optional[str] = None


@dataclass(frozen=True)
class ExplanationRecord:
    user_id: str
    explanation_id: str
    interpret_score: float


@dataclass(frozen=True)
class DatasetConfig:
    """Evaluation settings carried by the manifest."""

    groups: Tuple[str, ...] = ()
    sustainable_behaviors: Tuple[str, ...] = ()
    green_item_behaviors: bool = False
    epsilon: float = 0.05
    popular_items: Tuple[str, ...] = ()
    energy_unit: str = "kWh"
    carbon_unit: str = "kg CO2e"
    data_unit: str = "records"


@dataclass(frozen=True)
class Dataset:
    items: Tuple[ItemRecord, ...] = ()
    users: Tuple[UserRecord, ...] = ()
    recommendations: Tuple[RecommendationSet, ...] = ()
    judgments: Optional[Tuple[RelevanceJudgment, ...]] = None
    similarity: Optional[SimilarityProvider] = None
    energy: Optional[EnergyLedger] = None
    paired: Optional[Tuple[PairedObservation, ...]] = None
    accessibility: Optional[AccessibilityAudit] = None
    satisfaction: Optional[Tuple[SatisfactionSeries, ...]] = None
    behaviors: Optional[Tuple[BehaviorEvent, ...]] = None
    explanations: Optional[Tuple[ExplanationRecord, ...]] = None
    config: DatasetConfig = field(default_factory=DatasetConfig)

    @cached_property
    def item_index(self) -> Dict[str, ItemRecord]:
        return {it.item_id: it for it in self.items}

    @cached_property
    def user_index(self) -> Dict[str, UserRecord]:
        return {u.user_id: u for u in self.users}

    @cached_property
    def relevance(self) -> Dict[Tuple[str, str], float]:
        return {(j.user_id, j.item_id): j.relevance for j in self.judgments or ()}

    @cached_property
    def group_universe(self) -> Tuple[str, ...]:
        if self.config.groups:
            return tuple(self.config.groups)
        return tuple(sorted({g for u in self.users for g in u.group_ids}))

    @cached_property
    def group_members(self) -> Dict[str, Tuple[str, ...]]:
        return {
            g: tuple(u.user_id for u in self.users if g in u.group_ids)
            for g in self.group_universe
        }

    def recommended(self, user_id: str) -> Tuple[str, ...]:
        for rs in self.recommendations:
            if rs.user_id == user_id:
                return rs.items
        return ()

    def paired_observation(self, kind: str) -> Optional[PairedObservation]:
        for obs in self.paired or ():
            if obs.kind == kind:
                return obs
        return None


@dataclass
class MetricReport:
    """One metric's value plus breakdowns and data-coverage annotations.

    Exactly one of ``value`` / ``reason`` is set; ``reason`` marks the
    metric as undefined for this dataset.
    """

    name: str
    value: Optional[float] = None
    reason: Optional[str] = None
    coverage: float = 1.0
    per_user: Optional[Dict[str, float]] = None
    per_group: Optional[Dict[str, float]] = None
    per_item: Optional[Dict[str, float]] = None
    details: Dict[str, object] = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if (self.value is None) == (self.reason is None):
            raise ValueError("MetricReport needs exactly one of value or reason")
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError(f"coverage {self.coverage} outside [0, 1]")

    @classmethod
    def undefined(cls, name, reason, coverage=0.0, **kwargs):
        return cls(name=name, reason=reason, coverage=coverage, **kwargs)

    @property
    def defined(self) -> bool:
        return self.reason is None

    @property
    def status(self) -> str:
        return "ok" if self.defined else f"undefined: {self.reason}"


@dataclass(frozen=True)
class Violation:
    severity: str  # "hard" | "soft"
    code: str
    location: str
    message: str

    def __str__(self):
        return f"[{self.severity}] {self.code} at {self.location}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def hard(self):
        return [v for v in self.violations if v.severity == "hard"]

    @property
    def usable(self) -> bool:
        return not self.hard


def _bad_real(x, lo=None, hi=None) -> bool:
    if x is None:
        return False
    if not math.isfinite(x):
        return True
    return (lo is not None and x < lo) or (hi is not None and x > hi)


def validate_dataset(ds: Dataset) -> ValidationReport:
    """Check cross-table references and value ranges (duplicate keys included).

    Violations are returned as data. The dataset is usable iff no hard
    violation was found. Familiar-item references outside the catalog are
    soft, since previously seen items need not be recommendable.
    """
    out = []

    def hard(code, loc, msg):
        out.append(Violation("hard", code, loc, msg))

    def soft(code, loc, msg):
        out.append(Violation("soft", code, loc, msg))

    item_ids = set()
    for n, it in enumerate(ds.items):
        loc = f"catalog[{n}]"
        if it.item_id in item_ids:
            hard("duplicate-key", loc, f"item_id {it.item_id!r} repeated")
        item_ids.add(it.item_id)
        if _bad_real(it.carbon_footprint, lo=0.0):
            hard("out-of-range", loc, f"carbon_footprint {it.carbon_footprint}")
        if _bad_real(it.lci_score, lo=0.0):
            hard("out-of-range", loc, f"lci_score {it.lci_score}")

    universe = set(ds.group_universe)
    user_ids = set()
    for n, u in enumerate(ds.users):
        loc = f"users[{n}]"
        if u.user_id in user_ids:
            hard("duplicate-key", loc, f"user_id {u.user_id!r} repeated")
        user_ids.add(u.user_id)
        for g in sorted(u.group_ids - universe):
            hard("unknown-group", loc, f"group {g!r} not in declared universe")
        for i in sorted(u.familiar_items - item_ids):
            soft("dangling-id", loc, f"familiar item {i!r} not in catalog")

    rec_users = set()
    for n, rs in enumerate(ds.recommendations):
        loc = f"recommendations[{rs.user_id}]"
        if rs.user_id not in user_ids:
            hard("dangling-id", loc, f"unknown user {rs.user_id!r}")
        if rs.user_id in rec_users:
            hard("duplicate-key", loc, "more than one list for user")
        rec_users.add(rs.user_id)
        if not rs.items:
            hard("empty-list", loc, "recommendation list is empty")
        if len(set(rs.items)) != len(rs.items):
            hard("duplicate-key", loc, "item repeated within list")
        for i in rs.items:
            if i not in item_ids:
                hard("dangling-id", loc, f"unknown item {i!r}")

    seen_pairs = set()
    for n, j in enumerate(ds.judgments or ()):
        loc = f"relevance[{n}]"
        if (j.user_id, j.item_id) in seen_pairs:
            hard("duplicate-key", loc, f"second judgment for ({j.user_id}, {j.item_id})")
        seen_pairs.add((j.user_id, j.item_id))
        if j.user_id not in user_ids:
            hard("dangling-id", loc, f"unknown user {j.user_id!r}")
        if j.item_id not in item_ids:
            hard("dangling-id", loc, f"unknown item {j.item_id!r}")
        if _bad_real(j.relevance, 0.0, 1.0):
            hard("out-of-range", loc, f"relevance {j.relevance} outside [0, 1]")

    if ds.similarity is not None:
        sp = ds.similarity
        given = {}
        for n, (a, b, s) in enumerate(sp.pairs or ()):
            loc = f"similarity[{n}]"
            for i in (a, b):
                if i not in item_ids:
                    hard("dangling-id", loc, f"unknown item {i!r}")
            if _bad_real(s, 0.0, 1.0):
                hard("out-of-range", loc, f"sim {s} outside [0, 1]")
            if a == b and s != 1.0:
                hard("out-of-range", loc, f"self-similarity of {a!r} must be 1")
            key = (min(a, b), max(a, b))
            if key in given and given[key] != s:
                hard("asymmetric", loc, f"conflicting similarity for {key}")
            given[key] = s
        for n, (i, vec) in enumerate(sp.features or ()):
            loc = f"item_features[{n}]"
            if i not in item_ids:
                hard("dangling-id", loc, f"unknown item {i!r}")
            if any(_bad_real(x, lo=0.0) for x in vec):
                hard("out-of-range", loc, "feature values must be finite and nonnegative")

    if ds.energy is not None:
        e = ds.energy
        for name in ("e_inference_kwh", "n_rec", "ec_build_kwh", "n_epoch", "n_data_processed"):
            if _bad_real(getattr(e, name), lo=0):
                hard("out-of-range", "energy", f"{name} = {getattr(e, name)}")

    kinds = set()
    for n, p in enumerate(ds.paired or ()):
        loc = f"paired[{n}]"
        if p.kind not in PAIRED_KINDS:
            hard("unknown-kind", loc, f"kind {p.kind!r}")
            continue
        if p.kind in kinds:
            hard("duplicate-key", loc, f"second observation of kind {p.kind!r}")
        kinds.add(p.kind)
        lo, hi = {"energy": (0.0, None), "reuse_rate": (0.0, 1.0)}.get(p.kind, (None, None))
        for side in ("baseline", "treatment"):
            if _bad_real(getattr(p, side), lo, hi):
                hard("out-of-range", loc, f"{p.kind} {side} = {getattr(p, side)}")

    if ds.accessibility is not None:
        audit = ds.accessibility
        smap = {}
        for n, (a, g, s) in enumerate(audit.scores):
            loc = f"accessibility[{n}]"
            if (a, g) in smap:
                hard("duplicate-key", loc, f"second score for ({a}, {g})")
            smap[(a, g)] = s
            if a not in audit.artifacts:
                hard("dangling-id", loc, f"unknown artifact {a!r}")
            if g not in universe:
                hard("unknown-group", loc, f"group {g!r} not in declared universe")
            if _bad_real(s, 0.0, 1.0):
                hard("out-of-range", loc, f"score {s} outside [0, 1]")
        for g in audit.groups:
            for a in audit.artifacts:
                if (a, g) not in smap:
                    hard("missing-score", "accessibility", f"({a}, {g}) not scored")

    seen_users = set()
    for s in ds.satisfaction or ():
        loc = f"satisfaction[{s.user_id}]"
        if s.user_id in seen_users:
            hard("duplicate-key", loc, "user has two series")
        seen_users.add(s.user_id)
        if s.user_id not in user_ids:
            hard("dangling-id", loc, f"unknown user {s.user_id!r}")
        ts = [t for t, _ in s.points]
        if len(set(ts)) != len(ts):
            hard("duplicate-key", loc, "period repeated")
        if any(t < 1 or t > s.horizon for t in ts):
            hard("out-of-range", loc, f"period outside 1..{s.horizon}")
        if any(_bad_real(v, 0.0, 1.0) for _, v in s.points):
            hard("out-of-range", loc, "normalized satisfaction outside [0, 1]")

    for n, b in enumerate(ds.behaviors or ()):
        loc = f"behaviors[{n}]"
        if not b.behavior_kind:
            hard("empty-kind", loc, "behavior kind is empty")
        if b.user_id not in user_ids:
            hard("dangling-id", loc, f"unknown user {b.user_id!r}")
        if b.item_id is not None and b.item_id not in item_ids:
            hard("dangling-id", loc, f"unknown item {b.item_id!r}")

    seen_expl = set()
    for n, e in enumerate(ds.explanations or ()):
        loc = f"explanations[{n}]"
        if (e.user_id, e.explanation_id) in seen_expl:
            hard("duplicate-key", loc, f"explanation {e.explanation_id!r} repeated")
        seen_expl.add((e.user_id, e.explanation_id))
        if e.user_id not in user_ids:
            hard("dangling-id", loc, f"unknown user {e.user_id!r}")
        if _bad_real(e.interpret_score, 0.0, 1.0):
            hard("out-of-range", loc, f"score {e.interpret_score} outside [0, 1]")

    cfg = ds.config
    if not (math.isfinite(cfg.epsilon) and cfg.epsilon > 0):
        hard("out-of-range", "config", f"epsilon must be > 0, got {cfg.epsilon}")

    return ValidationReport(tuple(out))


# Where each formula symbol lives in the model. Targets are
# "Type.field" paths or "config.<field>" predicates.
SYMBOL_TABLE: Mapping[str, str] = {
    "U": "UserRecord.user_id",
    "R_u": "RecommendationSet.items",
    "CarF(i)": "ItemRecord.carbon_footprint",
    "I(i) green indicator": "ItemRecord.is_green",
    "E_inference": "EnergyLedger.e_inference_kwh",
    "N_rec": "EnergyLedger.n_rec",
    "EC_build": "EnergyLedger.ec_build_kwh",
    "N_epoch": "EnergyLedger.n_epoch",
    "N_dataprocessed": "EnergyLedger.n_data_processed",
    "EC_baseline / R_baseline / M_without": "PairedObservation.baseline",
    "EC_withrec / R_withrec / M_with": "PairedObservation.treatment",
    "G": "config.groups",
    "P_g(i)": "UserRecord.group_ids",
    "sim(i,j)": "SimilarityProvider.sim",
    "Q_u": "UserRecord.familiar_items",
    "rel(i,u)": "RelevanceJudgment.relevance",
    "C": "AccessibilityAudit.criteria",
    "Q (audited artifacts)": "AccessibilityAudit.artifacts",
    "sat(q,C,g)": "AccessibilityAudit.scores",
    "harm(i,H)": "ItemRecord.is_harmful",
    "L_u": "ItemRecord.producer_region",
    "local override": "ItemRecord.is_local",
    "sat_u^t": "SatisfactionSeries.points",
    "T": "SatisfactionSeries.horizon",
    "P (producers)": "ItemRecord.producer_id",
    "B_u": "BehaviorEvent.behavior_kind",
    "S": "config.sustainable_behaviors",
    "E_u": "ExplanationRecord.explanation_id",
    "interpret(e)": "ExplanationRecord.interpret_score",
    "LCI(i)": "ItemRecord.lci_score",
    "s_i": "ItemRecord.sustainability_label",
    "epsilon (approximate equality)": "config.epsilon",
}
