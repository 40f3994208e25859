"""Reading and writing dataset directories, and the label-coverage audit.

A dataset is a directory of UTF-8 CSV files (plus one JSONL behavior log)
described by a JSON manifest::

    {
      "schema_version": 1,
      "tables": {"catalog": "catalog.csv", "users": "users.csv",
                 "recommendations": "recommendations.csv", ...},
      "units": {"energy": "kWh", "carbon": "kg CO2e", "data_unit": "records"},
      "satisfaction_scale": [1, 5],
      "groups": ["A", "B"],
      "sustainable_behaviors": ["eco_buy"],
      "epsilon": 0.05
    }

Only ``catalog``, ``users`` and ``recommendations`` are required tables.
Cells that are empty or hold the token ``unknown`` are treated as missing.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DataError, DatasetValidationError, EmptyCatalogError, SchemaError
from .model import (
    SUSTAINABILITY_FIELDS,
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
    validate_dataset,
)

MANIFEST_VERSION = 1
UNKNOWN_TOKENS = {"", "unknown"}
TABLES = (
    "catalog",
    "users",
    "recommendations",
    "relevance",
    "similarity",
    "item_features",
    "energy",
    "paired",
    "accessibility",
    "satisfaction",
    "behaviors",
    "explanations",
)
REQUIRED_TABLES = ("catalog", "users", "recommendations")
BINDABLE_COLUMNS = SUSTAINABILITY_FIELDS + ("is_local", "category")

# Which metrics lose support when a catalog field is unlabeled.
FIELD_METRICS = {
    "carbon_footprint": ("avgcarfi",),
    "is_green": ("girec", "sbs"),
    "is_harmful": ("hier",),
    "lci_score": ("avglci",),
    "producer_id": ("pef",),
    "producer_region": ("lbpr",),
    "sustainability_label": ("labelcoverage",),
}

_TRUE = {"true", "1", "yes", "y", "t"}
_FALSE = {"false", "0", "no", "n", "f"}


@dataclass
class DatasetManifest:
    root: Path
    tables: Dict[str, str]
    columns: Dict[str, str] = field(default_factory=dict)
    explicit_columns: Tuple[str, ...] = ()
    satisfaction_scale: Tuple[float, float] = (0.0, 1.0)
    horizon: Optional[int] = None
    accessibility_criteria: Tuple[str, ...] = ()
    config: DatasetConfig = field(default_factory=DatasetConfig)

    def path(self, table: str) -> Optional[Path]:
        rel = self.tables.get(table)
        return None if rel is None else self.root / rel


def read_manifest(manifest_path) -> DatasetManifest:
    manifest_path = resolve_manifest(manifest_path)
    try:
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read manifest {manifest_path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", manifest_path, exc.lineno) from exc
    if not isinstance(raw, dict):
        raise SchemaError("manifest must be a JSON object", manifest_path)

    def bad(msg):
        return SchemaError(msg, manifest_path)

    tables = raw.get("tables", {})
    if not isinstance(tables, dict):
        raise bad("'tables' must be an object")
    unknown = sorted(set(tables) - set(TABLES))
    if unknown:
        raise bad(f"unknown table(s): {', '.join(unknown)}")
    for t in REQUIRED_TABLES:
        if t not in tables:
            raise bad(f"required table {t!r} not declared")

    columns = raw.get("columns", {})
    if not isinstance(columns, dict) or set(columns) - set(BINDABLE_COLUMNS):
        raise bad(f"'columns' may only bind {', '.join(BINDABLE_COLUMNS)}")

    scale = raw.get("satisfaction_scale", [0, 1])
    try:
        lo, hi = (float(x) for x in scale)
    except (TypeError, ValueError):
        raise bad("'satisfaction_scale' must be [low, high]") from None
    if not hi > lo:
        raise bad("'satisfaction_scale' needs high > low")

    horizon = raw.get("horizon")
    if horizon is not None and (not isinstance(horizon, int) or horizon < 1):
        raise bad("'horizon' must be a positive integer")

    eps = raw.get("epsilon", 0.05)
    if not isinstance(eps, (int, float)) or isinstance(eps, bool) or not eps > 0:
        raise bad("'epsilon' must be a number > 0")

    units = raw.get("units", {})
    config = DatasetConfig(
        groups=tuple(raw.get("groups", ())),
        sustainable_behaviors=tuple(raw.get("sustainable_behaviors", ())),
        green_item_behaviors=bool(raw.get("green_item_behaviors", False)),
        epsilon=float(eps),
        popular_items=tuple(raw.get("popular_items", ())),
        energy_unit=units.get("energy", "kWh"),
        carbon_unit=units.get("carbon", "kg CO2e"),
        data_unit=units.get("data_unit", "records"),
    )
    return DatasetManifest(
        root=manifest_path.parent,
        tables=dict(tables),
        columns={c: columns.get(c, c) for c in BINDABLE_COLUMNS},
        explicit_columns=tuple(columns),
        satisfaction_scale=(lo, hi),
        horizon=horizon,
        accessibility_criteria=tuple(raw.get("accessibility_criteria", ())),
        config=config,
    )


# -- cell parsers ---------------------------------------------------------


def _known(cell) -> bool:
    return cell is not None and cell.strip().lower() not in UNKNOWN_TOKENS


def _opt_str(cell):
    return cell.strip() if _known(cell) else None


def _opt_bool(cell, where):
    if not _known(cell):
        return None
    v = cell.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise SchemaError(f"expected boolean, got {cell!r}", *where)


def _real(cell, where, what, lo=None, hi=None, optional=False):
    if not _known(cell):
        if optional:
            return None
        raise SchemaError(f"{what} is required", *where)
    try:
        x = float(cell)
    except ValueError:
        raise SchemaError(f"{what}: expected number, got {cell!r}", *where) from None
    if not math.isfinite(x):
        raise SchemaError(f"{what}: non-finite value {cell!r}", *where)
    if (lo is not None and x < lo) or (hi is not None and x > hi):
        raise SchemaError(f"{what} = {cell} out of range", *where)
    return x


def _count(cell, where, what):
    try:
        n = int(cell)
    except (TypeError, ValueError):
        raise SchemaError(f"{what}: expected integer, got {cell!r}", *where) from None
    if n < 0:
        raise SchemaError(f"{what} = {n} is negative", *where)
    return n


def _split(cell):
    if not _known(cell):
        return frozenset()
    return frozenset(p.strip() for p in cell.split(";") if p.strip())


def _rows(path: Path, required: Sequence[str]):
    """Yield ``(line_number, row_dict)`` after checking the header."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"missing column(s): {', '.join(missing)}", path, 1)
        for row in reader:
            if None in row:
                raise SchemaError("too many fields", path, reader.line_num)
            yield reader.line_num, row


# -- table readers --------------------------------------------------------


def _read_catalog(m: DatasetManifest) -> Tuple[ItemRecord, ...]:
    path = m.path("catalog")
    cols = m.columns
    required = ["item_id"] + [cols[c] for c in m.explicit_columns]
    items = []
    for line, row in _rows(path, required):
        where = (path, line)
        item_id = _opt_str(row.get("item_id"))
        if item_id is None:
            raise SchemaError("item_id is required", *where)

        def cell(name):
            return row.get(cols[name])

        items.append(
            ItemRecord(
                item_id=item_id,
                carbon_footprint=_real(cell("carbon_footprint"), where, "carbon_footprint", lo=0.0, optional=True),
                is_green=_opt_bool(cell("is_green"), where),
                is_harmful=_opt_bool(cell("is_harmful"), where),
                lci_score=_real(cell("lci_score"), where, "lci_score", lo=0.0, optional=True),
                producer_id=_opt_str(cell("producer_id")),
                producer_region=_opt_str(cell("producer_region")),
                sustainability_label=_opt_bool(cell("sustainability_label"), where),
                is_local=_opt_bool(cell("is_local"), where),
                category=_opt_str(cell("category")),
            )
        )
    return tuple(items)


def _read_users(m):
    path = m.path("users")
    out = []
    for line, row in _rows(path, ["user_id"]):
        user_id = _opt_str(row.get("user_id"))
        if user_id is None:
            raise SchemaError("user_id is required", path, line)
        out.append(
            UserRecord(
                user_id=user_id,
                group_ids=_split(row.get("groups")),
                region=_opt_str(row.get("region")),
                familiar_items=_split(row.get("familiar_items")),
            )
        )
    return tuple(out)


def _read_recommendations(m):
    path = m.path("recommendations")
    lists: Dict[str, Dict[int, str]] = {}
    stamps: Dict[str, Dict[int, Optional[str]]] = {}
    for line, row in _rows(path, ["user_id", "rank", "item_id"]):
        where = (path, line)
        user = _opt_str(row["user_id"])
        item = _opt_str(row["item_id"])
        if user is None or item is None:
            raise SchemaError("user_id and item_id are required", *where)
        rank = _count(row["rank"], where, "rank")
        slots = lists.setdefault(user, {})
        if rank in slots:
            raise SchemaError(f"rank {rank} repeated for user {user!r}", *where)
        slots[rank] = item
        stamps.setdefault(user, {})[rank] = _opt_str(row.get("timestamp"))
    out = []
    for user, slots in lists.items():
        ranks = sorted(slots)
        ts = next((stamps[user][r] for r in ranks if stamps[user][r]), None)
        out.append(RecommendationSet(user, tuple(slots[r] for r in ranks), ts))
    return tuple(out)


def _read_relevance(m):
    path = m.path("relevance")
    out = []
    for line, row in _rows(path, ["user_id", "item_id", "relevance"]):
        out.append(
            RelevanceJudgment(
                row["user_id"].strip(),
                row["item_id"].strip(),
                _real(row["relevance"], (path, line), "relevance"),
            )
        )
    return tuple(out)


def _read_similarity(m):
    if "similarity" in m.tables:
        path = m.path("similarity")
        pairs = []
        for line, row in _rows(path, ["item_a", "item_b", "sim"]):
            pairs.append((row["item_a"].strip(), row["item_b"].strip(), _real(row["sim"], (path, line), "sim")))
        return SimilarityProvider(pairs=tuple(pairs))
    if "item_features" in m.tables:
        path = m.path("item_features")
        feats = []
        for line, row in _rows(path, ["item_id"]):
            keys = [k for k in row if k != "item_id"]
            vec = tuple(_real(row[k], (path, line), k) for k in keys)
            feats.append((row["item_id"].strip(), vec))
        return SimilarityProvider(features=tuple(feats))
    return None


_ENERGY_COLS = ["e_inference_kwh", "n_rec", "ec_build_kwh", "n_epoch", "n_data_processed"]


def _read_energy(m):
    path = m.path("energy")
    rows = list(_rows(path, _ENERGY_COLS))
    if len(rows) != 1:
        raise SchemaError(f"energy table needs exactly one data row, found {len(rows)}", path)
    line, row = rows[0]
    where = (path, line)
    return EnergyLedger(
        e_inference_kwh=_real(row["e_inference_kwh"], where, "e_inference_kwh", lo=0.0),
        n_rec=_count(row["n_rec"], where, "n_rec"),
        ec_build_kwh=_real(row["ec_build_kwh"], where, "ec_build_kwh", lo=0.0),
        n_epoch=_count(row["n_epoch"], where, "n_epoch"),
        n_data_processed=_count(row["n_data_processed"], where, "n_data_processed"),
    )


def _read_paired(m):
    path = m.path("paired")
    out = []
    for line, row in _rows(path, ["kind", "baseline", "treatment"]):
        where = (path, line)
        hib = _opt_bool(row.get("higher_is_better"), where)
        out.append(
            PairedObservation(
                kind=row["kind"].strip(),
                baseline=_real(row["baseline"], where, "baseline"),
                treatment=_real(row["treatment"], where, "treatment"),
                unit=(row.get("unit") or "").strip(),
                higher_is_better=True if hib is None else hib,
            )
        )
    return tuple(out)


def _read_accessibility(m):
    path = m.path("accessibility")
    scores = []
    artifacts = []
    for line, row in _rows(path, ["artifact_id", "group", "score"]):
        a = row["artifact_id"].strip()
        if a not in artifacts:
            artifacts.append(a)
        scores.append((a, row["group"].strip(), _real(row["score"], (path, line), "score")))
    return AccessibilityAudit(tuple(artifacts), m.accessibility_criteria, tuple(scores))


def _read_satisfaction(m):
    path = m.path("satisfaction")
    lo, hi = m.satisfaction_scale
    points: Dict[str, List[Tuple[int, float]]] = {}
    for line, row in _rows(path, ["user_id", "t", "value"]):
        where = (path, line)
        t = _count(row["t"], where, "t")
        v = _real(row["value"], where, "value", lo=lo, hi=hi)
        points.setdefault(row["user_id"].strip(), []).append((t, (v - lo) / (hi - lo)))
    horizon = m.horizon or max((t for pts in points.values() for t, _ in pts), default=1)
    return tuple(
        SatisfactionSeries(user, horizon, tuple(sorted(pts, key=lambda p: p[0])))
        for user, pts in points.items()
    )


def _read_behaviors(m):
    path = m.path("behaviors")
    out = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        for line, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", path, line) from None
            if not isinstance(obj, dict) or "user" not in obj or "kind" not in obj:
                raise SchemaError("event needs 'user' and 'kind'", path, line)
            item = obj.get("item")
            out.append(
                BehaviorEvent(
                    user_id=str(obj["user"]),
                    behavior_kind=str(obj["kind"]),
                    item_id=None if item is None else str(item),
                    timestamp=obj.get("timestamp"),
                )
            )
    return tuple(out)


def _read_explanations(m):
    path = m.path("explanations")
    out = []
    for line, row in _rows(path, ["user_id", "explanation_id", "score"]):
        out.append(
            ExplanationRecord(
                row["user_id"].strip(),
                row["explanation_id"].strip(),
                _real(row["score"], (path, line), "score"),
            )
        )
    return tuple(out)


def load_catalog(manifest_path) -> Tuple[ItemRecord, ...]:
    return _read_catalog(read_manifest(manifest_path))


def load_dataset(manifest_path, validate: bool = True) -> Dataset:
    """Parse every declared table into an immutable :class:`Dataset`.

    Raises :class:`SchemaError` on malformed files and
    :class:`DatasetValidationError` when validation finds hard violations.
    """
    m = read_manifest(manifest_path)

    def opt(table, reader):
        return reader(m) if table in m.tables else None

    ds = Dataset(
        items=_read_catalog(m),
        users=_read_users(m),
        recommendations=_read_recommendations(m),
        judgments=opt("relevance", _read_relevance),
        similarity=_read_similarity(m),
        energy=opt("energy", _read_energy),
        paired=opt("paired", _read_paired),
        accessibility=opt("accessibility", _read_accessibility),
        satisfaction=opt("satisfaction", _read_satisfaction),
        behaviors=opt("behaviors", _read_behaviors),
        explanations=opt("explanations", _read_explanations),
        config=m.config,
    )
    if validate:
        report = validate_dataset(ds)
        if not report.usable:
            raise DatasetValidationError(report)
    return ds


# -- writing --------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(c) for c in r])


def write_dataset(ds: Dataset, directory) -> Path:
    """Write ``ds`` in canonical form and return the manifest path.

    Floats are written with ``repr`` so a reload is bit-identical.
    Satisfaction values are written already normalized (scale [0, 1]).
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    tables = {}

    tables["catalog"] = "catalog.csv"
    cat_cols = ["item_id"] + list(SUSTAINABILITY_FIELDS) + ["is_local", "category"]
    _write_csv(d / "catalog.csv", cat_cols, ([getattr(it, c) for c in cat_cols] for it in ds.items))

    tables["users"] = "users.csv"
    _write_csv(
        d / "users.csv",
        ["user_id", "groups", "region", "familiar_items"],
        (
            [u.user_id, ";".join(sorted(u.group_ids)), u.region, ";".join(sorted(u.familiar_items))]
            for u in ds.users
        ),
    )

    tables["recommendations"] = "recommendations.csv"
    _write_csv(
        d / "recommendations.csv",
        ["user_id", "rank", "item_id", "timestamp"],
        ([rs.user_id, r, i, rs.timestamp] for rs in ds.recommendations for r, i in enumerate(rs.items, 1)),
    )

    if ds.judgments is not None:
        tables["relevance"] = "relevance.csv"
        _write_csv(
            d / "relevance.csv",
            ["user_id", "item_id", "relevance"],
            ([j.user_id, j.item_id, j.relevance] for j in ds.judgments),
        )

    sp = ds.similarity
    if sp is not None and sp.pairs is not None:
        tables["similarity"] = "similarity.csv"
        _write_csv(d / "similarity.csv", ["item_a", "item_b", "sim"], sp.pairs)
    elif sp is not None:
        tables["item_features"] = "item_features.csv"
        width = max((len(v) for _, v in sp.features), default=0)
        _write_csv(
            d / "item_features.csv",
            ["item_id"] + [f"f{k}" for k in range(width)],
            ([i] + list(v) for i, v in sp.features),
        )

    if ds.energy is not None:
        tables["energy"] = "energy.csv"
        e = ds.energy
        _write_csv(d / "energy.csv", _ENERGY_COLS, [[getattr(e, c) for c in _ENERGY_COLS]])

    if ds.paired is not None:
        tables["paired"] = "paired.csv"
        _write_csv(
            d / "paired.csv",
            ["kind", "baseline", "treatment", "unit", "higher_is_better"],
            ([p.kind, p.baseline, p.treatment, p.unit, p.higher_is_better] for p in ds.paired),
        )

    if ds.accessibility is not None:
        tables["accessibility"] = "accessibility.csv"
        _write_csv(d / "accessibility.csv", ["artifact_id", "group", "score"], ds.accessibility.scores)

    horizon = None
    if ds.satisfaction is not None:
        tables["satisfaction"] = "satisfaction.csv"
        horizon = max((s.horizon for s in ds.satisfaction), default=None)
        _write_csv(
            d / "satisfaction.csv",
            ["user_id", "t", "value"],
            ([s.user_id, t, v] for s in ds.satisfaction for t, v in s.points),
        )

    if ds.behaviors is not None:
        tables["behaviors"] = "behaviors.jsonl"
        with open(d / "behaviors.jsonl", "w", encoding="utf-8") as fh:
            for b in ds.behaviors:
                obj = {"user": b.user_id, "kind": b.behavior_kind}
                if b.item_id is not None:
                    obj["item"] = b.item_id
                if b.timestamp is not None:
                    obj["timestamp"] = b.timestamp
                fh.write(json.dumps(obj, sort_keys=True) + "\n")

    if ds.explanations is not None:
        tables["explanations"] = "explanations.csv"
        _write_csv(
            d / "explanations.csv",
            ["user_id", "explanation_id", "score"],
            ([e.user_id, e.explanation_id, e.interpret_score] for e in ds.explanations),
        )

    cfg = ds.config
    manifest = {
        "schema_version": MANIFEST_VERSION,
        "tables": tables,
        "units": {"energy": cfg.energy_unit, "carbon": cfg.carbon_unit, "data_unit": cfg.data_unit},
        "satisfaction_scale": [0, 1],
        "horizon": horizon,
        "groups": list(cfg.groups),
        "sustainable_behaviors": list(cfg.sustainable_behaviors),
        "green_item_behaviors": cfg.green_item_behaviors,
        "popular_items": list(cfg.popular_items),
        "accessibility_criteria": list(ds.accessibility.criteria) if ds.accessibility else [],
        "epsilon": cfg.epsilon,
    }
    path = d / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


# -- label coverage -------------------------------------------------------


def label_coverage(catalog: Sequence[ItemRecord], label_field: str = "sustainability_label") -> float:
    """Share of catalog items whose ``label_field`` is known."""
    if label_field not in BINDABLE_COLUMNS:
        raise ValueError(f"{label_field!r} is not a sustainability metadata field")
    if not catalog:
        raise EmptyCatalogError("catalog is empty")
    known = sum(1 for it in catalog if getattr(it, label_field) is not None)
    return known / len(catalog)


def coverage_table(catalog: Sequence[ItemRecord]):
    """One ``(field, dependent_metrics, coverage)`` row per sustainability field."""
    return [(f, FIELD_METRICS[f], label_coverage(catalog, f)) for f in SUSTAINABILITY_FIELDS]


def resolve_manifest(path) -> Path:
    """Accept either a manifest file or a directory containing ``manifest.json``."""
    p = Path(path)
    return p / "manifest.json" if os.path.isdir(p) else p
