"""``sustain-eval`` command line.

Exit codes: 0 success, 1 usage error, 2 data error (input that cannot be read or
fails validation), 3 internal error.
"""

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields
from pathlib import Path

from . import __version__
from .errors import DataError, PoolTooSmall, RangeError, UnknownMetric
from .ingest import coverage_table, load_catalog, load_dataset, resolve_manifest, write_dataset
from .metrics.registry import METRIC_NAMES, evaluate, thread_count
from .oracle.synth import SynthConfig, generate
from .rerank import METHODS, OBJECTIVES, build_problem, green_filter_rerank, pareto_frontier, weight_grid

REPORT_SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x):
    return float(f"{x:.12g}")


def _canon(obj):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def _dump_json(doc) -> str:
    return json.dumps(_canon(doc), indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if c is None else (f"{c:.12g}" if isinstance(c, float) else c) for c in r])
    return buf.getvalue()


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _engine():
    return {"name": "sustain-eval", "version": __version__}


def report_document(reports):
    entries = []
    for r in reports:
        entries.append(
            {
                "name": r.name,
                "status": r.status,
                "value": r.value,
                "coverage": r.coverage,
                "per_user": r.per_user,
                "per_group": r.per_group,
                "per_item": r.per_item,
                "details": r.details,
                "notes": list(r.notes),
            }
        )
    return {"schema_version": REPORT_SCHEMA_VERSION, "engine": _engine(), "metrics": entries}


def report_csv(reports) -> str:
    rows = []
    for r in reports:
        rows.append([r.name, "value", "", r.value, r.status, r.coverage])
        for scope, table in (("user", r.per_user), ("group", r.per_group), ("item", r.per_item)):
            for key in sorted(table or {}):
                rows.append([r.name, scope, key, table[key], r.status, ""])
    return _csv_text(["metric", "scope", "key", "value", "status", "coverage"], rows)


def _metric_list(raw):
    if not raw:
        return list(METRIC_NAMES)
    names = [n.strip().lower() for n in raw.split(",") if n.strip()]
    unknown = [n for n in names if n not in METRIC_NAMES]
    if unknown:
        raise UsageError(f"unknown metric(s): {', '.join(unknown)}; choose from {', '.join(METRIC_NAMES)}")
    return names


def cmd_evaluate(args):
    names = _metric_list(args.metrics)
    if args.decay is not None and not 0.0 < args.decay <= 1.0:
        raise UsageError("--decay must be in (0, 1]")
    if args.epsilon is not None and not args.epsilon > 0:
        raise UsageError("--epsilon must be > 0")
    ds = load_dataset(resolve_manifest(args.manifest))
    reports = evaluate(ds, names, epsilon=args.epsilon, decay=args.decay, scope=args.scope)
    if args.format == "csv":
        _emit(report_csv(reports), args.out)
    else:
        _emit(_dump_json(report_document(reports)), args.out)
    return EXIT_OK


def cmd_coverage(args):
    rows = coverage_table(load_catalog(resolve_manifest(args.manifest)))
    if args.format == "csv":
        _emit(_csv_text(["field", "metrics", "coverage"], [(f, ";".join(m), c) for f, m, c in rows]), args.out)
    else:
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "engine": _engine(),
            "fields": [{"field": f, "metrics": list(m), "coverage": c} for f, m, c in rows],
        }
        _emit(_dump_json(doc), args.out)
    return EXIT_OK


def _parse_grid(raw):
    try:
        if "," in raw:
            grid = tuple(float(x) for x in raw.split(","))
        else:
            grid = weight_grid(int(raw))
    except (ValueError, RangeError) as exc:
        raise UsageError(f"bad --grid {raw!r}: {exc}") from None
    if not grid or any(not 0.0 <= w <= 1.0 for w in grid):
        raise UsageError("--grid weights must lie in [0, 1]")
    return grid


def _rerank_user(ds, user, args, grid):
    problem = build_problem(ds, user, args.k, args.objective)
    if args.green_filter:
        res = green_filter_rerank(problem)
        return {"user_id": user, "status": "ok", "items": list(res.items), "n_non_green": res.n_non_green, "note": res.note}
    try:
        front = pareto_frontier(problem, grid, args.method)
    except PoolTooSmall as exc:
        return {"user_id": user, "status": f"error: {exc.code}", "frontier": [], "note": str(exc)}
    return {
        "user_id": user,
        "status": "ok",
        "frontier": [
            {"weight": p.weight, "items": list(p.items), "accuracy": p.accuracy, "sustainability": p.sustainability}
            for p in front
        ],
    }


def cmd_rerank(args):
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    grid = _parse_grid(args.grid)
    ds = load_dataset(resolve_manifest(args.manifest))
    users = [u.user_id for u in ds.users]
    if args.users:
        wanted = [u.strip() for u in args.users.split(",") if u.strip()]
        missing = [u for u in wanted if u not in ds.user_index]
        if missing:
            raise UsageError(f"unknown user(s): {', '.join(missing)}")
        users = wanted
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda u: _rerank_user(ds, u, args, grid), users))
    else:
        results = [_rerank_user(ds, u, args, grid) for u in users]

    if args.format == "csv":
        if args.green_filter:
            rows = [(r["user_id"], ";".join(r["items"]), r["n_non_green"], r["note"]) for r in results]
            text = _csv_text(["user_id", "items", "n_non_green", "note"], rows)
        else:
            rows = [
                (r["user_id"], p["weight"], p["accuracy"], p["sustainability"], ";".join(p["items"]))
                for r in results
                for p in r["frontier"]
            ]
            text = _csv_text(["user_id", "weight", "accuracy", "sustainability", "items"], rows)
        _emit(text, args.out)
    else:
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "engine": _engine(),
            "k": args.k,
            "objective": args.objective,
            "mode": "green-filter" if args.green_filter else "frontier",
            "method": args.method,
            "grid": list(grid),
            "users": results,
        }
        _emit(_dump_json(doc), args.out)
    return EXIT_OK


def _synth_config(args):
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"{args.config}: invalid JSON: {exc.msg}") from exc
    known = {f.name for f in fields(SynthConfig)}
    extra = sorted(set(raw) - known)
    if extra:
        raise UsageError(f"unknown synth config key(s): {', '.join(extra)}")
    if args.seed is not None:
        raw["seed"] = args.seed
    for key in ("list_length", "drop_tables"):
        if key in raw:
            raw[key] = tuple(raw[key])
    try:
        return SynthConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad synth config: {exc}") from None


def cmd_synth(args):
    cfg = _synth_config(args)
    path = write_dataset(generate(cfg), args.out)
    sys.stderr.write(f"wrote {path}\n")
    return EXIT_OK


def build_parser():
    p = _Parser(prog="sustain-eval", description="Sustainability metrics for recommender logs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, manifest=True):
        if manifest:
            sp.add_argument("--manifest", required=True, help="manifest.json or its directory")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="output file (default: stdout)")

    ev = sub.add_parser("evaluate", help="compute metrics")
    common(ev)
    ev.add_argument("-m", "--metrics", help="comma-separated metric names (default: all)")
    ev.add_argument("--epsilon", type=float, help="parity / inclusivity tolerance")
    ev.add_argument("--decay", type=float, help="recency weight for loyalty, in (0, 1]")
    ev.add_argument("--scope", help="item category for producer exposure fairness")
    ev.set_defaults(func=cmd_evaluate)

    cov = sub.add_parser("coverage", help="per-field label coverage of the catalog")
    common(cov)
    cov.set_defaults(func=cmd_coverage)

    rr = sub.add_parser("rerank", help="accuracy / sustainability frontier per user")
    common(rr)
    rr.add_argument("--k", type=int, default=10)
    rr.add_argument("--objective", choices=OBJECTIVES, default="green")
    rr.add_argument("--grid", default="11", help="number of evenly spaced weights, or a comma list")
    rr.add_argument("--green-filter", action="store_true", help="hard green constraint instead of a frontier")
    rr.add_argument("--method", choices=METHODS, default="exact")
    rr.add_argument("--users", help="comma-separated user ids (default: all)")
    rr.set_defaults(func=cmd_rerank)

    sy = sub.add_parser("synth", help="write a synthetic dataset directory")
    sy.add_argument("--seed", type=int)
    sy.add_argument("--config", help="JSON file with SynthConfig fields")
    sy.add_argument("--out", required=True, help="output directory")
    sy.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, UnknownMetric) as exc:
        sys.stderr.write(f"sustain-eval: usage error: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        sys.stderr.write(f"sustain-eval: data error: {exc}\n")
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal exit code
        sys.stderr.write(f"sustain-eval: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
