import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from sustain_eval.cli import main
from sustain_eval.metrics import METRIC_NAMES


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_evaluate_selected_metrics(worked_manifest, capsys):
    code, out, _ = run(["evaluate", "--manifest", worked_manifest, "-m", "girec,hier"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [m["name"] for m in doc["metrics"]] == ["girec", "hier"]
    assert doc["metrics"][0]["value"] == 0.5
    assert doc["schema_version"] == 1


def test_evaluate_all_metrics(worked_manifest, capsys):
    code, out, _ = run(["evaluate", "--manifest", worked_manifest.parent], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [m["name"] for m in doc["metrics"]] == list(METRIC_NAMES)
    assert all(m["status"] == "ok" for m in doc["metrics"])


def test_evaluate_without_energy_table(tmp_path, worked_manifest, capsys):
    d = tmp_path / "ds"
    shutil.copytree(worked_manifest.parent, d)
    manifest = json.loads((d / "manifest.json").read_text())
    del manifest["tables"]["energy"]
    (d / "manifest.json").write_text(json.dumps(manifest))
    code, out, _ = run(["evaluate", "--manifest", d / "manifest.json"], capsys)
    assert code == 0
    status = {m["name"]: m["status"] for m in json.loads(out)["metrics"]}
    for name in ("ecrec", "ectrain", "ecpdat"):
        assert status[name] == "undefined: missing table"


def test_evaluate_csv(worked_manifest, capsys):
    code, out, _ = run(["evaluate", "--manifest", worked_manifest, "-m", "acc,loyalty", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {"metric", "scope", "key", "value", "status", "coverage"} == set(rows[0])
    assert ("acc", "value", "0.75") in {(r["metric"], r["scope"], r["value"]) for r in rows}
    assert ("loyalty", "user", "u1", "0.75") in {(r["metric"], r["scope"], r["key"], r["value"]) for r in rows}


def test_evaluate_writes_out_file(tmp_path, worked_manifest, capsys):
    out = tmp_path / "r.json"
    assert run(["evaluate", "--manifest", worked_manifest, "-m", "pef", "--out", out], capsys)[0] == 0
    assert json.loads(out.read_text())["metrics"][0]["value"] == pytest.approx(2 / 3, abs=1e-11)


def test_bad_manifest_path_exits_2(tmp_path, capsys):
    code, out, err = run(["evaluate", "--manifest", tmp_path / "missing.json"], capsys)
    assert code == 2
    assert out == ""
    assert "data error" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["evaluate", "--manifest", "x", "-m", "nope"],
        ["evaluate", "--manifest", "x", "--decay", "0"],
        ["evaluate"],
        ["rerank", "--manifest", "x", "--k", "0"],
        ["rerank", "--manifest", "x", "--grid", "0,2"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with_exit = None
    try:
        with_exit = main(argv)
    except SystemExit as exc:
        with_exit = exc.code
    capsys.readouterr()
    assert with_exit == 1


def test_coverage(worked_manifest, capsys):
    code, out, _ = run(["coverage", "--manifest", worked_manifest, "--format", "csv"], capsys)
    assert code == 0
    rows = {r["field"]: r for r in csv.DictReader(io.StringIO(out))}
    assert rows["is_green"]["coverage"] == "0.8"
    assert "girec" in rows["is_green"]["metrics"]


def test_coverage_fully_labeled_and_empty(tmp_path, capsys):
    (tmp_path / "catalog.csv").write_text(
        "item_id,carbon_footprint,is_green,is_harmful,lci_score,producer_id,producer_region,sustainability_label\n"
        "a,1,true,false,2,p,r,true\n"
    )
    (tmp_path / "users.csv").write_text("user_id\nu\n")
    (tmp_path / "recommendations.csv").write_text("user_id,rank,item_id\nu,1,a\n")
    tables = {"catalog": "catalog.csv", "users": "users.csv", "recommendations": "recommendations.csv"}
    (tmp_path / "manifest.json").write_text(json.dumps({"tables": tables}))
    code, out, _ = run(["coverage", "--manifest", tmp_path], capsys)
    assert code == 0
    assert all(f["coverage"] == 1.0 for f in json.loads(out)["fields"])

    (tmp_path / "catalog.csv").write_text("item_id,is_green\n")
    code, _, err = run(["coverage", "--manifest", tmp_path], capsys)
    assert code == 2 and "catalog" in err


def test_rerank_frontier_table(rerank4_manifest, capsys):
    code, out, _ = run(["rerank", "--manifest", rerank4_manifest, "--k", "2", "--grid", "3", "--format", "csv"], capsys)
    assert code == 0
    rows = [r for r in csv.DictReader(io.StringIO(out)) if r["user_id"] == "r1"]
    assert [r["items"] for r in rows] == ["y;z", "w;y", "w;x"]
    assert [float(r["weight"]) for r in rows] == [0.0, 0.5, 1.0]


def test_rerank_reports_small_pools(rerank4_manifest, capsys):
    code, out, _ = run(["rerank", "--manifest", rerank4_manifest, "--k", "3"], capsys)
    assert code == 0
    users = {u["user_id"]: u for u in json.loads(out)["users"]}
    assert users["r2"]["status"] == "error: pool-smaller-than-k"
    assert users["r1"]["status"] == "ok"


def test_rerank_green_filter(rerank4_manifest, capsys):
    code, out, _ = run(["rerank", "--manifest", rerank4_manifest, "--k", "2", "--green-filter", "--users", "r2"], capsys)
    assert code == 0
    [user] = json.loads(out)["users"]
    assert user["items"] == ["y", "z"] and user["n_non_green"] == 0


def test_synth_is_reproducible(tmp_path, capsys):
    for name in ("a", "b"):
        assert run(["synth", "--seed", "7", "--out", tmp_path / name], capsys)[0] == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    code, out, _ = run(["evaluate", "--manifest", tmp_path / "a"], capsys)
    assert code == 0


def test_synth_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_users": 3, "list_length": [2, 2]}))
    assert run(["synth", "--config", cfg, "--seed", "1", "--out", tmp_path / "d"], capsys)[0] == 0
    lines = (tmp_path / "d" / "recommendations.csv").read_text().splitlines()
    assert len(lines) == 1 + 6
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["synth", "--config", cfg, "--out", tmp_path / "e"], capsys)[0] == 1


def test_module_entry_point(worked_manifest):
    proc = subprocess.run(
        [sys.executable, "-m", "sustain_eval", "evaluate", "--manifest", str(worked_manifest), "-m", "sbs"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["metrics"][0]["value"] == pytest.approx(2 / 3, abs=1e-11)
