import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sustain_eval import model
from sustain_eval.errors import MissingSimilarity
from sustain_eval.model import (
    Dataset,
    MetricReport,
    RelevanceJudgment,
    SimilarityProvider,
    validate_dataset,
)
from sustain_eval.oracle import generate, random_config
from helpers import make_dataset


def test_empty_dataset_is_usable():
    report = validate_dataset(Dataset())
    assert report.usable
    assert report.violations == ()


def test_unknown_item_in_recommendation():
    ds = make_dataset({"u1": ["a", "x9"]})
    ds = dataclasses.replace(ds, items=tuple(it for it in ds.items if it.item_id != "x9"))
    report = validate_dataset(ds)
    assert len(report.hard) == 1
    assert report.hard[0].code == "dangling-id"
    assert "x9" in report.hard[0].message


def test_relevance_out_of_range():
    ds = make_dataset({"u1": ["a"]}, judgments={("u1", "a"): 1.3})
    report = validate_dataset(ds)
    assert [v.code for v in report.hard] == ["out-of-range"]


@pytest.mark.parametrize(
    "change, code",
    [
        (lambda ds: dataclasses.replace(ds, items=ds.items + ds.items[:1]), "duplicate-key"),
        (lambda ds: dataclasses.replace(ds, users=ds.users + ds.users[:1]), "duplicate-key"),
        (
            lambda ds: dataclasses.replace(
                ds, judgments=(RelevanceJudgment("u1", "a", 0.5), RelevanceJudgment("u1", "a", 0.6))
            ),
            "duplicate-key",
        ),
        (
            lambda ds: dataclasses.replace(ds, items=(dataclasses.replace(ds.items[0], carbon_footprint=-1.0),)),
            "out-of-range",
        ),
    ],
)
def test_hard_violations(change, code):
    ds = change(make_dataset({"u1": ["a"]}))
    assert code in {v.code for v in validate_dataset(ds).hard}


def test_duplicate_item_within_list():
    ds = make_dataset({"u1": ["a", "a"]})
    assert [v.code for v in validate_dataset(ds).hard] == ["duplicate-key"]


def test_familiar_item_outside_catalog_is_soft():
    ds = make_dataset({"u1": ["a"]}, users={"u1": {"familiar": ["zz"]}})
    report = validate_dataset(ds)
    assert report.usable
    assert [v.severity for v in report.violations] == ["soft"]


def test_conflicting_similarity_is_hard():
    sp = SimilarityProvider(pairs=(("a", "b", 0.2), ("b", "a", 0.3)))
    ds = make_dataset({"u1": ["a", "b"]}, similarity=sp)
    assert [v.code for v in validate_dataset(ds).hard] == ["asymmetric"]


def test_group_outside_declared_universe():
    cfg = model.DatasetConfig(groups=("A",))
    ds = make_dataset({"u1": ["a"]}, users={"u1": {"groups": ["B"]}}, config=cfg)
    assert [v.code for v in validate_dataset(ds).hard] == ["unknown-group"]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_validation_is_idempotent(seed):
    ds = generate(random_config(seed))
    assert validate_dataset(ds) == validate_dataset(ds)


def test_similarity_provider_table_is_symmetric():
    sp = SimilarityProvider(pairs=(("a", "b", 0.25),))
    assert sp.sim("a", "b") == sp.sim("b", "a") == 0.25
    assert sp.sim("a", "a") == 1.0
    with pytest.raises(MissingSimilarity):
        sp.sim("a", "c")


def test_similarity_provider_cosine():
    sp = SimilarityProvider(features=(("a", (1.0, 0.0)), ("b", (1.0, 1.0)), ("c", (0.0, 0.0))))
    assert sp.sim("a", "b") == pytest.approx(2**-0.5, abs=1e-15)
    assert sp.sim("a", "c") == 0.0
    assert sp.sim("c", "c") == 1.0


def test_metric_report_requires_value_xor_reason():
    with pytest.raises(ValueError):
        MetricReport(name="x")
    with pytest.raises(ValueError):
        MetricReport(name="x", value=1.0, reason="nope")
    with pytest.raises(ValueError):
        MetricReport(name="x", value=1.0, coverage=1.5)
    assert MetricReport.undefined("x", "missing table").status == "undefined: missing table"


def test_every_symbol_resolves_to_one_model_field():
    types = {
        name: obj
        for name, obj in vars(model).items()
        if isinstance(obj, type) and dataclasses.is_dataclass(obj)
    }
    targets = list(model.SYMBOL_TABLE.values())
    for symbol, target in model.SYMBOL_TABLE.items():
        owner, attr = target.split(".", 1)
        if owner == "config":
            assert attr in {f.name for f in dataclasses.fields(model.DatasetConfig)}, symbol
        else:
            cls = types[owner]
            names = {f.name for f in dataclasses.fields(cls)} | set(vars(cls))
            assert attr in names, symbol
    # shared targets are only allowed for the paired-observation sides
    shared = {t for t in targets if targets.count(t) > 1}
    assert shared == set()
