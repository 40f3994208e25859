from pathlib import Path

import pytest

from sustain_eval.ingest import load_dataset

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def worked_manifest():
    return FIXTURES / "worked" / "manifest.json"


@pytest.fixture(scope="session")
def worked(worked_manifest):
    return load_dataset(worked_manifest)


@pytest.fixture(scope="session")
def rerank4_manifest():
    return FIXTURES / "rerank4" / "manifest.json"
