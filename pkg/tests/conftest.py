from pathlib import Path

import pytest

from spokensearch.corpus import build_index, load_corpus

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_path() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_docs():
    return load_corpus(FIXTURES / "corpus.sgml")


@pytest.fixture(scope="session")
def fixture_index(fixture_docs):
    return build_index(fixture_docs)
