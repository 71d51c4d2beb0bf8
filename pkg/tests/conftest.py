import json
from importlib.resources import files

import pytest

from relevel import corpus

DATA = files("relevel.data")


@pytest.fixture(scope="session")
def fixtures_path(tmp_path_factory):
    return str(DATA / "corpus_fixtures.json")


@pytest.fixture(scope="session")
def fixture_passages():
    return corpus.load_corpus(str(DATA / "corpus_fixtures.json"))


@pytest.fixture(scope="session")
def hippo_passage():
    return corpus.load_corpus(str(DATA / "hippo_corpus.json"))[0]


@pytest.fixture(scope="session")
def hippo_relevel_text():
    return (DATA / "hippo_relevel_grade6.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def syllable_oracle():
    return json.loads((DATA / "syllable_oracle.json").read_text(encoding="utf-8"))["words"]
