import json
from datetime import datetime, timezone
from pathlib import Path

import pytest

from devrec.index import build_index
from devrec.ingest import Artifact, read_corpus
from devrec.ontology import (
    AnnotationRule,
    OntClass,
    OntInstance,
    Ontology,
    annotate,
    load_ontology,
)
from devrec.qexp import load_lexicon

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


def ts(text: str) -> datetime:
    value = datetime.fromisoformat(text)
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value


def make_artifact(
    id: str,
    body: str,
    title: str = "",
    kind: str = "post",
    created_at: str = "2025-06-01T00:00:00+00:00",
    concepts=(),
) -> Artifact:
    return Artifact(
        id=id,
        kind=kind,
        title=title,
        body=body,
        url=None,
        source=id.split(":")[0],
        created_at=ts(created_at),
        concepts=frozenset(concepts),
    )


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def mad_ontology():
    return load_ontology(DATA_DIR / "mad-ontology.json")


@pytest.fixture(scope="session")
def mad_lexicon():
    return load_lexicon(DATA_DIR / "mad-synsets.tsv")


@pytest.fixture(scope="session")
def tweet_corpus(mad_ontology):
    return [annotate(a, mad_ontology) for a in read_corpus(DATA_DIR / "tweets.jsonl")]


@pytest.fixture()
def tweet_index(mad_ontology, tweet_corpus):
    return build_index(tweet_corpus, ontology=mad_ontology)


@pytest.fixture(scope="session")
def toy_ontology():
    """Two disjoint trees; the main one mirrors the Tutorial/Job hand case."""
    classes = [
        OntClass("t:Thing", "Thing"),
        OntClass("t:Content", "Content", parent="t:Thing"),
        OntClass("t:Tutorial", "Tutorial", parent="t:Content"),
        OntClass("t:Job", "Job", parent="t:Content"),
        OntClass("t:Deep", "Deep", parent="t:Tutorial"),
        OntClass("x:Other", "Other"),
        OntClass("x:Leaf", "Leaf", parent="x:Other"),
    ]
    instances = [
        OntInstance("tutInst", "t:Tutorial", ("scrum tutorial",)),
        OntInstance("jobInst", "t:Job", ("job opening",)),
    ]
    rules = [
        AnnotationRule("r1", (("t:Tutorial", 1),), "t:Deep"),
    ]
    return Ontology(classes, instances, rules)


@pytest.fixture(scope="session")
def sample_form() -> dict:
    return json.loads((DATA_DIR / "sample-form.json").read_text(encoding="utf-8"))
