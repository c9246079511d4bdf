import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # oracles / genkb helpers

from omlcore import xmlio
from omlcore.model import KnowledgeBase

GOLDEN = Path(__file__).parent / "golden"


def golden_text(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture()
def movie_ontology():
    return xmlio.parse_oml(golden_text("movie.oml"), "movie.oml").root


@pytest.fixture()
def casablanca_collection():
    return xmlio.parse_oml(golden_text("casablanca-generic.oml"), "casablanca-generic.oml").root


@pytest.fixture()
def movie_kb(movie_ontology, casablanca_collection) -> KnowledgeBase:
    return KnowledgeBase(movie_ontology, [casablanca_collection])
