import shutil
from pathlib import Path

import pytest
from hypothesis import settings

import nba
from nba.ontology import parse_ontology, parse_scene
from nba.provenance import load_sources
from nba.rules import parse_rules
from nba.verify import parse_expectations

settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile("ci")

DATA = nba.bundled_project()


def read(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def ontology():
    return parse_ontology(read("ontology.nbo"), "ontology.nbo")


@pytest.fixture(scope="session")
def catalog():
    return parse_rules(read("rules.nbr"), "rules.nbr")


@pytest.fixture(scope="session")
def ledger():
    return load_sources(read("sources.nbq"), "sources.nbq")


@pytest.fixture(scope="session")
def scene1():
    return parse_scene(read("scene1.nbs"), "scene1.nbs")


@pytest.fixture(scope="session")
def scene2():
    return parse_scene(read("scene2.nbs"), "scene2.nbs")


@pytest.fixture(scope="session")
def expectations():
    return {e.scenario_id: e for e in parse_expectations(read("expectations.nbe"))}


@pytest.fixture
def project_dir(tmp_path) -> Path:
    """Writable copy of the bundled project."""
    dest = tmp_path / "stvo26"
    shutil.copytree(DATA, dest, ignore=shutil.ignore_patterns("out"))
    return dest


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
