import json

import pytest

from nba.errors import DuplicateScenarioId, ParseError, UnknownScenario
from nba.rules import parse_rules
from nba.terms import fact
from nba.verify import (CONCEPT_GAP, FAIL, PASS, RULE_FAULT, SOURCE_GAP, Expectation, Finding,
                        Verdict, classify, format_expectations, parse_expectations,
                        verify_catalog, verify_scenario)

STOP = fact("anhalten_in", "ego", "zoneBlau1")


def test_parse_expectations(expectations):
    s1 = expectations["S1"]
    assert s1.must_derive == (STOP,)
    assert s1.must_not_derive == (fact("anhalten_in", "ego", "zoneRot"),)
    assert s1.note.startswith("Ergebnis")
    again = {e.scenario_id: e for e in parse_expectations(format_expectations(expectations.values()))}
    assert again == expectations


def test_parse_expectations_errors():
    for text in ("must p(a)\n", "expect S\nmust p(?x)\n", "expect S\nexpect S\n",
                 "expect S\nmust p(a)\nforbid p(a)\n", "expect S\nmaybe p(a)\n"):
        with pytest.raises(ParseError):
            parse_expectations(text)
    (e,) = parse_expectations('expect S\nflag source_gap "missing court ruling"\n')
    assert e.source_gap_flags == ("missing court ruling",)


def test_scenario1_passes(ontology, catalog, scene1, expectations, ledger):
    v = verify_scenario(ontology, catalog, scene1, expectations["S1"], ledger)
    assert (v.status, v.failure_class, v.evidence) == (PASS, None, ())


def test_scenario2_concept_gap(ontology, catalog, scene2, expectations, ledger):
    v = verify_scenario(ontology, catalog, scene2, expectations["S2"], ledger)
    assert (v.status, v.failure_class) == (FAIL, CONCEPT_GAP)
    assert v.evidence[0].kind == "UnknownSymbol" and v.evidence[0].subject == "Verdeckungszone"
    assert ("MissingExpected", str(STOP)) in [(f.kind, f.subject) for f in v.evidence]


@pytest.mark.parametrize("rid", ["R2", "R3", "R4"])
def test_rule_deletion_rule_fault(ontology, catalog, scene1, expectations, rid):
    v = verify_scenario(ontology, catalog.without(rid), scene1, expectations["S1"])
    assert (v.status, v.failure_class) == (FAIL, RULE_FAULT)
    assert [(f.kind, f.subject) for f in v.evidence] == [("MissingExpected", str(STOP))]


def test_forbidden_fact(ontology, catalog, scene1):
    extra = parse_rules('rule X "x" source s when Ego(?e) & Zone(?z) then anhalten_in(?e, ?z)')
    e = Expectation("S1", must_not_derive=(fact("anhalten_in", "ego", "zoneRot"),))
    from nba.rules import RuleCatalog
    v = verify_scenario(ontology, RuleCatalog(catalog.rules + extra.rules), scene1, e)
    assert v.failure_class == RULE_FAULT
    (finding,) = v.evidence
    assert finding.kind == "ForbiddenDerived" and finding.tree.trace.rule_id == "X"


def test_refuted_assumption_is_rule_fault(ontology, catalog, scene1, expectations, ledger):
    v = verify_scenario(ontology, catalog, scene1, expectations["S1"], ledger.refute("A4"))
    assert v.failure_class == RULE_FAULT
    assert [(f.kind, f.subject) for f in v.evidence] == [("RefutedAssumption", "R2")]


def test_source_gap_only_from_flag(ontology, catalog, scene1):
    e = Expectation("S1", (STOP,), source_gap_flags=("no ruling on intent",))
    v = verify_scenario(ontology, catalog, scene1, e)
    assert (v.status, v.failure_class) == (FAIL, SOURCE_GAP)


def test_inconsistency_is_rule_fault(ontology, scene1):
    catalog = parse_rules('rule X "x" source s when Fussgaenger(?f) then Zone(?f)')
    v = verify_scenario(ontology, catalog, scene1, Expectation("S1"))
    assert v.failure_class == RULE_FAULT
    assert {f.kind for f in v.evidence} == {"Inconsistency"}


def test_classify_precedence():
    c, r, s = Finding("UnknownSymbol", "x"), Finding("MissingExpected", "y"), Finding("ManualFlag", "z")
    assert classify([s, r, c]) == CONCEPT_GAP
    assert classify([s, r]) == RULE_FAULT
    assert classify([s]) == SOURCE_GAP
    assert classify([]) is None


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict("S", PASS, RULE_FAULT)
    with pytest.raises(ValueError):
        Verdict("S", FAIL, RULE_FAULT, ())
    with pytest.raises(ValueError):
        Verdict("S", FAIL)


def test_verify_catalog(ontology, catalog, scene1, scene2, expectations, ledger):
    report = verify_catalog(ontology, catalog, [scene2, scene1], list(expectations.values()), ledger)
    assert [v.scenario_id for v in report.verdicts] == ["S1", "S2"]
    assert report.summary == {PASS: 1, CONCEPT_GAP: 1}
    assert not report.ok
    data = json.loads(report.to_json())
    assert data["summary"] == {"PASS": 1, "CONCEPT_GAP": 1}
    assert "summary: PASS=1 CONCEPT_GAP=1" in report.render()
    parallel = verify_catalog(ontology, catalog, [scene2, scene1], list(expectations.values()),
                              ledger, jobs=4)
    assert parallel.to_json() == report.to_json()


def test_verify_catalog_unchecked_and_errors(ontology, catalog, scene1, expectations):
    report = verify_catalog(ontology, catalog, [scene1], [])
    assert report.verdicts == [] and str(STOP) in report.unchecked["S1"]
    with pytest.raises(DuplicateScenarioId):
        verify_catalog(ontology, catalog, [scene1, scene1], [])
    with pytest.raises(DuplicateScenarioId):
        verify_catalog(ontology, catalog, [scene1], [expectations["S1"], expectations["S1"]])
    with pytest.raises(UnknownScenario):
        verify_catalog(ontology, catalog, [scene1], [expectations["S2"]])
