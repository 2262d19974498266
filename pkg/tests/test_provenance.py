import json
import re

import pytest

from nba.engine import infer
from nba.errors import DanglingReference, ParseError
from nba.provenance import Ledger, check_links, load_sources, trace_report
from nba.rules import parse_rules
from nba.terms import fact

from conftest import read

STOP = fact("anhalten_in", "ego", "zoneBlau1")


def raw_quotes(text: str) -> dict[str, bytes]:
    """Quotes exactly as they sit in the file, bytes between the delimiters."""
    out = {}
    for m in re.finditer(r'^passage (\S+) \S+ "(?:[^"\\]|\\.)*" "((?:[^"\\]|\\.)*)"$', text, re.M):
        out[m.group(1)] = m.group(2).encode("utf-8")
    return out


def test_bundled_ledger(ledger):
    assert set(ledger.docs) == {"stvo", "vwv-stvo"}
    assert set(ledger.passages) == {"stvo-26-1-s1", "stvo-26-1-s1-wollen", "vwv-26-iv"}
    assert set(ledger.assumptions) == {"A1", "A2", "A3", "A4"}
    assert ledger.assumptions["A4"].status == "open"
    assert "an Fußgängerüberwegen den zu Fuß Gehenden" in ledger.passages["stvo-26-1-s1"].quote


def test_load_sources_formats():
    ledger = load_sources('source d "Doc" edition "1"\n'
                          'passage p d "§1" "say \\"hi\\""\n'
                          'assumption A "stmt" status refuted\n')
    assert ledger.passages["p"].quote == 'say "hi"'
    assert ledger.docs["d"].edition == "1"
    assert ledger.assumptions["A"].status == "refuted"


def test_load_sources_errors():
    with pytest.raises(DanglingReference) as exc:
        load_sources('passage p nodoc "§1" "q"\n')
    assert exc.value.target == "nodoc"
    with pytest.raises(ParseError):
        load_sources('source d "x"\nsource d "y"\n')
    with pytest.raises(ParseError):
        load_sources('source d "x"\npassage p d "§1" ""\n')
    with pytest.raises(ParseError) as exc:
        load_sources('assumption A "s" status maybe\n')
    assert exc.value.expected == {"open", "supported", "refuted"}
    with pytest.raises(ParseError):
        load_sources('quote x "y"\n')


def test_check_links(catalog, ledger):
    assert check_links(catalog, ledger) == []
    broken = parse_rules('rule X "x" source nowhere assumption A9 when Zone(?z) then Zone(?z)')
    assert [(d.target, d.kind) for d in check_links(broken, ledger)] == \
        [("nowhere", "passage"), ("A9", "assumption")]


def test_refute_and_dependents(catalog, ledger):
    refuted = ledger.refute("A4")
    assert refuted.assumptions["A4"].status == "refuted"
    assert ledger.assumptions["A4"].status == "open"
    assert ledger.dependent_rules("A4", catalog) == ["R2"]
    assert ledger.dependent_rules("A1", catalog) == ["R4"]


def test_trace_report_for_stop(ontology, scene1, catalog, ledger):
    fb = infer(ontology, scene1, catalog)
    report = trace_report(fb, catalog, ledger, facts=[STOP])
    (entry,) = report.entries
    assert entry.rules == ["R2", "R3", "R4"]
    assert entry.passages == ["stvo-26-1-s1", "stvo-26-1-s1-wollen"]
    assert entry.assumptions == ["A1", "A2", "A4"]
    # closed report: only what the chain references
    assert set(report.rules) == {"R2", "R3", "R4"}
    assert set(report.docs) == {"stvo"}
    raw = raw_quotes(read("sources.nbq"))
    for pid, p in report.passages.items():
        assert p.quote.encode("utf-8") == raw[pid]


def test_trace_report_json_and_text(ontology, scene1, catalog, ledger):
    fb = infer(ontology, scene1, catalog)
    report = trace_report(fb, catalog, ledger)
    data = json.loads(report.to_json())
    assert set(data) == {"facts", "rules", "passages", "documents", "assumptions"}
    assert [f["fact"] for f in data["facts"]] == sorted(str(f) for f in fb.derived())
    stop = next(f for f in data["facts"] if f["fact"] == str(STOP))
    assert stop["derivation"]["rule"] == "R4"
    assert stop["derivation"]["bindings"]["?ego"] == "ego"
    text = report.render()
    for p in report.passages.values():
        assert f'"{p.quote}"' in text
    assert report.to_json() == trace_report(infer(ontology, scene1, catalog), catalog, ledger).to_json()


def test_trace_report_dangling(ontology, scene1, catalog):
    fb = infer(ontology, scene1, catalog)
    with pytest.raises(DanglingReference):
        trace_report(fb, catalog, Ledger(), facts=[STOP])


def test_trace_report_asserted_fact(ontology, scene1, catalog, ledger):
    fb = infer(ontology, scene1, catalog)
    report = trace_report(fb, catalog, ledger, facts=[fact("ist_in", "ego", "zoneBlau1")])
    assert report.entries[0].rules == [] and report.passages == {}
