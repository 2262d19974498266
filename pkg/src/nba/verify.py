"""Scenario verification and failure classification.

Failure classes map to the three revision loops of the method:

* ``CONCEPT_GAP`` (loop II): a scene, expectation or rule uses a symbol the
  ontology does not declare, or a scene fact is mis-kinded.
* ``RULE_FAULT`` (loop I): the fixpoint is inconsistent, misses an expected
  fact, contains a forbidden one, or a rule is mis-kinded or rests on a
  refuted assumption.
* ``SOURCE_GAP`` (loop III): only ever set by a ``flag source_gap`` line in the
  expectation file.

Precedence is CONCEPT_GAP > RULE_FAULT > SOURCE_GAP.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .engine import DerivationTree, FactBase, explain, infer
from .errors import DuplicateScenarioId, ParseError, UnknownScenario
from .lexer import EOF, IDENT, STRING, TokenStream, logical_lines, quote
from .ontology import Ontology, Scene, fact_issues, scene_issues
from .provenance import Ledger
from .rules import RuleCatalog, validate_against_ontology
from .terms import GroundFact, parse_atom_parts

PASS = "PASS"
FAIL = "FAIL"
CONCEPT_GAP = "CONCEPT_GAP"
RULE_FAULT = "RULE_FAULT"
SOURCE_GAP = "SOURCE_GAP"

_CONCEPT_KINDS = ("UnknownSymbol", "SceneMismatch")
_RULE_KINDS = ("Inconsistency", "MissingExpected", "ForbiddenDerived", "KindMismatch",
               "RefutedAssumption")
_KIND_ORDER = {k: i for i, k in enumerate(_CONCEPT_KINDS + _RULE_KINDS + ("ManualFlag",))}


@dataclass(frozen=True)
class Expectation:
    scenario_id: str
    must_derive: tuple[GroundFact, ...] = ()
    must_not_derive: tuple[GroundFact, ...] = ()
    note: str = ""
    source_gap_flags: tuple[str, ...] = ()


def parse_expectations(text: str, source: str = "") -> list[Expectation]:
    blocks: list[dict] = []
    for line in logical_lines(text, source):
        ts = TokenStream(line, source)
        head = ts.expect(IDENT, what="expectation keyword")
        if head.value == "expect":
            sid = ts.expect(IDENT, what="scenario id")
            if any(b["id"] == sid.value for b in blocks):
                raise ParseError(f"second expectation block for {sid.value}", sid.line,
                                 sid.column, source=source)
            blocks.append({"id": sid.value, "must": [], "forbid": [], "note": "", "flags": []})
        elif not blocks:
            raise ParseError("expectation lines must follow an expect header", head.line,
                             head.column, {"expect"}, source)
        elif head.value in ("must", "forbid"):
            pred, args = parse_atom_parts(ts, allow_vars=False)
            f = GroundFact(pred, args)
            other = "forbid" if head.value == "must" else "must"
            if f in blocks[-1][other]:
                raise ParseError(f"{f} is both required and forbidden", head.line, head.column,
                                 source=source)
            blocks[-1][head.value].append(f)
        elif head.value == "note":
            blocks[-1]["note"] = ts.expect(STRING, what="note").value
        elif head.value == "flag":
            ts.expect(IDENT, "source_gap")
            blocks[-1]["flags"].append(ts.expect(STRING, what="note").value)
        else:
            raise ParseError(f"unknown expectation line {head.value!r}", head.line, head.column,
                             {"expect", "must", "forbid", "note", "flag"}, source)
        ts.expect(EOF, what="end of line")
    return [Expectation(b["id"], tuple(dict.fromkeys(b["must"])), tuple(dict.fromkeys(b["forbid"])),
                        b["note"], tuple(b["flags"])) for b in blocks]


@dataclass(frozen=True)
class Finding:
    kind: str
    subject: str
    detail: str = ""
    tree: Optional[DerivationTree] = field(default=None, compare=False)

    def describe(self) -> str:
        return f"{self.kind}({self.subject})" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class Verdict:
    scenario_id: str
    status: str
    failure_class: Optional[str] = None
    evidence: tuple[Finding, ...] = ()
    factbase: Optional[FactBase] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if (self.status == FAIL) != (self.failure_class is not None):
            raise ValueError("FAIL verdicts carry a failure class and PASS verdicts none")
        if self.status == FAIL and not self.evidence:
            raise ValueError("FAIL verdicts need evidence")

    def to_dict(self) -> dict:
        return {"scenario": self.scenario_id, "status": self.status,
                "failure_class": self.failure_class,
                "evidence": [{"kind": f.kind, "subject": f.subject, "detail": f.detail}
                             for f in self.evidence]}


def classify(evidence: Sequence[Finding]) -> Optional[str]:
    kinds = {f.kind for f in evidence}
    if kinds & set(_CONCEPT_KINDS):
        return CONCEPT_GAP
    if kinds & set(_RULE_KINDS):
        return RULE_FAULT
    if "ManualFlag" in kinds:
        return SOURCE_GAP
    return None


def verify_scenario(ontology: Ontology, catalog: RuleCatalog, scene: Scene,
                    expectation: Expectation, ledger: Optional[Ledger] = None) -> Verdict:
    evidence: list[Finding] = []
    for issue in scene_issues(ontology, scene):
        kind = "UnknownSymbol" if issue.is_unknown else "SceneMismatch"
        evidence.append(Finding(kind, issue.symbol, issue.describe()))
    for issue in validate_against_ontology(catalog, ontology):
        kind = "UnknownSymbol" if issue.kind == "UnknownConcept" else "KindMismatch"
        evidence.append(Finding(kind, issue.symbol, issue.describe()))
    individuals = set(scene.individuals)
    for f in (*expectation.must_derive, *expectation.must_not_derive):
        for issue in fact_issues(ontology, f, individuals):
            if issue.is_unknown:
                evidence.append(Finding("UnknownSymbol", issue.symbol,
                                        f"expectation {issue.describe()}"))

    fb = infer(ontology, scene, catalog, strict=False, check=False)
    for inc in fb.inconsistencies:
        evidence.append(Finding("Inconsistency", inc.individual, inc.describe()))
    for f in expectation.must_derive:
        if f not in fb:
            evidence.append(Finding("MissingExpected", str(f)))
    for f in expectation.must_not_derive:
        if f in fb:
            evidence.append(Finding("ForbiddenDerived", str(f), fb.origin(f), explain(fb, f)))
    if ledger is not None:
        evidence.extend(_refuted_rules_fired(fb, catalog, ledger))
    for note in expectation.source_gap_flags:
        evidence.append(Finding("ManualFlag", "source_gap", note))

    evidence = sorted(dict.fromkeys(evidence),
                      key=lambda f: (_KIND_ORDER.get(f.kind, 99), f.subject, f.detail))
    failure = classify(evidence)
    return Verdict(scene.scenario_id, PASS if failure is None else FAIL, failure,
                   tuple(evidence), fb)


def _refuted_rules_fired(fb: FactBase, catalog: RuleCatalog, ledger: Ledger) -> list[Finding]:
    exec_to_rule = {e.id: e.rule_id for e in catalog.executable()}
    fired = sorted({exec_to_rule[t.rule_id] for ts in fb.traces.values() for t in ts
                    if t.rule_id in exec_to_rule})
    out = []
    for rid in fired:
        for aid in catalog.get(rid).assumption_links:
            a = ledger.assumptions.get(aid)
            if a is not None and a.status == "refuted":
                out.append(Finding("RefutedAssumption", rid, f"rule fired on refuted assumption {aid}"))
    return out


@dataclass
class CatalogReport:
    verdicts: list[Verdict]
    unchecked: dict[str, list[str]]  # scenario id -> derived facts, scenarios without expectation

    @property
    def summary(self) -> dict[str, int]:
        counts = Counter(v.failure_class or PASS for v in self.verdicts)
        order = (PASS, CONCEPT_GAP, RULE_FAULT, SOURCE_GAP)
        return {k: counts[k] for k in order if counts[k]}

    @property
    def ok(self) -> bool:
        return all(v.status == PASS for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"verdicts": [v.to_dict() for v in self.verdicts],
                "unchecked": self.unchecked,
                "summary": self.summary, "ok": self.ok}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def render(self) -> str:
        rows = [("scenario", "status", "class", "evidence")]
        for v in self.verdicts:
            rows.append((v.scenario_id, v.status, v.failure_class or "-",
                         "; ".join(f.describe() for f in v.evidence) or "-"))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = ["  ".join(r[i].ljust(widths[i]) for i in range(3)) + "  " + r[3] for r in rows]
        for sid, derived in self.unchecked.items():
            lines.append(f"{sid}: no expectation; derived {len(derived)} fact(s)")
        summary = " ".join(f"{k}={n}" for k, n in self.summary.items()) or "(no verdicts)"
        lines.append(f"summary: {summary}")
        return "\n".join(line.rstrip() for line in lines) + "\n"


def verify_catalog(ontology: Ontology, catalog: RuleCatalog, scenarios: Sequence[Scene],
                   expectations: Sequence[Expectation], ledger: Optional[Ledger] = None,
                   jobs: int = 1) -> CatalogReport:
    """Verify every scenario that has an expectation; results ordered by scenario id."""
    scenes: dict[str, Scene] = {}
    for s in scenarios:
        if s.scenario_id in scenes:
            raise DuplicateScenarioId(s.scenario_id)
        scenes[s.scenario_id] = s
    expected: dict[str, Expectation] = {}
    for e in expectations:
        if e.scenario_id in expected:
            raise DuplicateScenarioId(e.scenario_id)
        if e.scenario_id not in scenes:
            raise UnknownScenario(e.scenario_id)
        expected[e.scenario_id] = e

    ids = sorted(scenes)
    checked = [sid for sid in ids if sid in expected]

    def run(sid: str) -> Verdict:
        return verify_scenario(ontology, catalog, scenes[sid], expected[sid], ledger)

    if jobs > 1 and len(checked) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(run, checked))
    else:
        verdicts = [run(sid) for sid in checked]

    unchecked = {}
    for sid in ids:
        if sid not in expected:
            fb = infer(ontology, scenes[sid], catalog, strict=False, check=False)
            unchecked[sid] = sorted(str(f) for f in fb.derived())
    return CatalogReport(verdicts, unchecked)


def format_expectations(expectations: Sequence[Expectation]) -> str:
    out = []
    for e in expectations:
        out.append(f"expect {e.scenario_id}")
        if e.note:
            out.append(f"  note {quote(e.note)}")
        out += [f"  must {f}" for f in e.must_derive]
        out += [f"  forbid {f}" for f in e.must_not_derive]
        out += [f"  flag source_gap {quote(n)}" for n in e.source_gap_flags]
    return "\n".join(out) + ("\n" if out else "")
