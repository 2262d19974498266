"""Knowledge sources, verbatim passages, assumptions and traceability reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .engine import DerivationTree, FactBase, explain
from .errors import DanglingReference, ParseError
from .lexer import EOF, IDENT, STRING, TokenStream, logical_lines, quote
from .rules import RuleCatalog
from .terms import GroundFact

ASSUMPTION_STATUSES = ("open", "supported", "refuted")


@dataclass(frozen=True)
class SourceDoc:
    id: str
    title: str
    edition: str = ""


@dataclass(frozen=True)
class PassageRef:
    id: str
    doc: str
    locator: str
    quote: str


@dataclass(frozen=True)
class Assumption:
    id: str
    statement: str
    justification: str = ""
    status: str = "open"


@dataclass
class Ledger:
    docs: dict[str, SourceDoc] = field(default_factory=dict)
    passages: dict[str, PassageRef] = field(default_factory=dict)
    assumptions: dict[str, Assumption] = field(default_factory=dict)

    def refute(self, assumption_id: str) -> "Ledger":
        """Copy of the ledger with one assumption marked refuted."""
        a = self.assumptions[assumption_id]
        assumptions = dict(self.assumptions)
        assumptions[assumption_id] = Assumption(a.id, a.statement, a.justification, "refuted")
        return Ledger(dict(self.docs), dict(self.passages), assumptions)

    def dependent_rules(self, assumption_id: str, catalog: RuleCatalog) -> list[str]:
        return [r.id for r in catalog.rules if assumption_id in r.assumption_links]


def load_sources(text: str, source: str = "") -> Ledger:
    ledger = Ledger()
    for line in logical_lines(text, source):
        ts = TokenStream(line, source)
        head = ts.expect(IDENT, what="source keyword")
        ident = ts.expect(IDENT, what="identifier")
        if ident.value in ledger.docs or ident.value in ledger.passages or \
                ident.value in ledger.assumptions:
            raise ParseError(f"duplicate identifier {ident.value}", ident.line, ident.column,
                             source=source)
        if head.value == "source":
            title = ts.expect(STRING, what="title").value
            edition = ""
            if ts.accept(IDENT, "edition"):
                edition = ts.expect(STRING, what="edition").value
            ledger.docs[ident.value] = SourceDoc(ident.value, title, edition)
        elif head.value == "passage":
            doc = ts.expect(IDENT, what="document id").value
            locator = ts.expect(STRING, what="locator").value
            qtok = ts.expect(STRING, what="quote")
            if not qtok.value:
                raise ParseError("empty quote", qtok.line, qtok.column, source=source)
            ledger.passages[ident.value] = PassageRef(ident.value, doc, locator, qtok.value)
        elif head.value == "assumption":
            statement = ts.expect(STRING, what="statement").value
            justification, status = "", "open"
            if ts.accept(IDENT, "justification"):
                justification = ts.expect(STRING, what="justification").value
            if ts.accept(IDENT, "status"):
                tok = ts.peek
                if tok.kind != IDENT or tok.value not in ASSUMPTION_STATUSES:
                    ts.fail(set(ASSUMPTION_STATUSES))
                status = ts.next().value
            ledger.assumptions[ident.value] = Assumption(ident.value, statement,
                                                         justification, status)
        else:
            raise ParseError(f"unknown source line {head.value!r}", head.line, head.column,
                             {"source", "passage", "assumption"}, source)
        ts.expect(EOF, what="end of line")
    for p in ledger.passages.values():
        if p.doc not in ledger.docs:
            raise DanglingReference(f"passage {p.id}", p.doc, "document")
    return ledger


def check_links(catalog: RuleCatalog, ledger: Ledger) -> list[DanglingReference]:
    out = []
    for r in catalog.rules:
        for pid in r.source_links:
            if pid not in ledger.passages:
                out.append(DanglingReference(f"rule {r.id}", pid, "passage"))
        for aid in r.assumption_links:
            if aid not in ledger.assumptions:
                out.append(DanglingReference(f"rule {r.id}", aid, "assumption"))
    return out


# --- trace reports -------------------------------------------------------------------

@dataclass
class TraceEntry:
    fact: GroundFact
    origin: str
    tree: DerivationTree
    rules: list[str]  # catalog rule ids on the derivation tree, sorted
    passages: list[str]
    assumptions: list[str]


@dataclass
class TraceReport:
    entries: list[TraceEntry]
    rules: dict  # rule id -> Rule
    passages: dict[str, PassageRef]
    docs: dict[str, SourceDoc]
    assumptions: dict[str, Assumption]

    def to_dict(self) -> dict:
        """JSON-compatible tree. Field names are documented in the README."""
        return {
            "facts": [
                {"fact": str(e.fact), "origin": e.origin, "derivation": _tree_dict(e.tree),
                 "rules": e.rules, "passages": e.passages, "assumptions": e.assumptions}
                for e in self.entries
            ],
            "rules": {rid: {"gloss": r.gloss, "sources": list(r.source_links),
                            "assumptions": list(r.assumption_links)}
                      for rid, r in self.rules.items()},
            "passages": {pid: {"doc": p.doc, "locator": p.locator, "quote": p.quote}
                         for pid, p in self.passages.items()},
            "documents": {did: {"title": d.title, "edition": d.edition}
                          for did, d in self.docs.items()},
            "assumptions": {aid: {"statement": a.statement, "justification": a.justification,
                                  "status": a.status}
                            for aid, a in self.assumptions.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def render(self) -> str:
        out = ["# trace report", "", "## facts"]
        if not self.entries:
            out.append("(no derived facts)")
        for e in self.entries:
            out.append("")
            out.append(e.tree.render())
            if e.rules:
                out.append(f"  rules: {', '.join(e.rules)}")
                out.append(f"  passages: {', '.join(e.passages) or '-'}")
                out.append(f"  assumptions: {', '.join(e.assumptions) or '-'}")
        out += ["", "## rules"]
        for rid, r in self.rules.items():
            out.append(f"{rid} {quote(r.gloss)}")
            out.append(f"  sources: {', '.join(r.source_links) or '-'}")
            out.append(f"  assumptions: {', '.join(r.assumption_links) or '-'}")
        out += ["", "## passages"]
        for pid, p in self.passages.items():
            out.append(f"{pid} [{p.doc}] {p.locator}")
            out.append(f'  "{p.quote}"')
        out += ["", "## documents"]
        for did, d in self.docs.items():
            out.append(f"{did} {d.title}" + (f" ({d.edition})" if d.edition else ""))
        out += ["", "## assumptions"]
        for aid, a in self.assumptions.items():
            out.append(f"{aid} [{a.status}] {a.statement}")
            if a.justification:
                out.append(f"  justification: {a.justification}")
        return "\n".join(out) + "\n"


def _tree_dict(tree: DerivationTree) -> dict:
    node = {"fact": str(tree.fact), "origin": tree.origin}
    if tree.trace is not None:
        node["rule"] = tree.trace.rule_id
        node["bindings"] = {v: str(val) for v, val in tree.trace.bindings}
        node["premises"] = [_tree_dict(c) for c in tree.children]
    return node


def trace_report(factbase: FactBase, catalog: RuleCatalog, ledger: Ledger,
                 facts: Optional[Iterable[GroundFact]] = None) -> TraceReport:
    """Trace derived facts (or the given ``facts``) back to passages and documents.

    Raises :class:`DanglingReference` when a rule on a chain links to a passage
    or assumption the ledger does not define.
    """
    exec_to_rule = {e.id: e.rule_id for e in catalog.executable()}
    selected = sorted(factbase.derived() if facts is None else facts, key=str)
    entries: list[TraceEntry] = []
    used_rules: set[str] = set()
    for f in selected:
        tree = explain(factbase, f)
        rule_ids = sorted({exec_to_rule.get(x, x) for x in tree.rule_ids()})
        passages: set[str] = set()
        assumptions: set[str] = set()
        for rid in rule_ids:
            rule = catalog.get(rid)
            for pid in rule.source_links:
                if pid not in ledger.passages:
                    raise DanglingReference(f"rule {rid}", pid, "passage")
                passages.add(pid)
            for aid in rule.assumption_links:
                if aid not in ledger.assumptions:
                    raise DanglingReference(f"rule {rid}", aid, "assumption")
                assumptions.add(aid)
        used_rules.update(rule_ids)
        entries.append(TraceEntry(f, factbase.facts[f], tree, rule_ids,
                                  sorted(passages), sorted(assumptions)))
    rules = {rid: catalog.get(rid) for rid in sorted(used_rules)}
    passage_ids = sorted({p for e in entries for p in e.passages})
    passages = {pid: ledger.passages[pid] for pid in passage_ids}
    docs = {did: ledger.docs[did] for did in sorted({p.doc for p in passages.values()})}
    assumption_ids = sorted({a for e in entries for a in e.assumptions})
    assumptions = {aid: ledger.assumptions[aid] for aid in assumption_ids}
    return TraceReport(entries, rules, passages, docs, assumptions)
