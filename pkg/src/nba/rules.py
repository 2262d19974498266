"""Horn-rule language: AST, recursive-descent parser, printer, validation and lint.

A rule file is a sequence of blocks::

    rule R1 "Wenn Zeichen 293 und Zeichen 350 dann gilt Fussgaengerueberweg"
      source vwv-26-iv
      assumption A3
      when Fussgaengerueberweg(?fuueb)
         & sachverhalt_gilt(?streif, true)
      then sachverhalt_gilt(?fuueb, true)

Clauses appear in that order. ``source`` and ``assumption`` may repeat.
A block may say ``informal`` instead of ``when``/``then``; such a rule carries
only its gloss and provenance and is never executed.
Newlines are insignificant inside a block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import UnsafeVariable
from .lexer import EOF, IDENT, PUNCT, STRING, TokenStream, quote, tokenize
from .ontology import Ontology, Scene
from .terms import Ind, Lit, Term, Var, parse_atom_parts

KEYWORDS = frozenset({"rule", "source", "assumption", "when", "then", "informal"})


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]
    kind: str = ""  # class | objprop | dataprop, inferred from syntax when empty

    def __post_init__(self):
        if not self.kind:
            if len(self.args) == 1:
                kind = "class"
            elif isinstance(self.args[1], Lit):
                kind = "dataprop"
            else:
                kind = "objprop"
            object.__setattr__(self, "kind", kind)

    def variables(self) -> list[Var]:
        return [a for a in self.args if isinstance(a, Var)]

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Rule:
    id: str
    gloss: str
    source_links: tuple[str, ...] = ()
    assumption_links: tuple[str, ...] = ()
    body: tuple[Atom, ...] = ()
    head: tuple[Atom, ...] = ()
    informal: bool = False
    line: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.informal and (not self.body or not self.head):
            raise ValueError(f"rule {self.id}: formal rules need a body and a head")

    def unsafe_variables(self) -> list[Var]:
        bound = {v for a in self.body for v in a.variables()}
        return list(dict.fromkeys(v for a in self.head for v in a.variables() if v not in bound))


@dataclass(frozen=True)
class ExecRule:
    """Single-head rule as executed by the engine."""

    id: str
    rule_id: str
    body: tuple[Atom, ...]
    head: Atom


@dataclass(frozen=True)
class RuleCatalog:
    rules: tuple[Rule, ...] = ()

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def formal_rules(self) -> list[Rule]:
        return [r for r in self.rules if not r.informal]

    def get(self, rule_id: str) -> Optional[Rule]:
        for r in self.rules:
            if r.id == rule_id:
                return r
        return None

    def without(self, rule_id: str) -> "RuleCatalog":
        return RuleCatalog(tuple(r for r in self.rules if r.id != rule_id))

    def executable(self) -> list[ExecRule]:
        """Formal rules split into one rule per head atom (``R5#1``, ``R5#2``, ...)."""
        out = []
        for r in self.formal_rules:
            if len(r.head) == 1:
                out.append(ExecRule(r.id, r.id, r.body, r.head[0]))
            else:
                for i, h in enumerate(r.head, 1):
                    out.append(ExecRule(f"{r.id}#{i}", r.id, r.body, h))
        return out


# --- parsing -------------------------------------------------------------------

def _parse_conjunction(ts: TokenStream) -> tuple[Atom, ...]:
    atoms = [_parse_atom(ts)]
    while ts.accept(PUNCT, "&"):
        atoms.append(_parse_atom(ts))
    return tuple(atoms)


def _parse_atom(ts: TokenStream) -> Atom:
    tok = ts.peek
    if tok.kind == IDENT and tok.value in KEYWORDS:
        ts.fail({"predicate"})
    pred, args = parse_atom_parts(ts)
    return Atom(pred, args)


def _parse_rule(ts: TokenStream) -> Rule:
    start = ts.expect(IDENT, "rule")
    rid_tok = ts.expect(IDENT, what="rule id")
    gloss = ts.expect(STRING, what="gloss").value
    sources, assumptions = [], []
    while ts.accept(IDENT, "source"):
        sources.append(ts.expect(IDENT, what="passage id").value)
    while ts.accept(IDENT, "assumption"):
        assumptions.append(ts.expect(IDENT, what="assumption id").value)
    if ts.accept(IDENT, "informal"):
        return Rule(rid_tok.value, gloss, tuple(sources), tuple(assumptions),
                    informal=True, line=start.line)
    if not ts.at(IDENT, "when"):
        expected = {"when", "informal", "assumption"}
        if not assumptions:
            expected.add("source")
        ts.fail(expected)
    ts.next()
    body = _parse_conjunction(ts)
    then_tok = ts.expect(IDENT, "then")
    head = _parse_conjunction(ts)
    rule = Rule(rid_tok.value, gloss, tuple(sources), tuple(assumptions), body, head,
                line=start.line)
    unsafe = rule.unsafe_variables()
    if unsafe:
        raise UnsafeVariable(rule.id, unsafe[0].name, then_tok.line, then_tok.column, ts.source)
    return rule


def parse_rules(text: str, source: str = "") -> RuleCatalog:
    """Parse a rule file. Raises :class:`ParseError` or :class:`UnsafeVariable`."""
    ts = TokenStream(tokenize(text, source), source, skip_newlines=True)
    rules = []
    while not ts.at(EOF):
        if not ts.at(IDENT, "rule"):
            ts.fail({"rule", "end of input"} if not rules else
                    {"rule", "&", "end of input"})
        rules.append(_parse_rule(ts))
    return RuleCatalog(tuple(rules))


def format_rule(rule: Rule) -> str:
    lines = [f"rule {rule.id} {quote(rule.gloss)}"]
    lines += [f"  source {s}" for s in rule.source_links]
    lines += [f"  assumption {a}" for a in rule.assumption_links]
    if rule.informal:
        lines.append("  informal")
        return "\n".join(lines)
    for keyword, atoms in (("when", rule.body), ("then", rule.head)):
        lines.append(f"  {keyword} {atoms[0]}")
        lines += [f"     & {a}" for a in atoms[1:]]
    return "\n".join(lines)


def format_rules(catalog: RuleCatalog) -> str:
    """Canonical text; ``parse_rules(format_rules(c)) == c``."""
    return "".join(format_rule(r) + "\n\n" for r in catalog.rules).rstrip("\n") + \
        ("\n" if catalog.rules else "")


# --- validation against the ontology -------------------------------------------

@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # UnknownConcept | KindMismatch
    rule_id: str
    symbol: str
    atom: str
    detail: str = ""

    def describe(self) -> str:
        text = f"{self.kind}({self.symbol}) in rule {self.rule_id}: {self.atom}"
        return text + (f" - {self.detail}" if self.detail else "")


def atom_issue(atom: Atom, ontology: Ontology, rule_id: str) -> Optional[ValidationIssue]:
    """The validation problem of a single atom, or ``None`` when it resolves."""
    pred = atom.predicate

    def mismatch(detail: str) -> ValidationIssue:
        return ValidationIssue("KindMismatch", rule_id, pred, str(atom), detail)

    if len(atom.args) == 1:
        if ontology.is_class(pred):
            return None
        if ontology.is_property(pred):
            return mismatch("class atom names a property")
        return ValidationIssue("UnknownConcept", rule_id, pred, str(atom))
    if ontology.is_class(pred):
        return mismatch("property atom names a class")
    subject, value = atom.args
    if isinstance(subject, Lit):
        if ontology.is_property(pred):
            return mismatch("literal in subject position")
    if pred in ontology.objprop_index:
        if isinstance(value, Lit):
            return mismatch("object property with literal value")
        return None
    dp = ontology.dataprop_index.get(pred)
    if dp is not None:
        if isinstance(value, Ind):
            return mismatch("data property with individual value")
        if isinstance(value, Lit) and value.kind != dp.range:
            return mismatch(f"expected {dp.range} literal, got {value.kind}")
        return None
    return ValidationIssue("UnknownConcept", rule_id, pred, str(atom))


def validate_against_ontology(catalog: RuleCatalog, ontology: Ontology) -> list[ValidationIssue]:
    """Issues for every atom whose predicate is undeclared or mis-kinded.

    Variables in the value position of a data-property atom are fine: they bind
    literals at match time.
    """
    issues = []
    for rule in catalog.formal_rules:
        for atom in (*rule.body, *rule.head):
            issue = atom_issue(atom, ontology, rule.id)
            if issue is not None:
                issues.append(issue)
    return issues


# --- lint ----------------------------------------------------------------------

BLOCKING = "error"


@dataclass(frozen=True)
class LintFinding:
    kind: str  # DuplicateId | Redundant | DeadVocabulary | MissingProvenance | RefutedAssumption | DanglingReference
    severity: str  # error | warning | info
    subject: str
    detail: str = ""

    def describe(self) -> str:
        return f"[{self.severity}] {self.kind}({self.subject})" + (f": {self.detail}" if self.detail else "")


def lint_catalog(catalog: RuleCatalog, ontology: Ontology, scenes: Sequence[Scene] = (),
                 ledger=None) -> list[LintFinding]:
    """Catalog hygiene findings.

    A class counts as used when it or any subclass is mentioned by a rule or a
    scene, since membership closure makes ancestors reachable. When a ledger is
    given, links to missing passages/assumptions and links to refuted
    assumptions are reported as well.
    """
    findings: list[LintFinding] = []
    seen: dict[str, int] = {}
    for r in catalog.rules:
        seen[r.id] = seen.get(r.id, 0) + 1
    for rid, n in seen.items():
        if n > 1:
            findings.append(LintFinding("DuplicateId", "error", rid, f"{n} rules share this id"))

    shapes: dict[tuple, str] = {}
    for r in catalog.formal_rules:
        key = (frozenset(r.body), frozenset(r.head))
        if key in shapes:
            findings.append(LintFinding("Redundant", "warning", r.id,
                                        f"same body and head as {shapes[key]}"))
        else:
            shapes[key] = r.id

    for r in catalog.rules:
        if not r.source_links:
            findings.append(LintFinding("MissingProvenance", "error", r.id, "no source line"))

    if ledger is not None:
        for r in catalog.rules:
            for pid in r.source_links:
                if pid not in ledger.passages:
                    findings.append(LintFinding("DanglingReference", "error", r.id,
                                                f"unknown passage {pid}"))
            for aid in r.assumption_links:
                a = ledger.assumptions.get(aid)
                if a is None:
                    findings.append(LintFinding("DanglingReference", "error", r.id,
                                                f"unknown assumption {aid}"))
                elif a.status == "refuted" and not r.informal:
                    findings.append(LintFinding("RefutedAssumption", "error", r.id,
                                                f"depends on refuted assumption {aid}"))

    used = _used_symbols(catalog, scenes)
    ancestors = ontology.ancestors
    live_classes = set()
    for name in used:
        if name in ancestors:
            live_classes.add(name)
            live_classes |= ancestors[name]
    for name in ontology.vocabulary():
        if name not in used and name not in live_classes:
            findings.append(LintFinding("DeadVocabulary", "info", name,
                                        "used by no rule and no scene"))
    return findings


def _used_symbols(catalog: RuleCatalog, scenes: Iterable[Scene]) -> set[str]:
    used = {a.predicate for r in catalog.formal_rules for a in (*r.body, *r.head)}
    for s in scenes:
        used.update(s.individuals.values())
        used.update(f.predicate for f in s.facts)
    return used


def blocking(findings: Iterable[LintFinding]) -> list[LintFinding]:
    return [f for f in findings if f.severity == BLOCKING]
