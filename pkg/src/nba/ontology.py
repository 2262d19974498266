"""TBox and ABox model: classes, properties, disjointness, scenes and closures."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .errors import CycleDetected, OntologyError, ParseError, UnknownSymbol
from .lexer import EOF, IDENT, PUNCT, STRING, TokenStream, logical_lines
from .terms import CLASS_ASSERTION, GroundFact, Ind, Lit, parse_atom_parts

DATA_RANGES = ("bool", "int", "string")


@dataclass(frozen=True)
class ClassDecl:
    name: str
    parent: Optional[str] = None

    def __post_init__(self):
        if self.parent == self.name:
            raise OntologyError(f"class {self.name} cannot be its own parent")


@dataclass(frozen=True)
class ObjPropDecl:
    name: str
    domain: Optional[str] = None
    range: Optional[str] = None
    symmetric: bool = False


@dataclass(frozen=True)
class DataPropDecl:
    name: str
    range: str
    domain: Optional[str] = None

    def __post_init__(self):
        if self.range not in DATA_RANGES:
            raise OntologyError(f"data property {self.name}: range must be one of {DATA_RANGES}")


@dataclass(frozen=True)
class Ontology:
    """Immutable TBox.

    Name uniqueness and reference resolution are checked on construction.
    Acyclicity is checked by :func:`taxonomy_closure`, which the loader calls.
    """

    classes: tuple[ClassDecl, ...] = ()
    object_properties: tuple[ObjPropDecl, ...] = ()
    data_properties: tuple[DataPropDecl, ...] = ()
    disjoint_pairs: frozenset = frozenset()  # frozenset of 2-element frozensets

    def __post_init__(self):
        seen: set[str] = set()
        for c in self.classes:
            if c.name in seen:
                raise OntologyError(f"duplicate class {c.name}")
            seen.add(c.name)
        props: set[str] = set()
        for p in (*self.object_properties, *self.data_properties):
            if p.name in props:
                raise OntologyError(f"duplicate property {p.name}")
            if p.name in seen:
                raise OntologyError(f"{p.name} declared both as class and property")
            props.add(p.name)
        for c in self.classes:
            if c.parent is not None and c.parent not in seen:
                raise OntologyError(f"class {c.name}: undeclared parent {c.parent}")
        for p in self.object_properties:
            for ref in (p.domain, p.range):
                if ref is not None and ref not in seen:
                    raise OntologyError(f"property {p.name}: undeclared class {ref}")
        for p in self.data_properties:
            if p.domain is not None and p.domain not in seen:
                raise OntologyError(f"property {p.name}: undeclared class {p.domain}")
        for pair in self.disjoint_pairs:
            if len(pair) != 2:
                raise OntologyError(f"disjointness needs two distinct classes: {sorted(pair)}")
            for name in pair:
                if name not in seen:
                    raise OntologyError(f"disjoint: undeclared class {name}")

    @cached_property
    def class_index(self) -> dict[str, ClassDecl]:
        return {c.name: c for c in self.classes}

    @cached_property
    def objprop_index(self) -> dict[str, ObjPropDecl]:
        return {p.name: p for p in self.object_properties}

    @cached_property
    def dataprop_index(self) -> dict[str, DataPropDecl]:
        return {p.name: p for p in self.data_properties}

    @cached_property
    def ancestors(self) -> dict[str, frozenset[str]]:
        return taxonomy_closure(self)

    @cached_property
    def symmetric_properties(self) -> frozenset[str]:
        return frozenset(p.name for p in self.object_properties if p.symmetric)

    def is_class(self, name: str) -> bool:
        return name in self.class_index

    def is_property(self, name: str) -> bool:
        return name in self.objprop_index or name in self.dataprop_index

    def declares(self, name: str) -> bool:
        return self.is_class(name) or self.is_property(name)

    def vocabulary(self) -> list[str]:
        return [c.name for c in self.classes] + [p.name for p in self.object_properties] + \
            [p.name for p in self.data_properties]


def taxonomy_closure(ontology: Ontology) -> dict[str, frozenset[str]]:
    """Map every class to the set of its strict ancestors.

    Raises :class:`CycleDetected` with the classes on the cycle, in parent-link
    order starting from the first class of the cycle reached.
    """
    parent = {c.name: c.parent for c in ontology.classes}
    result: dict[str, frozenset[str]] = {}
    for start in parent:
        if start in result:
            continue
        chain: list[str] = []
        on_chain: dict[str, int] = {}
        node: Optional[str] = start
        while node is not None and node not in result:
            if node in on_chain:
                raise CycleDetected(chain[on_chain[node]:])
            on_chain[node] = len(chain)
            chain.append(node)
            node = parent.get(node)
        inherited = frozenset() if node is None else result[node] | {node}
        for name in reversed(chain):
            result[name] = inherited
            inherited = inherited | {name}
    return result


@dataclass(frozen=True)
class Scene:
    """One scene of a functional scenario (the ABox).

    ``individuals`` maps each individual to its asserted class. Symbols are not
    resolved against an ontology here; see :func:`scene_issues`.
    """

    scenario_id: str
    title: str = ""
    individuals: Mapping[str, str] = field(default_factory=dict)
    facts: tuple[GroundFact, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "individuals", dict(self.individuals))
        object.__setattr__(self, "facts", tuple(dict.fromkeys(self.facts)))

    def asserted_facts(self) -> list[GroundFact]:
        out = [GroundFact(cls, (Ind(name),)) for name, cls in self.individuals.items()]
        out.extend(self.facts)
        return list(dict.fromkeys(out))

    def replace(self, *, individuals: Mapping[str, str] | None = None,
                facts: Iterable[GroundFact] | None = None) -> "Scene":
        return Scene(self.scenario_id, self.title,
                     self.individuals if individuals is None else individuals,
                     tuple(self.facts if facts is None else facts))


def class_closure(ontology: Ontology, facts: Iterable[GroundFact],
                  strict: bool = True) -> set[GroundFact]:
    """Class-assertions implied by the class-assertions among ``facts`` (inclusive)."""
    ancestors = ontology.ancestors
    out: set[GroundFact] = set()
    for f in facts:
        if f.kind != CLASS_ASSERTION:
            continue
        if f.predicate not in ancestors:
            if strict:
                raise UnknownSymbol(f.predicate, "class")
            out.add(f)
            continue
        out.add(f)
        for anc in ancestors[f.predicate]:
            out.add(GroundFact(anc, f.args))
    return out


def membership_closure(ontology: Ontology, scene: Scene, strict: bool = True) -> set[GroundFact]:
    """All class-assertions of ``scene`` closed upward under the taxonomy.

    With ``strict=False`` undeclared classes are kept as-is instead of raising.
    """
    return class_closure(ontology, scene.asserted_facts(), strict)


def symmetric_closure(ontology: Ontology, facts: Iterable[GroundFact]) -> set[GroundFact]:
    sym = ontology.symmetric_properties
    return {GroundFact(f.predicate, (f.args[1], f.args[0]))
            for f in facts if f.predicate in sym and len(f.args) == 2}


@dataclass(frozen=True)
class Inconsistency:
    kind: str  # "DisjointnessViolation" | "BooleanContradiction"
    individual: str
    symbols: tuple[str, ...]

    def describe(self) -> str:
        if self.kind == "DisjointnessViolation":
            a, b = self.symbols
            return f"DisjointnessViolation: {self.individual} is both {a} and {b}"
        return f"BooleanContradiction: {self.symbols[0]}({self.individual}) is both true and false"


def check_consistency(ontology: Ontology, scene: Scene,
                      facts: Iterable[GroundFact]) -> list[Inconsistency]:
    """Disjointness violations and contradictory bool values, sorted.

    Class-assertions in ``facts`` are closed under the taxonomy first, so the
    check holds whether or not the caller already applied the closure.
    ``scene`` is accepted for interface symmetry; only ``facts`` are inspected.
    """
    facts = list(facts)
    members: dict[str, set[str]] = {}
    for f in class_closure(ontology, facts, strict=False):
        members.setdefault(str(f.args[0]), set()).add(f.predicate)
    found: list[Inconsistency] = []
    for pair in ontology.disjoint_pairs:
        a, b = sorted(pair)
        for ind, classes in members.items():
            if a in classes and b in classes:
                found.append(Inconsistency("DisjointnessViolation", ind, (a, b)))
    bool_props = {p.name for p in ontology.data_properties if p.range == "bool"}
    values: dict[tuple[str, str], set] = {}
    for f in facts:
        if f.predicate in bool_props and len(f.args) == 2 and isinstance(f.args[1], Lit):
            values.setdefault((str(f.args[0]), f.predicate), set()).add(f.args[1])
    for (ind, prop), vals in values.items():
        if len(vals) > 1:
            found.append(Inconsistency("BooleanContradiction", ind, (prop,)))
    return sorted(found, key=lambda i: (i.kind, i.individual, i.symbols))


@dataclass(frozen=True)
class SceneIssue:
    kind: str  # unknown-class | unknown-property | unknown-individual | arity | literal-mismatch
    symbol: str
    detail: str = ""

    @property
    def is_unknown(self) -> bool:
        return self.kind.startswith("unknown")

    def describe(self) -> str:
        return f"{self.kind} {self.symbol}" + (f": {self.detail}" if self.detail else "")


def scene_issues(ontology: Ontology, scene: Scene) -> list[SceneIssue]:
    """Every symbol in ``scene`` that does not resolve, plus mis-kinded facts."""
    issues: list[SceneIssue] = []
    for name, cls in scene.individuals.items():
        if not ontology.is_class(cls):
            issues.append(SceneIssue("unknown-class", cls, f"individual {name}"))
    for f in scene.facts:
        issues.extend(fact_issues(ontology, f, set(scene.individuals)))
    return list(dict.fromkeys(issues))


def fact_issues(ontology: Ontology, f: GroundFact, individuals: set[str]) -> list[SceneIssue]:
    issues: list[SceneIssue] = []
    where = str(f)
    if len(f.args) == 1:
        if ontology.is_property(f.predicate):
            issues.append(SceneIssue("arity", f.predicate, f"{where}: property used as class"))
        elif not ontology.is_class(f.predicate):
            issues.append(SceneIssue("unknown-class", f.predicate, where))
    else:
        if ontology.is_class(f.predicate):
            issues.append(SceneIssue("arity", f.predicate, f"{where}: class used as property"))
        elif ontology.is_property(f.predicate):
            second = f.args[1]
            if f.predicate in ontology.objprop_index and isinstance(second, Lit):
                issues.append(SceneIssue("literal-mismatch", f.predicate,
                                         f"{where}: object property with literal value"))
            dp = ontology.dataprop_index.get(f.predicate)
            if dp is not None:
                if not isinstance(second, Lit):
                    issues.append(SceneIssue("literal-mismatch", f.predicate,
                                             f"{where}: data property with individual value"))
                elif second.kind != dp.range:
                    issues.append(SceneIssue("literal-mismatch", f.predicate,
                                             f"{where}: expected {dp.range}, got {second.kind}"))
        else:
            issues.append(SceneIssue("unknown-property", f.predicate, where))
    for arg in f.args:
        if isinstance(arg, Ind) and arg.name not in individuals:
            issues.append(SceneIssue("unknown-individual", arg.name, where))
    if isinstance(f.args[0], Lit):
        issues.append(SceneIssue("literal-mismatch", f.predicate, f"{where}: literal as subject"))
    return issues


# --- loaders -----------------------------------------------------------------

def _optional_name(ts: TokenStream, keyword: str) -> Optional[str]:
    if ts.accept(IDENT, keyword):
        return ts.expect(IDENT, what="class name").value
    return None


def parse_ontology(text: str, source: str = "") -> Ontology:
    classes: list[ClassDecl] = []
    objprops: list[ObjPropDecl] = []
    dataprops: list[DataPropDecl] = []
    disjoint: set[frozenset] = set()
    for line in logical_lines(text, source):
        ts = TokenStream(line, source)
        head = ts.expect(IDENT, what="declaration keyword")
        try:
            if head.value == "class":
                name = ts.expect(IDENT, what="class name").value
                classes.append(ClassDecl(name, _optional_name(ts, "subclass_of")))
            elif head.value == "disjoint":
                a = ts.expect(IDENT, what="class name").value
                b = ts.expect(IDENT, what="class name").value
                if a == b:
                    raise OntologyError(f"class {a} cannot be disjoint with itself")
                disjoint.add(frozenset((a, b)))
            elif head.value == "objprop":
                name = ts.expect(IDENT, what="property name").value
                domain = _optional_name(ts, "domain")
                rng = _optional_name(ts, "range")
                symmetric = ts.accept(IDENT, "symmetric") is not None
                objprops.append(ObjPropDecl(name, domain, rng, symmetric))
            elif head.value == "dataprop":
                name = ts.expect(IDENT, what="property name").value
                domain = _optional_name(ts, "domain")
                ts.expect(IDENT, "range")
                tok = ts.peek
                if tok.kind != IDENT or tok.value not in DATA_RANGES:
                    ts.fail(set(DATA_RANGES))
                dataprops.append(DataPropDecl(name, ts.next().value, domain))
            else:
                raise ParseError(f"unknown declaration {head.value!r}", head.line, head.column,
                                 {"class", "disjoint", "objprop", "dataprop"}, source)
        except OntologyError as exc:
            raise OntologyError(f"{source}:{head.line}: {exc}") from exc
        ts.expect(EOF, what="end of line")
    onto = Ontology(tuple(classes), tuple(objprops), tuple(dataprops), frozenset(disjoint))
    taxonomy_closure(onto)
    return onto


def parse_scene(text: str, source: str = "") -> Scene:
    scenario_id: Optional[str] = None
    title = ""
    individuals: dict[str, str] = {}
    facts: list[GroundFact] = []
    for line in logical_lines(text, source):
        ts = TokenStream(line, source)
        head = ts.expect(IDENT, what="scene keyword")
        if head.value == "scenario":
            if scenario_id is not None:
                raise ParseError("second scenario header", head.line, head.column, source=source)
            scenario_id = ts.expect(IDENT, what="scenario id").value
            title = ts.expect(STRING, what="title").value
        elif scenario_id is None:
            raise ParseError("scene must start with a scenario header", head.line, head.column,
                             {"scenario"}, source)
        elif head.value == "individual":
            name_tok = ts.expect(IDENT, what="individual name")
            ts.expect(PUNCT, ":")
            cls = ts.expect(IDENT, what="class name").value
            if name_tok.value in individuals:
                raise ParseError(f"individual {name_tok.value} declared twice",
                                 name_tok.line, name_tok.column, source=source)
            individuals[name_tok.value] = cls
        elif head.value == "fact":
            pred, args = parse_atom_parts(ts, allow_vars=False)
            facts.append(GroundFact(pred, args))
        else:
            raise ParseError(f"unknown scene line {head.value!r}", head.line, head.column,
                             {"scenario", "individual", "fact"}, source)
        ts.expect(EOF, what="end of line")
    if scenario_id is None:
        raise ParseError("missing scenario header", 1, 1, {"scenario"}, source)
    return Scene(scenario_id, title, individuals, tuple(facts))
