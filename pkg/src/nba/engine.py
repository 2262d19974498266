"""Forward chaining to the least fixpoint with derivation traces.

Both evaluators share the same round structure: a round fires every rule
instantiation available from the facts known at the start of the round, then
closes the new facts under the taxonomy and symmetric properties. A fact's
recorded trace is the smallest ``(rule position, bindings)`` instantiation of
the first round that produced it, so both evaluators keep the same first trace.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import InconsistentState, UnknownFact, UnknownSymbol
from .ontology import Inconsistency, Ontology, Scene, check_consistency
from .terms import CLASS_ASSERTION, GroundFact, Ind, Var
from .rules import Atom, ExecRule, RuleCatalog

ASSERTED = "asserted"
CLOSURE = "closure"
DERIVED = "derived"

SUBCLASS = "subclass"
SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class DerivationTrace:
    fact: GroundFact
    rule_id: str  # executable rule id, or "subclass"/"symmetric" for closure steps
    bindings: tuple[tuple[str, object], ...]  # sorted (variable, Ind | Lit) pairs
    premises: tuple[GroundFact, ...]

    @property
    def is_closure(self) -> bool:
        return self.rule_id in (SUBCLASS, SYMMETRIC)

    def binding_map(self) -> dict[str, object]:
        return dict(self.bindings)

    def format_bindings(self) -> str:
        return "{" + ", ".join(f"{v}={val}" for v, val in self.bindings) + "}"


@dataclass
class FactBase:
    facts: dict[GroundFact, str] = field(default_factory=dict)  # fact -> origin, insertion ordered
    traces: dict[GroundFact, list[DerivationTrace]] = field(default_factory=dict)
    rounds: int = 0
    inconsistencies: list[Inconsistency] = field(default_factory=list)

    def __contains__(self, f: GroundFact) -> bool:
        return f in self.facts

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self) -> Iterator[GroundFact]:
        return iter(self.facts)

    @property
    def fact_set(self) -> frozenset[GroundFact]:
        return frozenset(self.facts)

    def origin(self, f: GroundFact) -> str:
        return self.facts[f]

    def with_origin(self, origin: str) -> set[GroundFact]:
        return {f for f, o in self.facts.items() if o == origin}

    def derived(self) -> set[GroundFact]:
        return self.with_origin(DERIVED)

    def trace(self, f: GroundFact) -> Optional[DerivationTrace]:
        ts = self.traces.get(f)
        return ts[0] if ts else None

    def dump(self) -> str:
        """One line per fact, lexicographically sorted."""
        lines = []
        for f, origin in self.facts.items():
            line = f"{origin} {f}"
            t = self.trace(f)
            if origin == DERIVED and t is not None:
                line += f" rule={t.rule_id} bindings={t.format_bindings()}"
            lines.append(line)
        return "".join(line + "\n" for line in sorted(lines))

    def dump_traces(self) -> str:
        lines = []
        for f in sorted(self.traces, key=str):
            for t in self.traces[f]:
                premises = "; ".join(str(p) for p in t.premises)
                lines.append(f"{f} <= {t.rule_id} {t.format_bindings()} [{premises}]")
        return "".join(line + "\n" for line in lines)


# --- matching --------------------------------------------------------------------

class _Index:
    def __init__(self):
        self.by_pred: dict[str, list[GroundFact]] = defaultdict(list)
        self.by_arg: dict[tuple[str, int, object], list[GroundFact]] = defaultdict(list)

    def add(self, f: GroundFact) -> None:
        self.by_pred[f.predicate].append(f)
        for i, a in enumerate(f.args):
            self.by_arg[(f.predicate, i, a)].append(f)

    def candidates(self, atom: Atom, binding: dict) -> list[GroundFact]:
        for i, t in enumerate(atom.args):
            value = binding.get(t) if isinstance(t, Var) else t
            if value is not None:
                return self.by_arg.get((atom.predicate, i, value), [])
        return self.by_pred.get(atom.predicate, [])


def _unify(atom: Atom, f: GroundFact, binding: dict) -> Optional[dict]:
    if atom.predicate != f.predicate or len(atom.args) != len(f.args):
        return None
    out = binding
    for t, a in zip(atom.args, f.args):
        if isinstance(t, Var):
            bound = out.get(t)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[t] = a
            elif bound != a:
                return None
        elif t != a:
            return None
    return out


def _join(atoms: list[Atom], index: _Index, binding: dict) -> Iterator[dict]:
    if not atoms:
        yield binding
        return
    first, rest = atoms[0], atoms[1:]
    for f in list(index.candidates(first, binding)):
        b = _unify(first, f, binding)
        if b is not None:
            yield from _join(rest, index, b)


def substitute(atom: Atom, binding: dict) -> GroundFact:
    return GroundFact(atom.predicate, tuple(binding[t] if isinstance(t, Var) else t
                                           for t in atom.args))


def _binding_key(binding: dict) -> tuple:
    return tuple(sorted((v.name, _term_key(val)) for v, val in binding.items()))


def _term_key(t) -> tuple:
    return (0, t.name) if isinstance(t, Ind) else (1, t.kind, str(t))


def _instantiate(rule: ExecRule, binding: dict) -> tuple[GroundFact, DerivationTrace]:
    head = substitute(rule.head, binding)
    bindings = tuple(sorted(((v.name, val) for v, val in binding.items()), key=lambda p: p[0]))
    premises = tuple(substitute(a, binding) for a in rule.body)
    return head, DerivationTrace(head, rule.id, bindings, premises)


# --- evaluation ------------------------------------------------------------------

class _Session:
    def __init__(self, ontology: Ontology, scene: Scene, catalog: RuleCatalog,
                 all_traces: bool, strict: bool):
        self.ontology = ontology
        self.rules = catalog.executable()
        self.all_traces = all_traces
        self.strict = strict
        self.fb = FactBase()
        self.index = _Index()
        self.seen_instances: set[tuple] = set()

    def add(self, f: GroundFact, origin: str, trace: Optional[DerivationTrace]) -> bool:
        if f in self.fb.facts:
            if self.all_traces and trace is not None and self.fb.facts[f] != ASSERTED:
                known = self.fb.traces.setdefault(f, [])
                if trace not in known:
                    known.append(trace)
            return False
        self.fb.facts[f] = origin
        if trace is not None:
            self.fb.traces[f] = [trace]
        self.index.add(f)
        return True

    def close(self, new: Iterable[GroundFact]) -> list[GroundFact]:
        """Taxonomy and symmetric closure of ``new``; returns the facts added."""
        added = []
        ancestors = self.ontology.ancestors
        sym = self.ontology.symmetric_properties
        for f in list(new):
            if f.kind == CLASS_ASSERTION:
                if f.predicate not in ancestors:
                    if self.strict:
                        raise UnknownSymbol(f.predicate, "class")
                    continue
                for anc in sorted(ancestors[f.predicate]):
                    g = GroundFact(anc, f.args)
                    if self.add(g, CLOSURE, DerivationTrace(g, SUBCLASS, (), (f,))):
                        added.append(g)
            elif f.predicate in sym:
                g = GroundFact(f.predicate, (f.args[1], f.args[0]))
                if self.add(g, CLOSURE, DerivationTrace(g, SYMMETRIC, (), (f,))):
                    added.append(g)
        return added

    def seed(self, scene: Scene) -> list[GroundFact]:
        asserted = scene.asserted_facts()
        for f in asserted:
            self.add(f, ASSERTED, None)
        return asserted + self.close(asserted)

    def fire_round(self, delta: Optional[set[GroundFact]]) -> list[GroundFact]:
        """Fire all instantiations; with ``delta`` only those touching it (semi-naive)."""
        candidates = []
        for pos, rule in enumerate(self.rules):
            body = list(rule.body)
            if delta is None:
                matches = _join(body, self.index, {})
            else:
                matches = self._delta_matches(body, delta)
            for b in matches:
                key = (pos, _binding_key(b))
                if key in self.seen_instances:
                    continue
                self.seen_instances.add(key)
                candidates.append((key, rule, b))
        candidates.sort(key=lambda c: c[0])
        new = []
        for _, rule, b in candidates:
            head, trace = _instantiate(rule, b)
            if self.add(head, DERIVED, trace):
                new.append(head)
        return new

    def _delta_matches(self, body: list[Atom], delta: set[GroundFact]) -> Iterator[dict]:
        by_pred = defaultdict(list)
        for f in delta:
            by_pred[f.predicate].append(f)
        for i, atom in enumerate(body):
            for f in by_pred.get(atom.predicate, ()):
                b = _unify(atom, f, {})
                if b is not None:
                    yield from _join(body[:i] + body[i + 1:], self.index, b)

    def run(self, scene: Scene, seminaive: bool) -> FactBase:
        delta = set(self.seed(scene))
        while True:
            new = self.fire_round(delta if seminaive else None)
            if not new:
                break
            self.fb.rounds += 1
            delta = set(new) | set(self.close(new))
        return self.fb


def _evaluate(ontology: Ontology, scene: Scene, catalog: RuleCatalog, *, seminaive: bool,
              all_traces: bool, strict: bool, check: bool) -> FactBase:
    session = _Session(ontology, scene, catalog, all_traces, strict)
    fb = session.run(scene, seminaive)
    fb.inconsistencies = check_consistency(ontology, scene, fb.facts)
    if check and fb.inconsistencies:
        raise InconsistentState(fb.inconsistencies, fb)
    return fb


def infer(ontology: Ontology, scene: Scene, catalog: RuleCatalog, *, all_traces: bool = False,
          strict: bool = True, check: bool = True) -> FactBase:
    """Semi-naive forward chaining to the least fixpoint.

    Raises :class:`InconsistentState` (carrying the fact base) when the fixpoint
    violates disjointness or bool functionality, unless ``check`` is false; the
    inconsistencies are stored on the fact base either way. With
    ``strict=False`` individuals of undeclared classes are kept but not closed.
    """
    return _evaluate(ontology, scene, catalog, seminaive=True, all_traces=all_traces,
                     strict=strict, check=check)


def naive_infer(ontology: Ontology, scene: Scene, catalog: RuleCatalog, *,
                all_traces: bool = False, strict: bool = True, check: bool = True) -> FactBase:
    """Reference evaluator: re-match every rule against every fact each round."""
    return _evaluate(ontology, scene, catalog, seminaive=False, all_traces=all_traces,
                     strict=strict, check=check)


# --- explanation -----------------------------------------------------------------

@dataclass(frozen=True)
class DerivationTree:
    fact: GroundFact
    origin: str
    trace: Optional[DerivationTrace]
    children: tuple["DerivationTree", ...] = ()

    def walk(self) -> Iterator["DerivationTree"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def rule_ids(self) -> list[str]:
        return list(dict.fromkeys(n.trace.rule_id for n in self.walk()
                                  if n.trace is not None and not n.trace.is_closure))

    def leaves(self) -> list["DerivationTree"]:
        return [n for n in self.walk() if not n.children]

    def render(self, indent: str = "") -> str:
        label = f"{indent}{self.origin} {self.fact}"
        if self.trace is not None:
            label += f"  <= {self.trace.rule_id}"
            if self.trace.bindings:
                label += f" {self.trace.format_bindings()}"
        return "\n".join([label] + [c.render(indent + "  ") for c in self.children])


def explain(factbase: FactBase, f: GroundFact) -> DerivationTree:
    """Derivation tree along first traces; asserted facts are leaves."""
    if f not in factbase.facts:
        raise UnknownFact(f)
    origin = factbase.facts[f]
    trace = factbase.trace(f) if origin != ASSERTED else None
    if trace is None:
        return DerivationTree(f, origin, None)
    return DerivationTree(f, origin, trace,
                          tuple(explain(factbase, p) for p in trace.premises))
