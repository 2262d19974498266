"""Exception hierarchy shared by all loaders and the engine."""

from __future__ import annotations


class NbaError(Exception):
    """Base class for every error raised by this package."""


class ParseError(NbaError):
    def __init__(self, message: str, line: int = 0, column: int = 0,
                 expected: frozenset[str] | set[str] = frozenset(), source: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        where = f"{self.source}:" if self.source else ""
        text = f"{where}{self.line}:{self.column}: {self.message}"
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        return text


class UnsafeVariable(ParseError):
    """A head variable does not occur in the rule body."""

    def __init__(self, rule_id: str, variable: str, line: int = 0, column: int = 0, source: str = ""):
        self.rule_id = rule_id
        self.variable = variable
        super().__init__(f"rule {rule_id}: head variable {variable} does not occur in the body",
                         line, column, source=source)


class OntologyError(NbaError):
    """A TBox invariant is violated (duplicate names, dangling parents, ...)."""


class CycleDetected(OntologyError):
    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__(f"subclass cycle: {' -> '.join(self.cycle)}")


class UnknownSymbol(NbaError):
    def __init__(self, name: str, kind: str = "symbol"):
        self.name = name
        self.kind = kind
        super().__init__(f"unknown {kind}: {name}")


class DanglingReference(NbaError):
    def __init__(self, owner: str, target: str, kind: str):
        self.owner = owner
        self.target = target
        self.kind = kind
        super().__init__(f"{owner} references undeclared {kind} {target}")


class InconsistentState(NbaError):
    """The fixpoint is inconsistent; the fact base is still attached for diagnosis."""

    def __init__(self, inconsistencies, factbase):
        self.inconsistencies = list(inconsistencies)
        self.factbase = factbase
        super().__init__("; ".join(i.describe() for i in self.inconsistencies))


class UnknownFact(NbaError):
    def __init__(self, fact):
        self.fact = fact
        super().__init__(f"fact not in fact base: {fact}")


class DuplicateScenarioId(NbaError):
    def __init__(self, scenario_id: str):
        self.scenario_id = scenario_id
        super().__init__(f"duplicate scenario id: {scenario_id}")


class UnknownScenario(NbaError):
    def __init__(self, scenario_id: str):
        self.scenario_id = scenario_id
        super().__init__(f"unknown scenario id: {scenario_id}")


class ConfigError(NbaError):
    pass
