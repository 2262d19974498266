"""Terms and ground facts.

Individuals and literals are kept as distinct wrapper types so that the
individual ``yes`` and the string literal ``"yes"`` never compare equal, and
``true`` never equals ``1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import ParseError
from .lexer import IDENT, INT, PUNCT, STRING, VAR, TokenStream, quote, tokenize

CLASS_ASSERTION = "class-assertion"
OBJECT_FACT = "object-fact"
DATA_FACT = "data-fact"


@dataclass(frozen=True, order=True)
class Var:
    name: str  # includes the leading '?'

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Ind:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Lit:
    value: Union[bool, int, str]
    kind: str = field(init=False)

    def __post_init__(self):
        v = self.value
        if isinstance(v, bool):
            kind = "bool"
        elif isinstance(v, int):
            kind = "int"
        elif isinstance(v, str):
            kind = "string"
        else:
            raise TypeError(f"unsupported literal {v!r}")
        object.__setattr__(self, "kind", kind)

    def __str__(self) -> str:
        if self.kind == "bool":
            return "true" if self.value else "false"
        if self.kind == "int":
            return str(self.value)
        return quote(self.value)


Term = Union[Var, Ind, Lit]
GroundTerm = Union[Ind, Lit]


@dataclass(frozen=True)
class GroundFact:
    predicate: str
    args: tuple  # tuple[GroundTerm, ...]

    @property
    def kind(self) -> str:
        if len(self.args) == 1:
            return CLASS_ASSERTION
        if isinstance(self.args[1], Lit):
            return DATA_FACT
        return OBJECT_FACT

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})"


def fact(predicate: str, *args) -> GroundFact:
    """Shorthand used heavily in tests: plain ``str`` args become individuals."""
    return GroundFact(predicate, tuple(a if isinstance(a, (Ind, Lit)) else
                                       (Lit(a) if isinstance(a, (bool, int)) else Ind(a))
                                       for a in args))


def parse_term(ts: TokenStream, allow_vars: bool = True) -> Term:
    tok = ts.peek
    if tok.kind == VAR and allow_vars:
        return Var(ts.next().value)
    if tok.kind == INT:
        return Lit(int(ts.next().value))
    if tok.kind == STRING:
        return Lit(ts.next().value)
    if tok.kind == IDENT:
        ts.next()
        if tok.value == "true":
            return Lit(True)
        if tok.value == "false":
            return Lit(False)
        return Ind(tok.value)
    ts.fail({"variable", "individual", "literal"} if allow_vars else {"individual", "literal"})


def parse_atom_parts(ts: TokenStream, allow_vars: bool = True) -> tuple[str, tuple]:
    pred = ts.expect(IDENT, what="predicate").value
    ts.expect(PUNCT, "(")
    args = [parse_term(ts, allow_vars)]
    while ts.accept(PUNCT, ","):
        args.append(parse_term(ts, allow_vars))
    ts.expect(PUNCT, ")")
    if len(args) > 2:
        tok = ts.tokens[ts.pos - 1]
        raise ParseError(f"atom {pred} has arity {len(args)}; only 1 or 2 are supported",
                         tok.line, tok.column, source=ts.source)
    return pred, tuple(args)


def parse_ground_fact(text: str) -> GroundFact:
    """Parse a single ground atom such as ``anhalten_in(ego, zoneBlau1)``."""
    ts = TokenStream(tokenize(text), skip_newlines=True)
    pred, args = parse_atom_parts(ts, allow_vars=False)
    ts.expect("EOF", what="end of input")
    return GroundFact(pred, args)
