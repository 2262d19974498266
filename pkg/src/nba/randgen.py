"""Random small ontologies, scenes, catalogs and rule files for oracle tests."""

from __future__ import annotations

import random

from .lexer import quote
from .ontology import ClassDecl, DataPropDecl, ObjPropDecl, Ontology, Scene
from .rules import Atom, Rule, RuleCatalog, format_rule
from .terms import GroundFact, Ind, Lit, Var

VARS = [Var("?x"), Var("?y"), Var("?z")]


def random_instance(rng: random.Random, max_individuals: int = 8, max_rules: int = 6,
                    max_predicates: int = 4) -> tuple[Ontology, Scene, RuleCatalog]:
    n_classes = rng.randint(1, min(2, max_predicates - 1))
    n_props = rng.randint(1, max_predicates - n_classes)
    classes = [ClassDecl("C0")]
    if n_classes == 2:
        classes.append(ClassDecl("C1", "C0" if rng.random() < 0.6 else None))
    objprops, dataprops = [], []
    for i in range(n_props):
        if i > 0 and rng.random() < 0.25:
            dataprops.append(DataPropDecl(f"d{i}", "bool"))
        else:
            objprops.append(ObjPropDecl(f"p{i}", symmetric=rng.random() < 0.3))
    ontology = Ontology(tuple(classes), tuple(objprops), tuple(dataprops))

    individuals = [f"i{k}" for k in range(rng.randint(0, max_individuals))]
    class_names = [c.name for c in classes]
    members = {name: rng.choice(class_names) for name in individuals}
    facts = []
    if individuals:
        for _ in range(rng.randint(0, 10)):
            if objprops and (not dataprops or rng.random() < 0.75):
                p = rng.choice(objprops).name
                facts.append(GroundFact(p, (Ind(rng.choice(individuals)),
                                            Ind(rng.choice(individuals)))))
            elif dataprops:
                d = rng.choice(dataprops).name
                facts.append(GroundFact(d, (Ind(rng.choice(individuals)), Lit(True))))
    scene = Scene("R", "random", members, tuple(facts))

    rules = []
    for r in range(rng.randint(0, max_rules)):
        body = [_random_atom(rng, class_names, objprops, dataprops, individuals, VARS)
                for _ in range(rng.randint(1, 3))]
        bound = [v for a in body for v in a.args if isinstance(v, Var)
                 and not (a.kind == "dataprop")]
        bound += [a.args[0] for a in body if a.kind == "dataprop" and isinstance(a.args[0], Var)]
        bound = list(dict.fromkeys(bound))
        head_pool = bound or [Ind(individuals[0])] if individuals else bound
        if not head_pool:
            head_pool = [Ind("i0")]
        head = _random_atom(rng, class_names, objprops, dataprops, [], head_pool, head=True)
        rules.append(Rule(f"r{r}", "random rule", ("p",), (), tuple(body), (head,)))
    return ontology, scene, RuleCatalog(tuple(rules))


def _random_atom(rng, class_names, objprops, dataprops, individuals, pool, head=False) -> Atom:
    def term():
        if not head and individuals and rng.random() < 0.15:
            return Ind(rng.choice(individuals))
        return rng.choice(pool)

    choice = rng.random()
    if choice < 0.35:
        return Atom(rng.choice(class_names), (term(),))
    if dataprops and choice < 0.5:
        return Atom(rng.choice(dataprops).name, (term(), Lit(True)))
    if objprops:
        return Atom(rng.choice(objprops).name, (term(), term()))
    return Atom(rng.choice(class_names), (term(),))


# --- rule files ------------------------------------------------------------------

_PREDICATES = ["Zone", "Ego", "Fussgaenger", "ist_in", "ist_neben", "sachverhalt_gilt", "p"]
_GLOSS_CHARS = "abcdefgh üöäß()-,.\"\\"


def _random_literal(rng: random.Random) -> Lit:
    kind = rng.randrange(3)
    if kind == 0:
        return Lit(rng.random() < 0.5)
    if kind == 1:
        return Lit(rng.randint(-50, 50))
    return Lit("".join(rng.choice("xyz äß\"") for _ in range(rng.randint(0, 4))))


def random_rule(rng: random.Random, rule_id: str, safe: bool = True) -> Rule:
    variables = [Var(f"?{n}") for n in ("a", "b", "c", "zoneRot", "f2")]
    body = []
    for _ in range(rng.randint(1, 4)):
        pred = rng.choice(_PREDICATES)
        if pred[0].isupper():
            body.append(Atom(pred, (rng.choice(variables),)))
        else:
            second = rng.choice(variables) if rng.random() < 0.6 else \
                (_random_literal(rng) if rng.random() < 0.7 else Ind("ego"))
            body.append(Atom(pred, (rng.choice(variables), second)))
    body_vars = list(dict.fromkeys(v for a in body for v in a.variables()))
    heads = []
    for _ in range(rng.randint(1, 2)):
        pool = body_vars or [Ind("ego")]
        if rng.random() < 0.5:
            heads.append(Atom(rng.choice(["Zone", "Ego"]), (rng.choice(pool),)))
        else:
            heads.append(Atom(rng.choice(["anhalten_in", "steht_in"]),
                              (rng.choice(pool), rng.choice(pool + [Lit(True)]))))
    if not safe:
        fresh = Var("?unbound")
        heads[0] = Atom(heads[0].predicate, (fresh,) + heads[0].args[1:])
    gloss = "".join(rng.choice(_GLOSS_CHARS) for _ in range(rng.randint(0, 12)))
    sources = tuple(f"p{rng.randint(0, 3)}" for _ in range(rng.randint(0, 2)))
    assumptions = tuple(f"A{rng.randint(1, 4)}" for _ in range(rng.randint(0, 2)))
    if rng.random() < 0.1:
        return Rule(rule_id, gloss, sources, assumptions, informal=True)
    return Rule(rule_id, gloss, sources, assumptions, tuple(body), tuple(heads))


def random_rule_text(rng: random.Random, n_rules: int | None = None, unsafe_at: int | None = None) -> str:
    """A rule file with irregular layout: comments, blank lines, odd spacing."""
    if n_rules is None:
        n_rules = rng.randint(0, 6)
    chunks = []
    for i in range(n_rules):
        rule = random_rule(rng, f"R{i}", safe=(i != unsafe_at))
        if i == unsafe_at and rule.informal:
            rule = random_rule(rng, f"R{i}", safe=False)
            while rule.informal:
                rule = random_rule(rng, f"R{i}", safe=False)
        text = format_rule(rule)
        if rng.random() < 0.5:
            text = _scramble_layout(rng, text)
        if rng.random() < 0.3:
            text = f"# rule {i} {quote('comment')}\n" + text
        chunks.append(text)
    sep = rng.choice(["\n", "\n\n", "\n  \n# between\n"])
    return sep.join(chunks) + ("\n" if rng.random() < 0.5 else "")


def _scramble_layout(rng: random.Random, text: str) -> str:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("& ") and rng.random() < 0.5:
            out[-1] = out[-1] + " " + line
            continue
        out.append(" " * rng.randint(0, 6) + line.replace(", ", rng.choice([",", ", ", " , "])))
    return "\n".join(out)
