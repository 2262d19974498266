"""Semantic norm-behavior analysis: ontology, Horn rules, inference, provenance, verification."""

from importlib import resources
from pathlib import Path

from .engine import DerivationTrace, DerivationTree, FactBase, explain, infer, naive_infer
from .ontology import (ClassDecl, DataPropDecl, ObjPropDecl, Ontology, Scene, check_consistency,
                       membership_closure, parse_ontology, parse_scene, taxonomy_closure)
from .provenance import Ledger, load_sources, trace_report
from .rules import Atom, Rule, RuleCatalog, format_rules, lint_catalog, parse_rules, \
    validate_against_ontology
from .terms import GroundFact, Ind, Lit, Var, fact, parse_ground_fact
from .verify import Expectation, Verdict, parse_expectations, verify_catalog, verify_scenario

__all__ = [
    "DerivationTrace", "DerivationTree", "FactBase", "explain", "infer", "naive_infer",
    "ClassDecl", "DataPropDecl", "ObjPropDecl", "Ontology", "Scene", "check_consistency",
    "membership_closure", "parse_ontology", "parse_scene", "taxonomy_closure",
    "Ledger", "load_sources", "trace_report",
    "Atom", "Rule", "RuleCatalog", "format_rules", "lint_catalog", "parse_rules",
    "validate_against_ontology",
    "GroundFact", "Ind", "Lit", "Var", "fact", "parse_ground_fact",
    "Expectation", "Verdict", "parse_expectations", "verify_catalog", "verify_scenario",
    "bundled_project",
]

__version__ = "0.1.0"


def bundled_project() -> Path:
    """Directory of the bundled StVO §26 example project."""
    return Path(str(resources.files(__name__) / "data" / "stvo26"))
