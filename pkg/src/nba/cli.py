"""``nba`` command line: check, lint, infer, verify and trace a project.

Exit codes:

====  ==========================================================
0     success (clean check, all scenarios PASS, fact traced)
1     findings: validation/lint errors, a FAIL verdict, inconsistency
2     parse or configuration error
3     unknown scenario id
4     ``trace``: fact not in the fixpoint
====  ==========================================================
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .engine import infer
from .errors import (ConfigError, DanglingReference, DuplicateScenarioId, NbaError, OntologyError,
                     ParseError, UnknownScenario)
from .ontology import check_consistency, fact_issues, membership_closure, scene_issues
from .project import Project, load_config, load_project
from .provenance import load_sources, trace_report
from .rules import blocking, lint_catalog, validate_against_ontology
from .terms import parse_ground_fact
from .verify import verify_catalog

EXIT_OK, EXIT_FINDINGS, EXIT_PARSE, EXIT_SCENARIO, EXIT_NOT_DERIVABLE = 0, 1, 2, 3, 4


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(args, load_ledger: bool = True) -> Project:
    return load_project(load_config(args.project), load_ledger=load_ledger)


def _write(project: Project, name: str, text: str) -> Path:
    out = project.config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def _pick_scene(project: Project, scenario_id: Optional[str]):
    if scenario_id is None:
        if len(project.scenes) == 1:
            return project.scenes[0]
        raise UnknownScenario("(none given; use --scenario)")
    scene = project.scene(scenario_id)
    if scene is None:
        raise UnknownScenario(scenario_id)
    return scene


def cmd_check(args) -> int:
    project = _load(args, load_ledger=False)
    findings: list[str] = []
    notes: list[str] = []
    ledger = None
    try:
        ledger = load_sources(project.config.sources_path.read_text(encoding="utf-8"),
                              project.config.sources_path.name)
    except DanglingReference as exc:
        findings.append(f"DanglingReference: {exc}")
    for issue in validate_against_ontology(project.catalog, project.ontology):
        findings.append(issue.describe())
    individuals_by_scene = {}
    for scene in project.scenes:
        individuals_by_scene[scene.scenario_id] = set(scene.individuals)
        issues = scene_issues(project.ontology, scene)
        for issue in issues:
            label = "UnknownSymbol" if issue.is_unknown else "SceneMismatch"
            findings.append(f"{label}({issue.symbol}) in scenario {scene.scenario_id}: "
                            f"{issue.describe()}")
        if not issues:
            asserted = membership_closure(project.ontology, scene) | set(scene.facts)
            for inc in check_consistency(project.ontology, scene, asserted):
                findings.append(f"{inc.describe()} in scenario {scene.scenario_id}")
    for e in project.expectations:
        if e.scenario_id not in individuals_by_scene:
            findings.append(f"UnknownScenario({e.scenario_id}) in expectations")
            continue
        for f in (*e.must_derive, *e.must_not_derive):
            for issue in fact_issues(project.ontology, f, individuals_by_scene[e.scenario_id]):
                if issue.is_unknown:
                    findings.append(f"UnknownSymbol({issue.symbol}) in expectation "
                                    f"{e.scenario_id}: {f}")
    lint = lint_catalog(project.catalog, project.ontology, project.scenes, ledger)
    if ledger is None:
        lint = [f for f in lint if f.kind != "DanglingReference"]
    for f in lint:
        if f.severity == "error":
            findings.append(f.describe())
        else:
            notes.append(f.describe())
    for line in findings:
        print(f"error: {line}")
    for line in notes:
        print(f"note: {line}")
    print(f"check: {len(findings)} blocking finding(s), {len(notes)} note(s)")
    return EXIT_FINDINGS if findings else EXIT_OK


def cmd_lint(args) -> int:
    project = _load(args)
    findings = lint_catalog(project.catalog, project.ontology, project.scenes, project.ledger)
    for f in findings:
        print(f.describe())
    print(f"lint: {len(findings)} finding(s), {len(blocking(findings))} blocking")
    return EXIT_FINDINGS if blocking(findings) else EXIT_OK


def cmd_infer(args) -> int:
    project = _load(args)
    scene = _pick_scene(project, args.scenario)
    issues = scene_issues(project.ontology, scene)
    for issue in issues:
        _err(f"warning: {issue.describe()}")
    fb = infer(project.ontology, scene, project.catalog,
               all_traces=args.all_traces or project.config.all_traces,
               strict=False, check=False)
    _write(project, f"{scene.scenario_id}.facts", fb.dump())
    if args.all_traces or project.config.all_traces:
        _write(project, f"{scene.scenario_id}.traces", fb.dump_traces())
    behavior = sorted((f for f in fb.derived() if f.predicate in project.config.behavior), key=str)
    print(f"# required behavior in {scene.scenario_id}")
    for f in behavior:
        print(f)
    if not behavior:
        print("(none derived)")
    for inc in fb.inconsistencies:
        _err(f"inconsistent: {inc.describe()}")
    return EXIT_FINDINGS if (fb.inconsistencies or issues) else EXIT_OK


def cmd_verify(args) -> int:
    project = _load(args)
    report = verify_catalog(project.ontology, project.catalog, project.scenes,
                            project.expectations, project.ledger, jobs=args.jobs)
    text = report.render()
    _write(project, "verify.txt", text)
    _write(project, "verify.json", report.to_json())
    sys.stdout.write(text)
    return EXIT_OK if report.ok else EXIT_FINDINGS


def cmd_trace(args) -> int:
    project = _load(args)
    scene = _pick_scene(project, args.scenario)
    if not args.fact:
        raise ConfigError("trace needs --fact")
    target = parse_ground_fact(args.fact)
    fb = infer(project.ontology, scene, project.catalog, strict=False, check=False)
    if target not in fb:
        _err(f"not derivable in {scene.scenario_id}: {target}")
        return EXIT_NOT_DERIVABLE
    report = trace_report(fb, project.catalog, project.ledger, facts=[target])
    stem = f"trace-{scene.scenario_id}"
    text = report.render()
    _write(project, f"{stem}.txt", text)
    _write(project, f"{stem}.json", report.to_json())
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nba", description="Semantic norm-behavior analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--project", default=".", help="project file or directory with project.cfg")
    for name, func, help_text in (
            ("check", cmd_check, "parse and validate all inputs"),
            ("lint", cmd_lint, "lint the rule catalog"),
            ("infer", cmd_infer, "derive required behavior for one scenario"),
            ("verify", cmd_verify, "verify the scenario catalog against expectations"),
            ("trace", cmd_trace, "explain a fact and trace it to legal sources")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        if name in ("infer", "trace"):
            p.add_argument("--scenario", help="scenario id")
        if name == "infer":
            p.add_argument("--all-traces", action="store_true", help="record every derivation")
        if name == "trace":
            p.add_argument("--fact", help='ground atom, e.g. "anhalten_in(ego, zoneBlau1)"')
        if name == "verify":
            p.add_argument("--jobs", type=int, default=1, help="parallel scenario workers")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownScenario as exc:
        _err(f"error: {exc}")
        return EXIT_SCENARIO
    except (ParseError, OntologyError, ConfigError, DuplicateScenarioId, DanglingReference) as exc:
        _err(f"error: {exc}")
        return EXIT_PARSE
    except NbaError as exc:
        _err(f"error: {exc}")
        return EXIT_FINDINGS


if __name__ == "__main__":
    sys.exit(main())
