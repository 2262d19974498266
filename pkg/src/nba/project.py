"""Project configuration: a ``key = value`` file naming all inputs of a batch run."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .ontology import Ontology, Scene, parse_ontology, parse_scene
from .provenance import Ledger, load_sources
from .rules import RuleCatalog, parse_rules
from .verify import Expectation, parse_expectations

DEFAULT_BEHAVIOR = frozenset({"anhalten_in"})
_KEYS = {"ontology", "rules", "sources", "scenes", "expectations", "output_dir",
         "all_traces", "behavior"}
_REQUIRED = ("ontology", "rules", "sources", "scenes")


@dataclass(frozen=True)
class ProjectConfig:
    ontology_path: Path
    rules_path: Path
    sources_path: Path
    scenes: tuple[Path, ...]
    expectations_path: Optional[Path] = None
    output_dir: Path = Path("out")
    all_traces: bool = False
    behavior: frozenset[str] = DEFAULT_BEHAVIOR


def _as_bool(key: str, value: str) -> bool:
    if value.lower() in ("true", "yes", "1"):
        return True
    if value.lower() in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected true or false, got {value!r}")


def load_config(path: str | Path) -> ProjectConfig:
    """Read a project file; a directory means ``<dir>/project.cfg``.

    Relative paths are resolved against the config file's directory.
    """
    path = Path(path)
    if path.is_dir():
        path = path / "project.cfg"
    if not path.is_file():
        raise ConfigError(f"project file not found: {path}")
    base = path.parent
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"{path}: missing key {key!r}")

    def resolve(p: str) -> Path:
        full = base / p
        if not full.is_file():
            raise ConfigError(f"{path}: file not found: {p}")
        return full

    scenes = tuple(resolve(s.strip()) for s in values["scenes"].split(",") if s.strip())
    output_dir = base / values.get("output_dir", "out")
    if output_dir.exists() and not output_dir.is_dir():
        raise ConfigError(f"{path}: output_dir is not a directory: {output_dir}")
    behavior = DEFAULT_BEHAVIOR
    if "behavior" in values:
        behavior = frozenset(b.strip() for b in values["behavior"].split(",") if b.strip())
    return ProjectConfig(
        ontology_path=resolve(values["ontology"]),
        rules_path=resolve(values["rules"]),
        sources_path=resolve(values["sources"]),
        scenes=scenes,
        expectations_path=resolve(values["expectations"]) if "expectations" in values else None,
        output_dir=output_dir,
        all_traces=_as_bool("all_traces", values.get("all_traces", "false")),
        behavior=behavior,
    )


@dataclass
class Project:
    config: ProjectConfig
    ontology: Ontology
    catalog: RuleCatalog
    ledger: Optional[Ledger]
    scenes: list[Scene]
    expectations: list[Expectation] = field(default_factory=list)

    def scene(self, scenario_id: str) -> Optional[Scene]:
        for s in self.scenes:
            if s.scenario_id == scenario_id:
                return s
        return None


def _read(path: Path) -> tuple[str, str]:
    return path.read_text(encoding="utf-8"), str(path.name)


def load_project(config: ProjectConfig, load_ledger: bool = True) -> Project:
    """Parse every input named by ``config``; parse errors propagate."""
    ontology = parse_ontology(*_read(config.ontology_path))
    catalog = parse_rules(*_read(config.rules_path))
    ledger = load_sources(*_read(config.sources_path)) if load_ledger else None
    scenes = [parse_scene(*_read(p)) for p in config.scenes]
    expectations = []
    if config.expectations_path is not None:
        expectations = parse_expectations(*_read(config.expectations_path))
    return Project(config, ontology, catalog, ledger, scenes, expectations)
