"""Engine configuration, read from an INI file.

Example::

    [weights]
    rarity = 0.4
    unpopularity = 0.2
    shortness = 0.4

    [paths]
    max_length = 4
    forbid_intermediate_items = true
    exclude_endpoints = false

    [files]
    registry = registry.txt
    templates = templates.tsv

    [stats]
    pairs = auto
    seed = 0

Relative file paths are resolved against the config file's directory.
Anything left out falls back to the packaged defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .kgraph import TypeRegistry
from .lexify import LexicalResources, load_lexicon, load_rules, load_stopwords
from .pathfind import DEFAULT_MAX_LENGTH, PathConstraints
from .score import Weights
from .segue import Template, load_templates
from .stats import DEFAULT_SAMPLE_PAIRS, DEFAULT_SAMPLE_THRESHOLD, PairSample

__all__ = ["ConfigError", "EngineConfig", "data_path", "load_config"]

FILE_KEYS = ("registry", "stopwords", "rules", "lexicon", "templates")
_DEFAULT_FILES = {
    "registry": "registry.txt",
    "stopwords": "stopwords.txt",
    "rules": "nrl_rules.txt",
    "lexicon": "lexicon.tsv",
    "templates": "templates.tsv",
}


class ConfigError(ValueError):
    pass


def data_path(name: str) -> Path:
    return Path(str(resources.files("kgsegue.data").joinpath(name)))


@dataclass(frozen=True)
class EngineConfig:
    weights: Weights = field(default_factory=Weights)
    constraints: PathConstraints = field(default_factory=PathConstraints)
    exclude_endpoints: bool = False
    files: dict[str, Path] = field(default_factory=lambda: {k: data_path(v) for k, v in _DEFAULT_FILES.items()})
    pairs: str = "auto"
    n_pairs: int = DEFAULT_SAMPLE_PAIRS
    sample_threshold: int = DEFAULT_SAMPLE_THRESHOLD
    seed: int = 0

    def with_overrides(self, **kw) -> "EngineConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def pair_sample(self, n_items: int) -> PairSample:
        if self.pairs == "all":
            return PairSample()
        if self.pairs == "sample":
            return PairSample("sample", self.n_pairs, self.seed)
        return PairSample.auto(n_items, self.seed, self.sample_threshold, self.n_pairs)

    def registry(self) -> TypeRegistry:
        return TypeRegistry.from_file(self.files["registry"])

    def resources(self) -> LexicalResources:
        return LexicalResources(
            load_stopwords(self.files["stopwords"]),
            load_rules(self.files["rules"]),
            load_lexicon(self.files["lexicon"]),
        )

    def templates(self) -> dict[str, Template]:
        return load_templates(self.files["templates"])


def _bool(section: configparser.SectionProxy, key: str, default: bool) -> bool:
    try:
        return section.getboolean(key, fallback=default)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key}: {exc}") from None


def load_config(path: str | Path | None) -> EngineConfig:
    cfg = EngineConfig()
    if path is None:
        return cfg
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.parent

    try:
        if parser.has_section("weights"):
            w = parser["weights"]
            cfg = replace(cfg, weights=Weights(
                w.getfloat("rarity", fallback=cfg.weights.rarity),
                w.getfloat("unpopularity", fallback=cfg.weights.unpopularity),
                w.getfloat("shortness", fallback=cfg.weights.shortness),
            ))
        if parser.has_section("paths"):
            p = parser["paths"]
            cfg = replace(
                cfg,
                constraints=PathConstraints(
                    p.getint("max_length", fallback=DEFAULT_MAX_LENGTH),
                    _bool(p, "forbid_intermediate_items", True),
                ),
                exclude_endpoints=_bool(p, "exclude_endpoints", False),
            )
        if parser.has_section("files"):
            files = dict(cfg.files)
            for key, raw in parser["files"].items():
                if key not in FILE_KEYS:
                    raise ConfigError(f"[files] unknown key {key!r}")
                files[key] = (base / raw).resolve()
            cfg = replace(cfg, files=files)
        if parser.has_section("stats"):
            s = parser["stats"]
            pairs = s.get("pairs", cfg.pairs)
            if pairs not in ("auto", "all", "sample"):
                raise ConfigError(f"[stats] pairs must be auto, all or sample, got {pairs!r}")
            cfg = replace(
                cfg,
                pairs=pairs,
                n_pairs=s.getint("n_pairs", fallback=cfg.n_pairs),
                sample_threshold=s.getint("sample_threshold", fallback=cfg.sample_threshold),
                seed=s.getint("seed", fallback=cfg.seed),
            )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None

    for key, fp in cfg.files.items():
        if not Path(fp).exists():
            raise ConfigError(f"{path}: {key} file not found: {fp}")
    return cfg
