"""Best-path selection and template rendering.

Template files hold one ``path_type<TAB>pattern`` pair per line. Patterns
name path positions with ``{n.value}`` (the n-th entity, counting from 0)
and ``{n.rel}`` (the n-th relationship). Blank lines and lines starting
with ``#`` are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Iterable, Mapping, Sequence

from .kgraph import KnowledgeGraph
from .pathfind import TYPE_SEP, Path, PathConstraints, find_paths
from .score import DEFAULT_WEIGHTS, ScoredPath, Weights, interestingness
from .stats import CorpusStats

__all__ = [
    "FALLBACK",
    "Segue",
    "Template",
    "TemplateError",
    "find_best_target",
    "find_segue",
    "load_templates",
    "path_to_text",
    "rank_paths",
]

FALLBACK = "<fallback>"

_SLOT = re.compile(r"\{(\d+)\.(value|rel)\}")
_ANY_BRACE = re.compile(r"[{}]")


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class Template:
    key: str
    pattern: str

    def __post_init__(self) -> None:
        if not self.pattern:
            raise TemplateError(f"empty pattern for {self.key!r}")
        tokens = self.key.split(TYPE_SEP)
        if len(tokens) < 3 or len(tokens) % 2 == 0 or not all(tokens):
            raise TemplateError(f"malformed path type {self.key!r}")
        n_ents = (len(tokens) + 1) // 2
        for m in _SLOT.finditer(self.pattern):
            idx, field = int(m.group(1)), m.group(2)
            bound = n_ents if field == "value" else n_ents - 1
            if idx >= bound:
                raise TemplateError(
                    f"slot {m.group(0)} out of range for {self.key!r} "
                    f"({n_ents} entities, {n_ents - 1} relationships)"
                )
        if _ANY_BRACE.search(_SLOT.sub("", self.pattern)):
            raise TemplateError(f"unrecognised slot syntax in {self.pattern!r}")

    def fill(self, g: KnowledgeGraph, p: Path) -> str:
        if p.ptype != self.key:
            raise TemplateError(f"template {self.key!r} applied to path of type {p.ptype!r}")

        def sub(m: re.Match) -> str:
            idx = int(m.group(1))
            if m.group(2) == "value":
                return g.display_value(p.entities[idx])
            return _rel_text(g, p, idx)

        return _SLOT.sub(sub, self.pattern)


@dataclass(frozen=True)
class Segue:
    text: str
    scored: ScoredPath
    template_key: str

    @property
    def fallback(self) -> bool:
        return self.template_key == FALLBACK

    @property
    def path(self) -> Path:
        return self.scored.path


def load_templates(source: str | FsPath | Iterable[str]) -> dict[str, Template]:
    if isinstance(source, (str, FsPath)):
        with open(source, encoding="utf-8") as fh:
            return _parse_templates(fh, str(source))
    return _parse_templates(source, "<templates>")


def _parse_templates(lines: Iterable[str], name: str) -> dict[str, Template]:
    out: dict[str, Template] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise TemplateError(f"{name}:{lineno}: expected 'path_type<TAB>pattern'")
        key, pattern = parts[0].strip(), parts[1]
        if key in out:
            raise TemplateError(f"{name}:{lineno}: duplicate template for {key!r}")
        try:
            out[key] = Template(key, pattern)
        except TemplateError as exc:
            raise TemplateError(f"{name}:{lineno}: {exc}") from None
    return out


def _rel_text(g: KnowledgeGraph, p: Path, idx: int) -> str:
    edge_idx, _ = p.hops[idx]
    return g.edge(edge_idx).rtype.replace("_", " ")


def fallback_text(g: KnowledgeGraph, p: Path) -> str:
    parts = [g.display_value(p.entities[0])]
    for (edge_idx, fwd), eid in zip(p.hops, p.entities[1:]):
        rtype = g.edge(edge_idx).rtype
        parts.append(f"—{rtype}→" if fwd else f"←{rtype}—")
        parts.append(g.display_value(eid))
    return " ".join(parts)


def path_to_text(g: KnowledgeGraph, p: Path, templates: Mapping[str, Template]) -> tuple[str, str]:
    """Render ``p``; returns ``(text, template key or FALLBACK)``."""
    tpl = templates.get(p.ptype)
    if tpl is None:
        return fallback_text(g, p), FALLBACK
    return tpl.fill(g, p), tpl.key


def rank_paths(paths: Sequence[Path], stats: CorpusStats, g: KnowledgeGraph,
               w: Weights = DEFAULT_WEIGHTS, exclude_endpoints: bool = False) -> list[ScoredPath]:
    scored = [interestingness(p, stats, g, w, exclude_endpoints) for p in paths]
    scored.sort(key=ScoredPath.rank_key)
    return scored


def _check_stats(stats: CorpusStats, c: PathConstraints) -> None:
    if stats.constraints != c:
        raise ValueError(
            f"stats were computed with {stats.constraints.describe()}, "
            f"query uses {c.describe()}"
        )


def find_segue(g: KnowledgeGraph, i1: int, i2: int, c: PathConstraints, stats: CorpusStats,
               w: Weights = DEFAULT_WEIGHTS, templates: Mapping[str, Template] | None = None,
               exclude_endpoints: bool = False) -> Segue | None:
    """The rendered most interesting path from ``i1`` to ``i2``, or None."""
    _check_stats(stats, c)
    paths = find_paths(g, i1, i2, c)
    if not paths:
        return None
    best = min((interestingness(p, stats, g, w, exclude_endpoints) for p in paths),
               key=ScoredPath.rank_key)
    text, key = path_to_text(g, best.path, templates or {})
    return Segue(text, best, key)


def find_best_target(g: KnowledgeGraph, i1: int, candidates: Sequence[int], c: PathConstraints,
                     stats: CorpusStats, w: Weights = DEFAULT_WEIGHTS,
                     templates: Mapping[str, Template] | None = None,
                     exclude_endpoints: bool = False) -> tuple[int, Segue] | None:
    if not candidates:
        raise ValueError("candidate list is empty")
    if i1 in candidates:
        raise ValueError("the start item is among the candidates")
    best = None
    for order, cand in enumerate(candidates):
        seg = find_segue(g, i1, cand, c, stats, w, templates, exclude_endpoints)
        if seg is None:
            continue
        key = (seg.scored.rank_key(), order)
        if best is None or key < best[0]:
            best = (key, cand, seg)
    if best is None:
        return None
    return best[1], best[2]
