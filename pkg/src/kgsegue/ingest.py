"""Graph construction from item records and offline fact files.

Items files are CSV (header ``song_name,artist_name,album_name``) or JSON
lines with the same keys. Fact files are tab-separated::

    subj_type  subj_value  rtype  obj_type  obj_value

A song endpoint in a fact file names an item either by its full key
(``Title | Artist | Album``) or by any unambiguous prefix of fields, such as
``Title`` or ``Title | Artist``. Facts whose song endpoint matches no item,
or more than one, are dropped and reported.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .kgraph import ITEM_KEY_SEP, GraphError, KnowledgeGraph, TypeRegistry, item_key
from .lexify import LexicalResources, lexical_expand

__all__ = [
    "BuildReport",
    "FactTriple",
    "IngestError",
    "ItemRecord",
    "build_graph",
    "read_facts",
    "read_items",
    "resolve_item",
]

log = logging.getLogger(__name__)

PERFORMS = "performs"
APPEARS_ON = "appears_on"


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class ItemRecord:
    song_name: str
    artist_name: str | None = None
    album_name: str | None = None

    def __post_init__(self) -> None:
        if not self.song_name or not self.song_name.strip():
            raise IngestError("item record has an empty song_name")

    @property
    def key(self) -> str:
        return item_key(self.song_name, self.artist_name, self.album_name)

    def fields(self) -> dict[str, str | None]:
        return {
            "song_name": self.song_name,
            "artist_name": self.artist_name,
            "album_name": self.album_name,
        }


@dataclass(frozen=True)
class FactTriple:
    subj_type: str
    subj_value: str
    rtype: str
    obj_type: str
    obj_value: str
    source: str = ""

    @classmethod
    def parse(cls, line: str, source: str = "") -> "FactTriple":
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 5 or not all(p.strip() for p in parts):
            raise IngestError(f"{source}: expected 5 tab-separated non-empty fields")
        return cls(*(p.strip() for p in parts), source=source)


def _opt(value) -> str | None:
    if value is None:
        return None
    value = str(value).strip()
    return value or None


def read_items(path: str | Path) -> list[ItemRecord]:
    path = Path(path)
    if not path.exists():
        raise IngestError(f"items file not found: {path}")
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        if path.suffix.lower() == ".csv":
            reader = csv.DictReader(fh)
            if not reader.fieldnames or "song_name" not in reader.fieldnames:
                raise IngestError(f"{path}:1: CSV header must include song_name")
            rows = ((reader.line_num, row) for row in reader)
        else:
            rows = _json_rows(fh, path)
        for lineno, row in rows:
            try:
                records.append(ItemRecord(
                    str(row.get("song_name") or ""),
                    _opt(row.get("artist_name")),
                    _opt(row.get("album_name")),
                ))
            except IngestError as exc:
                raise IngestError(f"{path}:{lineno}: {exc}") from None
    return records


def _json_rows(fh, path: Path):
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(row, dict):
            raise IngestError(f"{path}:{lineno}: expected a JSON object")
        yield lineno, row


def read_facts(path: str | Path) -> list[FactTriple]:
    path = Path(path)
    if not path.exists():
        raise IngestError(f"fact file not found: {path}")
    facts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            facts.append(FactTriple.parse(line, f"{path}:{lineno}"))
    return facts


def resolve_item(g: KnowledgeGraph, ref: str) -> list[int]:
    """Item ids whose key equals ``ref`` or starts with its fields."""
    item_type = g.registry.item_type
    exact = g.find(item_type, ref)
    if exact is not None:
        return [exact]
    ref = g.registry.normalize(item_type, ref)
    prefix = ref + ITEM_KEY_SEP
    return [i for i in g.items if g.entity(i).value.startswith(prefix)]


@dataclass
class BuildReport:
    items: int = 0
    records: int = 0
    facts_read: int = 0
    facts_dropped: int = 0
    entity_counts: dict[str, int] = field(default_factory=dict)
    edge_counts: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [
            f"records\t{self.records}",
            f"items\t{self.items}",
            f"facts_read\t{self.facts_read}",
            f"facts_dropped\t{self.facts_dropped}",
            "[entities]",
            *(f"{k}\t{v}" for k, v in self.entity_counts.items()),
            "[edges]",
            *(f"{k}\t{v}" for k, v in self.edge_counts.items()),
            "[warnings]",
            *self.warnings,
        ]
        return "\n".join(lines) + "\n"


def _fact_endpoint(g: KnowledgeGraph, etype: str, value: str, fact: FactTriple,
                   report: BuildReport) -> int | None:
    if etype == g.registry.item_type:
        hits = resolve_item(g, value)
        if len(hits) == 1:
            return hits[0]
        why = "matches no item" if not hits else f"is ambiguous ({len(hits)} items)"
        report.warnings.append(f"{fact.source}: {etype} {value!r} {why}; fact dropped")
        log.warning("%s: %s %r %s; fact dropped", fact.source, etype, value, why)
        return None
    return g.add_entity(etype, value)


def build_graph(items: Sequence[ItemRecord], facts: Iterable[FactTriple] = (),
                resources: LexicalResources | None = None,
                registry: TypeRegistry | None = None) -> tuple[KnowledgeGraph, BuildReport]:
    resources = resources or LexicalResources.default()
    g = KnowledgeGraph(registry or TypeRegistry.default())
    report = BuildReport(records=len(items))
    item_type = g.registry.item_type

    for rec in items:
        song = g.add_entity(item_type, rec.key)
        if rec.artist_name:
            g.add_edge(g.add_entity("artist", rec.artist_name), PERFORMS, song)
        if rec.album_name:
            g.add_edge(song, APPEARS_ON, g.add_entity("album", rec.album_name))
        lexical_expand(g, song, rec.fields(), resources)

    for fact in facts:
        report.facts_read += 1
        try:
            for t in (fact.subj_type, fact.obj_type):
                g.registry.get(t)
            s = _fact_endpoint(g, fact.subj_type, fact.subj_value, fact, report)
            o = _fact_endpoint(g, fact.obj_type, fact.obj_value, fact, report)
            if s is None or o is None:
                report.facts_dropped += 1
                continue
            g.add_edge(s, fact.rtype, o)
        except GraphError as exc:
            raise IngestError(f"{fact.source}: {exc}") from None

    frozen = g.freeze()
    report.items = len(frozen.items)
    report.entity_counts = frozen.type_counts()
    report.edge_counts = frozen.rtype_counts()
    return frozen, report
