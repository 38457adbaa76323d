"""Typed knowledge-graph store.

A graph is a set of ``(src, rtype, dst)`` triples over typed entities. Entity
identity is ``(etype, normalized value)``. Values are NFC-normalized and
trimmed; values of lexical types are also case-folded.

The graph is mutable while it is being built and immutable once frozen.
Frozen graphs have canonical entity ids (sorted by ``(etype, value)``) and
carry the undirected incidence lists that path finding walks over.
"""

from __future__ import annotations

import hashlib
import io
import re
import struct
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

__all__ = [
    "DEFAULT_TYPES",
    "Edge",
    "Entity",
    "EntityType",
    "GraphError",
    "ITEM_KEY_SEP",
    "KnowledgeGraph",
    "SNAPSHOT_VERSION",
    "SnapshotError",
    "TypeRegistry",
    "item_key",
    "item_label",
    "load_snapshot",
    "save_snapshot",
]

SNAPSHOT_MAGIC = b"KGSG"
SNAPSHOT_VERSION = 1

# Items are addressed by their name fields joined with this separator,
# e.g. "Faces | Ed Sheeran". Only the first field is displayed.
ITEM_KEY_SEP = " | "

_TYPE_NAME = re.compile(r"^[a-z][a-z0-9_]*$")
_RTYPE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_:\-]*$")


class GraphError(ValueError):
    """Invalid graph operation (unknown type, dangling id, frozen graph...)."""


class SnapshotError(GraphError):
    """Snapshot cannot be read: bad magic, version mismatch or corruption."""


@dataclass(frozen=True)
class EntityType:
    name: str
    lexical: bool = False


@dataclass(frozen=True)
class Entity:
    id: int
    etype: str
    value: str

    @property
    def key(self) -> tuple[str, str]:
        return (self.etype, self.value)


@dataclass(frozen=True)
class Edge:
    src: int
    rtype: str
    dst: int


DEFAULT_TYPES: tuple[EntityType, ...] = (
    EntityType("song"),
    EntityType("artist"),
    EntityType("album"),
    EntityType("genre"),
    EntityType("place"),
    EntityType("award"),
    EntityType("record_label"),
    EntityType("instrument"),
    EntityType("year"),
    EntityType("word", lexical=True),
    EntityType("stem", lexical=True),
    EntityType("phonetic"),
    EntityType("concept", lexical=True),
)


class TypeRegistry:
    """Entity types known to a graph, plus the designated item type.

    Registry files hold one type per line, ``name`` or ``name lexical``; the
    item type is marked with ``item``. Blank lines and ``#`` comments are
    ignored.
    """

    def __init__(self, types: Iterable[EntityType], item_type: str = "song") -> None:
        self._types: dict[str, EntityType] = {}
        for t in types:
            if not _TYPE_NAME.match(t.name):
                raise GraphError(f"invalid entity type name {t.name!r}")
            self._types[t.name] = t
        if item_type not in self._types:
            raise GraphError(f"item type {item_type!r} is not registered")
        self.item_type = item_type

    @classmethod
    def default(cls) -> "TypeRegistry":
        return cls(DEFAULT_TYPES, "song")

    @classmethod
    def from_file(cls, path: str | Path) -> "TypeRegistry":
        types = []
        item_type = None
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                name, *flags = line.split()
                unknown = set(flags) - {"lexical", "item"}
                if unknown:
                    raise GraphError(f"{path}:{lineno}: unknown flag(s) {sorted(unknown)}")
                types.append(EntityType(name, "lexical" in flags))
                if "item" in flags:
                    if item_type is not None:
                        raise GraphError(f"{path}:{lineno}: second item type {name!r}")
                    item_type = name
        if item_type is None:
            raise GraphError(f"{path}: no type is marked 'item'")
        return cls(types, item_type)

    def __contains__(self, name: object) -> bool:
        return name in self._types

    def __iter__(self) -> Iterator[EntityType]:
        return iter(self._types.values())

    def __len__(self) -> int:
        return len(self._types)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeRegistry):
            return NotImplemented
        return self._types == other._types and self.item_type == other.item_type

    def get(self, name: str) -> EntityType:
        try:
            return self._types[name]
        except KeyError:
            raise GraphError(f"unregistered entity type {name!r}") from None

    def normalize(self, etype: str, value: str) -> str:
        value = unicodedata.normalize("NFC", value).strip()
        if self.get(etype).lexical:
            value = unicodedata.normalize("NFC", value.casefold())
        return value


def item_key(*fields: str | None) -> str:
    """Join item name fields into an item value; trailing empty fields drop."""
    parts = [(f or "").strip() for f in fields]
    while len(parts) > 1 and not parts[-1]:
        parts.pop()
    return ITEM_KEY_SEP.join(parts)


def item_label(value: str) -> str:
    return value.split(ITEM_KEY_SEP, 1)[0]


class KnowledgeGraph:
    def __init__(self, registry: TypeRegistry | None = None) -> None:
        self.registry = registry or TypeRegistry.default()
        self._entities: list[Entity] = []
        self._index: dict[tuple[str, str], int] = {}
        self._edges: list[Edge] = []
        self._edge_set: set[tuple[int, str, int]] = set()
        self._out: list[list[int]] = []
        self._in: list[list[int]] = []
        self._frozen = False
        # (neighbor, edge index, traversed forward), built at freeze
        self._incident: list[tuple[tuple[int, int, bool], ...]] = []
        self._items: tuple[int, ...] = ()

    # -- build phase -----------------------------------------------------

    def _check_mutable(self) -> None:
        if self._frozen:
            raise GraphError("graph is frozen")

    def add_entity(self, etype: str, value: str) -> int:
        self._check_mutable()
        norm = self.registry.normalize(etype, value)
        if not norm:
            raise GraphError(f"empty value for entity type {etype!r}")
        if any(c in norm for c in "\t\n\r"):
            raise GraphError(f"value {norm!r} contains a tab or line break")
        key = (etype, norm)
        eid = self._index.get(key)
        if eid is None:
            eid = len(self._entities)
            self._entities.append(Entity(eid, etype, norm))
            self._index[key] = eid
            self._out.append([])
            self._in.append([])
        return eid

    def add_edge(self, src: int, rtype: str, dst: int) -> None:
        self._check_mutable()
        for e in (src, dst):
            if not 0 <= e < len(self._entities):
                raise GraphError(f"unknown entity id {e}")
        if not _RTYPE.match(rtype):
            raise GraphError(f"invalid relationship type {rtype!r}")
        triple = (src, rtype, dst)
        if triple in self._edge_set:
            return
        self._edge_set.add(triple)
        idx = len(self._edges)
        self._edges.append(Edge(src, rtype, dst))
        self._out[src].append(idx)
        self._in[dst].append(idx)

    def freeze(self) -> "KnowledgeGraph":
        """Return a frozen, canonically numbered copy; this graph is frozen too.

        Isolated entities are dropped unless they are items.
        """
        item_type = self.registry.item_type
        keep = [
            e for e in self._entities
            if e.etype == item_type or self._out[e.id] or self._in[e.id]
        ]
        frozen = self._canonical_copy(keep)
        self._frozen = True
        return frozen

    def _canonical_copy(self, keep: list[Entity]) -> "KnowledgeGraph":
        g = KnowledgeGraph(self.registry)
        order = sorted(keep, key=lambda e: e.key)
        remap = {}
        for e in order:
            remap[e.id] = g.add_entity(e.etype, e.value)
        edges = sorted(
            (remap[ed.src], ed.rtype, remap[ed.dst]) for ed in self._edges
            if ed.src in remap and ed.dst in remap
        )
        for s, r, d in edges:
            g.add_edge(s, r, d)
        g._seal()
        return g

    def _seal(self) -> None:
        incident: list[list[tuple[int, int, bool]]] = [[] for _ in self._entities]
        for idx, ed in enumerate(self._edges):
            if ed.src == ed.dst:
                continue  # a self-loop never lies on a simple path
            incident[ed.src].append((ed.dst, idx, True))
            incident[ed.dst].append((ed.src, idx, False))
        for lst in incident:
            lst.sort()
        self._incident = [tuple(lst) for lst in incident]
        item_type = self.registry.item_type
        self._items = tuple(e.id for e in self._entities if e.etype == item_type)
        self._frozen = True

    # -- queries ---------------------------------------------------------

    @property
    def frozen(self) -> bool:
        return self._frozen

    def __len__(self) -> int:
        return len(self._entities)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def entities(self) -> tuple[Entity, ...]:
        return tuple(self._entities)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._edges)

    @property
    def items(self) -> tuple[int, ...]:
        if self._frozen:
            return self._items
        item_type = self.registry.item_type
        return tuple(e.id for e in self._entities if e.etype == item_type)

    def entity(self, eid: int) -> Entity:
        try:
            if eid < 0:
                raise IndexError
            return self._entities[eid]
        except IndexError:
            raise GraphError(f"unknown entity id {eid}") from None

    def edge(self, idx: int) -> Edge:
        return self._edges[idx]

    def find(self, etype: str, value: str) -> int | None:
        return self._index.get((etype, self.registry.normalize(etype, value)))

    def is_item(self, eid: int) -> bool:
        return self.entity(eid).etype == self.registry.item_type

    def edgeset_size(self, eid: int) -> int:
        self.entity(eid)
        return len(self._out[eid]) + len(self._in[eid])

    def out_edges(self, eid: int) -> list[Edge]:
        self.entity(eid)
        return [self._edges[i] for i in self._out[eid]]

    def in_edges(self, eid: int) -> list[Edge]:
        self.entity(eid)
        return [self._edges[i] for i in self._in[eid]]

    def incident(self, eid: int) -> tuple[tuple[int, int, bool], ...]:
        if not self._frozen:
            raise GraphError("graph must be frozen before traversal")
        return self._incident[eid]

    def display_value(self, eid: int) -> str:
        ent = self.entity(eid)
        if ent.etype == self.registry.item_type:
            return item_label(ent.value)
        return ent.value

    def type_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self._entities:
            counts[e.etype] = counts.get(e.etype, 0) + 1
        return dict(sorted(counts.items()))

    def rtype_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for ed in self._edges:
            counts[ed.rtype] = counts.get(ed.rtype, 0) + 1
        return dict(sorted(counts.items()))

    # -- serialization ---------------------------------------------------

    def canonical_bytes(self) -> bytes:
        """Serialization independent of insertion order and entity ids."""
        order = sorted(self._entities, key=lambda e: e.key)
        pos = {e.id: i for i, e in enumerate(order)}
        type_names = [t.name for t in self.registry]
        type_pos = {n: i for i, n in enumerate(type_names)}

        buf = io.BytesIO()
        _put_str(buf, self.registry.item_type)
        _put_u32(buf, len(type_names))
        for t in self.registry:
            _put_str(buf, t.name)
            buf.write(struct.pack("<B", int(t.lexical)))
        _put_u32(buf, len(order))
        for e in order:
            _put_u32(buf, type_pos[e.etype])
            _put_str(buf, e.value)
        edges = sorted((pos[ed.src], ed.rtype, pos[ed.dst]) for ed in self._edges)
        _put_u32(buf, len(edges))
        for s, r, d in edges:
            _put_u32(buf, s)
            _put_str(buf, r)
            _put_u32(buf, d)
        items = sorted(pos[i] for i in self.items)
        _put_u32(buf, len(items))
        for i in items:
            _put_u32(buf, i)
        return buf.getvalue()

    def export_triples(self, fh: IO[str]) -> None:
        rows = sorted(
            (self._entities[ed.src].key, ed.rtype, self._entities[ed.dst].key)
            for ed in self._edges
        )
        for (st, sv), r, (dt, dv) in rows:
            fh.write(f"{st}\t{sv}\t{r}\t{dt}\t{dv}\n")


def _put_u32(buf: IO[bytes], n: int) -> None:
    buf.write(struct.pack("<I", n))


def _put_str(buf: IO[bytes], s: str) -> None:
    data = s.encode("utf-8")
    _put_u32(buf, len(data))
    buf.write(data)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise SnapshotError("truncated snapshot payload")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def str(self) -> str:
        try:
            return self.take(self.u32()).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SnapshotError(f"invalid UTF-8 in snapshot: {exc}") from None


def snapshot_bytes(g: KnowledgeGraph) -> bytes:
    payload = g.canonical_bytes()
    header = SNAPSHOT_MAGIC + struct.pack("<HQ", SNAPSHOT_VERSION, len(payload))
    return header + payload + hashlib.sha256(payload).digest()


def save_snapshot(g: KnowledgeGraph, destination: str | Path) -> None:
    Path(destination).write_bytes(snapshot_bytes(g))


def graph_from_snapshot_bytes(data: bytes) -> KnowledgeGraph:
    head = len(SNAPSHOT_MAGIC) + 10
    if len(data) < head + 32 or data[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise SnapshotError("not a graph snapshot")
    version, length = struct.unpack("<HQ", data[len(SNAPSHOT_MAGIC) : head])
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"snapshot version {version}, expected {SNAPSHOT_VERSION}")
    payload = data[head : head + length]
    digest = data[head + length :]
    if len(payload) != length or len(digest) != 32:
        raise SnapshotError("truncated snapshot")
    if hashlib.sha256(payload).digest() != digest:
        raise SnapshotError("snapshot checksum mismatch")

    rd = _Reader(payload)
    item_type = rd.str()
    types = [EntityType(rd.str(), bool(rd.u8())) for _ in range(rd.u32())]
    try:
        g = KnowledgeGraph(TypeRegistry(types, item_type))
        for _ in range(rd.u32()):
            etype = types[rd.u32()].name
            g.add_entity(etype, rd.str())
        for _ in range(rd.u32()):
            s, r, d = rd.u32(), rd.str(), rd.u32()
            g.add_edge(s, r, d)
    except (IndexError, GraphError) as exc:
        raise SnapshotError(f"inconsistent snapshot: {exc}") from None
    n_items = rd.u32()
    stored_items = [rd.u32() for _ in range(n_items)]
    if rd.pos != len(payload):
        raise SnapshotError("trailing bytes in snapshot payload")
    g._seal()
    if list(g.items) != stored_items:
        raise SnapshotError("item subset does not match item-type entities")
    return g


def load_snapshot(source: str | Path) -> KnowledgeGraph:
    return graph_from_snapshot_bytes(Path(source).read_bytes())
