"""Simple-path enumeration between items.

Traversal ignores edge direction. A hop that walks an edge against its
stored direction is written with a ``~`` prefix in the path type, so
``song|~performs|artist|performs|song`` reads "song performed by an artist
who performs the other song".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .kgraph import GraphError, KnowledgeGraph

__all__ = [
    "DEFAULT_MAX_LENGTH",
    "Path",
    "PathConstraints",
    "find_paths",
    "iter_paths_from",
    "path_type",
    "type_of_hops",
]

DEFAULT_MAX_LENGTH = 4

TYPE_SEP = "|"
REVERSE_MARK = "~"


@dataclass(frozen=True)
class PathConstraints:
    max_length: int = DEFAULT_MAX_LENGTH
    forbid_intermediate_items: bool = True

    def __post_init__(self) -> None:
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")

    def describe(self) -> str:
        return f"max_length={self.max_length} forbid_intermediate_items={str(self.forbid_intermediate_items).lower()}"


@dataclass(frozen=True)
class Path:
    """Alternating entity/relationship sequence.

    ``hops[i]`` is ``(edge index, forward)`` linking ``entities[i]`` to
    ``entities[i + 1]``; ``forward`` is False when the stored edge points from
    ``entities[i + 1]`` to ``entities[i]``.
    """

    entities: tuple[int, ...]
    hops: tuple[tuple[int, bool], ...]
    ptype: str

    @property
    def length(self) -> int:
        return len(self.hops)

    @property
    def source(self) -> int:
        return self.entities[0]

    @property
    def target(self) -> int:
        return self.entities[-1]

    def reversed(self, g: KnowledgeGraph) -> "Path":
        ents = self.entities[::-1]
        hops = tuple((idx, not fwd) for idx, fwd in reversed(self.hops))
        return Path(ents, hops, type_of_hops(g, ents, hops))


def _hop_token(rtype: str, forward: bool) -> str:
    return rtype if forward else REVERSE_MARK + rtype


def type_of_hops(g: KnowledgeGraph, entities, hops) -> str:
    parts = [g.entity(entities[0]).etype]
    for (idx, fwd), eid in zip(hops, entities[1:]):
        parts.append(_hop_token(g.edge(idx).rtype, fwd))
        parts.append(g.entity(eid).etype)
    return TYPE_SEP.join(parts)


def path_type(p: Path) -> str:
    return p.ptype


def _distances_to(g: KnowledgeGraph, sources, limit: int, block_items: bool) -> dict[int, int]:
    """Undirected BFS distances from ``sources``, at most ``limit`` hops.

    With ``block_items`` the search does not pass through item entities
    other than the sources themselves.
    """
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    source_set = set(sources)
    while queue:
        u = queue.popleft()
        d = dist[u]
        if d >= limit:
            continue
        if block_items and u not in source_set and g.is_item(u):
            continue
        for v, _, _ in g.incident(u):
            if v not in dist:
                dist[v] = d + 1
                queue.append(v)
    return dist


def _check_endpoints(g: KnowledgeGraph, i1: int, i2: int) -> None:
    if not g.frozen:
        raise GraphError("graph must be frozen")
    if i1 == i2:
        raise GraphError("path endpoints must be distinct items")
    for i in (i1, i2):
        if not g.is_item(i):
            raise GraphError(f"entity {i} is not an item")


def find_paths(g: KnowledgeGraph, i1: int, i2: int, c: PathConstraints | None = None) -> list[Path]:
    """All simple undirected paths from ``i1`` to ``i2`` under ``c``.

    Sorted by (length, path type, entity sequence). Ids of a frozen graph are
    in ``(etype, value)`` order, so the id sequence orders like the value
    sequence.
    """
    c = c or PathConstraints()
    _check_endpoints(g, i1, i2)
    block = c.forbid_intermediate_items
    dist = _distances_to(g, [i2], c.max_length, block)
    if i1 not in dist:
        return []

    ents = [i1]
    hops: list[tuple[int, bool]] = []
    on_path = {i1}
    found: list[Path] = []
    # explicit stack of neighbour iterators keeps deep graphs off the C stack
    stack = [iter(g.incident(i1))]
    while stack:
        remaining = c.max_length - len(hops)
        advanced = False
        for v, idx, fwd in stack[-1]:
            if v in on_path:
                continue
            if v == i2:
                p_ents = (*ents, v)
                p_hops = (*hops, (idx, fwd))
                found.append(Path(p_ents, p_hops, type_of_hops(g, p_ents, p_hops)))
                continue
            if remaining <= 1 or dist.get(v, remaining) >= remaining:
                continue
            if block and g.is_item(v):
                continue
            ents.append(v)
            hops.append((idx, fwd))
            on_path.add(v)
            stack.append(iter(g.incident(v)))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if len(ents) > 1:
                on_path.discard(ents.pop())
                hops.pop()
    found.sort(key=lambda p: (p.length, p.ptype, p.entities))
    return found


def iter_paths_from(g: KnowledgeGraph, source: int, c: PathConstraints) -> Iterator[tuple[int, str]]:
    """Yield ``(target item, path type)`` for every constrained path from ``source``.

    Covers all targets at once; used for corpus statistics where per-pair
    enumeration would redo the same work.
    """
    if not g.is_item(source):
        raise GraphError(f"entity {source} is not an item")
    block = c.forbid_intermediate_items
    others = [i for i in g.items if i != source]
    if not others:
        return
    dist = _distances_to(g, others, c.max_length, block)

    is_item = set(g.items)
    tokens = [g.entity(source).etype]
    on_path = {source}
    limit = c.max_length

    def walk(u: int, depth: int) -> Iterator[tuple[int, str]]:
        after = limit - depth - 1
        for v, idx, fwd in g.incident(u):
            if v in on_path:
                continue
            v_item = v in is_item
            if not v_item and dist.get(v, limit + 1) > after:
                continue
            tokens.append(_hop_token(g.edge(idx).rtype, fwd))
            tokens.append(g.entity(v).etype)
            if v_item:
                yield v, TYPE_SEP.join(tokens)
            if after > 0 and not (block and v_item):
                on_path.add(v)
                yield from walk(v, depth + 1)
                on_path.discard(v)
            del tokens[-2:]

    yield from walk(source, 0)
