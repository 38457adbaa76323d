"""Offline lexicon relations and lexical expansion of item names.

Lexicon files are tab-separated ``word<TAB>relation<TAB>concept`` lines, for
example ``foot\thypernym\tbody part``. ``#`` starts a comment line.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from ..kgraph import KnowledgeGraph
from .phonetic import RuleSet, default_rules, phonetic_encode
from .porter import porter_stem
from .tokens import default_stopwords, tokenize

__all__ = [
    "FIELD_RELATIONS",
    "LexicalResources",
    "Lexicon",
    "LexiconError",
    "lexical_expand",
    "load_lexicon",
]

log = logging.getLogger(__name__)

# item field -> relationship from the item to each word of that field
FIELD_RELATIONS = {
    "song_name": "title_word",
    "artist_name": "artist_name_word",
    "album_name": "album_name_word",
}

STEM_REL = "has_stem"
PHONETIC_REL = "sounds_like"

_RELATION = re.compile(r"^[a-z][a-z_]*$")


class LexiconError(ValueError):
    pass


Lexicon = Mapping[str, tuple[tuple[str, str], ...]]


def _parse_lexicon(lines: Iterable[str], name: str) -> dict[str, tuple[tuple[str, str], ...]]:
    rel: dict[str, list[tuple[str, str]]] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not all(p.strip() for p in parts):
            raise LexiconError(f"{name}:{lineno}: expected 'word<TAB>relation<TAB>concept'")
        word, relation, concept = (p.strip() for p in parts)
        if not _RELATION.match(relation):
            raise LexiconError(f"{name}:{lineno}: invalid relation name {relation!r}")
        entry = (relation, concept)
        bucket = rel.setdefault(word.casefold(), [])
        if entry not in bucket:
            bucket.append(entry)
    return {w: tuple(v) for w, v in rel.items()}


def load_lexicon(source: str | Path | Iterable[str]) -> dict[str, tuple[tuple[str, str], ...]]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return _parse_lexicon(fh, str(source))
    return _parse_lexicon(source, "<lexicon>")


@dataclass(frozen=True)
class LexicalResources:
    stopwords: frozenset[str] = field(default_factory=frozenset)
    rules: RuleSet = field(default_factory=lambda: RuleSet(()))
    lexicon: Lexicon = field(default_factory=dict)

    @classmethod
    def default(cls) -> "LexicalResources":
        text = resources.files("kgsegue.data").joinpath("lexicon.tsv").read_text(encoding="utf-8")
        return cls(default_stopwords(), default_rules(), _parse_lexicon(text.splitlines(), "lexicon.tsv"))


def lexical_expand(g: KnowledgeGraph, item: int, fields: Mapping[str, str | None],
                   res: LexicalResources) -> None:
    """Attach word, stem, phonetic and lexicon nodes for an item's name fields.

    Lexicon relations are looked up under both the word and its stem, so
    "faces" picks up entries listed for "face".
    """
    for field_name, text in fields.items():
        if not text:
            continue
        try:
            rel = FIELD_RELATIONS[field_name]
        except KeyError:
            raise ValueError(f"unknown item field {field_name!r}") from None
        for tok in tokenize(text, res.stopwords, field_name):
            w = g.add_entity("word", tok.surface)
            g.add_edge(item, rel, w)
            _expand_word(g, w, tok.surface, res)


def _expand_word(g: KnowledgeGraph, w: int, surface: str, res: LexicalResources) -> None:
    stem = porter_stem(surface)
    g.add_edge(w, STEM_REL, g.add_entity("stem", stem))
    if res.rules:
        code = phonetic_encode(surface, res.rules)
        if code:
            g.add_edge(w, PHONETIC_REL, g.add_entity("phonetic", code))
    for key in dict.fromkeys((surface, stem)):
        for relation, concept in res.lexicon.get(key, ()):
            g.add_edge(w, relation, g.add_entity("concept", concept))
