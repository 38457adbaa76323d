"""Splitting item names into tokens."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

__all__ = ["Token", "default_stopwords", "load_stopwords", "tokenize"]

_WORD = re.compile(r"[^\W_]+")

MIN_TOKEN_LENGTH = 2


@dataclass(frozen=True)
class Token:
    surface: str
    source_field: str = "song_name"


def load_stopwords(path: str | Path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return _parse_stopwords(fh)


def _parse_stopwords(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.casefold())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    text = resources.files("kgsegue.data").joinpath("stopwords.txt").read_text(encoding="utf-8")
    return _parse_stopwords(text.splitlines())


def tokenize(text: str, stopwords: frozenset[str] = frozenset(), source_field: str = "song_name") -> list[Token]:
    """Case-folded alphanumeric runs of ``text``, minus stop-words and 1-char tokens."""
    out = []
    for m in _WORD.finditer(text):
        w = m.group(0).casefold()
        if len(w) < MIN_TOKEN_LENGTH or w in stopwords:
            continue
        out.append(Token(w, source_field))
    return out
