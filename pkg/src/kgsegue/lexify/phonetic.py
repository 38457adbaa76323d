"""Letter-to-sound rule interpreter in the style of the NRL English rules.

A rule file has one rule per line::

    left/target/right=PHONEMES

``target`` is the grapheme string the rule consumes; ``left`` and ``right``
constrain the letters before and after it. ``PHONEMES`` is a space-separated
list of phoneme symbols and may be empty (silent letters). Lines that are
blank or start with ``# `` (hash, space) are ignored.

Context symbols:

    _   word boundary
    #   one or more vowels
    :   zero or more consonants
    ^   exactly one consonant
    .   one voiced consonant (b d g j l m n r v w z)
    +   one front vowel (e i y)
    &   a sibilant: s c g z x j, or ch / sh
    @   t s r d l z n j, or th / ch / sh
    %   a word-final suffix: ing ely er es ed e  (right context only)

Any lowercase letter or apostrophe stands for itself. Vowels are a e i o u;
y counts as a consonant. Matching is greedy with no backtracking.

Scanning is left to right. At each position the first rule (in file order)
whose target and contexts match fires. A letter no rule covers is skipped
without output, so every firing or skip consumes at least one character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "PhoneticRule",
    "RuleError",
    "RuleSet",
    "default_rules",
    "load_rules",
    "parse_rules",
    "phonetic_encode",
]

VOWELS = frozenset("aeiou")
VOICED = frozenset("bdgjlmnrvwz")
FRONT = frozenset("eiy")
SIBILANT = frozenset("scgzxj")
LONG_U = frozenset("tsrdlznj")
SUFFIXES = ("ing", "ely", "er", "es", "ed", "e")

CONTEXT_SYMBOLS = frozenset("_#:^.+&@%")
_LITERAL = re.compile(r"^[a-z']$")
_TARGET = re.compile(r"^[a-z']+$")
_PHONEME = re.compile(r"^[A-Z]+$")


class RuleError(ValueError):
    pass


def _is_letter(ch: str) -> bool:
    return ch.isalpha() or ch == "'"


def _is_consonant(ch: str) -> bool:
    return ch.isalpha() and ch not in VOWELS


@dataclass(frozen=True)
class PhoneticRule:
    left: str
    target: str
    right: str
    phonemes: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.target:
            raise RuleError("empty rule target")
        if not _TARGET.match(self.target):
            raise RuleError(f"invalid target {self.target!r}")
        for side, pat in (("left", self.left), ("right", self.right)):
            for ch in pat:
                if ch in CONTEXT_SYMBOLS or _LITERAL.match(ch):
                    continue
                raise RuleError(f"unknown context symbol {ch!r} in {side} context {pat!r}")
        if "%" in self.left:
            raise RuleError("suffix symbol '%' is only allowed in right contexts")
        for ph in self.phonemes:
            if not _PHONEME.match(ph):
                raise RuleError(f"invalid phoneme {ph!r}")

    def matches(self, word: str, i: int) -> bool:
        end = i + len(self.target)
        if word[i:end] != self.target:
            return False
        return _match_left(self.left, word, i - 1) and _match_right(self.right, word, end)


def _at(word: str, i: int) -> str:
    return word[i] if 0 <= i < len(word) else " "


def _match_left(pat: str, word: str, t: int) -> bool:
    # pattern read right to left, text pointer moving left from ``t``
    for sym in reversed(pat):
        ch = _at(word, t)
        if sym == "_":
            if _is_letter(ch):
                return False
            t -= 1
        elif sym == "#":
            if ch not in VOWELS:
                return False
            while _at(word, t) in VOWELS:
                t -= 1
        elif sym == ":":
            while _is_consonant(_at(word, t)):
                t -= 1
        elif sym == "^":
            if not _is_consonant(ch):
                return False
            t -= 1
        elif sym == ".":
            if ch not in VOICED:
                return False
            t -= 1
        elif sym == "+":
            if ch not in FRONT:
                return False
            t -= 1
        elif sym == "&":
            if ch == "h" and _at(word, t - 1) in "cs":
                t -= 2
            elif ch in SIBILANT:
                t -= 1
            else:
                return False
        elif sym == "@":
            if ch == "h" and _at(word, t - 1) in "tcs":
                t -= 2
            elif ch in LONG_U:
                t -= 1
            else:
                return False
        else:
            if ch != sym:
                return False
            t -= 1
    return True


def _match_right(pat: str, word: str, t: int) -> bool:
    for sym in pat:
        ch = _at(word, t)
        if sym == "_":
            if _is_letter(ch):
                return False
            t += 1
        elif sym == "#":
            if ch not in VOWELS:
                return False
            while _at(word, t) in VOWELS:
                t += 1
        elif sym == ":":
            while _is_consonant(_at(word, t)):
                t += 1
        elif sym == "^":
            if not _is_consonant(ch):
                return False
            t += 1
        elif sym == ".":
            if ch not in VOICED:
                return False
            t += 1
        elif sym == "+":
            if ch not in FRONT:
                return False
            t += 1
        elif sym == "&":
            if ch in "cs" and _at(word, t + 1) == "h":
                t += 2
            elif ch in SIBILANT:
                t += 1
            else:
                return False
        elif sym == "@":
            if ch in "tcs" and _at(word, t + 1) == "h":
                t += 2
            elif ch in LONG_U:
                t += 1
            else:
                return False
        elif sym == "%":
            for suf in SUFFIXES:
                if word.startswith(suf, t) and not _is_letter(_at(word, t + len(suf))):
                    t += len(suf)
                    break
            else:
                return False
        else:
            if ch != sym:
                return False
            t += 1
    return True


def _is_comment(line: str) -> bool:
    # rules may start with the vowel-class '#', comments start with "# "
    return line == "#" or line.startswith("# ")


def parse_rules(lines: Iterable[str], name: str = "<rules>") -> RuleSet:
    rules = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or _is_comment(line):
            continue
        lhs, sep, rhs = line.partition("=")
        parts = lhs.split("/")
        if not sep or len(parts) != 3:
            raise RuleError(f"{name}:{lineno}: expected 'left/target/right=phonemes'")
        try:
            rules.append(PhoneticRule(parts[0], parts[1], parts[2], tuple(rhs.split())))
        except RuleError as exc:
            raise RuleError(f"{name}:{lineno}: {exc}") from None
    return RuleSet(rules)


def load_rules(path: str | Path) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh, str(path))


def default_rules() -> RuleSet:
    text = resources.files("kgsegue.data").joinpath("nrl_rules.txt").read_text(encoding="utf-8")
    return parse_rules(text.splitlines(), "nrl_rules.txt")


class RuleSet(tuple):
    """Ordered rules, indexed by the first letter of their target."""

    def __new__(cls, rules: Iterable[PhoneticRule]) -> "RuleSet":
        self = super().__new__(cls, rules)
        self.by_first = {}
        for r in self:
            self.by_first.setdefault(r.target[0], []).append(r)
        return self


def phonetic_encode(word: str, rules: Sequence[PhoneticRule]) -> str:
    """Phoneme string for ``word`` (space-separated symbols, possibly empty)."""
    if not isinstance(rules, RuleSet):
        rules = RuleSet(rules)
    index = rules.by_first
    out: list[str] = []
    i = 0
    while i < len(word):
        for rule in index.get(word[i], ()):
            if rule.matches(word, i):
                out.extend(rule.phonemes)
                i += len(rule.target)
                break
        else:
            i += 1
    return " ".join(out)
