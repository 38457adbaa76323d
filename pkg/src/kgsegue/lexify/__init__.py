"""Lexical features of item names: tokens, stems, phonetic codes, lexicon links."""

from .lexicon import FIELD_RELATIONS, LexicalResources, LexiconError, lexical_expand, load_lexicon
from .phonetic import PhoneticRule, RuleError, RuleSet, default_rules, load_rules, phonetic_encode
from .porter import porter_stem
from .tokens import Token, default_stopwords, load_stopwords, tokenize

__all__ = [
    "FIELD_RELATIONS",
    "LexicalResources",
    "LexiconError",
    "PhoneticRule",
    "RuleError",
    "RuleSet",
    "Token",
    "default_rules",
    "default_stopwords",
    "lexical_expand",
    "load_lexicon",
    "load_rules",
    "load_stopwords",
    "phonetic_encode",
    "porter_stem",
    "tokenize",
]
