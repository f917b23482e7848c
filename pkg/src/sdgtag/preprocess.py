"""Text normalization and token pipeline shared by corpus documents and queries.

The same code path handles both sides: normalize -> tokenize -> lemmatize ->
stem -> drop stop words. Goal mentions are canonicalized early so that
"Sustainable Development Goal 5", "5th SDG" and "sdg5" all end up as the
single token "sdg5".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from . import _snowball

SDG_MIN = 1
SDG_MAX = 17

_ORDINAL_WORDS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
    "eleventh": 11, "twelfth": 12, "thirteenth": 13, "fourteenth": 14,
    "fifteenth": 15, "sixteenth": 16, "seventeenth": 17,
}

_GOAL_PHRASE_RE = re.compile(r"\bsustainable\s+development\s+goals?\b")
_ORDINAL_SDG_RE = re.compile(
    r"\b(?:(%s)|(\d+)(?:st|nd|rd|th))\s+sdg\b" % "|".join(_ORDINAL_WORDS)
)
_CARDINAL_SDG_RE = re.compile(r"\bsdg\s*(\d+)\b")

# Letters/digits, with internal hyphens kept so digit-bearing ids ("sdg3")
# and hyphenated compounds survive as single tokens. Punctuation never
# forms a token.
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)


@dataclass(frozen=True)
class ProcessedDocument:
    """Ordered stemmed tokens of one normalized text."""

    tokens: tuple[str, ...]

    @property
    def token_count(self) -> int:
        return len(self.tokens)


@lru_cache(maxsize=1)
def stop_words() -> frozenset[str]:
    """The bundled frozen stop-word list."""
    text = resources.files("sdgtag.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=1)
def lemma_exceptions() -> dict[str, str]:
    """Irregular English noun/verb forms; unknown words pass through."""
    text = resources.files("sdgtag.data").joinpath("lemma_exceptions_en.tsv").read_text("utf-8")
    table = {}
    for line in text.splitlines():
        if line.strip():
            form, lemma = line.split("\t")
            table[form] = lemma
    return table


def _fuse_ordinal(match: re.Match) -> str:
    word, digits = match.group(1), match.group(2)
    n = _ORDINAL_WORDS[word] if word else int(digits)
    if SDG_MIN <= n <= SDG_MAX:
        return f"sdg{n}"
    return match.group(0)


def _fuse_cardinal(match: re.Match) -> str:
    n = int(match.group(1))
    if SDG_MIN <= n <= SDG_MAX:
        return f"sdg{n}"
    return match.group(0)


def normalize(text: str) -> str:
    """Lowercase and canonicalize SDG mentions.

    "sustainable development goal(s)" becomes "sdg"; an "sdg" followed by a
    cardinal 1-17, or preceded by an ordinal 1st-17th (word or numeric),
    fuses into "sdg<n>". Numbers outside [1, 17] are left alone. The
    function is total and idempotent.
    """
    text = text.lower()
    text = _GOAL_PHRASE_RE.sub("sdg", text)
    text = _ORDINAL_SDG_RE.sub(_fuse_ordinal, text)
    text = _CARDINAL_SDG_RE.sub(_fuse_cardinal, text)
    return text


def lemmatize(token: str) -> str:
    """Map an irregular form to its lemma; pass everything else through."""
    return lemma_exceptions().get(token, token)


def process(text: str) -> ProcessedDocument:
    """Full pipeline: normalize, tokenize, lemmatize, stem, drop stop words.

    A token is dropped when its surface form, lemma or stem is a stop word;
    checking all three keeps inflected stop words out even when stemming
    mangles them.
    """
    stops = stop_words()
    kept = []
    for surface in _TOKEN_RE.findall(normalize(text)):
        lemma = lemmatize(surface)
        stemmed = _snowball.stem(lemma)
        if not stemmed:
            continue
        if surface in stops or lemma in stops or stemmed in stops:
            continue
        kept.append(stemmed)
    return ProcessedDocument(tokens=tuple(kept))
