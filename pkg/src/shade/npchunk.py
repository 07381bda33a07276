"""Deterministic noun-phrase extraction for the second candidate list.

A small rule tagger (closed-class lexicons plus suffix heuristics, unknown
words default to NOUN) feeds an (ADJ|NOUN)+ chunk grammar. The lexicons ship
with the package so identical text always yields identical phrases, on any
platform and in any run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path


class Tag(str, Enum):
    DET = "DET"
    PREP = "PREP"
    CONJ = "CONJ"
    PRON = "PRON"
    AUX = "AUX"
    ADV = "ADV"
    ADJ = "ADJ"
    NOUN = "NOUN"
    PUNCT = "PUNCT"


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    tag: Tag


# Checked in this order; the first lexicon containing the word wins.
_LEXICON_FILES = (
    ("determiners.txt", Tag.DET),
    ("prepositions.txt", Tag.PREP),
    ("conjunctions.txt", Tag.CONJ),
    ("pronouns.txt", Tag.PRON),
    ("auxiliaries.txt", Tag.AUX),
    ("stopwords.txt", Tag.ADV),
)

_ADJ_SUFFIXES = ("-ous", "-ful", "-ic", "-al", "-ish", "-ive")
_MIN_STEM = 3


class Lexicon:
    """Closed-class word lists, one file per class, one word per line."""

    def __init__(self, tag_by_word: dict[str, Tag]) -> None:
        self._tag_by_word = tag_by_word

    @classmethod
    def load(cls, directory: str | Path | None = None) -> "Lexicon":
        """Load from a directory of lexicon files; bundled files by default."""
        tag_by_word: dict[str, Tag] = {}
        for filename, tag in _LEXICON_FILES:
            if directory is None:
                text = (
                    resources.files("shade").joinpath("lexicon", filename).read_text("utf-8")
                )
            else:
                text = Path(directory, filename).read_text("utf-8")
            for line in text.splitlines():
                word = line.strip().lower()
                if word and word not in tag_by_word:
                    tag_by_word[word] = tag
        return cls(tag_by_word)

    def lookup(self, word: str) -> Tag | None:
        return self._tag_by_word.get(word.lower())


_default_lexicon: Lexicon | None = None


def default_lexicon() -> Lexicon:
    global _default_lexicon
    if _default_lexicon is None:
        _default_lexicon = Lexicon.load()
    return _default_lexicon


_TOKEN_RE = re.compile(r"\w+(?:['’-]\w+)*|[^\w\s]")


def tokenize(plain: str) -> list[str]:
    """Whitespace/punctuation tokenization keeping internal hyphens and
    apostrophes, so "half-elf" stays one token."""
    return _TOKEN_RE.findall(plain)


def _tag_one(token: str, lexicon: Lexicon) -> Tag:
    if not any(ch.isalnum() for ch in token):
        return Tag.PUNCT
    from_lexicon = lexicon.lookup(token)
    if from_lexicon is not None:
        return from_lexicon
    lowered = token.lower()
    if lowered.endswith("ly") and len(lowered) - 2 >= _MIN_STEM:
        return Tag.ADV
    for suffix in _ADJ_SUFFIXES:
        bare = suffix[1:]
        if lowered.endswith(bare) and len(lowered) - len(bare) >= _MIN_STEM:
            return Tag.ADJ
    return Tag.NOUN


def pos_tag(tokens: list[str], lexicon: Lexicon | None = None) -> list[TaggedToken]:
    """Tag each token: lexicon first, then suffix heuristics, default NOUN."""
    lexicon = lexicon or default_lexicon()
    return [TaggedToken(surface=token, tag=_tag_one(token, lexicon)) for token in tokens]


def extract_noun_phrases(plain: str, lexicon: Lexicon | None = None) -> list[str]:
    """Candidate labels from plain lead text, in first-occurrence order.

    Chunks are maximal (ADJ|NOUN)+ runs trimmed to end at their last NOUN.
    Multiword chunks also emit their head noun on its own, so a bare
    hypernym buried in a longer phrase still shows up as a candidate.
    De-duplication is case-insensitive, first surface form kept.
    """
    labels: list[str] = []
    seen: set[str] = set()

    def emit(label: str) -> None:
        key = label.casefold()
        if key not in seen:
            seen.add(key)
            labels.append(label)

    def flush(run: list[TaggedToken]) -> None:
        while run and run[-1].tag is not Tag.NOUN:
            run.pop()
        if not run:
            return
        emit(" ".join(token.surface for token in run))
        if len(run) > 1:
            emit(run[-1].surface)

    run: list[TaggedToken] = []
    for token in pos_tag(tokenize(plain), lexicon):
        if token.tag in (Tag.ADJ, Tag.NOUN):
            run.append(token)
        else:
            flush(run)
            run = []
    flush(run)
    return labels
