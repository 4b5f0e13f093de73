"""Tokenization, part-of-speech tagging, and candidate-term filtering.

Only nouns, proper nouns, and verbs survive the filter; everything else
(including stopwords, which the bundled lexicon tags OTHER) is dropped.
The tagger is a pluggable lexicon lookup so a stronger tagger can be
swapped in without code changes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

NOUN = "NOUN"
PROPN = "PROPN"
VERB = "VERB"
OTHER = "OTHER"

POS_TAGS = (NOUN, PROPN, VERB, OTHER)
CANDIDATE_POS = (NOUN, PROPN, VERB)

ORIGIN_AD_TEXT = "ad_text"
ORIGIN_NEIGHBOR_TEXT = "neighbor_text"
ORIGIN_NEIGHBOR_TAG = "neighbor_tag"

# select_keyword tie-break prefers input-text vertices over grafted ones
ORIGIN_RANK = {ORIGIN_AD_TEXT: 0, ORIGIN_NEIGHBOR_TEXT: 1, ORIGIN_NEIGHBOR_TAG: 2}

_WORD_RE = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)?", re.UNICODE)

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ship", "ance", "ence", "ity", "ure", "ism")
_VERB_SUFFIXES = ("ize", "ise", "ify", "ate")


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    normalized: str
    pos: str
    position: int


@dataclass(frozen=True)
class CandidateTerm:
    term: str
    pos: str
    position: int
    origin: str = ORIGIN_AD_TEXT


def tokenize(text: str) -> list[TaggedToken]:
    """Unicode word tokens, punctuation stripped, hyphens split, digit-only
    tokens dropped. Positions index the raw token stream (first occurrence).
    """
    tokens: list[TaggedToken] = []
    position = 0
    for raw in text.replace("-", " ").split():
        for match in _WORD_RE.finditer(raw):
            surface = match.group(0)
            tokens.append(
                TaggedToken(
                    surface=surface,
                    normalized=surface.lower(),
                    pos=OTHER,
                    position=position,
                )
            )
            position += 1
    return tokens


class LexiconTagger:
    """word -> most-frequent-POS lookup with suffix/shape heuristics for unknowns."""

    def __init__(self, lexicon: dict[str, str]):
        self.lexicon = lexicon
        self._memo: dict[tuple[str, bool], str] = {}

    @classmethod
    def from_file(cls, path: str | Path) -> "LexiconTagger":
        lexicon: dict[str, str] = {}
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or parts[1] not in POS_TAGS:
                    raise ValueError(f"{path}:{lineno}: expected 'token<TAB>POS'")
                lexicon[parts[0].lower()] = parts[1]
        return cls(lexicon)

    @classmethod
    def bundled(cls) -> "LexiconTagger":
        ref = resources.files("imagequery").joinpath("data/pos_lexicon.tsv")
        with resources.as_file(ref) as path:
            return cls.from_file(path)

    def tag_word(self, surface: str, normalized: str) -> str:
        pos = self.lexicon.get(normalized)
        if pos is not None:
            return pos
        key = (normalized, surface[:1].isupper())
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        pos = self._tag_unknown(surface, normalized)
        self._memo[key] = pos
        return pos

    def _tag_unknown(self, surface: str, normalized: str) -> str:
        # plural / 3rd-person-s fallback before shape heuristics
        if normalized.endswith("s") and len(normalized) > 2:
            base = self.lexicon.get(normalized[:-1])
            if base is not None:
                return base
        if surface[:1].isupper():
            return PROPN
        for suffix in _NOUN_SUFFIXES:
            if normalized.endswith(suffix):
                return NOUN
        for suffix in _VERB_SUFFIXES:
            if normalized.endswith(suffix):
                return VERB
        return OTHER


def tag_pos(tokens: list[TaggedToken], tagger: LexiconTagger) -> list[TaggedToken]:
    return [
        TaggedToken(t.surface, t.normalized, tagger.tag_word(t.surface, t.normalized), t.position)
        for t in tokens
    ]


def candidate_filter(tagged: list[TaggedToken]) -> list[CandidateTerm]:
    """Keep NOUN/PROPN/VERB tokens, deduped by normalized form (earliest wins)."""
    seen: dict[str, CandidateTerm] = {}
    for tok in tagged:
        if tok.pos not in CANDIDATE_POS:
            continue
        if tok.normalized not in seen:
            seen[tok.normalized] = CandidateTerm(
                term=tok.normalized,
                pos=tok.pos,
                position=tok.position,
                origin=ORIGIN_AD_TEXT,
            )
    return list(seen.values())


def extract_candidates(text: str, tagger: LexiconTagger) -> list[CandidateTerm]:
    """tokenize -> tag -> filter in one step."""
    return candidate_filter(tag_pos(tokenize(text), tagger))
