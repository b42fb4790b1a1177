"""Normalization of raw course descriptions into keyword lists.

Pipeline: lowercase, drop blacklisted technical phrases, tokenize with
punctuation acting as a segment boundary, filter stop words and purely
numeric tokens, optionally stem, then expand n-grams over runs of
contiguous surviving tokens. A removed token (stop word, number,
blacklist hit, punctuation) breaks n-gram adjacency, so bigrams never
bridge removed material.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .stem import porter_stem

# Class types, delivery modes, and prerequisite clauses name how a course is
# run, not what it teaches. Entries are regexes; plain phrases are wrapped in
# word boundaries at compile time.
DEFAULT_BLACKLIST: tuple[str, ...] = (
    r"\b(?:pre|co)requisites?\b[^.;]*",
    r"\brecommended:[^.;]*",
    r"\bcrosslisted as[^.;]*",
    r"\b(?:lectures?|laborator(?:y|ies)|seminars?|recitations?|practicums?)\b",
    r"\b(?:units?|credits?)\b",
    r"\b(?:face[- ]to[- ]face|in[- ]person|virtual|hybrid|online)"
    r"(?:\s+(?:instruction|delivery|format|mode|section))?\b",
)

_PLAIN_PHRASE = re.compile(r"^[a-z0-9]+(?: [a-z0-9]+)*$")
_SEGMENT_BOUNDARY = re.compile(r"[^a-z0-9\s]+")
_TOKEN = re.compile(r"[a-z0-9]+")
_HAS_LETTER = re.compile(r"[a-z]")


def default_stopwords() -> frozenset[str]:
    text = resources.files("toprorec.data").joinpath("stopwords_en.txt").read_text()
    return frozenset(text.split())


def load_stopwords(path: str | Path) -> frozenset[str]:
    return frozenset(Path(path).read_text().split())


@dataclass(frozen=True)
class CleaningConfig:
    """Configuration for description cleaning.

    ``blacklist`` entries are regular expressions applied to the lowercased
    text; an entry that is a bare word or phrase matches on word boundaries.
    ``ngram_max`` of 1 keeps unigrams only; 2 adds contiguous bigrams.
    """

    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    blacklist: tuple[str, ...] = DEFAULT_BLACKLIST
    stemming: bool = False
    ngram_max: int = 2

    def __post_init__(self) -> None:
        if self.ngram_max < 1:
            raise ValueError("ngram_max must be >= 1")

    @classmethod
    def from_json(cls, path: str | Path) -> "CleaningConfig":
        raw = json.loads(Path(path).read_text())
        stopwords_path = raw.get("stopwords_path")
        stopwords = (
            load_stopwords(stopwords_path) if stopwords_path else default_stopwords()
        )
        blacklist = raw.get("blacklist")
        return cls(
            stopwords=stopwords,
            blacklist=tuple(blacklist) if blacklist is not None else DEFAULT_BLACKLIST,
            stemming=bool(raw.get("stemming", False)),
            ngram_max=int(raw.get("ngram_max", 2)),
        )

    def to_json_dict(self) -> dict:
        return {
            "blacklist": list(self.blacklist),
            "stemming": self.stemming,
            "ngram_max": self.ngram_max,
            "stopword_count": len(self.stopwords),
        }


@functools.lru_cache(maxsize=32)
def _compile_blacklist(patterns: tuple[str, ...]) -> tuple[re.Pattern, ...]:
    compiled = []
    for pat in patterns:
        if _PLAIN_PHRASE.match(pat):
            pat = r"\b" + pat.replace(" ", r"\s+") + r"\b"
        compiled.append(re.compile(pat))
    return tuple(compiled)


def _emit_ngrams(run: list[str], ngram_max: int, out: list[str]) -> None:
    for i in range(len(run)):
        for n in range(1, ngram_max + 1):
            if i + n <= len(run):
                out.append(" ".join(run[i : i + n]))


def extract_keywords(raw: str, config: CleaningConfig) -> list[str]:
    """Keyword list with multiplicity, in reading order of runs."""
    text = raw.lower()
    for pat in _compile_blacklist(config.blacklist):
        text = pat.sub(" ", text)

    out: list[str] = []
    for segment in _SEGMENT_BOUNDARY.split(text):
        run: list[str] = []
        for tok in _TOKEN.findall(segment):
            if not _HAS_LETTER.search(tok) or tok in config.stopwords:
                _emit_ngrams(run, config.ngram_max, out)
                run = []
                continue
            run.append(porter_stem(tok) if config.stemming else tok)
        _emit_ngrams(run, config.ngram_max, out)
    return out


def clean_description(raw: str, config: CleaningConfig) -> set[str]:
    """Deduplicated keyword set for membership tests (empty input allowed)."""
    return set(extract_keywords(raw, config))
