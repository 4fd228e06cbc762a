"""Sentence splitting, word tokenization and syllable counting.

Turkish syllables are counted exactly: every syllable carries exactly one
vowel, so the syllable count of a word is its vowel count. English uses the
usual vowel-group heuristic, which is knowingly imperfect.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal

Language = Literal["turkish", "english"]
HardWordRule = Literal["gunning", "plain"]

TURKISH_VOWELS = frozenset("aeıioöuü")
ENGLISH_VOWELS = frozenset("aeiouy")

TERMINATORS = ".!?…"
# Closing marks that stay attached to the sentence they end.
_CLOSERS = "\"'”’»)]"


class EmptyText(ValueError):
    """Input has no non-whitespace content."""


class NoWords(ValueError):
    """Input has content but no alphabetic word tokens."""


@dataclass(frozen=True)
class WordToken:
    surface: str
    char_count: int
    syllable_count: int


@dataclass(frozen=True)
class TextStats:
    """Counts and averages shared by every readability formula.

    ``asl`` doubles as OKS in the Turkish formulas. ``awl_chars`` feeds ARI,
    ``awl_syllables`` feeds Çetinkaya-Uzun. ``h3``..``h6`` are per-sentence
    averages of words with 3, 4, 5 and 6+ syllables.
    """

    sentence_count: int
    word_count: int
    asl: float
    asw: float
    awl_chars: float
    awl_syllables: float
    phw: float
    polysyllable_count: int
    h3: float
    h4: float
    h5: float
    h6: float
    syllable_count: int = 0
    char_count: int = 0
    hard_word_count: int = 0

    @property
    def oks(self) -> float:
        return self.asl


def turkish_lower(text: str) -> str:
    """Lowercase with Turkish dotted/dotless i handling."""
    return text.replace("İ", "i").replace("I", "ı").lower()


def load_abbreviations(path: str | Path | None = None) -> frozenset[str]:
    """Read an abbreviation list: one entry per line, ``#`` starts a comment line.

    With no path the bundled default list is used.
    """
    if path is None:
        raw = resources.files("yodkit").joinpath("data/abbreviations.txt").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    entries = set()
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entries.add(turkish_lower(line))
    return frozenset(entries)


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    return load_abbreviations()


def _is_guarded_period(text: str, i: int, abbreviations: frozenset[str]) -> bool:
    # Decimal number: digit '.' digit
    if 0 < i < len(text) - 1 and text[i - 1].isdigit() and text[i + 1].isdigit():
        return True
    start = i
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start : i + 1].lstrip("\"'“‘«([")
    return turkish_lower(word) in abbreviations


def split_sentences(text: str, abbreviations: Iterable[str] | None = None) -> list[str]:
    """Split ``text`` into sentences ending at ``. ! ? …`` or end of input.

    A period does not end a sentence when it sits inside a decimal number or
    closes a known abbreviation. A run of terminators (``?!``, ``...``) and any
    closing quotes or brackets after it stay with the sentence.
    """
    if not text or not text.strip():
        raise EmptyText("text has no non-whitespace content")
    abbrevs = (
        default_abbreviations()
        if abbreviations is None
        else frozenset(turkish_lower(a) for a in abbreviations)
    )

    sentences: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch not in TERMINATORS:
            i += 1
            continue
        if ch == "." and _is_guarded_period(text, i, abbrevs):
            i += 1
            continue
        j = i + 1
        while j < n and text[j] in TERMINATORS:
            j += 1
        while j < n and text[j] in _CLOSERS:
            j += 1
        if j < n and not text[j].isspace():
            i = j
            continue
        chunk = text[start:j].strip()
        if chunk:
            sentences.append(chunk)
        start = j
        i = j
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def count_syllables_turkish(word: str) -> int:
    return sum(1 for ch in turkish_lower(word) if ch in TURKISH_VOWELS)


def count_syllables_english(word: str) -> int:
    """Vowel-group count with a silent-e correction, floored at 1."""
    w = "".join(ch for ch in word.lower() if ch.isalpha())
    if not w:
        return 0
    groups = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in ENGLISH_VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if w.endswith("e"):
        consonant_le = w.endswith("le") and len(w) > 2 and w[-3] not in ENGLISH_VOWELS
        if not consonant_le:
            groups -= 1
    return max(groups, 1)


def _strip_edges(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def tokenize_words(sentence: str, language: Language = "turkish") -> list[WordToken]:
    """Whitespace tokens with edge punctuation removed.

    Internal apostrophes and hyphens survive (``İstanbul'da`` is one word).
    Tokens without any letter are dropped.
    """
    counter = count_syllables_turkish if language == "turkish" else count_syllables_english
    tokens = []
    for raw in sentence.split():
        surface = _strip_edges(raw)
        letters = sum(1 for ch in surface if ch.isalpha())
        if letters == 0:
            continue
        tokens.append(WordToken(surface, letters, counter(surface)))
    return tokens


def _gunning_suffix_exempt(word: str) -> bool:
    # Three syllables only because of an -ed/-es ending.
    w = word.lower()
    if not (w.endswith("ed") or w.endswith("es")):
        return False
    return count_syllables_english(word) == 3 and count_syllables_english(w[:-2]) == 2


def stats_from_sentences(
    sentences: list[list[WordToken]],
    language: Language = "turkish",
    hard_word_rule: HardWordRule | None = None,
) -> TextStats:
    """Aggregate already-tokenized sentences; empty sentences are skipped."""
    rule = hard_word_rule or ("gunning" if language == "english" else "plain")
    sentences = [s for s in sentences if s]
    if not sentences:
        raise NoWords("no alphabetic words in text")
    sc = len(sentences)
    words = [w for s in sentences for w in s]
    wc = len(words)
    syllables = sum(w.syllable_count for w in words)
    chars = sum(w.char_count for w in words)
    poly = sum(1 for w in words if w.syllable_count >= 3)
    if rule == "gunning" and language == "english":
        hard = sum(
            1 for w in words if w.syllable_count >= 3 and not _gunning_suffix_exempt(w.surface)
        )
    else:
        hard = poly
    h = [0, 0, 0, 0]
    for w in words:
        if w.syllable_count >= 3:
            h[min(w.syllable_count, 6) - 3] += 1
    return TextStats(
        sentence_count=sc,
        word_count=wc,
        asl=wc / sc,
        asw=syllables / wc,
        awl_chars=chars / wc,
        awl_syllables=syllables / wc,
        phw=hard / wc,
        polysyllable_count=poly,
        h3=h[0] / sc,
        h4=h[1] / sc,
        h5=h[2] / sc,
        h6=h[3] / sc,
        syllable_count=syllables,
        char_count=chars,
        hard_word_count=hard,
    )


def compute_stats(
    text: str,
    language: Language = "turkish",
    hard_word_rule: HardWordRule | None = None,
    abbreviations: Iterable[str] | None = None,
) -> TextStats:
    """Full pipeline: split, tokenize, count, aggregate.

    ``hard_word_rule`` defaults to ``"gunning"`` for English (3-syllable
    words made so by -ed/-es are not hard) and ``"plain"`` for Turkish.
    Sentences with no words do not count toward the sentence total.
    """
    sentences = split_sentences(text, abbreviations)
    tokenized = [tokenize_words(s, language) for s in sentences]
    return stats_from_sentences(tokenized, language, hard_word_rule)
