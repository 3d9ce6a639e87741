"""Deterministic sentence segmentation and word tokenization.

The scoring pipeline needs bit-stable segmentation (identical input bytes
give identical sentences on every platform), so a fixed rule set is used
instead of a statistical splitter:

* a sentence boundary occurs after '.', '!' or '?' when followed by
  whitespace and then an uppercase letter or digit;
* a trailing '.' is never a boundary when the text before it ends with a
  known abbreviation (``DEFAULT_ABBREVIATIONS``, matched case-insensitively
  at a word boundary);
* a blank line (two newlines separated only by whitespace) is always a
  boundary;
* segments containing no tokens are dropped.

Decimal numbers such as "3.5" never split because the character after the
'.' is not whitespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

# A token is a maximal run of Unicode alphanumerics (underscore excluded).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_PARAGRAPH_RE = re.compile(r"\n\s*\n")

# Abbreviations whose trailing '.' does not end a sentence. Entries are
# stored without the final period; multi-word entries ("et al") and entries
# with internal periods ("e.g") are matched literally.
DEFAULT_ABBREVIATIONS: tuple[str, ...] = (
    "dr",
    "mr",
    "mrs",
    "ms",
    "prof",
    "fig",
    "eq",
    "et al",
    "e.g",
    "i.e",
    "vs",
    "etc",
    "no",
    "vol",
    "pp",
    "cf",
    "approx",
)


@dataclass(frozen=True)
class Sentence:
    """One segmented sentence: dense ``index``, trimmed ``text``, token count."""

    index: int
    text: str
    token_count: int


def tokenize(text: str) -> list[str]:
    """Lowercased tokens of ``text``; splits on runs of non-alphanumerics."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def load_abbreviations(path: str | Path) -> tuple[str, ...]:
    """Read an abbreviation list (one per line, '#' comments allowed)."""
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.strip()
        if not entry or entry.startswith("#"):
            continue
        entries.append(entry.rstrip(".").lower())
    return tuple(entries)


def _is_abbreviation_before(text: str, dot_pos: int, abbreviations: Sequence[str]) -> bool:
    """True when ``text[:dot_pos]`` ends with a listed abbreviation at a word boundary."""
    before = text[:dot_pos].lower()
    for abbr in abbreviations:
        if not before.endswith(abbr):
            continue
        start = len(before) - len(abbr)
        if start == 0 or not _TOKEN_RE.match(before[start - 1]):
            return True
    return False


def _boundary_positions(paragraph: str, abbreviations: Sequence[str]) -> list[int]:
    """Indices just after each boundary punctuation mark inside ``paragraph``."""
    positions = []
    n = len(paragraph)
    for i, ch in enumerate(paragraph):
        if ch not in ".!?":
            continue
        j = i + 1
        while j < n and paragraph[j].isspace():
            j += 1
        if j == i + 1 or j == n:  # no whitespace after, or end of text
            continue
        nxt = paragraph[j]
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        if ch == "." and _is_abbreviation_before(paragraph, i, abbreviations):
            continue
        positions.append(i + 1)
    return positions


def split_sentences(
    text: str,
    abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS,
) -> list[Sentence]:
    """Segment ``text`` into sentences under the fixed rule set.

    Empty input yields an empty list; the result carries dense indices
    starting at 0 and only segments with at least one token.
    """
    abbreviations = tuple(a.lower() for a in abbreviations)
    segments: list[str] = []
    for paragraph in _PARAGRAPH_RE.split(text):
        start = 0
        for cut in _boundary_positions(paragraph, abbreviations):
            segments.append(paragraph[start:cut])
            start = cut
        segments.append(paragraph[start:])

    sentences = []
    for segment in segments:
        stripped = segment.strip()
        count = len(tokenize(stripped))
        if count == 0:
            continue
        sentences.append(Sentence(index=len(sentences), text=stripped, token_count=count))
    return sentences
