"""Deterministic text segmentation and Flesch-Kincaid Grade Level scoring.

Grade scores are only comparable under one fixed segmenter, so the word,
sentence, and syllable rules here are frozen and versioned
(``SEGMENTER_VERSION``). The rules:

* A word is a maximal run of letters/digits, optionally joined by internal
  apostrophes or hyphens ("couldn't", "well-known"). Dotted acronyms such
  as "U.S." count as one word. A single capital letter followed by a
  period ("F.") is an initial, not a word.
* Sentences end at ``. ! ?`` followed by optional closing quotes, then
  whitespace and an uppercase letter (or end of text). A stop-list of
  abbreviations ("Mr.", "Rep.", "etc.", ...) and single-letter initials
  suppress splits.
* Syllables are maximal ``[aeiouy]`` vowel groups, minus one for a
  terminal silent "e" (kept for "-le" after a consonant), minimum 1.
  Numbers count as one syllable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import EmptyInputError, DomainError, UnsupportedGradeError

SEGMENTER_VERSION = "1.0"

FKGL_WORDS_PER_SENTENCE_WEIGHT = 0.39
FKGL_SYLLABLES_PER_WORD_WEIGHT = 11.8
FKGL_OFFSET = 15.59

# Surface forms (terminal period included, case significant). Matching on
# the surface avoids swallowing real words like "us." or "no.".
ABBREVIATIONS = frozenset({
    "Mr.", "Mrs.", "Ms.", "Dr.", "St.", "Mt.", "Ft.",
    "Rep.", "Sen.", "Gov.", "Gen.", "Prof.", "Hon.", "Pres.", "Capt.",
    "Jr.", "Sr.", "Rev.", "Sgt.", "Lt.", "Col.",
    "U.S.", "U.K.", "U.N.", "U.S.A.", "D.C.", "B.C.", "A.D.",
    "etc.", "e.g.", "i.e.", "vs.", "cf.", "al.",
    "Inc.", "Co.", "Corp.", "Ltd.",
    "No.", "Fig.", "Vol.", "Ch.", "pp.",
    "Jan.", "Feb.", "Mar.", "Apr.", "Aug.", "Sept.", "Oct.", "Nov.", "Dec.",
})

_VOWELS = frozenset("aeiouy")

# Order matters: dotted acronyms first, then initials (consumed, never
# emitted as words), then plain word runs.
_TOKEN_RE = re.compile(
    r"(?P<acronym>(?:[^\W\d_]\.){2,})"
    r"|(?P<initial>\b[A-Z]\.(?![^\W_]))"
    r"|(?P<word>[^\W_]+(?:['’\-][^\W_]+)*)",
    re.UNICODE,
)

_CLOSERS = "\"'”’)]"
_OPENERS = "\"'“‘(["


@dataclass(frozen=True)
class TextCounts:
    """Word, sentence, and syllable totals for one text."""

    n_words: int
    n_sentences: int
    n_syllables: int


@dataclass(frozen=True)
class GradeScore:
    """A Flesch-Kincaid Grade Level (U.S. grade, unbounded below)."""

    fkgl: float


def _iter_tokens(text: str):
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind != "initial":
            yield kind, m.group(), m.start(), m.end()


def _is_abbreviation_before(text: str, dot_index: int) -> bool:
    """True if the terminator at ``dot_index`` belongs to an abbreviation."""
    if text[dot_index] != ".":
        return False
    # Walk back over the dotted token (letters and interior periods).
    start = dot_index
    while start > 0 and (text[start - 1].isalpha() or text[start - 1] == "."):
        start -= 1
    surface = text[start: dot_index + 1]
    if surface in ABBREVIATIONS:
        return True
    # Single-letter initial: "F." in "Robert F. Broussard".
    if re.fullmatch(r"[A-Z]\.", surface):
        return True
    # Interior of a dotted acronym: the "S." inside "U.S.".
    if re.fullmatch(r"(?:[A-Za-z]\.)+", surface) and len(surface) > 2:
        return True
    return False


def _sentence_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".!?":
            # Collapse runs of terminators ("?!", "...").
            j = i
            while j + 1 < n and text[j + 1] in ".!?":
                j += 1
            if ch == "." and j == i and _is_abbreviation_before(text, i):
                i += 1
                continue
            k = j + 1
            while k < n and text[k] in _CLOSERS:
                k += 1
            if k >= n:
                spans.append((start, n))
                return spans
            if text[k].isspace():
                m = k
                while m < n and text[m].isspace():
                    m += 1
                starts_upper = m < n and (
                    text[m].isupper()
                    or (text[m] in _OPENERS and m + 1 < n and text[m + 1].isupper())
                )
                if starts_upper:
                    spans.append((start, k))
                    start = m
                    i = m
                    continue
            i = j + 1
        else:
            i += 1
    if start < n and text[start:].strip():
        spans.append((start, n))
    return spans


def tokenize(text: str) -> dict:
    """Segment text into sentences and words.

    Returns ``{"sentences": [[token, ...], ...], "words": [token, ...]}``.
    Raises :class:`EmptyInputError` for empty or whitespace-only input.
    """
    if not text or not text.strip():
        raise EmptyInputError("text is empty or whitespace-only")
    sentences = []
    for s_start, s_end in _sentence_spans(text):
        tokens = [tok for _, tok, _, _ in _iter_tokens(text[s_start:s_end])]
        if tokens:
            sentences.append(tokens)
    words = [t for sent in sentences for t in sent]
    return {"sentences": sentences, "words": words}


def word_tokens(text: str) -> list[str]:
    """All word tokens of ``text`` (empty list for empty text)."""
    if not text or not text.strip():
        return []
    return [tok for _, tok, _, _ in _iter_tokens(text)]


def count_words(text: str) -> int:
    return len(word_tokens(text))


def sentence_texts(text: str) -> list[str]:
    """Sentence substrings (stripped), using the frozen sentence rules."""
    if not text or not text.strip():
        return []
    out = []
    for s_start, s_end in _sentence_spans(text):
        segment = text[s_start:s_end].strip()
        if segment:
            out.append(segment)
    return out


def count_syllables(word: str) -> int:
    """Heuristic syllable count for one word token, always >= 1.

    Counts maximal [aeiouy] vowel groups and subtracts one for a terminal
    silent "e" unless the word ends in consonant + "le".
    """
    if not word:
        raise DomainError("cannot count syllables of an empty word")
    letters = re.sub(r"[^a-z]", "", word.lower())
    if not letters:
        return 1  # numbers and other letterless tokens
    groups = len(re.findall(r"[aeiouy]+", letters))
    if letters.endswith("e"):
        silent = True
        if (
            len(letters) >= 3
            and letters.endswith("le")
            and letters[-3] not in _VOWELS
        ):
            silent = False
        if silent:
            groups -= 1
    return max(groups, 1)


def count_text(text: str) -> TextCounts:
    """TextCounts for a text under the frozen segmenter."""
    toks = tokenize(text)
    n_words = len(toks["words"])
    n_sentences = len(toks["sentences"])
    n_syllables = sum(count_syllables(w) for w in toks["words"])
    return TextCounts(n_words=n_words, n_sentences=n_sentences, n_syllables=n_syllables)


def compute_fkgl(counts: TextCounts) -> GradeScore:
    """Evaluate 0.39*(words/sentences) + 11.8*(syllables/words) - 15.59."""
    if counts.n_sentences < 1 or counts.n_words < 1:
        raise DomainError("FKGL requires at least one sentence and one word")
    fkgl = (
        FKGL_WORDS_PER_SENTENCE_WEIGHT * (counts.n_words / counts.n_sentences)
        + FKGL_SYLLABLES_PER_WORD_WEIGHT * (counts.n_syllables / counts.n_words)
        - FKGL_OFFSET
    )
    if not math.isfinite(fkgl):
        raise DomainError("FKGL is not finite for these counts")
    return GradeScore(fkgl=fkgl)


def fkgl_of_text(text: str) -> GradeScore:
    """Tokenize, count syllables, and compute the grade score."""
    return compute_fkgl(count_text(text))


def target_midpoint(grade: int) -> float:
    """Midpoint of the grade band: 4 -> 4.5, 6 -> 6.5, 8 -> 8.5."""
    if grade not in (4, 6, 8):
        raise UnsupportedGradeError(f"unsupported target grade {grade!r}; expected 4, 6, or 8")
    return grade + 0.5
