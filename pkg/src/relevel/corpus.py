"""Load, validate, and serve annotated source passages.

The corpus is a single JSON document:

    {"passages": [{"id", "title", "topic", "declared_grade",
                   "paragraphs": [p1, p2, p3, p4],
                   "keywords": [...], "key_phrases": [...]}]}

Passages parse even when invariants are broken; ``validate_passage``
reports every violation instead of throwing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import consistency, readability
from .errors import ParseError, SchemaError

TOPICS = frozenset({
    "biography",
    "humanities",
    "current-events",
    "science-psychology",
    "us-history",
    "world-history",
})

EXPECTED_PARAGRAPHS = 4
TOTAL_WORDS_TARGET = 300
TOTAL_WORDS_TOLERANCE = 0.10  # hard bound: 270-330
PARAGRAPH_WORDS_TARGET = 75
PARAGRAPH_WORDS_TOLERANCE = 0.05  # authoring guidance: 71-79, warning only
KEYWORD_COUNT_HARD = (1, 64)
KEYWORD_COUNT_TYPICAL = (8, 23)
PHRASE_COUNT_TYPICAL = (9, 19)
KEYWORD_MAX_TOKENS = 5


@dataclass(frozen=True)
class KeywordSpan:
    """A 1-5 token span that must survive releveling verbatim."""

    text: str


@dataclass(frozen=True)
class PhraseSpan:
    """A concept-bearing span whose meaning, not wording, must survive."""

    text: str


@dataclass(frozen=True)
class Passage:
    id: str
    title: str
    topic: str
    declared_grade: int
    paragraphs: tuple[str, ...]
    keywords: tuple[KeywordSpan, ...]
    key_phrases: tuple[PhraseSpan, ...]

    @property
    def text(self) -> str:
        """Paragraphs joined by blank lines."""
        return "\n\n".join(self.paragraphs)


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" or "warning"
    rule: str
    detail: str


ValidationReport = list


def _require(entry: dict, key: str, kind, where: str):
    if key not in entry:
        raise SchemaError(f"{where}: missing required field {key!r}")
    value = entry[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def _parse_passage(entry: dict, index: int) -> Passage:
    where = f"passages[{index}]"
    if not isinstance(entry, dict):
        raise SchemaError(f"{where}: passage must be an object")
    pid = _require(entry, "id", str, where)
    title = _require(entry, "title", str, where)
    topic = _require(entry, "topic", str, where)
    grade = _require(entry, "declared_grade", int, where)
    paragraphs = _require(entry, "paragraphs", list, where)
    keywords = _require(entry, "keywords", list, where)
    phrases = _require(entry, "key_phrases", list, where)
    for name, items in (("paragraphs", paragraphs), ("keywords", keywords), ("key_phrases", phrases)):
        if not all(isinstance(x, str) for x in items):
            raise SchemaError(f"{where}: {name} must contain only strings")
    return Passage(
        id=pid,
        title=title,
        topic=topic,
        declared_grade=grade,
        paragraphs=tuple(paragraphs),
        keywords=tuple(KeywordSpan(k) for k in keywords),
        key_phrases=tuple(PhraseSpan(p) for p in phrases),
    )


def load_corpus(path: str | Path) -> list[Passage]:
    """Parse a corpus file into passages.

    Raises ParseError for malformed JSON (with line number) and
    SchemaError for structural problems such as duplicate ids.
    """
    raw = Path(path).read_text(encoding="utf-8")
    if not raw.strip():
        raise ParseError(f"{path}: file is empty")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("passages"), list):
        raise SchemaError(f"{path}: corpus must be an object with a 'passages' list")
    passages = [_parse_passage(entry, i) for i, entry in enumerate(doc["passages"])]
    seen: dict[str, int] = {}
    for i, p in enumerate(passages):
        if p.id in seen:
            raise SchemaError(f"{path}: duplicate passage id {p.id!r} (entries {seen[p.id]} and {i})")
        seen[p.id] = i
    return passages


def serialize_corpus(passages: list[Passage]) -> dict:
    """Inverse of load_corpus: the JSON document for these passages."""
    return {
        "passages": [
            {
                "id": p.id,
                "title": p.title,
                "topic": p.topic,
                "declared_grade": p.declared_grade,
                "paragraphs": list(p.paragraphs),
                "keywords": [k.text for k in p.keywords],
                "key_phrases": [ph.text for ph in p.key_phrases],
            }
            for p in passages
        ]
    }


def save_corpus(passages: list[Passage], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(serialize_corpus(passages), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def validate_passage(passage: Passage) -> list[ValidationIssue]:
    """Every violated invariant for one passage; empty iff conformant.

    Never throws. Total word count and keyword presence are errors;
    paragraph-level word bounds and typical annotation counts are
    warnings.
    """
    issues: list[ValidationIssue] = []

    def err(rule: str, detail: str) -> None:
        issues.append(ValidationIssue("error", rule, detail))

    def warn(rule: str, detail: str) -> None:
        issues.append(ValidationIssue("warning", rule, detail))

    if not passage.id:
        err("id", "passage id is empty")
    if passage.topic not in TOPICS:
        err("topic", f"unknown topic {passage.topic!r}")
    if passage.declared_grade != 12:
        warn("declared-grade", f"declared grade {passage.declared_grade} (corpus convention is 12)")

    if len(passage.paragraphs) != EXPECTED_PARAGRAPHS:
        err(
            "paragraph-count",
            f"expected {EXPECTED_PARAGRAPHS} paragraphs, found {len(passage.paragraphs)}",
        )

    total_words = readability.count_words(passage.text)
    lo = round(TOTAL_WORDS_TARGET * (1 - TOTAL_WORDS_TOLERANCE))
    hi = round(TOTAL_WORDS_TARGET * (1 + TOTAL_WORDS_TOLERANCE))
    if not lo <= total_words <= hi:
        err("total-word-count", f"total word count {total_words} outside {lo}–{hi}")

    p_lo = round(PARAGRAPH_WORDS_TARGET * (1 - PARAGRAPH_WORDS_TOLERANCE))
    p_hi = round(PARAGRAPH_WORDS_TARGET * (1 + PARAGRAPH_WORDS_TOLERANCE))
    for i, para in enumerate(passage.paragraphs, start=1):
        n = readability.count_words(para)
        if not p_lo <= n <= p_hi:
            warn("paragraph-word-count", f"paragraph {i} has {n} words, outside {p_lo}–{p_hi}")

    n_kw = len(passage.keywords)
    if not KEYWORD_COUNT_HARD[0] <= n_kw <= KEYWORD_COUNT_HARD[1]:
        err("keyword-count", f"{n_kw} keywords outside hard bounds {KEYWORD_COUNT_HARD}")
    elif not KEYWORD_COUNT_TYPICAL[0] <= n_kw <= KEYWORD_COUNT_TYPICAL[1]:
        warn("keyword-count-range", f"{n_kw} keywords outside typical range {KEYWORD_COUNT_TYPICAL}")

    for kw in passage.keywords:
        tokens = consistency.normalize_tokens(kw.text)
        if not tokens:
            err("keyword-empty", f"keyword {kw.text!r} is empty after normalization")
            continue
        if not 1 <= len(kw.text.split()) <= KEYWORD_MAX_TOKENS:
            err("keyword-token-count", f"keyword {kw.text!r} has {len(kw.text.split())} tokens, expected 1–{KEYWORD_MAX_TOKENS}")
        if not consistency.contains_keyword(kw.text, passage.text):
            err("keyword-presence", f"keyword {kw.text!r} not found in passage")

    n_ph = len(passage.key_phrases)
    if not PHRASE_COUNT_TYPICAL[0] <= n_ph <= PHRASE_COUNT_TYPICAL[1]:
        warn("phrase-count-range", f"{n_ph} key phrases outside typical range {PHRASE_COUNT_TYPICAL}")
    for ph in passage.key_phrases:
        if not ph.text.strip():
            err("phrase-empty", "key phrase is empty")

    return issues


def validate_corpus(passages: list[Passage]) -> dict[str, list[ValidationIssue]]:
    """Per-passage validation reports, keyed by passage id."""
    return {p.id: validate_passage(p) for p in passages}


def has_errors(report: list[ValidationIssue]) -> bool:
    return any(issue.severity == "error" for issue in report)
