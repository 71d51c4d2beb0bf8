"""Keyword retention, word-count drift, and greedy token-embedding similarity.

Keyword matching is case-insensitive exact token-sequence matching with no
stemming: a keyword is retained iff its normalized tokens occur as a
contiguous run of the normalized passage tokens. Similarity follows the
greedy token-matching scheme (max pairwise cosine per token, averaged),
with no IDF weighting and no baseline rescaling.
"""

from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, EmptyInputError

_WORD_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*", re.UNICODE)


@dataclass(frozen=True)
class KeywordResult:
    total: int
    retained: int
    accuracy: float
    misses: tuple[str, ...]


@dataclass(frozen=True)
class SimilarityScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class WordCountDelta:
    source_len: int
    regen_len: int
    pct_change: float


@dataclass(frozen=True)
class TokenEmbeddingSequence:
    """Ordered tokens with one embedding vector per token."""

    tokens: tuple[str, ...]
    vectors: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.vectors):
            raise DomainError("token/vector count mismatch")


def normalize_tokens(text: str) -> list[str]:
    """Lowercased, NFKC-normalized word tokens with boundary punctuation
    stripped (punctuation other than in-word apostrophes/hyphens delimits)."""
    normalized = unicodedata.normalize("NFKC", text).lower()
    return _WORD_RE.findall(normalized)


def _keyword_text(keyword) -> str:
    return keyword.text if hasattr(keyword, "text") else str(keyword)


def contains_keyword(keyword: str, text: str) -> bool:
    """True iff the keyword's normalized tokens occur contiguously in the
    normalized text tokens."""
    needle = normalize_tokens(keyword)
    if not needle:
        return False
    haystack = normalize_tokens(text)
    # Sentinel-joined substring search; tokens never contain "\x00".
    sep = "\x00"
    return (sep + sep.join(needle) + sep) in (sep + sep.join(haystack) + sep)


def keyword_accuracy(keywords: Sequence, text: str) -> KeywordResult:
    """Ratio of keywords retained in ``text``.

    Raises DomainError for an empty keyword list and EmptyInputError for
    empty text (screen degenerate outputs before scoring).
    """
    if not keywords:
        raise DomainError("keyword list is empty")
    if not text or not text.strip():
        raise EmptyInputError("cannot score keywords against empty text")
    misses = []
    retained = 0
    for kw in keywords:
        surface = _keyword_text(kw)
        if contains_keyword(surface, text):
            retained += 1
        else:
            misses.append(surface)
    total = len(keywords)
    return KeywordResult(
        total=total,
        retained=retained,
        accuracy=retained / total,
        misses=tuple(misses),
    )


def word_count_change(source: str, regen: str) -> WordCountDelta:
    """Percent change in word count relative to the source length.

    100 * |len(source) - len(regen)| / len(source), words counted by the
    frozen segmenter.
    """
    from . import readability

    source_len = readability.count_words(source)
    regen_len = readability.count_words(regen)
    if source_len < 1:
        raise DomainError("source text has no words")
    pct = 100.0 * abs(source_len - regen_len) / source_len
    return WordCountDelta(source_len=source_len, regen_len=regen_len, pct_change=pct)


def _as_matrix(seq: TokenEmbeddingSequence, label: str) -> np.ndarray:
    mat = np.asarray(seq.vectors, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] == 0:
        raise DomainError(f"{label} sequence is empty")
    return mat


def greedy_similarity(
    reference: TokenEmbeddingSequence, candidate: TokenEmbeddingSequence
) -> SimilarityScore:
    """Greedy-match precision/recall/F1 over pairwise cosine similarities.

    Recall averages, over reference tokens, the max cosine against all
    candidate tokens; precision is the mirror over candidate tokens.
    Each cosine is computed pair-in-isolation (1-D dots), so a token's
    similarity never depends on what else is in the sequence: identical
    sequences score exactly 1.0 and duplicated tokens cannot perturb the
    score in the last ulp.
    """
    ref = _as_matrix(reference, "reference")
    cand = _as_matrix(candidate, "candidate")
    if ref.shape[1] != cand.shape[1]:
        raise DomainError(
            f"embedding dimension mismatch: {ref.shape[1]} vs {cand.shape[1]}"
        )
    ref_self = [float(np.dot(u, u)) for u in ref]
    cand_self = [float(np.dot(v, v)) for v in cand]
    if 0.0 in ref_self:
        raise DomainError("reference sequence contains a zero vector")
    if 0.0 in cand_self:
        raise DomainError("candidate sequence contains a zero vector")
    cosines = np.empty((ref.shape[0], cand.shape[0]))
    for i, u in enumerate(ref):
        su = ref_self[i]
        for j, v in enumerate(cand):
            cos = float(np.dot(u, v)) / math.sqrt(su * cand_self[j])
            cosines[i, j] = min(1.0, max(-1.0, cos))
    recall = float(cosines.max(axis=1).mean())
    precision = float(cosines.max(axis=0).mean())
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return SimilarityScore(precision=precision, recall=recall, f1=f1)


def semantic_similarity(source_text: str, regen_text: str, provider) -> SimilarityScore:
    """Embed both passages via ``provider`` and greedy-match them.

    Scores are passage-level: each whole text is one token-embedding
    sequence. The provider must expose ``embed(texts) -> [sequence, ...]``.
    """
    if not source_text or not source_text.strip():
        raise EmptyInputError("source text is empty")
    if not regen_text or not regen_text.strip():
        raise EmptyInputError("regenerated text is empty")
    source_seq, regen_seq = provider.embed([source_text, regen_text])
    if not source_seq.tokens or not regen_seq.tokens:
        raise DomainError("embedding provider returned zero tokens")
    return greedy_similarity(source_seq, regen_seq)
