"""Render the four prompting strategies into concrete chat requests.

Each render produces a system string and a single user string (few-shot
demonstrations are part of the user string). GPT and Claude requests wrap
the passage in ``####`` delimiters; Mixtral uses ``<<<`` / ``>>>``. The
few-shot strategies take exactly three exemplars, shipped as data files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

from . import readability
from .corpus import Passage
from .errors import ChainingError, ConfigurationError, UnsupportedGradeError

ZERO_SHOT = "zero_shot"
PROMPT_CHAINING = "prompt_chaining"
CHAIN_OF_THOUGHT = "chain_of_thought"
DIRECTIONAL_STIMULUS = "directional_stimulus"
MULTI_AGENT = "multi_agent"

STRATEGY_KINDS = (ZERO_SHOT, PROMPT_CHAINING, CHAIN_OF_THOUGHT, DIRECTIONAL_STIMULUS, MULTI_AGENT)

# Short labels used in report tables.
STRATEGY_LABELS = {
    ZERO_SHOT: "Zero-shot",
    PROMPT_CHAINING: "PC",
    CHAIN_OF_THOUGHT: "CoT",
    DIRECTIONAL_STIMULUS: "DSP",
    MULTI_AGENT: "Multi-Agent",
}

MODEL_FAMILIES = ("gpt", "claude", "mixtral")
_DELIMITERS = {"gpt": ("####", "####"), "claude": ("####", "####"), "mixtral": ("<<<", ">>>")}
_DELIMITER_MENTION = {"gpt": "####", "claude": "####", "mixtral": "<<<>>>"}

FEW_SHOT_EXEMPLARS = 3
LONG_WORD_MIN_SYLLABLES = 3


@dataclass(frozen=True)
class GradeTarget:
    """Target grade band plus the length budget every strategy enforces."""

    grade: int
    length_words: int = 300
    length_tolerance: float = 0.10
    paragraphs: int = 4

    def __post_init__(self):
        if self.grade not in (4, 6, 8):
            raise UnsupportedGradeError(f"unsupported target grade {self.grade!r}; expected 4, 6, or 8")

    @property
    def grade_token(self) -> str:
        return f"{self.grade}th"

    @property
    def midpoint(self) -> float:
        return readability.target_midpoint(self.grade)

    def length_bounds(self) -> tuple[int, int]:
        lo = round(self.length_words * (1 - self.length_tolerance))
        hi = round(self.length_words * (1 + self.length_tolerance))
        return lo, hi


@dataclass(frozen=True)
class Exemplar:
    """One worked demonstration for the few-shot strategies."""

    id: str
    source_text: str
    long_sentences: tuple[str, ...]
    long_words: tuple[str, ...]
    split_sentences: tuple[str, ...]
    synonyms: tuple[str, ...]
    regenerated_text: dict  # grade -> hand-leveled text

    def regenerated_for(self, grade: int) -> str:
        try:
            return self.regenerated_text[grade]
        except KeyError:
            raise ConfigurationError(
                f"exemplar {self.id!r} has no regenerated text for grade {grade}"
            ) from None


@dataclass(frozen=True)
class PromptStrategy:
    kind: str
    exemplars: tuple[Exemplar, ...] = ()

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigurationError(f"unknown strategy kind {self.kind!r}")
        if self.kind == ZERO_SHOT and self.exemplars:
            raise ConfigurationError("zero-shot takes no exemplars")
        if self.kind in (CHAIN_OF_THOUGHT, DIRECTIONAL_STIMULUS) and len(self.exemplars) != FEW_SHOT_EXEMPLARS:
            raise ConfigurationError(
                f"{self.kind} requires exactly {FEW_SHOT_EXEMPLARS} exemplars, got {len(self.exemplars)}"
            )

    @property
    def label(self) -> str:
        return STRATEGY_LABELS[self.kind]


@dataclass(frozen=True)
class RenderedPrompt:
    system: str
    user: str
    stage: int = 1


def load_exemplars(path: str | Path | None = None) -> list[Exemplar]:
    """Load exemplars from a JSON file (the packaged set by default)."""
    if path is None:
        raw = (files("relevel.data") / "exemplars.json").read_text(encoding="utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    doc = json.loads(raw)
    out = []
    for entry in doc["exemplars"]:
        exemplar = Exemplar(
            id=entry["id"],
            source_text=entry["source_text"],
            long_sentences=tuple(entry["long_sentences"]),
            long_words=tuple(entry["long_words"]),
            split_sentences=tuple(entry["split_sentences"]),
            synonyms=tuple(entry["synonyms"]),
            regenerated_text={int(k): v for k, v in entry["regenerated_text"].items()},
        )
        for word in exemplar.long_words:
            if readability.count_syllables(word) < LONG_WORD_MIN_SYLLABLES:
                raise ConfigurationError(
                    f"exemplar {exemplar.id!r}: long word {word!r} has fewer than "
                    f"{LONG_WORD_MIN_SYLLABLES} syllables"
                )
        out.append(exemplar)
    return out


def _wrap(text: str, family: str) -> str:
    open_d, close_d = _DELIMITERS[family]
    return f"{open_d}{text}{close_d}"


def _block(content: str, family: str) -> str:
    open_d, close_d = _DELIMITERS[family]
    return f"{open_d}\n{content}\n{close_d}"


def _check_family(family: str) -> None:
    if family not in MODEL_FAMILIES:
        raise ConfigurationError(f"unknown model family {family!r}")


def _check_exemplars(exemplars) -> None:
    if len(exemplars) != FEW_SHOT_EXEMPLARS:
        raise ConfigurationError(
            f"this strategy requires exactly {FEW_SHOT_EXEMPLARS} exemplars, got {len(exemplars)}"
        )


_STRUCTURE_SENTENCE = (
    "Ensure that the regenerated text is coherent and cohesive and maintains the "
    "division into four paragraphs of approximately 75 words each, for a total of about 300."
)


def render_zero_shot(passage: Passage, target: GradeTarget, model_family: str) -> RenderedPrompt:
    """Zero-shot request: instructions only, no demonstrations."""
    _check_family(model_family)
    g = target.grade_token
    if model_family == "gpt":
        system = (
            f"You are a helpful writing assistant. Your task is to reduce the readability level "
            f"of a source text from grade twelve to grade {g}, according to the Flesch-Kincaid "
            f"Grade level.\n\n{_STRUCTURE_SENTENCE}"
        )
        user = (
            f"Q: Given this text:\n\n{_wrap(passage.text, model_family)}\n\n"
            f"Reduce the readability level to grade {g}, according to the Flesch-Kincaid Grade "
            f"level. Ensure that the regenerated text maintains the four-paragraph division and "
            f"is cohesive and coherent. Above all, it should be about 300 words long."
        )
    elif model_family == "claude":
        system = (
            f"You are a helpful writing assistant. Your task is to reduce the readability level "
            f"of a source delimited by #### from grade twelve to grade {g}, according to the "
            f"Flesch-Kincaid Grade level.\n\n{_STRUCTURE_SENTENCE}"
        )
        user = f"Source text: {_wrap(passage.text, model_family)}\n\nA:"
    else:
        system = (
            f"You are a helpful writing assistant. Your task is to reduce the readability level "
            f"of a source text after <<<>>> from grade twelve to grade {g}, according to the "
            f"Flesch-Kincaid Grade level.\n\n{_STRUCTURE_SENTENCE}"
        )
        user = f"Source text: {_wrap(passage.text, model_family)}\n\nA:"
    return RenderedPrompt(system=system, user=user, stage=1)


def render_chain_stage1(
    passage: Passage, target: GradeTarget, exemplars, model_family: str = "gpt"
) -> RenderedPrompt:
    """First prompt of the chain: extract long sentences and 3+-syllable words."""
    _check_family(model_family)
    _check_exemplars(exemplars)
    g = target.grade_token
    system = (
        f"You are a helpful writing assistant. Your task is to reduce the readability level of "
        f"a source text from grade twelve to grade {g}, according to the Flesch-Kincaid Grade "
        f"level. The first task is to extract the longest sentences and words longer than 3 "
        f"syllables, delimited by {_DELIMITER_MENTION[model_family]}"
    )
    blocks = []
    for ex in exemplars:
        blocks.append(
            f"Given this text:\n\n{_wrap(ex.source_text, model_family)}\n\n"
            f"Extract the longest sentences and words (3+ syllables).\n\n"
            f"{_block('; '.join(ex.long_sentences), model_family)}\n"
            f"{_block(', '.join(ex.long_words), model_family)}"
        )
    blocks.append(
        f"Given this text:\n\n{_wrap(passage.text, model_family)}\n\n"
        f"Extract the longest sentences and words (3+ syllables)."
    )
    return RenderedPrompt(system=system, user="\n\n".join(blocks), stage=1)


def render_chain_stage2(
    passage: Passage,
    target: GradeTarget,
    stage1_response: str,
    exemplars,
    model_family: str = "gpt",
) -> RenderedPrompt:
    """Second prompt of the chain: rewrite using the stage-1 extraction."""
    _check_family(model_family)
    _check_exemplars(exemplars)
    if not stage1_response or not stage1_response.strip():
        raise ChainingError("stage-1 response is empty; stage 2 cannot be rendered")
    g = target.grade_token
    system = (
        f"You are a helpful writing assistant. Your task is to reduce the readability level of "
        f"a source text from grade twelve to grade {g}, according to the Flesch-Kincaid Grade "
        f"level. You will be provided with a set containing the longest words and sentences, "
        f"delimited by {_DELIMITER_MENTION[model_family]}. To perform this task, replace the "
        f"longer words with equivalent synonyms and shorten the longer sentences by splitting "
        f"them into two or more sentences equivalent in length and meaning. Ensure that the "
        f"regenerated text is coherent and cohesive and maintains the division into four "
        f"paragraphs of approximately 75 words each, for a total of 300."
    )
    blocks = []
    for ex in exemplars:
        blocks.append(
            f"Given this text:\n\n{_wrap(ex.source_text, model_family)}\n\n"
            f"Reduce the readability level of the text to grade {g} by shortening longer words "
            f"and splitting longer sentences.\n\n"
            f"<sentences>:\n{_block('; '.join(ex.long_sentences), model_family)}\n</sentences>\n"
            f"<words>:\n{_block(', '.join(ex.long_words), model_family)}\n</words>\n\n"
            f"Regenerated text: {ex.regenerated_for(target.grade)}"
        )
    blocks.append(
        f"Given this text:\n\n{_wrap(passage.text, model_family)}\n\n"
        f"Reduce the readability level of the text to grade {g} by shortening longer words and "
        f"splitting longer sentences.\n\n"
        f"{_block(stage1_response, model_family)}\n\n"
        f"Regenerated text:"
    )
    return RenderedPrompt(system=system, user="\n\n".join(blocks), stage=2)


def render_cot(
    passage: Passage, target: GradeTarget, exemplars, model_family: str = "gpt"
) -> RenderedPrompt:
    """Chain-of-thought request with three worked demonstrations."""
    _check_family(model_family)
    _check_exemplars(exemplars)
    g = target.grade_token
    system = (
        f"You are a helpful writing assistant. Your task is to reduce the readability level of "
        f"a source text from grade twelve to grade {g}, according to the Flesch-Kincaid Grade level."
    )
    query = (
        "Q: Given this text:\n\n{wrapped}\n\n"
        f"Reduce its readability level to {g}, maintaining the original division into four "
        f"paragraphs of approximately 75 words and an overall length of approximately 300 words."
    )
    blocks = []
    for ex in exemplars:
        blocks.append(
            query.format(wrapped=_wrap(ex.source_text, model_family))
            + "\n\nA: Let's think step by step. The source text has several particularly long sentences:\n\n"
            + _block("; ".join(ex.long_sentences), model_family)
            + "\n\nThese could be divided into different sentences:\n\n"
            + _block("; ".join(ex.split_sentences), model_family)
            + "\n\nFurthermore, we identify these words as the longest (3+ syllables):\n\n"
            + _block(", ".join(ex.long_words), model_family)
            + "\n\nReplace them with these synonyms:\n\n"
            + _block(", ".join(ex.synonyms), model_family)
            + f"\n\n{ex.regenerated_for(target.grade)}"
        )
    blocks.append(
        query.format(wrapped=_wrap(passage.text, model_family)) + "\n\nA: Let's think step by step."
    )
    return RenderedPrompt(system=system, user="\n\n".join(blocks), stage=1)


def render_dsp(
    passage: Passage,
    target: GradeTarget,
    hints: dict,
    exemplars,
    model_family: str = "gpt",
) -> RenderedPrompt:
    """Directional-stimulus request carrying sentence/word hints."""
    _check_family(model_family)
    _check_exemplars(exemplars)
    sentences = list(hints.get("sentences", ()))
    words = list(hints.get("words", ()))
    if not sentences and not words:
        raise ConfigurationError("directional stimulus prompting requires non-empty hints")
    g = target.grade_token
    system = (
        f"You are a helpful writing assistant. Your task is to reduce the readability level of "
        f"a source text from grade twelve to grade {g}, according to the Flesch-Kincaid Grade "
        f"level. You will be given the longest sentences and words to edit."
    )
    query = (
        "Q: Given this text:\n\n{wrapped}\n\n"
        f"Reduce its readability level to {g}, maintaining the original division into four "
        f"paragraphs of approximately 75 words and an overall length of approximately 300 words. "
        f"To accomplish this task, consider splitting longer sentences and replacing longer "
        f"words with credible synonyms."
    )
    blocks = []
    for ex in exemplars:
        blocks.append(
            query.format(wrapped=_wrap(ex.source_text, model_family))
            + f"\n\nLongest sentences: {'; '.join(ex.long_sentences)}\n"
            + f"Longest words: {', '.join(ex.long_words)}"
            + f"\n\nA: {ex.regenerated_for(target.grade)}"
        )
    blocks.append(
        query.format(wrapped=_wrap(passage.text, model_family))
        + f"\n\nLongest sentences: {'; '.join(sentences)}\n"
        + f"Longest words: {', '.join(words)}"
        + "\n\nA:"
    )
    return RenderedPrompt(system=system, user="\n\n".join(blocks), stage=1)


def extract_hints(
    passage: Passage,
    threshold_syllables: int = LONG_WORD_MIN_SYLLABLES,
    top_k_sentences: int = 3,
) -> dict:
    """Deterministic hint extraction for directional stimulus prompting.

    Words: every passage word with >= threshold syllables, deduplicated
    (case-insensitive), in document order. Sentences: the top_k longest by
    word count, earlier sentence wins ties.
    """
    words = []
    seen = set()
    for token in readability.word_tokens(passage.text):
        key = token.lower()
        if key in seen:
            continue
        if readability.count_syllables(token) >= threshold_syllables:
            seen.add(key)
            words.append(token)
    sentences = readability.sentence_texts(passage.text)
    ranked = sorted(
        range(len(sentences)),
        key=lambda i: (-readability.count_words(sentences[i]), i),
    )
    top = [sentences[i] for i in ranked[: max(top_k_sentences, 0)]]
    return {"sentences": top, "words": words}
