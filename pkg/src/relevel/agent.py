"""Manager-coordinated multi-agent releveling loop.

A fixed vertical order of speakers: the Manager states the task, the
Selector plans and picks at most five keywords and five phrases, the
Writer drafts, the Calculator reports grade and length numbers (computed
locally, never by the LLM), and the Editor checks the draft against the
target. Failing drafts go back to the Writer with the Editor's feedback
until the criteria are met or a limit is hit.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

from . import consistency, readability
from .corpus import Passage
from .errors import SelectorFormatError, TransportError
from .gateway import ChatExchange, ModelSpec
from .prompting import Exemplar, GradeTarget

MAX_SELECTED_SPANS = 5
DEFAULT_MAX_ROUNDS = 5

TERMINATION_CRITERIA_MET = "criteria_met"
TERMINATION_MAX_ROUNDS = "max_rounds"
TERMINATION_BUDGET = "budget_exhausted"

GRADE_BAND_TOLERANCE = 0.5
PARAGRAPH_TOLERANCE = 0.10


@dataclass(frozen=True)
class AgentLimits:
    max_rounds: int = DEFAULT_MAX_ROUNDS
    max_tokens_budget: int = 200_000

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


@dataclass(frozen=True)
class AgentPlan:
    goal_decomposition: tuple[str, ...]
    sub_plan: tuple[str, ...]
    selected_keywords: tuple[str, ...]
    selected_phrases: tuple[str, ...]
    selected_sentences: tuple[tuple[str, float], ...]  # (sentence, score), ranked
    reflection_notes: tuple[str, ...]
    refinements: tuple[str, ...]


@dataclass(frozen=True)
class CalculatorReport:
    fkgl: float
    word_count: int
    per_paragraph_counts: tuple[int, ...]


@dataclass(frozen=True)
class EditorFeedback:
    criteria_met: bool
    grade_ok: bool
    length_ok: bool
    keywords_ok: bool
    notes: str


@dataclass(frozen=True)
class AgentTurn:
    role: str  # manager | selector | writer | calculator | editor
    content: object  # str, CalculatorReport, or EditorFeedback
    round: int


@dataclass
class AgentRunResult:
    passage_id: str
    grade: int
    final_text: str
    transcript: list[AgentTurn]
    plan: AgentPlan | None
    termination_reason: str
    exchanges: list[ChatExchange] = field(default_factory=list)
    tokens_used: int = 0


class AgentRunAborted(TransportError):
    """Transport failure mid-run; carries the partial transcript."""

    def __init__(self, cause: TransportError, transcript: list[AgentTurn]):
        super().__init__(str(cause))
        self.transcript = transcript


SELECTOR_SYSTEM = (
    "You are the Selector agent in a text releveling workflow. Read the source text, "
    "decompose the goal, plan the rewrite, and choose the spans that must survive it. "
    "Reply with a single JSON object and nothing else, using exactly these keys: "
    '"goals" (list of subgoal strings), "plan" (ordered list of steps), '
    '"keywords" (at most 5 keyword strings to keep verbatim), '
    '"phrases" (at most 5 phrase strings whose meaning must survive), '
    '"ranked_sentences" (list of {"sentence": string, "score": number}, most relevant first), '
    '"reflection" (list of notes on the plan), "refined_plan" (ordered list of revised steps).'
)

WRITER_SYSTEM = (
    "You are the Writer agent. Rewrite the source text at a grade {grade} reading level "
    "according to the Flesch-Kincaid Grade level. Keep exactly four paragraphs of "
    "approximately 75 words each, about 300 words in total. Keep the selected keywords "
    "verbatim and preserve the meaning of the selected phrases. Reply with the rewritten "
    "text only."
)

EDITOR_SYSTEM = (
    "You are the Editor agent. The draft below failed at least one requirement. Using the "
    "calculator report and the checklist, give the Writer short, concrete suggestions for "
    "the next revision. Reply with the suggestions only."
)


def _parse_selector_json(raw: str) -> dict:
    text = raw.strip()
    # Tolerate a fenced code block around the JSON object.
    fence = re.match(r"^```(?:json)?\s*(.*?)\s*```$", text, re.DOTALL)
    if fence:
        text = fence.group(1)
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("selector output is not a JSON object")
    return doc


def _plan_from_doc(doc: dict) -> AgentPlan:
    def strings(key):
        return tuple(str(x) for x in doc.get(key, ()) if str(x).strip())

    ranked = []
    for item in doc.get("ranked_sentences", ()):
        if isinstance(item, dict) and "sentence" in item:
            score = float(item.get("score", 0.0))
            if not math.isfinite(score):
                score = 0.0
            ranked.append((str(item["sentence"]), score))
    ranked.sort(key=lambda pair: -pair[1])
    return AgentPlan(
        goal_decomposition=strings("goals"),
        sub_plan=strings("plan") or ("rewrite the text at the target grade",),
        selected_keywords=strings("keywords")[:MAX_SELECTED_SPANS],
        selected_phrases=strings("phrases")[:MAX_SELECTED_SPANS],
        selected_sentences=tuple(ranked),
        reflection_notes=strings("reflection"),
        refinements=strings("refined_plan"),
    )


def calculator_report(draft: str) -> CalculatorReport:
    """Local grade/length measurement of a draft (the LLM never self-reports)."""
    paragraphs = [p for p in draft.split("\n\n") if p.strip()]
    return CalculatorReport(
        fkgl=readability.fkgl_of_text(draft).fkgl,
        word_count=readability.count_words(draft),
        per_paragraph_counts=tuple(readability.count_words(p) for p in paragraphs),
    )


def _render_report(report: CalculatorReport) -> str:
    paras = ", ".join(str(n) for n in report.per_paragraph_counts)
    return (
        f"FKGL: {report.fkgl:.2f}; word count: {report.word_count}; "
        f"paragraph word counts: [{paras}]"
    )


def editor_evaluate(
    draft: str,
    target: GradeTarget,
    plan: AgentPlan,
    report: CalculatorReport,
    notes_call=None,
) -> EditorFeedback:
    """Check a draft against grade band, length budget, and kept keywords.

    ``notes_call() -> str`` is invoked only when the draft fails, mirroring
    the workflow where improvement suggestions cost an LLM request.
    """
    grade_ok = (
        math.floor(report.fkgl) == target.grade
        or abs(report.fkgl - target.midpoint) <= GRADE_BAND_TOLERANCE
    )
    lo, hi = target.length_bounds()
    para_target = target.length_words / target.paragraphs
    para_lo = para_target * (1 - PARAGRAPH_TOLERANCE)
    para_hi = para_target * (1 + PARAGRAPH_TOLERANCE)
    length_ok = (
        lo <= report.word_count <= hi
        and len(report.per_paragraph_counts) == target.paragraphs
        and all(para_lo <= n <= para_hi for n in report.per_paragraph_counts)
    )
    keywords_ok = all(consistency.contains_keyword(kw, draft) for kw in plan.selected_keywords)
    criteria_met = grade_ok and length_ok and keywords_ok
    notes = ""
    if not criteria_met and notes_call is not None:
        notes = notes_call()
    return EditorFeedback(
        criteria_met=criteria_met,
        grade_ok=grade_ok,
        length_ok=length_ok,
        keywords_ok=keywords_ok,
        notes=notes,
    )


def _feedback_lines(feedback: EditorFeedback, report: CalculatorReport, target: GradeTarget) -> str:
    lo, hi = target.length_bounds()
    lines = [
        f"grade check: {'pass' if feedback.grade_ok else 'fail'} "
        f"(FKGL {report.fkgl:.2f}, target band {target.grade}.0-{target.grade}.99)",
        f"length check: {'pass' if feedback.length_ok else 'fail'} "
        f"(word count {report.word_count}, budget {lo}-{hi} in {target.paragraphs} paragraphs)",
        f"keyword check: {'pass' if feedback.keywords_ok else 'fail'}",
    ]
    if feedback.notes:
        lines.append(f"suggestions: {feedback.notes}")
    return "\n".join(lines)


class _Run:
    def __init__(self, passage, target, spec, client, limits, exemplars):
        self.passage = passage
        self.target = target
        self.spec = spec
        self.client = client
        self.limits = limits
        self.exemplars = exemplars or []
        self.transcript: list[AgentTurn] = []
        self.exchanges: list[ChatExchange] = []
        self.tokens_used = 0
        self.round = 1

    def budget_left(self) -> bool:
        return self.tokens_used < self.limits.max_tokens_budget

    def say(self, role: str, content, round_no: int | None = None) -> None:
        self.transcript.append(AgentTurn(role=role, content=content, round=round_no or self.round))

    def call(self, system: str, user: str) -> str:
        try:
            exchange = self.client.complete(self.spec, system, (user,))
        except TransportError as exc:
            raise AgentRunAborted(exc, self.transcript) from exc
        self.exchanges.append(exchange)
        self.tokens_used += exchange.usage.total_tokens
        return exchange.response


def _selector_user(passage: Passage, target: GradeTarget) -> str:
    return (
        f"Target grade: {target.grade}. Length budget: about {target.length_words} words in "
        f"{target.paragraphs} paragraphs.\n\nSource text:\n\n{passage.text}"
    )


def _writer_first_user(passage: Passage, target: GradeTarget, plan: AgentPlan, exemplars) -> str:
    parts = []
    for ex in exemplars:
        parts.append(
            f"Example source:\n{ex.source_text}\n\nExample rewrite at grade {target.grade}:\n"
            f"{ex.regenerated_for(target.grade)}"
        )
    parts.append(
        f"Source text:\n\n{passage.text}\n\n"
        f"Keep these keywords verbatim: {', '.join(plan.selected_keywords) or '(none)'}\n"
        f"Preserve the meaning of: {'; '.join(plan.selected_phrases) or '(none)'}\n\n"
        f"Write the grade {target.grade} version now."
    )
    return "\n\n".join(parts)


def _writer_refine_user(draft: str, report: CalculatorReport, feedback_text: str) -> str:
    return (
        f"Your previous draft:\n\n{draft}\n\n"
        f"Calculator report: {_render_report(report)}\n"
        f"Editor feedback:\n{feedback_text}\n\n"
        f"Revise the draft to satisfy every requirement. Reply with the revised text only."
    )


def run_agent_relevel(
    passage: Passage,
    target: GradeTarget,
    spec: ModelSpec,
    client,
    limits: AgentLimits | None = None,
    exemplars: list[Exemplar] | None = None,
) -> AgentRunResult:
    """Execute the full Manager -> Selector -> Writer -> Calculator -> Editor loop.

    Terminates when the Editor accepts a draft, when ``limits.max_rounds``
    writer/editor cycles have run, or when the token budget is consumed.
    """
    limits = limits or AgentLimits()
    run = _Run(passage, target, spec, client, limits, exemplars)

    run.say(
        "manager",
        f"Relevel passage {passage.id!r} to grade {target.grade} "
        f"({target.length_words} words in {target.paragraphs} paragraphs); "
        f"speakers: selector, writer, calculator, editor.",
    )

    plan: AgentPlan | None = None
    final_text = ""
    reason = TERMINATION_BUDGET

    if run.budget_left():
        raw = run.call(SELECTOR_SYSTEM, _selector_user(passage, target))
        run.say("selector", raw)
        try:
            plan = _plan_from_doc(_parse_selector_json(raw))
        except (ValueError, json.JSONDecodeError):
            reprompt = (
                "Your previous reply was not a valid JSON object. Reply again with only the "
                "JSON object described in your instructions.\n\n" + _selector_user(passage, target)
            )
            raw = run.call(SELECTOR_SYSTEM, reprompt)
            run.say("selector", raw)
            try:
                plan = _plan_from_doc(_parse_selector_json(raw))
            except (ValueError, json.JSONDecodeError) as exc:
                raise SelectorFormatError(
                    f"selector produced unparseable output twice: {exc}"
                ) from exc

    if plan is not None:
        writer_system = WRITER_SYSTEM.format(grade=target.grade)
        feedback_text = ""
        report: CalculatorReport | None = None
        while True:
            if not run.budget_left():
                reason = TERMINATION_BUDGET
                break
            if final_text:
                user = _writer_refine_user(final_text, report, feedback_text)
            else:
                user = _writer_first_user(passage, target, plan, run.exemplars)
            final_text = run.call(writer_system, user)
            run.say("writer", final_text)

            report = calculator_report(final_text)
            run.say("calculator", report)

            def editor_notes() -> str:
                return run.call(
                    EDITOR_SYSTEM,
                    f"Draft:\n\n{final_text}\n\nCalculator report: {_render_report(report)}\n"
                    f"Target: grade {target.grade}, {target.length_words} words in "
                    f"{target.paragraphs} paragraphs.",
                )

            notes_call = editor_notes if run.budget_left() else None
            feedback = editor_evaluate(final_text, target, plan, report, notes_call=notes_call)
            run.say("editor", feedback)
            feedback_text = _feedback_lines(feedback, report, target)

            if feedback.criteria_met:
                reason = TERMINATION_CRITERIA_MET
                break
            if run.round >= limits.max_rounds:
                reason = TERMINATION_MAX_ROUNDS
                break
            if not run.budget_left():
                reason = TERMINATION_BUDGET
                break
            run.round += 1

    return AgentRunResult(
        passage_id=passage.id,
        grade=target.grade,
        final_text=final_text,
        transcript=run.transcript,
        plan=plan,
        termination_reason=reason,
        exchanges=run.exchanges,
        tokens_used=run.tokens_used,
    )


def turn_to_dict(turn: AgentTurn) -> dict:
    content = turn.content
    if isinstance(content, CalculatorReport):
        content = {
            "fkgl": content.fkgl,
            "word_count": content.word_count,
            "per_paragraph_counts": list(content.per_paragraph_counts),
        }
    elif isinstance(content, EditorFeedback):
        content = {
            "criteria_met": content.criteria_met,
            "grade_ok": content.grade_ok,
            "length_ok": content.length_ok,
            "keywords_ok": content.keywords_ok,
            "notes": content.notes,
        }
    return {"role": turn.role, "round": turn.round, "content": content}


def plan_to_dict(plan: AgentPlan | None) -> dict | None:
    if plan is None:
        return None
    return {
        "goal_decomposition": list(plan.goal_decomposition),
        "sub_plan": list(plan.sub_plan),
        "selected_keywords": list(plan.selected_keywords),
        "selected_phrases": list(plan.selected_phrases),
        "selected_sentences": [[s, score] for s, score in plan.selected_sentences],
        "reflection_notes": list(plan.reflection_notes),
        "refinements": list(plan.refinements),
    }
