"""Run-matrix execution, anomaly screening, metric scoring, and reports.

The matrix is the cross product of models, strategies, grades, and
passages (the multi-agent strategy pairs only with models its config
permits). Generated rows are screened for the two failure shapes observed
in practice (structural stubs and prompt echoes) plus length and overlap
floors; anomalous rows never enter any statistic. Reports mirror the
grade-accuracy grid, the consistency means table, and the correlation
matrix, plus a tidy CSV for external statistics packages.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import agent as agent_mod
from . import consistency, readability, stats
from .corpus import Passage
from .errors import ChainingError, ConfigurationError, JoinError
from .gateway import ChatExchange, ModelSpec
from .prompting import (
    CHAIN_OF_THOUGHT,
    DIRECTIONAL_STIMULUS,
    MULTI_AGENT,
    PROMPT_CHAINING,
    STRATEGY_LABELS,
    ZERO_SHOT,
    GradeTarget,
    PromptStrategy,
    extract_hints,
    render_chain_stage1,
    render_chain_stage2,
    render_cot,
    render_dsp,
    render_zero_shot,
)

ANOMALY_MIN_WORDS = 50
ANOMALY_MIN_JACCARD = 0.05

ECHO_PATTERNS = (
    "sure, i can help",
    "here's the revised text",
    "here is the revised text",
    "i can help you reduce the readability",
)

_STUB_LINE_RE = re.compile(r"^\s*(A:|Paragraph \d+:?)\s*$")

_STOPWORDS = frozenset(
    """a an and are as at be but by for from had has have he her his i in into is it its of on or
    she so that the their them they this to was were will with would not no they're it's you your
    we our us all can could who what when where which than then there these those been being
    do does did more most other some such only own same very just also may might must shall""".split()
)


@dataclass(frozen=True)
class AnomalyFlag:
    reason: str


@dataclass(frozen=True)
class RelevelTask:
    passage_id: str
    model: ModelSpec
    strategy: PromptStrategy
    grade: int


@dataclass(frozen=True)
class RunMatrix:
    models: tuple[ModelSpec, ...]
    strategies: tuple[PromptStrategy, ...]
    grades: tuple[int, ...]
    passages: tuple[Passage, ...]
    # Model ids allowed to run the multi-agent strategy. None preserves the
    # documented default: OpenAI-compatible models only.
    multi_agent_model_ids: tuple[str, ...] | None = None


@dataclass(frozen=True)
class GeneratedPassage:
    passage_id: str
    model_id: str
    strategy: str
    grade_target: int
    text: str
    word_count: int
    fkgl: float | None
    anomaly: AnomalyFlag | None = None
    transcript_ref: str | None = None
    temperature: float | None = None


@dataclass(frozen=True)
class MetricsRecord:
    passage_id: str
    topic: str
    model_id: str
    strategy: str
    grade_target: int
    fkgl: float
    keyword_accuracy: float
    similarity_f1: float
    wc_pct_change: float


def _multi_agent_allowed(matrix: RunMatrix, model: ModelSpec) -> bool:
    if matrix.multi_agent_model_ids is None:
        return model.provider == "openai-compatible"
    return model.model_id in matrix.multi_agent_model_ids


def plan_matrix(matrix: RunMatrix) -> list[RelevelTask]:
    """Deterministic task list ordered by (passage, model, strategy, grade)."""
    tasks = []
    for passage in matrix.passages:
        for model in matrix.models:
            for strategy in matrix.strategies:
                if strategy.kind == MULTI_AGENT and not _multi_agent_allowed(matrix, model):
                    continue
                for grade in matrix.grades:
                    tasks.append(
                        RelevelTask(
                            passage_id=passage.id,
                            model=model,
                            strategy=strategy,
                            grade=grade,
                        )
                    )
    tasks.sort(key=lambda t: (t.passage_id, t.model.model_id, t.strategy.kind, t.grade))
    return tasks


def _content_words(text: str) -> set[str]:
    return {tok for tok in consistency.normalize_tokens(text) if tok not in _STOPWORDS}


def detect_anomaly(output: str, source: Passage | str) -> AnomalyFlag | None:
    """Flag outputs that are not relevels: prompt echoes, structural stubs,
    too-short outputs, and passages with almost no source overlap."""
    lower = output.lower()
    head = lower[:300]
    for pattern in ECHO_PATTERNS:
        idx = head.find(pattern)
        if idx < 0:
            continue
        # The echo shape is a preamble with no body; a colon shortly after
        # the preamble ("Here's the revised text:") marks where a body
        # would start.
        tail = output[idx + len(pattern):]
        colon = tail.find(":", 0, 150)
        body = tail[colon + 1:] if colon >= 0 else tail
        if readability.count_words(body) < ANOMALY_MIN_WORDS:
            return AnomalyFlag(reason="prompt-echo")
        break

    lines = [line for line in output.splitlines() if line.strip()]
    if lines:
        stubs = sum(1 for line in lines if _STUB_LINE_RE.match(line))
        if stubs / len(lines) > 0.5:
            return AnomalyFlag(reason="structural-stub")

    if readability.count_words(output) < ANOMALY_MIN_WORDS:
        return AnomalyFlag(reason="short-output")

    source_text = source.text if isinstance(source, Passage) else source
    src_words = _content_words(source_text)
    out_words = _content_words(output)
    union = src_words | out_words
    if union:
        jaccard = len(src_words & out_words) / len(union)
        if jaccard < ANOMALY_MIN_JACCARD:
            return AnomalyFlag(reason="low-overlap")
    return None


def _generated_from_text(task: RelevelTask, text: str, passage: Passage,
                         transcript_ref: str | None = None) -> GeneratedPassage:
    word_count = readability.count_words(text)
    fkgl = readability.fkgl_of_text(text).fkgl if word_count else None
    return GeneratedPassage(
        passage_id=task.passage_id,
        model_id=task.model.model_id,
        strategy=task.strategy.kind,
        grade_target=task.grade,
        text=text,
        word_count=word_count,
        fkgl=fkgl,
        anomaly=detect_anomaly(text, passage),
        transcript_ref=transcript_ref,
        temperature=task.model.temperature,
    )


def _execute_one(task: RelevelTask, passage: Passage, client, limits,
                 transcript_dir: Path | None) -> tuple[GeneratedPassage, list[ChatExchange]]:
    target = GradeTarget(grade=task.grade)
    family = task.model.family
    kind = task.strategy.kind
    exemplars = list(task.strategy.exemplars)
    if kind == ZERO_SHOT:
        rp = render_zero_shot(passage, target, family)
        exchange = client.complete(task.model, rp.system, (rp.user,))
        return _generated_from_text(task, exchange.response, passage), [exchange]
    if kind == PROMPT_CHAINING:
        rp1 = render_chain_stage1(passage, target, exemplars, family)
        first = client.complete(task.model, rp1.system, (rp1.user,))
        try:
            rp2 = render_chain_stage2(passage, target, first.response, exemplars, family)
        except ChainingError:
            # An empty stage-1 reply is itself a failed relevel; record it
            # as an (anomalous) empty row instead of aborting the matrix.
            return _generated_from_text(task, "", passage), [first]
        second = client.complete(task.model, rp2.system, (rp2.user,))
        return _generated_from_text(task, second.response, passage), [first, second]
    if kind == CHAIN_OF_THOUGHT:
        rp = render_cot(passage, target, exemplars, family)
        exchange = client.complete(task.model, rp.system, (rp.user,))
        return _generated_from_text(task, exchange.response, passage), [exchange]
    if kind == DIRECTIONAL_STIMULUS:
        hints = extract_hints(passage)
        rp = render_dsp(passage, target, hints, exemplars, family)
        exchange = client.complete(task.model, rp.system, (rp.user,))
        return _generated_from_text(task, exchange.response, passage), [exchange]
    if kind == MULTI_AGENT:
        result = agent_mod.run_agent_relevel(
            passage, target, task.model, client, limits=limits,
            exemplars=exemplars or None,
        )
        transcript_ref = None
        if transcript_dir is not None:
            transcript_dir.mkdir(parents=True, exist_ok=True)
            name = f"{task.passage_id}__grade{task.grade}.json"
            payload = {
                "passage_id": task.passage_id,
                "grade": task.grade,
                "model_id": task.model.model_id,
                "termination_reason": result.termination_reason,
                "tokens_used": result.tokens_used,
                "plan": agent_mod.plan_to_dict(result.plan),
                "turns": [agent_mod.turn_to_dict(t) for t in result.transcript],
            }
            (transcript_dir / name).write_text(
                json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
            )
            transcript_ref = str(transcript_dir / name)
        generated = _generated_from_text(task, result.final_text, passage, transcript_ref)
        return generated, list(result.exchanges)
    raise ConfigurationError(f"unknown strategy kind {kind!r}")


def execute_tasks(
    tasks,
    passages,
    client,
    limits: agent_mod.AgentLimits | None = None,
    parallelism: int = 4,
    transcript_dir: str | Path | None = None,
) -> tuple[list[GeneratedPassage], list[ChatExchange]]:
    """Run every task through the gateway with bounded worker parallelism.

    Results are returned in task order regardless of completion order.
    """
    by_id = {p.id: p for p in passages}
    for task in tasks:
        if task.passage_id not in by_id:
            raise JoinError(f"task references unknown passage {task.passage_id!r}")
    tdir = Path(transcript_dir) if transcript_dir is not None else None
    limits = limits or agent_mod.AgentLimits()

    def work(task):
        return _execute_one(task, by_id[task.passage_id], client, limits, tdir)

    results: list[tuple[GeneratedPassage, list[ChatExchange]]]
    if parallelism <= 1 or len(tasks) <= 1:
        results = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(work, tasks))
    generated = [g for g, _ in results]
    exchanges = [e for _, batch in results for e in batch]
    return generated, exchanges


def score_all(generated, passages, provider) -> list[MetricsRecord]:
    """Metrics for every non-anomalous row, joined against its source passage."""
    by_id = {p.id: p for p in passages}
    records = []
    for row in generated:
        if row.anomaly is not None:
            continue
        source = by_id.get(row.passage_id)
        if source is None:
            raise JoinError(f"generated row references unknown passage {row.passage_id!r}")
        kw = consistency.keyword_accuracy(source.keywords, row.text)
        delta = consistency.word_count_change(source.text, row.text)
        sim = consistency.semantic_similarity(source.text, row.text, provider)
        records.append(
            MetricsRecord(
                passage_id=row.passage_id,
                topic=source.topic,
                model_id=row.model_id,
                strategy=row.strategy,
                grade_target=row.grade_target,
                fkgl=readability.fkgl_of_text(row.text).fkgl,
                keyword_accuracy=kw.accuracy,
                similarity_f1=sim.f1,
                wc_pct_change=delta.pct_change,
            )
        )
    return records


@dataclass(frozen=True)
class GradeEquivalenceRow:
    model_id: str
    strategy: str
    grade: int
    n: int
    mean: float | None
    sd: float | None
    t: float | None
    p: float | None
    equivalent: bool | None


def grade_equivalence(records) -> list[GradeEquivalenceRow]:
    """One-sample t-tests of group FKGL means against the grade midpoints.

    Equivalence follows the failure-to-reject convention: a group is
    "equivalent" to its target iff p > 0.05. Groups too small or too
    uniform for a t-test report their effective n with no verdict.
    """
    groups: dict[tuple[str, str, int], list[float]] = {}
    for rec in records:
        groups.setdefault((rec.model_id, rec.strategy, rec.grade_target), []).append(rec.fkgl)
    rows = []
    for (model_id, strategy, grade), values in sorted(groups.items()):
        mu0 = readability.target_midpoint(grade)
        try:
            result = stats.one_sample_t(values, mu0)
            rows.append(
                GradeEquivalenceRow(
                    model_id=model_id, strategy=strategy, grade=grade,
                    n=result.n, mean=result.mean, sd=result.sd,
                    t=result.t, p=result.p_two_tailed,
                    equivalent=result.p_two_tailed > 0.05,
                )
            )
        except Exception:
            n = len(values)
            mean = sum(values) / n if n else None
            rows.append(
                GradeEquivalenceRow(
                    model_id=model_id, strategy=strategy, grade=grade,
                    n=n, mean=mean, sd=None, t=None, p=None, equivalent=None,
                )
            )
    return rows


def _correlation_pairs(records):
    columns = {
        "BERTScore": [r.similarity_f1 for r in records],
        "Keyword Accuracy": [r.keyword_accuracy for r in records],
        "Word Count % Change": [r.wc_pct_change for r in records],
        "Releveled FKGL": [r.fkgl for r in records],
    }
    names = list(columns)
    cells = {}
    n = len(records)
    for i, a in enumerate(names):
        for b in names[:i]:
            try:
                r = stats.pearson(columns[a], columns[b])
                # Correlation significance via the exact t transform.
                t = r * ((n - 2) / max(1e-300, 1 - r * r)) ** 0.5
                p = stats.one_sample_t_p_from_t(t, n - 2) if n > 2 else 1.0
            except Exception:
                r, p = None, None
            cells[(a, b)] = (r, p)
    return names, cells, n


def _fmt(value, digits=2):
    if value is None:
        return "no data"
    return f"{value:.{digits}f}"


def _grade_table_markdown(rows, grade, model_ids, strategies) -> list[str]:
    lines = [f"### Target: grade {grade} (midpoint {grade}.5)", ""]
    lines.append("| Strategy | " + " | ".join(model_ids) + " |")
    lines.append("|---" * (len(model_ids) + 1) + "|")
    index = {(r.model_id, r.strategy, r.grade): r for r in rows}
    for strategy in strategies:
        cells = []
        for model_id in model_ids:
            row = index.get((model_id, strategy, grade))
            if row is None or row.mean is None:
                cells.append("no data")
                continue
            if row.p is None:
                cells.append(f"{row.mean:.2f} (n={row.n}, no test)")
                continue
            marks = stats.significance_stars(row.p)
            cell = f"{row.mean:.2f}{marks} ({_fmt(row.sd)})"
            if row.equivalent:
                cell = f"**{cell}**"
            cells.append(cell)
        lines.append(f"| {STRATEGY_LABELS.get(strategy, strategy)} | " + " | ".join(cells) + " |")
    lines.append("")
    return lines


def _means_sd(values):
    n = len(values)
    if n == 0:
        return None, None
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var**0.5


def _consistency_tables(records, model_ids, strategies):
    metrics = [
        ("Word Count % Change", lambda r: r.wc_pct_change, 2),
        ("BERTScore", lambda r: r.similarity_f1, 3),
        ("Keyword Accuracy (%)", lambda r: 100.0 * r.keyword_accuracy, 2),
    ]
    sections = []
    for title, getter, digits in metrics:
        lines = [f"### {title}", ""]
        lines.append("| Strategy | " + " | ".join(model_ids) + " |")
        lines.append("|---" * (len(model_ids) + 1) + "|")
        for strategy in strategies:
            cells = []
            for model_id in model_ids:
                values = [getter(r) for r in records
                          if r.model_id == model_id and r.strategy == strategy]
                mean, sd = _means_sd(values)
                if mean is None:
                    cells.append("no data")
                else:
                    cells.append(f"{mean:.{digits}f} ({sd:.{digits}f})")
            lines.append(f"| {STRATEGY_LABELS.get(strategy, strategy)} | " + " | ".join(cells) + " |")
        lines.append("")
        sections.extend(lines)
    return sections


def emit_report(
    metrics,
    out_dir: str | Path,
    formats=("markdown", "csv"),
    anomalous=(),
    meta: dict | None = None,
) -> list[Path]:
    """Write report.md and/or tables/*.csv plus tidy.csv; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    records = list(metrics)
    model_ids = sorted({r.model_id for r in records})
    strategies = [k for k in STRATEGY_LABELS if any(r.strategy == k for r in records)]
    grades = sorted({r.grade_target for r in records})
    eq_rows = grade_equivalence(records)

    if "markdown" in formats:
        lines = ["# Releveling evaluation report", ""]
        if meta:
            lines.append(
                "Run metadata: " + ", ".join(f"{k}={v}" for k, v in sorted(meta.items()))
            )
            lines.append("")
        lines.append("## Grade-level accuracy (FKGL vs. target midpoint)")
        lines.append("")
        if not records:
            lines.append("no data")
            lines.append("")
        else:
            for grade in grades:
                lines.extend(_grade_table_markdown(eq_rows, grade, model_ids, strategies))
        lines.append("## Consistency metrics, mean (SD)")
        lines.append("")
        if not records:
            lines.append("no data")
            lines.append("")
        else:
            lines.extend(_consistency_tables(records, model_ids, strategies))
        lines.append("## Correlations")
        lines.append("")
        if len(records) >= 3:
            names, cells, n = _correlation_pairs(records)
            lines.append("| | " + " | ".join(names[:-1]) + " |")
            lines.append("|---" * len(names) + "|")
            for i, a in enumerate(names[1:], start=1):
                row_cells = []
                for b in names[:-1]:
                    if (a, b) in cells:
                        r, p = cells[(a, b)]
                        row_cells.append(
                            "no data" if r is None else f"{r:.3f}{stats.significance_stars(p)}"
                        )
                    else:
                        row_cells.append("")
                lines.append(f"| {a} | " + " | ".join(row_cells) + " |")
            lines.append("")
            lines.append(f"n = {n} scored rows.")
        else:
            lines.append("no data")
        lines.append("")
        lines.append("---")
        lines.append(
            "Notes: one-sample t-tests are two-tailed against the grade-band midpoint. "
            "\"Equivalent\" (bold) means failure to reject at p > 0.05, not a formal "
            "equivalence test. Anomalous rows are excluded from every statistic; "
            f"{len(list(anomalous))} anomalous rows in this run."
        )
        report_path = out / "report.md"
        report_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(report_path)

    if "csv" in formats:
        tables = out / "tables"
        tables.mkdir(exist_ok=True)
        grade_path = tables / "grade_accuracy.csv"
        with grade_path.open("w", encoding="utf-8", newline="") as handle:
            handle.write("model,strategy,grade,n,mean,sd,t,p,equivalent\n")
            for row in eq_rows:
                handle.write(
                    f"{row.model_id},{row.strategy},{row.grade},{row.n},"
                    f"{'' if row.mean is None else repr(row.mean)},"
                    f"{'' if row.sd is None else repr(row.sd)},"
                    f"{'' if row.t is None else repr(row.t)},"
                    f"{'' if row.p is None else repr(row.p)},"
                    f"{'' if row.equivalent is None else row.equivalent}\n"
                )
        written.append(grade_path)

        cons_path = tables / "consistency.csv"
        with cons_path.open("w", encoding="utf-8", newline="") as handle:
            handle.write("model,strategy,metric,n,mean,sd\n")
            for metric, getter in (
                ("wc_pct_change", lambda r: r.wc_pct_change),
                ("similarity_f1", lambda r: r.similarity_f1),
                ("keyword_accuracy_pct", lambda r: 100.0 * r.keyword_accuracy),
            ):
                for model_id in model_ids:
                    for strategy in strategies:
                        values = [getter(r) for r in records
                                  if r.model_id == model_id and r.strategy == strategy]
                        if not values:
                            continue
                        mean, sd = _means_sd(values)
                        handle.write(
                            f"{model_id},{strategy},{metric},{len(values)},{mean!r},{sd!r}\n"
                        )
        written.append(cons_path)

        corr_path = tables / "correlations.csv"
        with corr_path.open("w", encoding="utf-8", newline="") as handle:
            handle.write("var_a,var_b,r,p,n\n")
            if len(records) >= 3:
                names, cells, n = _correlation_pairs(records)
                for (a, b), (r, p) in sorted(cells.items()):
                    handle.write(
                        f"\"{a}\",\"{b}\","
                        f"{'' if r is None else repr(r)},{'' if p is None else repr(p)},{n}\n"
                    )
        written.append(corr_path)

    tidy_path = out / "tidy.csv"
    with tidy_path.open("w", encoding="utf-8", newline="") as handle:
        handle.write("passage_id,topic,model,strategy,grade,fkgl,kw_acc,sim_f1,wc_pct,anomaly\n")
        for r in records:
            handle.write(
                f"{r.passage_id},{r.topic},{r.model_id},{r.strategy},{r.grade_target},"
                f"{r.fkgl!r},{r.keyword_accuracy!r},{r.similarity_f1!r},{r.wc_pct_change!r},\n"
            )
        for row in anomalous:
            handle.write(
                f"{row['passage_id']},{row.get('topic', '')},{row['model_id']},"
                f"{row['strategy']},{row['grade_target']},,,,,{row['anomaly']}\n"
            )
    written.append(tidy_path)
    return written


# --- line-delimited JSON result files -------------------------------------

def generated_to_dict(row: GeneratedPassage) -> dict:
    return {
        "kind": "generated",
        "passage_id": row.passage_id,
        "model_id": row.model_id,
        "strategy": row.strategy,
        "grade_target": row.grade_target,
        "temperature": row.temperature,
        "text": row.text,
        "word_count": row.word_count,
        "fkgl": row.fkgl,
        "anomaly": None if row.anomaly is None else {"reason": row.anomaly.reason},
        "transcript_ref": row.transcript_ref,
    }


def generated_from_dict(doc: dict) -> GeneratedPassage:
    anomaly = doc.get("anomaly")
    return GeneratedPassage(
        passage_id=doc["passage_id"],
        model_id=doc["model_id"],
        strategy=doc["strategy"],
        grade_target=int(doc["grade_target"]),
        text=doc["text"],
        word_count=int(doc["word_count"]),
        fkgl=doc["fkgl"],
        anomaly=None if anomaly is None else AnomalyFlag(reason=anomaly["reason"]),
        transcript_ref=doc.get("transcript_ref"),
        temperature=doc.get("temperature"),
    )


def metrics_to_dict(rec: MetricsRecord) -> dict:
    return {
        "kind": "metrics",
        "passage_id": rec.passage_id,
        "topic": rec.topic,
        "model_id": rec.model_id,
        "strategy": rec.strategy,
        "grade_target": rec.grade_target,
        "fkgl": rec.fkgl,
        "keyword_accuracy": rec.keyword_accuracy,
        "similarity_f1": rec.similarity_f1,
        "wc_pct_change": rec.wc_pct_change,
    }


def metrics_from_dict(doc: dict) -> MetricsRecord:
    return MetricsRecord(
        passage_id=doc["passage_id"],
        topic=doc["topic"],
        model_id=doc["model_id"],
        strategy=doc["strategy"],
        grade_target=int(doc["grade_target"]),
        fkgl=float(doc["fkgl"]),
        keyword_accuracy=float(doc["keyword_accuracy"]),
        similarity_f1=float(doc["similarity_f1"]),
        wc_pct_change=float(doc["wc_pct_change"]),
    )


def write_jsonl(path: str | Path, rows) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                out.append(json.loads(line))
    return out
