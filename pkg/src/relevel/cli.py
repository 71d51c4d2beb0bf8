"""Command-line surface: validate, relevel, evaluate, report, score-text.

Exit codes: 0 success, 1 domain failure, 2 usage/config problems,
3 transport failure. A JSON config file can predefine the run matrix;
command-line flags win over config values.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import pipeline, prompting, readability
from .agent import AgentLimits
from .consistency import keyword_accuracy
from .embeddings import make_provider
from .errors import ConfigurationError, RelevelError, TransportError
from .gateway import ChatClient, ModelSpec, estimate_cost, load_price_table

STRATEGY_ALIASES = {
    "zero-shot": prompting.ZERO_SHOT,
    "prompt-chaining": prompting.PROMPT_CHAINING,
    "pc": prompting.PROMPT_CHAINING,
    "chain-of-thought": prompting.CHAIN_OF_THOUGHT,
    "cot": prompting.CHAIN_OF_THOUGHT,
    "directional-stimulus": prompting.DIRECTIONAL_STIMULUS,
    "dsp": prompting.DIRECTIONAL_STIMULUS,
    "multi-agent": prompting.MULTI_AGENT,
}

_PROVIDER_PREFIXES = (
    ("gpt", "openai-compatible"),
    ("claude", "anthropic-compatible"),
    ("mixtral", "mistral-compatible"),
    ("mistral", "mistral-compatible"),
)


def parse_model(spec: str, temperature=None, max_tokens=None) -> ModelSpec:
    """Model flags accept "provider/model_id" or a bare id with an
    inferable prefix (gpt*, claude*, mixtral*/mistral*)."""
    if "/" in spec:
        provider, model_id = spec.split("/", 1)
    else:
        model_id = spec
        lowered = spec.lower()
        for prefix, provider_name in _PROVIDER_PREFIXES:
            if lowered.startswith(prefix):
                provider = provider_name
                break
        else:
            raise ConfigurationError(
                f"cannot infer provider for model {spec!r}; use provider/model_id"
            )
    kwargs = {}
    if temperature is not None:
        kwargs["temperature"] = temperature
    if max_tokens is not None:
        kwargs["max_tokens"] = max_tokens
    return ModelSpec(provider=provider, model_id=model_id, **kwargs)


def parse_strategy(name: str) -> str:
    try:
        return STRATEGY_ALIASES[name.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown strategy {name!r}; choose from {', '.join(sorted(set(STRATEGY_ALIASES)))}"
        ) from None


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    return doc


def cmd_validate(args) -> int:
    passages = corpus_mod.load_corpus(args.corpus)
    any_errors = False
    for passage in passages:
        report = corpus_mod.validate_passage(passage)
        for issue in report:
            print(f"{passage.id}: {issue.severity}: {issue.rule}: {issue.detail}")
        if corpus_mod.has_errors(report):
            any_errors = True
    print(f"validated {len(passages)} passages: {'errors found' if any_errors else 'ok'}")
    return 1 if any_errors else 0


def _build_strategies(kinds, exemplars) -> tuple:
    strategies = []
    for kind in kinds:
        needs_exemplars = kind in (
            prompting.PROMPT_CHAINING,
            prompting.CHAIN_OF_THOUGHT,
            prompting.DIRECTIONAL_STIMULUS,
        )
        strategies.append(
            prompting.PromptStrategy(kind, tuple(exemplars) if needs_exemplars else ())
        )
    return tuple(strategies)


def cmd_relevel(args) -> int:
    config = _load_config(args.config)
    mode = args.mode or config.get("mode")
    if mode not in ("live", "record", "replay"):
        raise ConfigurationError(f"mode must be live, record, or replay (got {mode!r})")
    cassette = args.cassette or config.get("cassette")
    if mode in ("record", "replay") and not cassette:
        raise ConfigurationError(f"{mode} mode requires --cassette")

    corpus_path = args.corpus or config.get("corpus")
    if not corpus_path:
        raise ConfigurationError("no corpus given (flag --corpus or config 'corpus')")
    passages = corpus_mod.load_corpus(corpus_path)

    if args.model:
        models = tuple(parse_model(m, args.temperature, args.max_tokens) for m in args.model)
    else:
        models = tuple(
            ModelSpec(
                provider=m["provider"],
                model_id=m["model_id"],
                temperature=m.get("temperature"),
                max_tokens=m.get("max_tokens", 2048),
            )
            for m in config.get("models", ())
        )
    if not models:
        raise ConfigurationError("no models given (flag --model or config 'models')")

    kind_names = args.strategy or config.get("strategies")
    if not kind_names:
        raise ConfigurationError("no strategies given (flag --strategy or config 'strategies')")
    kinds = [parse_strategy(k) for k in kind_names]

    grades = tuple(args.grade or config.get("grades", ()))
    if not grades:
        raise ConfigurationError("no grades given (flag --grade or config 'grades')")
    for grade in grades:
        if grade not in (4, 6, 8):
            raise ConfigurationError(f"unsupported target grade {grade!r}; expected 4, 6, or 8")

    exemplars = prompting.load_exemplars(args.exemplars or config.get("exemplars"))
    strategies = _build_strategies(kinds, exemplars)

    limits_cfg = config.get("limits", {})
    limits = AgentLimits(
        max_rounds=args.max_rounds or limits_cfg.get("max_rounds", 5),
        max_tokens_budget=args.budget or limits_cfg.get("max_tokens_budget", 200_000),
    )
    parallelism = args.parallelism or limits_cfg.get("parallelism", 4)

    multi_agent_ids = config.get("multi_agent_models")
    matrix = pipeline.RunMatrix(
        models=models,
        strategies=strategies,
        grades=grades,
        passages=tuple(passages),
        multi_agent_model_ids=tuple(multi_agent_ids) if multi_agent_ids else None,
    )
    tasks = pipeline.plan_matrix(matrix)
    client = ChatClient(mode=mode, cassette_path=cassette)
    generated, exchanges = pipeline.execute_tasks(
        tasks,
        passages,
        client,
        limits=limits,
        parallelism=parallelism,
        transcript_dir=args.dump_transcripts,
    )

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    pipeline.write_jsonl(out_path, (pipeline.generated_to_dict(g) for g in generated))
    flagged = sum(1 for g in generated if g.anomaly is not None)
    print(f"wrote {len(generated)} rows ({flagged} anomalous) to {out_path}")

    if mode in ("live", "record"):
        try:
            cost = estimate_cost(exchanges, load_price_table(args.price_table))
            print(f"estimated cost: ${cost:.2f} over {len(exchanges)} requests")
        except ConfigurationError as exc:
            print(f"cost estimate unavailable: {exc}")
    return 0


def cmd_evaluate(args) -> int:
    rows = [pipeline.generated_from_dict(doc) for doc in pipeline.read_jsonl(args.results)
            if doc.get("kind") == "generated"]
    passages = corpus_mod.load_corpus(args.corpus)
    by_id = {p.id: p for p in passages}
    provider = make_provider(args.provider, seed=args.seed)
    records = pipeline.score_all(rows, passages, provider)

    out_rows = [
        {
            "kind": "meta",
            "provider": args.provider,
            "provider_model": getattr(provider, "model_id", args.provider),
            "seed": args.seed,
            "segmenter_version": readability.SEGMENTER_VERSION,
        }
    ]
    out_rows += [pipeline.metrics_to_dict(r) for r in records]
    for row in rows:
        if row.anomaly is not None:
            source = by_id.get(row.passage_id)
            out_rows.append(
                {
                    "kind": "anomalous",
                    "passage_id": row.passage_id,
                    "topic": source.topic if source else "",
                    "model_id": row.model_id,
                    "strategy": row.strategy,
                    "grade_target": row.grade_target,
                    "anomaly": row.anomaly.reason,
                }
            )
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    pipeline.write_jsonl(out_path, out_rows)
    print(f"wrote {len(records)} metric rows to {out_path}")
    return 0


def cmd_report(args) -> int:
    formats = {"markdown": ("markdown",), "csv": ("csv",), "both": ("markdown", "csv")}[args.format]
    meta: dict = {}
    metrics = []
    anomalous = []
    for doc in pipeline.read_jsonl(args.metrics):
        kind = doc.get("kind")
        if kind == "meta":
            meta = {k: v for k, v in doc.items() if k != "kind"}
        elif kind == "metrics":
            metrics.append(pipeline.metrics_from_dict(doc))
        elif kind == "anomalous":
            anomalous.append(doc)
    written = pipeline.emit_report(metrics, args.out, formats=formats, anomalous=anomalous, meta=meta)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_score_text(args) -> int:
    text = Path(args.text_file).read_text(encoding="utf-8")
    counts = readability.count_text(text)
    score = readability.compute_fkgl(counts)
    print(f"FKGL: {score.fkgl:.2f}")
    print(
        f"words: {counts.n_words}, sentences: {counts.n_sentences}, "
        f"syllables: {counts.n_syllables}"
    )
    if args.keywords_file:
        keywords = [
            line.strip() for line in Path(args.keywords_file).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        result = keyword_accuracy(keywords, text)
        print(f"keyword accuracy: {result.accuracy:.3f} ({result.retained}/{result.total})")
        retained = [k for k in keywords if k not in result.misses]
        print(f"retained: {', '.join(retained) if retained else '(none)'}")
        print(f"missed: {', '.join(result.misses) if result.misses else '(none)'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relevel",
        description="Relevel grade-12 passages with LLMs and score the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a corpus file")
    p_validate.add_argument("--corpus", required=True)
    p_validate.set_defaults(func=cmd_validate)

    p_relevel = sub.add_parser("relevel", help="run a releveling sub-matrix")
    p_relevel.add_argument("--config", help="JSON config with matrix defaults")
    p_relevel.add_argument("--corpus")
    p_relevel.add_argument("--model", action="append", help="provider/model_id (repeatable)")
    p_relevel.add_argument("--strategy", action="append", help="strategy name (repeatable)")
    p_relevel.add_argument("--grade", action="append", type=int, choices=(4, 6, 8))
    p_relevel.add_argument("--mode", choices=("live", "record", "replay"))
    p_relevel.add_argument("--cassette")
    p_relevel.add_argument("--out", required=True, help="results file (line-delimited JSON)")
    p_relevel.add_argument("--exemplars", help="exemplar JSON file (default: packaged set)")
    p_relevel.add_argument("--temperature", type=float)
    p_relevel.add_argument("--max-tokens", type=int, dest="max_tokens")
    p_relevel.add_argument("--max-rounds", type=int, dest="max_rounds")
    p_relevel.add_argument("--budget", type=int, help="agent token budget")
    p_relevel.add_argument("--parallelism", type=int)
    p_relevel.add_argument("--dump-transcripts", dest="dump_transcripts")
    p_relevel.add_argument("--price-table", dest="price_table")
    p_relevel.set_defaults(func=cmd_relevel)

    p_eval = sub.add_parser("evaluate", help="score generated passages")
    p_eval.add_argument("--results", required=True)
    p_eval.add_argument("--corpus", required=True)
    p_eval.add_argument("--provider", default="mock",
                        help="mock, an http(s) endpoint, or cmd:<argv> (default: mock)")
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", required=True, help="metrics file (line-delimited JSON)")
    p_eval.set_defaults(func=cmd_evaluate)

    p_report = sub.add_parser("report", help="emit report tables from metrics")
    p_report.add_argument("--metrics", required=True)
    p_report.add_argument("--format", choices=("markdown", "csv", "both"), default="both")
    p_report.add_argument("--out", required=True, help="output directory")
    p_report.set_defaults(func=cmd_report)

    p_score = sub.add_parser("score-text", help="score one text file")
    p_score.add_argument("--text-file", required=True, dest="text_file")
    p_score.add_argument("--keywords-file", dest="keywords_file")
    p_score.set_defaults(func=cmd_score_text)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 3
    except RelevelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
