"""Regenerate data/demo_cassette.jsonl.

The demo cassette holds one zero-shot grade-6 exchange per fixture
passage for the default demo model, with responses taken from the
hand-leveled texts in data/demo_relevels_grade6.json. Replaying it
exercises the full relevel -> evaluate -> report pipeline without any
network access. Run from the repo root:

    python3 tools/make_demo_cassette.py
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "relevel" / "data"

sys.path.insert(0, str(ROOT / "src"))

from relevel.corpus import load_corpus  # noqa: E402
from relevel.gateway import Cassette, ChatExchange, ModelSpec, Usage, fingerprint  # noqa: E402
from relevel.prompting import GradeTarget, render_zero_shot  # noqa: E402

DEMO_MODEL = ModelSpec(provider="openai-compatible", model_id="gpt-4-turbo")
DEMO_GRADE = 6


def main() -> int:
    passages = load_corpus(DATA / "corpus_fixtures.json")
    relevels = json.loads((DATA / "demo_relevels_grade6.json").read_text(encoding="utf-8"))
    out = DATA / "demo_cassette.jsonl"
    if out.exists():
        out.unlink()
    cassette = Cassette(out)
    target = GradeTarget(grade=DEMO_GRADE)
    for passage in passages:
        rendered = render_zero_shot(passage, target, DEMO_MODEL.family)
        response = relevels[passage.id]
        exchange = ChatExchange(
            system=rendered.system,
            user_turns=(rendered.user,),
            response=response,
            usage=Usage(
                prompt_tokens=len(rendered.system + rendered.user) // 4,
                completion_tokens=len(response) // 4,
            ),
            latency_ms=0.0,
            model=DEMO_MODEL,
        )
        cassette.append(fingerprint(DEMO_MODEL, rendered.system, (rendered.user,)), exchange)
    print(f"wrote {len(passages)} exchanges to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
