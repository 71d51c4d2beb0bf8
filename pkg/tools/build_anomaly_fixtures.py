"""Regenerate data/anomaly_labeled.json: 30 labeled outputs for the screen.

Anomalous items cover the two observed failure shapes (structural stubs
and prompt echoes); clean items are genuine relevels and source texts.
Run from the repo root:

    python3 tools/build_anomaly_fixtures.py
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "relevel" / "data"

sys.path.insert(0, str(ROOT / "src"))

STUBS = [
    "A:",
    "A: ",
    "Paragraph 1:",
    "Paragraph 1:\nParagraph 2:\nParagraph 3:\nParagraph 4:",
    "A:\n\nA:",
    "A:\nParagraph 1:",
    "Paragraph 1\nParagraph 2",
    "Paragraph 1:\nThe end.\nParagraph 2:\nParagraph 3:",
]

ECHOES = [
    "Sure, I can help you reduce the readability level of the source text from grade twelve "
    "to grade 8th, according to the Flesch-Kincaid Grade level. Here's the revised text:",
    "Sure, I can help you reduce the readability level of the source text from grade twelve "
    "to grade 6th, according to the Flesch-Kincaid Grade level.",
    "Sure, I can help with that task.",
    "Here's the revised text:",
    "Here is the revised text:",
    "I can help you reduce the readability of this passage. Here is the revised text:",
    "Sure, I can help! Here's the revised text: ",
]


def main() -> int:
    from relevel.corpus import load_corpus

    passages = load_corpus(DATA / "corpus_fixtures.json")
    hippo = load_corpus(DATA / "hippo_corpus.json")[0]
    relevels = json.loads((DATA / "demo_relevels_grade6.json").read_text(encoding="utf-8"))
    exemplars = json.loads((DATA / "exemplars.json").read_text(encoding="utf-8"))["exemplars"]
    hippo_relevel = (DATA / "hippo_relevel_grade6.txt").read_text(encoding="utf-8")

    items = []
    for i, stub in enumerate(STUBS):
        items.append(
            {"id": f"stub-{i:02d}", "source_passage_id": passages[i % 6].id,
             "text": stub, "label": "anomalous", "shape": "stub"}
        )
    for i, echo in enumerate(ECHOES):
        items.append(
            {"id": f"echo-{i:02d}", "source_passage_id": passages[i % 6].id,
             "text": echo, "label": "anomalous", "shape": "echo"}
        )
    for p in passages:
        items.append(
            {"id": f"clean-relevel-{p.id}", "source_passage_id": p.id,
             "text": relevels[p.id], "label": "clean", "shape": "genuine"}
        )
    items.append(
        {"id": "clean-relevel-american-hippo-bill", "source_passage_id": "american-hippo-bill",
         "text": hippo_relevel, "label": "clean", "shape": "genuine"}
    )
    for ex, grade in ((exemplars[0], "8"), (exemplars[1], "4")):
        items.append(
            {"id": f"clean-exemplar-{ex['id']}-g{grade}", "source_passage_id": ex["source_passage_id"],
             "text": ex["regenerated_text"][grade], "label": "clean", "shape": "genuine"}
        )
    for p in passages:
        items.append(
            {"id": f"clean-identity-{p.id}", "source_passage_id": p.id,
             "text": "\n\n".join(p.paragraphs), "label": "clean", "shape": "genuine"}
        )

    assert len(items) == 30, len(items)
    (DATA / "anomaly_labeled.json").write_text(
        json.dumps({"items": items}, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(items)} labeled items")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
