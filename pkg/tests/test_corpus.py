import json

import pytest

from relevel import consistency
from relevel.corpus import (
    KeywordSpan,
    Passage,
    PhraseSpan,
    has_errors,
    load_corpus,
    save_corpus,
    serialize_corpus,
    validate_passage,
)
from relevel.errors import ParseError, SchemaError


def make_passage(**overrides) -> Passage:
    paragraph = (
        "The research station recorded measurements every morning before the fog "
        "lifted from the valley floor. Scientists compared the new numbers against "
        "decades of careful archives, looking for the smallest change in the river. "
        "Their instruments were simple, but the records they produced were precise, "
        "and the whole team trusted them. Visitors often asked why the work mattered, "
        "and the answer was always the same: the valley feeds the town below."
    )
    fields = dict(
        id="sample",
        title="Sample",
        topic="science-psychology",
        declared_grade=12,
        paragraphs=(paragraph,) * 4,
        keywords=(KeywordSpan("research station"), KeywordSpan("valley")),
        key_phrases=(PhraseSpan("the valley feeds the town below"),),
    )
    fields.update(overrides)
    return Passage(**fields)


class TestLoadCorpus:
    def test_fixture_file_loads_six_passages(self, fixtures_path):
        passages = load_corpus(fixtures_path)
        assert len(passages) == 6
        assert {p.topic for p in passages} == {
            "science-psychology",
            "us-history",
            "world-history",
            "biography",
            "humanities",
            "current-events",
        }

    def test_empty_file_is_parse_error(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        with pytest.raises(ParseError):
            load_corpus(path)

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"passages": [\n  {"id": }\n]}')
        with pytest.raises(ParseError, match="line 2"):
            load_corpus(path)

    def test_duplicate_id_is_schema_error(self, tmp_path, fixture_passages):
        doc = serialize_corpus([fixture_passages[0], fixture_passages[0]])
        path = tmp_path / "dup.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SchemaError, match="duplicate"):
            load_corpus(path)

    def test_three_paragraph_passage_parses_then_flags(self, tmp_path, fixture_passages):
        doc = serialize_corpus(list(fixture_passages))
        doc["passages"][0]["paragraphs"] = doc["passages"][0]["paragraphs"][:3]
        path = tmp_path / "short.json"
        path.write_text(json.dumps(doc, ensure_ascii=False))
        passages = load_corpus(path)
        report = validate_passage(passages[0])
        assert any(i.rule == "paragraph-count" and i.severity == "error" for i in report)

    def test_missing_field_is_schema_error(self, tmp_path):
        path = tmp_path / "missing.json"
        path.write_text('{"passages": [{"id": "x"}]}')
        with pytest.raises(SchemaError, match="title"):
            load_corpus(path)

    def test_round_trip_is_identity(self, tmp_path, fixture_passages):
        path = tmp_path / "rt.json"
        save_corpus(list(fixture_passages), path)
        assert load_corpus(path) == list(fixture_passages)


class TestValidatePassage:
    def test_fixture_passages_have_no_errors(self, fixture_passages):
        for p in fixture_passages:
            assert not has_errors(validate_passage(p)), p.id

    def test_fully_conformant_passage_has_empty_report(self):
        sentence = (
            "The research station recorded measurements every morning before "
            "the fog lifted from the valley floor."
        )  # 15 words; five copies make a 75-word paragraph
        paragraph = " ".join([sentence] * 5)
        p = make_passage(
            paragraphs=(paragraph,) * 4,
            keywords=tuple(
                KeywordSpan(w)
                for w in ("research", "station", "measurements", "morning",
                          "fog", "valley", "floor", "lifted")
            ),
            key_phrases=tuple(
                PhraseSpan(s)
                for s in ("research station", "recorded measurements", "every morning",
                          "the fog lifted", "valley floor", "before the fog",
                          "the valley floor", "measurements every morning",
                          "the research station")
            ),
        )
        assert validate_passage(p) == []

    def test_validation_is_pure(self, fixture_passages):
        p = fixture_passages[0]
        assert validate_passage(p) == validate_passage(p)

    def test_short_passage_flags_total_word_count(self):
        p = make_passage(paragraphs=("Short paragraph here.",) * 4, keywords=(KeywordSpan("paragraph"),))
        report = validate_passage(p)
        entry = next(i for i in report if i.rule == "total-word-count")
        assert entry.severity == "error"
        assert "270" in entry.detail and "330" in entry.detail

    def test_missing_keyword_is_error(self):
        p = make_passage(keywords=(KeywordSpan("hieroglyphic"),))
        report = validate_passage(p)
        assert any(
            i.rule == "keyword-presence" and "hieroglyphic" in i.detail and i.severity == "error"
            for i in report
        )

    def test_paragraph_bounds_are_warnings(self, fixture_passages):
        p = fixture_passages[0]  # paragraphs of 74-83 words
        report = validate_passage(p)
        para_issues = [i for i in report if i.rule == "paragraph-word-count"]
        assert para_issues
        assert all(i.severity == "warning" for i in para_issues)

    def test_unknown_topic_is_error(self):
        p = make_passage(topic="sports")
        assert any(i.rule == "topic" for i in validate_passage(p))

    def test_overlong_keyword_is_error(self):
        p = make_passage(keywords=(KeywordSpan("the research station recorded measurements every morning"),))
        assert any(i.rule == "keyword-token-count" for i in validate_passage(p))


class TestSelfRetention:
    def test_every_fixture_keyword_found_in_own_text(self, fixture_passages, hippo_passage):
        for p in list(fixture_passages) + [hippo_passage]:
            result = consistency.keyword_accuracy(p.keywords, p.text)
            assert result.accuracy == 1.0, (p.id, result.misses)
