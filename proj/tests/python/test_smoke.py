import json
import os
from pathlib import Path

import pytest

import cuesplit

RULES = Path(os.environ.get("CUESPLIT_SOURCE_DIR", Path(__file__).resolve().parents[2])) / "rules" / "starter.jsonl"


@pytest.fixture(scope="module")
def corpus():
    return cuesplit.Corpus.generate(seed=7, docs=30, mean_words=3000)


@pytest.fixture(scope="module")
def splitter(corpus):
    return cuesplit.Splitter.train(corpus, iterations=30)


def test_generate_is_deterministic(corpus):
    again = cuesplit.Corpus.generate(seed=7, docs=30, mean_words=3000)
    assert len(again) == 30
    assert again.document(4) == corpus.document(4)
    assert again.labels(4) == corpus.labels(4)
    assert sorted(corpus.split("train") + corpus.split("dev") + corpus.split("test")) == list(range(30))


def test_corpus_round_trip(corpus, tmp_path):
    corpus.write(tmp_path / "c")
    back = cuesplit.Corpus.read(tmp_path / "c")
    assert len(back) == len(corpus)
    assert back.document(0) == corpus.document(0)
    assert back.split("test") == corpus.split("test")


def test_split_document(corpus, splitter):
    doc = json.dumps(corpus.document(corpus.split("test")[0]))
    out = splitter.split(doc)
    assert out["sections"]
    assert {s["type"] for s in out["sections"]} <= {"clause", "subclause", "header", "footer"}
    tags = splitter.tags(doc)
    assert len(tags) == len(corpus.labels(corpus.split("test")[0])["line_labels"])


def test_splitter_json_round_trip(corpus, splitter):
    doc = json.dumps(corpus.document(1))
    loaded = cuesplit.Splitter.from_json(splitter.to_json())
    assert loaded.feature_fingerprint == splitter.feature_fingerprint
    assert loaded.tags(doc) == splitter.tags(doc)


def test_extract_and_rules(corpus, splitter):
    bundle = cuesplit.Extractors.train(corpus, iterations=30)
    bundle = cuesplit.Extractors.from_json(bundle.to_json())
    index = corpus.split("test")[0]
    preds = bundle.predict(corpus, index, splitter)
    assert [p["attribute"] for p in preds] == [
        "expiration_date", "governing_law", "termination_for_convenience", "anti_assignment"]
    rules = cuesplit.Rules.load(RULES)
    assert len(rules) > 0
    assert len(rules.apply(corpus, index)) == 4


def test_metrics():
    m = cuesplit.metrics(0, 0, 15, 495)
    assert m["precision"] == 0 and m["recall"] == 0
    assert round((m["tp"] + m["tn"]) / 510, 2) == 0.97
    assert cuesplit.metrics(0, 0, 0)["precision"] == 1
    assert cuesplit.format_delta(0.919, 0.904) == "+1.7%"


def test_evaluate_sections(corpus, splitter):
    scores = cuesplit.evaluate_sections(splitter, corpus, "test")
    assert set(scores) == {"exact", "overlap"}
    assert 0 <= scores["exact"]["clause"]["f1"] <= scores["overlap"]["clause"]["f1"] <= 1


def test_errors(corpus):
    with pytest.raises(cuesplit.ValidationError):
        cuesplit.Corpus.generate(docs=0)
    with pytest.raises(cuesplit.ValidationError):
        cuesplit.Splitter.train(corpus, groups="no_such_group")
    with pytest.raises(cuesplit.ValidationError):
        cuesplit.Rules.parse('{"rule_id": "x"}\n')
    with pytest.raises(IndexError):
        corpus.document(1000)
