import json
from pathlib import Path

import pytest

from wilee.malmo import extract_noun_phrases, tag_text, tag_word

GOLD = Path(__file__).parent / "fixtures" / "phrases_gold.json"


def words(text, **kwargs):
    return [list(p.words) for p in extract_noun_phrases(text, **kwargs)]


def test_empty_text_gives_no_phrases():
    assert extract_noun_phrases("") == []


def test_all_noun_run_is_one_phrase():
    (phrase,) = extract_noun_phrases("window registry keys")
    assert list(phrase.words) == ["window", "registry", "keys"]
    assert phrase.source_span == (0, len("window registry keys"))


def test_adjectives_need_a_noun_head():
    assert words("malicious suspicious") == []
    assert words("malicious suspicious process") == [["malicious", "suspicious", "process"]]


def test_phrases_are_maximal_and_non_overlapping():
    got = extract_noun_phrases("the remote process opened local registry keys")
    assert [list(p.words) for p in got] == [["remote", "process"], ["local", "registry", "keys"]]
    spans = [p.source_span for p in got]
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))


def test_punctuation_breaks_runs():
    assert words("registry, keys") == [["registry"], ["keys"]]


def test_lowercasing():
    assert words("Putty Sessions") == [["putty", "sessions"]]


def test_gold_fixture():
    gold = json.loads(GOLD.read_text("utf-8"))
    assert len(gold) == 50
    for entry in gold:
        assert words(entry["text"]) == entry["phrases"], entry["text"]


def test_pretagged_input_honored():
    text = "running/VBG process/NN creates/VBZ remote/JJ registry/NN keys/NNS"
    assert words(text, pretagged=True) == [["process"], ["remote", "registry", "keys"]]


def test_pretagged_spans_cover_words():
    text = "window/NN registry/NN keys/NNS"
    (phrase,) = extract_noun_phrases(text, pretagged=True)
    start, end = phrase.source_span
    assert text[start:end] == "window/NN registry/NN keys"


def test_pretagged_rejects_untagged_tokens():
    with pytest.raises(ValueError):
        extract_noun_phrases("just plain words", pretagged=True)


def test_tagger_basic_classes():
    assert tag_word("the") == "DT"
    assert tag_word("quickly") == "RB"
    assert tag_word("running") == "VBG"
    assert tag_word("string") == "NN"  # -ing noun whitelist
    assert tag_word("opened") == "VBD"
    assert tag_word("malicious") == "JJ"
    assert tag_word("dangerous") == "JJ"  # -ous suffix
    assert tag_word("keys") == "NNS"
    assert tag_word("process") == "NN"  # -ss guard
    assert tag_word("42") == "CD"
    assert tag_word(";") == "PUNCT"


def test_tagging_is_deterministic():
    text = "Adversaries may search the registry for insecurely stored credentials."
    assert tag_text(text) == tag_text(text)
