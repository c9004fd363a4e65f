import json

import pytest

from semhash_intent.corpus import (
    CorpusFormatError,
    Dataset,
    LabeledUtterance,
    class_distribution,
    load_dataset,
)

from conftest import real_corpus


def write(tmp_path, doc, name="c.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc, encoding="utf-8")
    return path


def test_load_toy(toy_path):
    ds = load_dataset(toy_path, "toy")
    assert ds.name == "toy"
    assert len(ds.train) == 53 and len(ds.test) == 40
    dist = class_distribution(ds, "train")
    assert sum(dist.values()) == len(ds.train)
    assert dist["FindConnection"] == 20
    assert sum(class_distribution(ds, "test").values()) + sum(dist.values()) == len(ds.samples)


def test_reload_is_identical(toy_path):
    assert load_dataset(toy_path, "toy") == load_dataset(toy_path, "toy")


def test_extra_fields_dropped(tmp_path):
    path = write(tmp_path, {"author": "x", "sentences": [
        {"text": " Hi there ", "intent": " Greet ", "training": True, "entities": [{"a": 1}],
         "answer": {"text": "..."}, "url": "u"}]})
    ds = load_dataset(path)
    assert ds.samples == (LabeledUtterance("Hi there", "Greet", True),)
    assert ds.name == "c"


def test_empty_sentences(tmp_path):
    ds = load_dataset(write(tmp_path, {"sentences": []}), "empty")
    assert ds.samples == ()
    assert class_distribution(ds, "train") == {}


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_dataset(tmp_path / "nope.json")


@pytest.mark.parametrize("doc, fragment", [
    ("{not json", "invalid JSON"),
    ({"foo": []}, "sentences"),
    ({"sentences": [{"text": "a", "intent": "b", "training": True}, {"text": "a", "training": True}]},
     "sentence 1 lacks required field 'intent'"),
    ({"sentences": [{"text": "  ", "intent": "b", "training": True}]}, "sentence 0"),
    ({"sentences": [{"text": "a", "intent": "b", "training": "yes"}]}, "sentence 0"),
])
def test_malformed(tmp_path, doc, fragment):
    with pytest.raises(CorpusFormatError, match=fragment):
        load_dataset(write(tmp_path, doc))


def test_csv(tmp_path):
    path = tmp_path / "mine.csv"
    path.write_text('text,intent,split\n"hello, bot",greet,train\nbye,leave,test\n', encoding="utf-8")
    ds = load_dataset(path)
    assert ds.samples == (LabeledUtterance("hello, bot", "greet", True),
                          LabeledUtterance("bye", "leave", False))
    path.write_text("text,intent,split\nhi,greet,dev\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError, match="row 0"):
        load_dataset(path)


def test_labels_exact_after_trim():
    ds = Dataset("d", (LabeledUtterance("a", "None", True), LabeledUtterance("b", "none", True)))
    assert class_distribution(ds, "train") == {"None": 1, "none": 1}


def test_check_warns_on_missing_test_label():
    ds = Dataset("web", (LabeledUtterance("a", "Download Video", True),
                         LabeledUtterance("b", "Export Data", True),
                         LabeledUtterance("c", "Export Data", False)))
    warnings = ds.check()
    assert any("Download Video" in w for w in warnings)


# Counts below come from the published class distribution tables and need the
# benchmark files themselves.

def _real(short):
    path = real_corpus(short)
    if path is None:
        pytest.skip(f"benchmark corpus {short!r} not available (set SEMHASH_CORPUS_DIR)")
    return load_dataset(path, short)


def test_chatbot_counts():
    ds = _real("chatbot")
    assert sorted(class_distribution(ds, "train").values()) == [43, 57]
    assert sorted(class_distribution(ds, "test").values()) == [35, 71]


def test_askubuntu_counts():
    ds = _real("askubuntu")
    train = class_distribution(ds, "train")
    assert sorted(train.values()) == [3, 10, 10, 13, 17]


def test_webapp_counts():
    ds = _real("webapp")
    assert len(ds.train) == 30 and len(ds.test) == 59
    assert len(class_distribution(ds, "train")) == 8
