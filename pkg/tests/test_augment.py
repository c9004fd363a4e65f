from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semhash_intent.augment import (
    AugmentationPlan,
    LeakageError,
    Thesaurus,
    ThesaurusError,
    balance_classes,
    default_thesaurus,
    load_thesaurus,
    parse_thesaurus,
    synonym_augment,
)
from semhash_intent.corpus import LabeledUtterance
from semhash_intent.preprocess import normalize_text, split_words


class FirstChoice:
    """Stand-in generator that always takes the first option."""

    def choice(self, a, size, replace=False):
        return np.asarray(a[:size])

    def integers(self, n):
        return 0


TH = Thesaurus({("change", "v"): ["modify", "alter"],
                ("delete", "v"): ["remove", "erase"],
                ("account", "n"): ["profile", "login"]})


def test_forced_single_replacement():
    out, changed = synonym_augment(normalize_text("change -PRON- password"), TH, FirstChoice(), 1)
    assert changed and out.text == "modify -PRON- password"


def test_unmatched_sentence_unchanged():
    nt = normalize_text("how is the weather")
    out, changed = synonym_augment(nt, TH, np.random.default_rng(0))
    assert not changed and out == nt


def test_two_replacements():
    out, changed = synonym_augment(normalize_text("delete account"), TH, FirstChoice(), 2)
    assert changed and out.text == "remove profile"


def test_stop_characters_kept_in_place():
    out, _ = synonym_augment(normalize_text("delete account?"), TH, FirstChoice(), 2)
    assert out.text == "remove profile?"


words = st.sampled_from(["change", "delete", "account", "the", "-PRON-", "?", "gmail"])


@given(st.lists(words, max_size=10), st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_token_count_preserved(tokens, seed, k):
    nt = normalize_text(" ".join(tokens))
    out, changed = synonym_augment(nt, TH, np.random.default_rng(seed), k)
    assert len(out.tokens) == len(nt.tokens)
    assert normalize_text(out.text) == out
    diff = sum(a != b for a, b in zip(out.tokens, nt.tokens))
    assert diff <= k
    assert changed == (k > 0 and any(t in TH for t in nt.tokens))


def _samples(counts, training=True):
    out = []
    for label, n in counts.items():
        out += [LabeledUtterance(f"delete {label.lower()} account number {i}", label, training)
                for i in range(n)]
    return out


WEBAPP_TRAIN = {"Change Password": 2, "Delete Account": 7, "Download Video": 1, "Export Data": 2,
                "Filter Spam": 6, "Find Alternative": 7, "Sync Accounts": 3, "None": 2}


def test_balance_webapp_counts():
    out = balance_classes(_samples(WEBAPP_TRAIN), TH, AugmentationPlan(target_count=7))
    assert len(out) == 56
    assert set(Counter(s.intent for s in out).values()) == {7}


def test_balance_chatbot_counts():
    train = _samples({"Departure Time": 43, "Find Connection": 57})
    out = balance_classes(train, TH)
    assert out[:100] == train
    added = out[100:]
    assert len(added) == 14 and {s.intent for s in added} == {"Departure Time"}


def test_balanced_input_unchanged():
    train = _samples({"a": 3, "b": 3})
    assert balance_classes(train, TH) == train


def test_balance_deterministic_and_label_preserving():
    train = _samples({"x": 1, "y": 5, "z": 2})
    a = balance_classes(train, TH, AugmentationPlan(seed=3))
    b = balance_classes(train, TH, AugmentationPlan(seed=3))
    assert a == b
    sources = {s.text: s.intent for s in train}
    for s in a[len(train):]:
        assert any(len(split_words(s.text)) == len(split_words(t)) and sources[t] == s.intent
                   for t in sources)


def test_duplicates_when_thesaurus_has_no_coverage():
    train = [LabeledUtterance("hello", "a", True)] + _samples({"b": 3})
    out = balance_classes(train, Thesaurus({}))
    assert [s.text for s in out if s.intent == "a"] == ["hello", "hello", "hello"]


def test_balance_errors():
    with pytest.raises(ValueError, match="'ghost'"):
        balance_classes(_samples({"a": 2}), TH, classes=["a", "ghost"])
    with pytest.raises(ValueError, match="below"):
        balance_classes(_samples({"a": 4}), TH, AugmentationPlan(target_count=2))
    with pytest.raises(ValueError):
        balance_classes([], TH)
    with pytest.raises(LeakageError):
        balance_classes(_samples({"a": 2}, training=False), TH)


@settings(max_examples=50)
@given(st.dictionaries(st.sampled_from("abcdef"), st.integers(1, 6), min_size=1),
       st.integers(0, 1000))
def test_balanced_distribution_constant(counts, seed):
    out = balance_classes(_samples(counts), default_thesaurus(), AugmentationPlan(seed=seed))
    dist = Counter(s.intent for s in out)
    assert set(dist.values()) == {max(counts.values())}


def test_thesaurus_file(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text("# comment\nrun\tv\tsprint,jog,run\nrun\tv\tdash\nrun\tn\ttrot\n\n",
                    encoding="utf-8")
    th = load_thesaurus(path)
    assert th.synonyms("run", "v") == ("sprint", "jog", "dash")
    assert th.synonyms("run") == ("trot", "sprint", "jog", "dash")
    assert "run" in th and len(th) == 2


@pytest.mark.parametrize("line", [
    "run\tv\tgo fast",
    "run\tv\tgo_fast",
    "run\tadj\tquick",
    "run\tv",
])
def test_thesaurus_rejects(line):
    with pytest.raises(ThesaurusError, match=":1:"):
        parse_thesaurus([line], source="x")


def test_thesaurus_env(tmp_path, monkeypatch):
    path = tmp_path / "lex.tsv"
    path.write_text("cat\tn\tfeline\n", encoding="utf-8")
    monkeypatch.setenv("SEMHASH_THESAURUS", str(path))
    assert load_thesaurus().synonyms("cat") == ("feline",)
    monkeypatch.delenv("SEMHASH_THESAURUS")
    assert len(load_thesaurus()) == len(default_thesaurus())


def test_builtin_thesaurus_invariants():
    th = default_thesaurus()
    assert len(th) > 150
    for (word, _pos), syns in th.entries.items():
        assert syns and word not in syns
        for s in syns:
            assert s == s.lower() and len(split_words(s)) == 1
