"""Class balancing by oversampling with dictionary-based synonym replacement."""
from __future__ import annotations

import logging
import os
from collections import defaultdict
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .corpus import LabeledUtterance
from .preprocess import NormalizedText, iter_word_spans, normalize_text, split_words

log = logging.getLogger(__name__)

POS_TAGS = ("n", "v")
THESAURUS_ENV = "SEMHASH_THESAURUS"


class ThesaurusError(ValueError):
    pass


class LeakageError(RuntimeError):
    """A sample from the test split reached a training-only step."""


class Thesaurus:
    """Immutable ``(word, pos) -> synonyms`` lookup.

    Lookups by word ignore the part of speech: a word counts as a noun or
    verb candidate whenever it is a headword under either tag.
    """

    def __init__(self, entries):
        merged: dict[tuple[str, str], list[str]] = {}
        for (word, pos), syns in entries.items():
            word = word.strip().lower()
            if pos not in POS_TAGS:
                raise ThesaurusError(f"unknown part of speech {pos!r} for {word!r}")
            _check_single_token(word, word)
            bucket = merged.setdefault((word, pos), [])
            for syn in syns:
                syn = syn.strip().lower()
                _check_single_token(syn, word)
                if syn != word and syn not in bucket:
                    bucket.append(syn)
        self._entries = {k: tuple(v) for k, v in merged.items() if v}
        by_word: dict[str, list[str]] = defaultdict(list)
        for (word, _pos), syns in sorted(self._entries.items(), key=lambda kv: POS_TAGS.index(kv[0][1])):
            for syn in syns:
                if syn not in by_word[word]:
                    by_word[word].append(syn)
        self._by_word = {w: tuple(s) for w, s in by_word.items()}

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, word):
        return word in self._by_word

    def synonyms(self, word: str, pos: str | None = None) -> tuple[str, ...]:
        if pos is None:
            return self._by_word.get(word, ())
        return self._entries.get((word, pos), ())


def _check_single_token(text, headword):
    if not text or normalize_text(text).text != text or len(split_words(text)) != 1:
        raise ThesaurusError(
            f"entry {headword!r}: {text!r} is not a single normalized token")


def parse_thesaurus(lines, source="<thesaurus>") -> Thesaurus:
    entries: dict[tuple[str, str], list[str]] = defaultdict(list)
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ThesaurusError(f"{source}:{lineno}: expected word<TAB>pos<TAB>synonyms")
        word, pos, syns = (p.strip() for p in parts)
        syn_list = [s for s in syns.split(",") if s.strip()]
        try:
            Thesaurus({(word, pos): syn_list})
        except ThesaurusError as exc:
            raise ThesaurusError(f"{source}:{lineno}: {exc}") from None
        entries[(word.lower(), pos)].extend(syn_list)
    return Thesaurus(entries)


def load_thesaurus(path=None) -> Thesaurus:
    """Read a TSV lexicon; fall back to ``$SEMHASH_THESAURUS``, then the built-in one."""
    path = path or os.environ.get(THESAURUS_ENV)
    if path:
        with open(path, encoding="utf-8") as fh:
            return parse_thesaurus(fh, source=os.fspath(path))
    return default_thesaurus()


def default_thesaurus() -> Thesaurus:
    text = resources.files("semhash_intent").joinpath("data/thesaurus.tsv").read_text("utf-8")
    return parse_thesaurus(text.splitlines(), source="thesaurus.tsv")


@dataclass(frozen=True)
class AugmentationPlan:
    """``target_count=None`` means the largest original class size."""

    target_count: int | None = None
    seed: int = 0
    max_replacements_per_sentence: int = 2


def synonym_augment(nt, th: Thesaurus, rng, max_replacements=2):
    """Replace up to ``max_replacements`` thesaurus headwords by random synonyms.

    Positions are drawn uniformly without replacement among tokens that are
    headwords, and each gets a uniformly drawn synonym.

    Returns
    -------
    text : NormalizedText
    changed : bool
        False when no token had a thesaurus entry (the input comes back as is).
    """
    if not isinstance(nt, NormalizedText):
        nt = normalize_text(nt)
    spans = list(iter_word_spans(nt.text))
    candidates = [i for i, (a, b) in enumerate(spans) if nt.text[a:b] in th]
    if not candidates or max_replacements <= 0:
        return nt, False
    n_pick = min(max_replacements, len(candidates))
    picked = sorted(int(i) for i in rng.choice(candidates, size=n_pick, replace=False))
    pieces, last = [], 0
    for i in picked:
        a, b = spans[i]
        syns = th.synonyms(nt.text[a:b])
        pieces.append(nt.text[last:a])
        pieces.append(syns[int(rng.integers(len(syns)))])
        last = b
    pieces.append(nt.text[last:])
    text = "".join(pieces)
    return NormalizedText(text, tuple(split_words(text))), True


def balance_classes(train, th: Thesaurus, plan: AugmentationPlan | None = None,
                    classes=None, rng=None) -> list[LabeledUtterance]:
    """Oversample every class up to ``plan.target_count`` samples.

    Originals are kept in their input order; the extra samples follow, class
    by class, each an augmented copy of a uniformly drawn original of the
    same class. A copy the thesaurus cannot change is added unchanged.

    ``classes`` lists labels that must be present; ``rng`` overrides the
    generator seeded from ``plan.seed``.
    """
    plan = plan or AugmentationPlan()
    train = list(train)
    for s in train:
        if not s.is_training:
            raise LeakageError(f"test sample reached augmentation: {s.text!r}")
    groups: dict[str, list[LabeledUtterance]] = {}
    for label in classes or ():
        groups[label] = []
    for s in train:
        groups.setdefault(s.intent, []).append(s)
    if not groups:
        raise ValueError("cannot balance an empty training set")
    for label, members in groups.items():
        if not members:
            raise ValueError(f"class {label!r} has no training samples")
    largest = max(len(m) for m in groups.values())
    target = largest if plan.target_count is None else plan.target_count
    if target < largest:
        raise ValueError(f"target_count {target} is below the largest class size {largest}")
    if rng is None:
        rng = np.random.default_rng(plan.seed)

    out = list(train)
    for label, members in groups.items():
        for _ in range(target - len(members)):
            src = members[int(rng.integers(len(members)))]
            nt, _changed = synonym_augment(normalize_text(src.text), th, rng,
                                           plan.max_replacements_per_sentence)
            out.append(replace(src, text=nt.text) if nt.text else src)
    return out
