"""Loading of intent corpora in the NLU-Evaluation-Corpora JSON layout (or CSV)."""
from __future__ import annotations

import csv
import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

# Short names -> file names tried in order inside a corpus directory.
KNOWN_CORPORA = {
    "chatbot": ("ChatbotCorpus.json", "chatbot.json"),
    "askubuntu": ("AskUbuntuCorpus.json", "askubuntu.json"),
    "webapp": ("WebApplicationsCorpus.json", "WebApplicationCorpus.json",
               "webapp.json", "webapplication.json"),
}


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledUtterance:
    text: str
    intent: str
    is_training: bool

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("utterance text is empty")
        if not self.intent.strip():
            raise ValueError("utterance intent is empty")


@dataclass(frozen=True)
class Dataset:
    name: str
    samples: tuple[LabeledUtterance, ...] = field(default=())

    @property
    def train(self) -> list[LabeledUtterance]:
        return [s for s in self.samples if s.is_training]

    @property
    def test(self) -> list[LabeledUtterance]:
        return [s for s in self.samples if not s.is_training]

    def labels(self, split="train") -> list[str]:
        return list(class_distribution(self, split))

    def check(self) -> list[str]:
        """Return (and log) warnings about the train/test label sets."""
        warnings = []
        train, test = class_distribution(self, "train"), class_distribution(self, "test")
        if self.samples and not train:
            warnings.append(f"{self.name}: no training samples")
        if self.samples and not test:
            warnings.append(f"{self.name}: no test samples")
        for label in test:
            if label not in train:
                warnings.append(f"{self.name}: test label {label!r} absent from training split")
        for label in train:
            if label not in test:
                warnings.append(f"{self.name}: label {label!r} has no test samples")
        for w in warnings:
            log.warning(w)
        return warnings


def _record(entry, idx, name):
    if not isinstance(entry, dict):
        raise CorpusFormatError(f"{name}: sentence {idx} is not an object")
    for key in ("text", "intent", "training"):
        if key not in entry:
            raise CorpusFormatError(f"{name}: sentence {idx} lacks required field {key!r}")
    text, intent, training = entry["text"], entry["intent"], entry["training"]
    if not isinstance(text, str) or not isinstance(intent, str):
        raise CorpusFormatError(f"{name}: sentence {idx} has non-string text or intent")
    if not isinstance(training, bool):
        raise CorpusFormatError(f"{name}: sentence {idx} has non-boolean 'training'")
    try:
        return LabeledUtterance(text.strip(), intent.strip(), training)
    except ValueError as exc:
        raise CorpusFormatError(f"{name}: sentence {idx}: {exc}") from None


def load_dataset(path, name=None) -> Dataset:
    """Load a corpus file.

    ``.csv`` files must have a ``text,intent,split`` header with split in
    {train, test}; anything else is read as the benchmark JSON layout, where
    only ``text``, ``intent`` and ``training`` of each sentence are kept.

    Raises
    ------
    OSError
        The file cannot be read.
    CorpusFormatError
        Malformed document or record; the message names the record index.
    """
    path = os.fspath(path)
    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]
    if path.lower().endswith(".csv"):
        return _load_csv(path, name)
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{name}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("sentences"), list):
        raise CorpusFormatError(f"{name}: top-level 'sentences' array missing")
    samples = tuple(_record(e, i, name) for i, e in enumerate(doc["sentences"]))
    return Dataset(name, samples)


def _load_csv(path, name):
    samples = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"text", "intent", "split"} - set(reader.fieldnames or ())
        if missing:
            raise CorpusFormatError(f"{name}: CSV header lacks {sorted(missing)}")
        for i, row in enumerate(reader):
            split = (row["split"] or "").strip().lower()
            if split not in ("train", "test"):
                raise CorpusFormatError(f"{name}: row {i} has split {row['split']!r}")
            entry = {"text": row["text"] or "", "intent": row["intent"] or "",
                     "training": split == "train"}
            samples.append(_record(entry, i, name))
    return Dataset(name, tuple(samples))


def find_corpus(corpus_dir, short_name) -> str:
    """Resolve a short dataset name (``chatbot``, ...) to a file in ``corpus_dir``."""
    candidates = KNOWN_CORPORA.get(short_name, (f"{short_name}.json", f"{short_name}.csv"))
    for fname in candidates:
        path = os.path.join(corpus_dir, fname)
        if os.path.isfile(path):
            return path
    raise FileNotFoundError(
        f"no corpus file for {short_name!r} in {corpus_dir} (tried {', '.join(candidates)})")


def class_distribution(ds: Dataset, split: str = "train") -> dict[str, int]:
    """Label counts of one split, in first-appearance order."""
    if split not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', not {split!r}")
    want = split == "train"
    return dict(Counter(s.intent for s in ds.samples if s.is_training == want))
