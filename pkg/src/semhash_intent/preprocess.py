"""Text normalization applied before sub-token extraction.

Lowercases, masks personal pronouns with ``-PRON-``, strips every character
that is not a letter, digit, whitespace or one of the sentence-final stop
characters, and collapses whitespace.
"""
from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field

PRONOUN_MASK = "-PRON-"
STOP_CHARS = frozenset(".!?")
PRONOUNS = frozenset(
    """
    i me my mine myself we us our ours ourselves you your yours yourself
    yourselves he him his himself she her hers herself it its itself they
    them their theirs themselves
    """.split()
)

_TOKEN_RE = re.compile(r"[.!?]|[^\s.!?]+")
_RUN_RE = re.compile(r"[.!?]+|[^.!?]+")


def pronoun_set_hash() -> str:
    """Short digest of the pronoun inventory, stored with saved models."""
    blob = "\n".join(sorted(PRONOUNS)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class NormalizedText:
    text: str
    tokens: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.tokens and self.text:
            object.__setattr__(self, "tokens", tuple(split_words(self.text)))

    def __str__(self):
        return self.text


def _clean_run(run: str) -> str:
    if run == PRONOUN_MASK:
        return run
    # a few letters (e.g. titlecase digraphs) stay uppercase after lower()
    cleaned = "".join(ch for ch in run.lower() if ch.isalnum() and not ch.isupper())
    if cleaned in PRONOUNS:
        return PRONOUN_MASK
    return cleaned


def _clean_token(token: str) -> str:
    pieces = []
    for run in _RUN_RE.findall(token):
        if run[0] in STOP_CHARS:
            pieces.append(run)
        else:
            pieces.append(_clean_run(run))
    return "".join(pieces)


def normalize_text(raw) -> NormalizedText:
    """Normalize one raw sentence.

    Whitespace-separated tokens are cleaned independently; inside a token,
    stop characters split it into runs so that ``"you?"`` becomes
    ``"-PRON-?"``. Symbols are deleted rather than replaced by spaces.
    Already-normalized text is a fixed point.

    >>> normalize_text("How do I delete my Gmail account?").text
    'how do -PRON- delete -PRON- gmail account?'
    """
    if isinstance(raw, NormalizedText):
        raw = raw.text
    # NFKC folds compatibility forms such as bold or fullwidth letters
    cleaned = (_clean_token(tok) for tok in unicodedata.normalize("NFKC", raw).split())
    text = " ".join(tok for tok in cleaned if tok)
    return NormalizedText(text, tuple(split_words(text)))


def iter_word_spans(text: str):
    """Yield ``(start, end)`` spans of words; stop characters are their own words."""
    for m in _TOKEN_RE.finditer(text):
        yield m.span()


def split_words(text) -> list[str]:
    """Split on whitespace and detach stop characters as separate tokens."""
    if isinstance(text, NormalizedText):
        return list(text.tokens)
    return _TOKEN_RE.findall(text)
