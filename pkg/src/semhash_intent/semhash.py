"""Subword semantic hashing: '#'-padded character trigrams of each word."""
from __future__ import annotations

from typing import Iterable

from .preprocess import NormalizedText, split_words

PAD = "#"
N = 3


def subtokenize_word(word: str) -> list[str]:
    """Return the trigrams of ``"#" + word + "#"`` from left to right.

    A word of length L yields exactly L sub-tokens.

    >>> subtokenize_word("have")
    ['#ha', 'hav', 'ave', 've#']
    """
    if not word:
        raise ValueError("cannot sub-tokenize an empty word")
    if PAD in word or any(ch.isspace() for ch in word):
        raise ValueError(f"word must not contain {PAD!r} or whitespace: {word!r}")
    padded = PAD + word + PAD
    return [padded[j:j + N] for j in range(len(padded) - N + 1)]


def featurize_text(nt) -> list[str]:
    """Sub-tokens of every word of a normalized text, in document order.

    Words are lowercased first so the ``-PRON-`` mask hashes like any other
    word.
    """
    out: list[str] = []
    for word in split_words(nt):
        out.extend(subtokenize_word(word.lower()))
    return out


def build_subtoken_set(texts: Iterable[NormalizedText | str]):
    """Featurize a corpus.

    Returns
    -------
    subtokens : list of str
        Unique sub-tokens in first-appearance order.
    examples : list of list of str
        Per-text sub-token sequences with multiplicity.
    """
    seen: dict[str, None] = {}
    examples = []
    for text in texts:
        example = featurize_text(text)
        for tok in example:
            seen.setdefault(tok, None)
        examples.append(example)
    return list(seen), examples
