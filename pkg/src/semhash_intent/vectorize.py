"""tf-idf vector space model over semhash sub-tokens."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .preprocess import normalize_text
from .semhash import featurize_text


@dataclass(frozen=True)
class FeatureSpace:
    """Fitted vocabulary: token list in column order, document frequencies, n."""

    tokens: tuple[str, ...]
    doc_freq: np.ndarray
    n_docs: int
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})
        df = np.asarray(self.doc_freq, dtype=np.int64)
        object.__setattr__(self, "doc_freq", df)
        if len(df) != len(self.tokens):
            raise ValueError("doc_freq and tokens differ in length")
        if len(self.index) != len(self.tokens):
            raise ValueError("duplicate tokens in feature space")
        if len(df) and (df.min() < 1 or df.max() > self.n_docs):
            raise ValueError("document frequencies must lie in [1, n_docs]")

    @property
    def size(self) -> int:
        return len(self.tokens)

    def idf_vector(self) -> np.ndarray:
        return np.log((1.0 + self.n_docs) / (1.0 + self.doc_freq)) + 1.0

    def to_dict(self) -> dict:
        return {
            "tokens": list(self.tokens),
            "doc_freq": self.doc_freq.tolist(),
            "n_docs": self.n_docs,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSpace":
        return cls(tuple(d["tokens"]), np.asarray(d["doc_freq"], dtype=np.int64),
                   int(d["n_docs"]))


@dataclass(frozen=True)
class SparseVector:
    indices: np.ndarray
    weights: np.ndarray
    size: int

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.weights, self.weights)))

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.size)
        out[self.indices] = self.weights
        return out


def fit(featurized) -> FeatureSpace:
    """Fit a FeatureSpace on featurized documents (sequences of sub-tokens)."""
    featurized = list(featurized)
    if not featurized:
        raise ValueError("cannot fit a feature space on an empty collection")
    order: dict[str, int] = {}
    df: list[int] = []
    for doc in featurized:
        for tok in dict.fromkeys(doc):
            col = order.setdefault(tok, len(order))
            if col == len(df):
                df.append(1)
            else:
                df[col] += 1
    return FeatureSpace(tuple(order), np.asarray(df, dtype=np.int64), len(featurized))


def idf(fs: FeatureSpace, token: str) -> float:
    """Smoothed idf, ``ln((1 + n) / (1 + df)) + 1``; None for unknown tokens."""
    col = fs.index.get(token)
    if col is None:
        return None
    return math.log((1.0 + fs.n_docs) / (1.0 + int(fs.doc_freq[col]))) + 1.0


def _row(fs: FeatureSpace, doc, idf_vec: np.ndarray):
    counts = Counter(tok for tok in doc if tok in fs.index)
    if not counts:
        return np.empty(0, dtype=np.int64), np.empty(0)
    cols = np.array(sorted(fs.index[t] for t in counts), dtype=np.int64)
    tf = np.array([counts[fs.tokens[c]] for c in cols], dtype=np.float64)
    w = tf * idf_vec[cols]
    return cols, w / np.sqrt(np.dot(w, w))


def transform(fs: FeatureSpace, doc) -> SparseVector:
    """tf-idf weights of one featurized document, divided by their L2 norm.

    Unknown sub-tokens are skipped; a document with none left maps to the
    empty vector.
    """
    cols, w = _row(fs, doc, fs.idf_vector())
    return SparseVector(cols, w, fs.size)


def transform_many(fs: FeatureSpace, docs) -> sp.csr_matrix:
    idf_vec = fs.idf_vector()
    indptr = [0]
    indices = []
    data = []
    for doc in docs:
        cols, w = _row(fs, doc, idf_vec)
        indices.append(cols)
        data.append(w)
        indptr.append(indptr[-1] + len(cols))
    return sp.csr_matrix(
        (np.concatenate(data) if data else np.empty(0),
         np.concatenate(indices) if indices else np.empty(0, dtype=np.int64),
         np.asarray(indptr)),
        shape=(len(indptr) - 1, fs.size),
    )


class SemhashVectorizer(TransformerMixin, BaseEstimator):
    """Raw text to L2-normalized tf-idf rows over semhash trigrams.

    Parameters
    ----------
    normalize : bool, default=True
        Apply :func:`normalize_text` before featurizing. Disable when the
        input is already normalized.

    Attributes
    ----------
    feature_space_ : FeatureSpace
    vocabulary_ : dict
        Sub-token to column index.
    """

    def __init__(self, normalize=True):
        self.normalize = normalize

    def _featurize(self, raw_documents):
        if isinstance(raw_documents, str):
            raise ValueError("expected an iterable of texts, got a single string")
        prep = normalize_text if self.normalize else (lambda s: s)
        return [featurize_text(prep(doc)) for doc in raw_documents]

    def fit(self, raw_documents, y=None):
        self.feature_space_ = fit(self._featurize(raw_documents))
        self.vocabulary_ = self.feature_space_.index
        return self

    def transform(self, raw_documents):
        check_is_fitted(self, "feature_space_")
        return transform_many(self.feature_space_, self._featurize(raw_documents))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_space_")
        return np.asarray(self.feature_space_.tokens, dtype=object)
