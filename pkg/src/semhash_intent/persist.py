"""Versioned JSON model files (``.shm``)."""
from __future__ import annotations

import json
import time

import numpy as np
import scipy.sparse as sp

from .classifiers import make_classifier
from .pipeline import SemhashIntentClassifier
from .preprocess import PRONOUN_MASK, STOP_CHARS, pronoun_set_hash
from .vectorize import FeatureSpace, SemhashVectorizer

FORMAT = "semhash-intent-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _encode(value):
    if sp.issparse(value):
        value = sp.csr_matrix(value)
        return {"sparse": "csr", "shape": list(value.shape), "data": value.data.tolist(),
                "indices": value.indices.tolist(), "indptr": value.indptr.tolist()}
    arr = np.asarray(value)
    return {"dtype": arr.dtype.str, "shape": list(arr.shape), "data": arr.ravel().tolist()}


def _decode(blob):
    if blob.get("sparse") == "csr":
        return sp.csr_matrix((np.asarray(blob["data"], dtype=np.float64),
                              np.asarray(blob["indices"], dtype=np.int32),
                              np.asarray(blob["indptr"], dtype=np.int32)),
                             shape=tuple(blob["shape"]))
    return np.asarray(blob["data"], dtype=np.dtype(blob["dtype"])).reshape(blob["shape"])


def model_to_dict(model: SemhashIntentClassifier, provenance=None) -> dict:
    clf = model.model_
    return {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "preprocessing": {
            "pronoun_set_hash": pronoun_set_hash(),
            "pronoun_mask": PRONOUN_MASK,
            "stop_chars": "".join(sorted(STOP_CHARS)),
        },
        "feature_space": model.vectorizer_.feature_space_.to_dict(),
        "classifier": {
            "kind": model.classifier,
            "params": clf.get_params(),
            "n_features_in": int(clf.n_features_in_),
            "state": {attr: _encode(getattr(clf, attr)) for attr in clf._state_attrs},
        },
        "class_names": [str(c) for c in clf.classes_],
        "provenance": dict(provenance or {}, created_at=time.time()),
    }


def model_from_dict(doc: dict) -> SemhashIntentClassifier:
    if doc.get("format") != FORMAT:
        raise ModelFormatError("not a semhash-intent model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"model format version {doc.get('format_version')!r} is not supported "
            f"(expected {FORMAT_VERSION})")
    prep = doc["preprocessing"]
    if prep.get("pronoun_set_hash") != pronoun_set_hash() or \
            prep.get("stop_chars") != "".join(sorted(STOP_CHARS)):
        raise ModelFormatError("model was trained with a different preprocessing configuration")
    spec = doc["classifier"]
    clf = make_classifier(spec["kind"], **spec["params"])
    clf.classes_ = np.asarray(doc["class_names"])
    clf.n_features_in_ = spec["n_features_in"]
    for attr, blob in spec["state"].items():
        setattr(clf, attr, _decode(blob))
    vec = SemhashVectorizer()
    vec.feature_space_ = FeatureSpace.from_dict(doc["feature_space"])
    vec.vocabulary_ = vec.feature_space_.index
    model = SemhashIntentClassifier(spec["kind"], spec["params"])
    model.vectorizer_ = vec
    model.model_ = clf
    model.classes_ = clf.classes_
    model.provenance_ = doc.get("provenance", {})
    return model


def save_model(model, path, provenance=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, provenance), fh)
        fh.write("\n")


def load_model(path) -> SemhashIntentClassifier:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: invalid JSON: {exc}") from None
    return model_from_dict(doc)
