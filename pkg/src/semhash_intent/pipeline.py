"""End-to-end text classifier: augmentation, semhash tf-idf, classifier."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .augment import AugmentationPlan, balance_classes, default_thesaurus
from .classifiers import make_classifier
from .corpus import LabeledUtterance
from .vectorize import SemhashVectorizer


def seed_int(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1)[0])


class SemhashIntentClassifier(ClassifierMixin, BaseEstimator):
    """Intent classifier over raw sentences.

    ``fit`` oversamples minority classes with synonym-augmented copies (when
    ``augment``), fits the tf-idf space on the augmented training texts and
    trains ``classifier`` on the result. Prediction never augments.

    Parameters
    ----------
    classifier : str
        A key of :data:`semhash_intent.classifiers.CLASSIFIERS`.
    classifier_params : dict, optional
    augment : bool, default=True
    thesaurus : Thesaurus, optional
        Defaults to the built-in lexicon.
    max_replacements : int, default=2
    target_count : int, optional
        Samples per class after balancing; the largest class size if None.
    random_state : int, default=0
    """

    def __init__(self, classifier="ridge", classifier_params=None, augment=True,
                 thesaurus=None, max_replacements=2, target_count=None, random_state=0):
        self.classifier = classifier
        self.classifier_params = classifier_params
        self.augment = augment
        self.thesaurus = thesaurus
        self.max_replacements = max_replacements
        self.target_count = target_count
        self.random_state = random_state

    def fit(self, X, y):
        texts = list(X)
        labels = [str(label) for label in y]
        if len(texts) != len(labels):
            raise ValueError(f"{len(texts)} texts but {len(labels)} labels")
        if not texts:
            raise ValueError("cannot fit on an empty training set")
        aug_seq, clf_seq = np.random.SeedSequence(self.random_state).spawn(2)
        if self.augment:
            samples = [LabeledUtterance(t, lab, True) for t, lab in zip(texts, labels)]
            plan = AugmentationPlan(target_count=self.target_count,
                                    max_replacements_per_sentence=self.max_replacements)
            th = self.thesaurus if self.thesaurus is not None else default_thesaurus()
            samples = balance_classes(samples, th, plan, rng=np.random.default_rng(aug_seq))
            texts = [s.text for s in samples]
            labels = [s.intent for s in samples]
        self.n_train_samples_ = len(texts)
        self.vectorizer_ = SemhashVectorizer().fit(texts)
        params = dict(self.classifier_params or {})
        model = make_classifier(self.classifier, **params)
        if "random_state" in model.get_params() and "random_state" not in params:
            model.set_params(random_state=seed_int(clf_seq))
        self.model_ = model.fit(self.vectorizer_.transform(texts), labels)
        self.classes_ = self.model_.classes_
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        return self.vectorizer_.transform(list(X))

    def decision_function(self, X):
        return self.model_.decision_function(self.transform(X))

    def predict(self, X):
        return self.model_.predict(self.transform(X))
