"""Classifiers over tf-idf rows, written against the scikit-learn estimator API.

All multiclass linear models are one-vs-rest without an intercept. Class ids
are the positions in ``classes_`` (sorted labels) and every ``predict`` breaks
score ties towards the lowest class id.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import _kernels


class BaseSemhashClassifier(ClassifierMixin, BaseEstimator):
    """Shared validation, label encoding and argmax prediction."""

    _min_classes = 2
    # fitted attributes that make up the persisted model state
    _state_attrs: tuple[str, ...] = ()

    def _validate_fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csr", dtype=np.float64)
        X = sp.csr_matrix(X)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        if len(self.classes_) < self._min_classes:
            raise ValueError(
                f"{type(self).__name__} needs at least {self._min_classes} classes, "
                f"got {len(self.classes_)}")
        self.n_features_in_ = X.shape[1]
        return X, y_idx

    def _validate_X(self, X):
        check_is_fitted(self, "classes_")
        X = sp.csr_matrix(check_array(X, accept_sparse="csr", dtype=np.float64))
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, model was fitted with {self.n_features_in_}")
        return X

    def decision_function(self, X):
        raise NotImplementedError

    def predict_index(self, X):
        # np.argmax returns the first maximum, i.e. the lowest class id
        return np.argmax(self.decision_function(X), axis=1)

    def predict(self, X):
        return self.classes_[self.predict_index(X)]


def _sign_targets(y_idx, n_classes):
    Y = -np.ones((len(y_idx), n_classes))
    Y[np.arange(len(y_idx)), y_idx] = 1.0
    return Y


class _LinearMixin:
    _state_attrs = ("coef_",)

    def decision_function(self, X):
        X = self._validate_X(X)
        return np.asarray(X @ self.coef_.T)


class RidgeClassifier(_LinearMixin, BaseSemhashClassifier):
    """One-vs-rest ridge regression on +/-1 targets.

    Solves ``(X^T X + alpha I) w = X^T y`` for each class through the
    equivalent dual system ``w = X^T (X X^T + alpha I)^{-1} y``, which is a
    small dense solve when there are far fewer samples than features.
    """

    def __init__(self, alpha=1.0):
        self.alpha = alpha

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        Y = _sign_targets(y_idx, len(self.classes_))
        gram = (X @ X.T).toarray()
        gram[np.diag_indices_from(gram)] += self.alpha
        dual = scipy.linalg.solve(gram, Y, assume_a="pos")
        self.coef_ = np.asarray((X.T @ dual).T)
        return self


class PassiveAggressiveClassifier(_LinearMixin, BaseSemhashClassifier):
    """PA-I online learner, one-vs-rest, reshuffled every epoch.

    For each example and class: ``loss = max(0, 1 - y w.x)``,
    ``tau = min(C, loss / ||x||^2)`` and ``w += tau y x``.
    """

    def __init__(self, C=1.0, epochs=5, shuffle=True, random_state=0):
        self.C = C
        self.epochs = epochs
        self.shuffle = shuffle
        self.random_state = random_state

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        Y = _sign_targets(y_idx, len(self.classes_))
        W = np.zeros((len(self.classes_), X.shape[1]))
        rng = np.random.default_rng(self.random_state)
        sq_norms = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        order = np.arange(X.shape[0])
        self.n_updates_ = 0
        for _ in range(self.epochs):
            if self.shuffle:
                order = rng.permutation(X.shape[0])
            self.n_updates_ += _kernels.pa_pass(X.indptr, X.indices, X.data, Y, W, order,
                                                float(self.C), sq_norms)
        self.coef_ = W
        return self


class LinearSVC(_LinearMixin, BaseSemhashClassifier):
    """L2-regularized hinge-loss SVM (no bias) by dual coordinate descent.

    Minimizes ``0.5 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)`` per class.
    Iteration stops once the spread of projected gradients falls below
    ``tol`` for every class.
    """

    def __init__(self, C=1.0, tol=1e-6, max_iter=1000, random_state=0):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        n, d = X.shape
        k = len(self.classes_)
        Y = _sign_targets(y_idx, k)
        C = float(self.C)
        W = np.zeros((k, d))
        A = np.zeros((n, k))
        q = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        rng = np.random.default_rng(self.random_state)
        self.n_iter_ = 0
        for it in range(self.max_iter):
            spread = _kernels.dual_cd_pass(X.indptr, X.indices, X.data, Y, W, A, q, C,
                                           rng.permutation(n))
            self.n_iter_ = it + 1
            if np.all(spread < self.tol):
                break
        self.coef_ = W
        self.dual_coef_ = A.T
        return self


class SGDClassifier(_LinearMixin, BaseSemhashClassifier):
    """Hinge loss + L2 penalty, stochastic subgradient descent, one-vs-rest.

    Step size ``1 / (alpha (t + t0))`` with ``t0 = 1 / alpha`` so the first
    step is 1.
    """

    def __init__(self, alpha=1e-4, epochs=20, random_state=0):
        self.alpha = alpha
        self.epochs = epochs
        self.random_state = random_state

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        Y = _sign_targets(y_idx, len(self.classes_))
        alpha = float(self.alpha)
        t0 = 1.0 / alpha
        # w = scale * V keeps the L2 shrinkage O(1) per step
        V = np.zeros((len(self.classes_), X.shape[1]))
        scale = 1.0
        t = 0
        rng = np.random.default_rng(self.random_state)
        for _ in range(self.epochs):
            t, scale = _kernels.sgd_pass(X.indptr, X.indices, X.data, Y, V,
                                         rng.permutation(X.shape[0]), alpha, t0, t, scale)
        self.coef_ = V * scale
        self.t_ = t
        return self


class MultinomialNB(BaseSemhashClassifier):
    """Multinomial naive Bayes on fractional tf-idf mass with class-frequency priors."""

    _min_classes = 1
    _state_attrs = ("class_log_prior_", "feature_log_prob_")

    def __init__(self, smoothing=1.0):
        self.smoothing = smoothing

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        k = len(self.classes_)
        onehot = sp.csr_matrix((np.ones(len(y_idx)), (y_idx, np.arange(len(y_idx)))),
                               shape=(k, len(y_idx)))
        mass = np.asarray((onehot @ X).todense())
        counts = np.bincount(y_idx, minlength=k)
        self.class_log_prior_ = np.log(counts / counts.sum())
        num = mass + self.smoothing
        den = mass.sum(axis=1, keepdims=True) + self.smoothing * X.shape[1]
        self.feature_log_prob_ = np.log(num) - np.log(den)
        return self

    def decision_function(self, X):
        X = self._validate_X(X)
        return np.asarray(X @ self.feature_log_prob_.T) + self.class_log_prior_

    def predict_log_proba(self, X):
        jll = self.decision_function(X)
        return jll - _logsumexp(jll)


class BernoulliNB(BaseSemhashClassifier):
    """Bernoulli naive Bayes on features binarized at ``weight > binarize_threshold``."""

    _min_classes = 1
    _state_attrs = ("class_log_prior_", "feature_log_prob_", "feature_log_neg_prob_")

    def __init__(self, smoothing=1.0, binarize_threshold=0.0):
        self.smoothing = smoothing
        self.binarize_threshold = binarize_threshold

    def _binarize(self, X):
        B = (X > self.binarize_threshold).astype(np.float64)
        return sp.csr_matrix(B)

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        B = self._binarize(X)
        k = len(self.classes_)
        onehot = sp.csr_matrix((np.ones(len(y_idx)), (y_idx, np.arange(len(y_idx)))),
                               shape=(k, len(y_idx)))
        present = np.asarray((onehot @ B).todense())
        counts = np.bincount(y_idx, minlength=k).astype(np.float64)
        self.class_log_prior_ = np.log(counts / counts.sum())
        p = (present + self.smoothing) / (counts[:, None] + 2.0 * self.smoothing)
        self.feature_log_prob_ = np.log(p)
        self.feature_log_neg_prob_ = np.log1p(-p)
        return self

    def decision_function(self, X):
        B = self._binarize(self._validate_X(X))
        diff = self.feature_log_prob_ - self.feature_log_neg_prob_
        return (np.asarray(B @ diff.T) + self.feature_log_neg_prob_.sum(axis=1)
                + self.class_log_prior_)

    def predict_log_proba(self, X):
        jll = self.decision_function(X)
        return jll - _logsumexp(jll)


def _logsumexp(a):
    m = a.max(axis=1, keepdims=True)
    return m + np.log(np.exp(a - m).sum(axis=1, keepdims=True))


def _sq_distances(X, centers):
    """Squared Euclidean distances, rows of X (sparse) to dense centers."""
    Xd = X.toarray()
    return np.stack([((Xd - c) ** 2).sum(axis=1) for c in centers], axis=1)


class NearestCentroid(BaseSemhashClassifier):
    """Assign the class whose arithmetic-mean centroid is closest (Euclidean)."""

    _min_classes = 1
    _state_attrs = ("centroids_",)

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        k = len(self.classes_)
        sums = np.zeros((k, X.shape[1]))
        for c in range(k):
            sums[c] = np.asarray(X[y_idx == c].sum(axis=0)).ravel()
        self.centroids_ = sums / np.bincount(y_idx, minlength=k)[:, None]
        return self

    def decision_function(self, X):
        return -_sq_distances(self._validate_X(X), self.centroids_)


class KNeighborsClassifier(BaseSemhashClassifier):
    """Uniform-vote k nearest neighbours under Euclidean distance.

    Equidistant neighbours are ranked by training-row order; vote ties go
    to the lowest class id.
    """

    _state_attrs = ("fit_X_", "fit_y_")

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        if self.n_neighbors < 1:
            raise ValueError("n_neighbors must be >= 1")
        self.fit_X_ = X
        self.fit_y_ = y_idx
        return self

    def kneighbors(self, X):
        X = self._validate_X(X)
        A = self.fit_X_
        a_sq = np.asarray(A.multiply(A).sum(axis=1)).ravel()
        x_sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        d = x_sq[:, None] + a_sq[None, :] - 2.0 * np.asarray((X @ A.T).todense())
        np.maximum(d, 0.0, out=d)
        k = min(self.n_neighbors, A.shape[0])
        return np.argsort(d, axis=1, kind="stable")[:, :k]

    def decision_function(self, X):
        nbrs = self.kneighbors(X)
        votes = np.zeros((nbrs.shape[0], len(self.classes_)))
        for row, idx in enumerate(nbrs):
            votes[row] = np.bincount(self.fit_y_[idx], minlength=len(self.classes_))
        return votes / nbrs.shape[1]


class KMeansClassifier(BaseSemhashClassifier):
    """k-means (k-means++ seeding, Lloyd iterations) with majority-label clusters.

    ``n_clusters=None`` uses the number of classes.
    """

    _state_attrs = ("cluster_centers_", "cluster_labels_")

    def __init__(self, n_clusters=None, max_iter=100, random_state=0):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y):
        X, y_idx = self._validate_fit(X, y)
        Xd = X.toarray()
        n = Xd.shape[0]
        k = len(self.classes_) if self.n_clusters is None else self.n_clusters
        if not 1 <= k <= n:
            raise ValueError(f"n_clusters must lie in [1, {n}], got {k}")
        rng = np.random.default_rng(self.random_state)
        centers = self._init_centers(Xd, k, rng)
        assign = None
        self.n_iter_ = 0
        for it in range(self.max_iter):
            d = np.stack([((Xd - c) ** 2).sum(axis=1) for c in centers], axis=1)
            new_assign = np.argmin(d, axis=1)
            self.n_iter_ = it + 1
            if assign is not None and np.array_equal(new_assign, assign):
                break
            assign = new_assign
            for c in range(k):
                members = assign == c
                if members.any():
                    centers[c] = Xd[members].mean(axis=0)
        n_cls = len(self.classes_)
        majority = int(np.argmax(np.bincount(y_idx, minlength=n_cls)))
        labels = np.full(k, majority, dtype=np.int64)
        for c in range(k):
            members = y_idx[assign == c]
            if len(members):
                labels[c] = int(np.argmax(np.bincount(members, minlength=n_cls)))
        self.cluster_centers_ = centers
        self.cluster_labels_ = labels
        return self

    @staticmethod
    def _init_centers(Xd, k, rng):
        n = Xd.shape[0]
        centers = [Xd[int(rng.integers(n))]]
        closest = ((Xd - centers[0]) ** 2).sum(axis=1)
        for _ in range(1, k):
            total = closest.sum()
            if total <= 0.0:
                idx = int(rng.integers(n))
            else:
                idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
                idx = min(idx, n - 1)
            centers.append(Xd[idx])
            closest = np.minimum(closest, ((Xd - Xd[idx]) ** 2).sum(axis=1))
        return np.array(centers, dtype=np.float64)

    def decision_function(self, X):
        """Negative squared distance to the nearest cluster of each class."""
        d = _sq_distances(self._validate_X(X), self.cluster_centers_)
        scores = np.full((d.shape[0], len(self.classes_)), -np.inf)
        for c, label in enumerate(self.cluster_labels_):
            scores[:, label] = np.maximum(scores[:, label], -d[:, c])
        return scores


CLASSIFIERS = {
    "ridge": RidgeClassifier,
    "passive_aggressive": PassiveAggressiveClassifier,
    "linear_svc": LinearSVC,
    "sgd": SGDClassifier,
    "multinomial_nb": MultinomialNB,
    "bernoulli_nb": BernoulliNB,
    "nearest_centroid": NearestCentroid,
    "knn": KNeighborsClassifier,
    "kmeans": KMeansClassifier,
}

# Hyperparameter grids searched by 5-fold CV; every other kind keeps its defaults.
PARAM_GRIDS = {
    "knn": {"n_neighbors": [3, 5, 7]},
    "sgd": {"alpha": [1e-3, 1e-4, 1e-5], "epochs": [10, 20]},
}


def make_classifier(kind: str, **params):
    try:
        cls = CLASSIFIERS[kind]
    except KeyError:
        raise ValueError(
            f"unknown classifier {kind!r}; choose from {', '.join(CLASSIFIERS)}") from None
    return cls(**params)
