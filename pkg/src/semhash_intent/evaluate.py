"""Metrics, stratified cross-validation, grid search and the multi-run benchmark."""
from __future__ import annotations

import itertools
import logging
import time
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .augment import LeakageError
from .classifiers import CLASSIFIERS, PARAM_GRIDS
from .pipeline import SemhashIntentClassifier, seed_int

log = logging.getLogger(__name__)

VARIANCE_EXPECTED = 1e-3
VARIANCE_LIMIT = 1e-2


@dataclass
class ConfusionTally:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other):
        return ConfusionTally(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @classmethod
    def from_predictions(cls, predictions, gold):
        """Micro tallies of single-label predictions: each error is one fp and one fn."""
        predictions, gold = list(predictions), list(gold)
        if len(predictions) != len(gold):
            raise ValueError(f"{len(predictions)} predictions for {len(gold)} gold labels")
        tp = sum(p == g for p, g in zip(predictions, gold))
        return cls(tp, len(gold) - tp, len(gold) - tp)


@dataclass(frozen=True)
class F1Result:
    precision: float
    recall: float
    f1: float
    degenerate: bool = False


def micro_f1(tally: ConfusionTally) -> F1Result:
    """Precision, recall and F1 from pooled counts.

    F1 is computed as ``2tp / (2tp + fp + fn)``, the closed form of the
    harmonic mean, so that it equals accuracy exactly when ``fp == fn``.
    """
    tp, fp, fn = tally.tp, tally.fp, tally.fn
    if tp == 0:
        return F1Result(0.0, 0.0, 0.0, degenerate=True)
    return F1Result(tp / (tp + fp), tp / (tp + fn), 2 * tp / (2 * tp + fp + fn))


def accuracy(predictions, gold) -> float:
    predictions, gold = list(predictions), list(gold)
    if len(predictions) != len(gold):
        raise ValueError(f"{len(predictions)} predictions for {len(gold)} gold labels")
    if not gold:
        raise ValueError("accuracy of an empty prediction set")
    return sum(p == g for p, g in zip(predictions, gold)) / len(gold)


def stratified_kfold(labels, k=5, seed=0):
    """Split indices into ``k`` folds preserving class proportions.

    Each class is shuffled with the seeded generator and dealt round-robin;
    the starting fold rotates between classes so fold sizes stay balanced.
    Classes with fewer than ``k`` members trigger a warning.

    Returns
    -------
    list of (train_idx, val_idx) ndarray pairs
    """
    labels = list(labels)
    if k < 2:
        raise ValueError("k must be at least 2 to form train/validation pairs")
    if not labels:
        raise ValueError("cannot split an empty label sequence")
    if len(labels) < k:
        raise ValueError(f"cannot split {len(labels)} samples into {k} folds")
    rng = np.random.default_rng(seed)
    by_class: dict = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(i)
    folds: list[list[int]] = [[] for _ in range(k)]
    start = 0
    for lab, idx in by_class.items():
        if len(idx) < k:
            warnings.warn(f"class {lab!r} has {len(idx)} samples, fewer than k={k} folds",
                          stacklevel=2)
        for j, i in enumerate(rng.permutation(idx)):
            folds[(start + j) % k].append(int(i))
        start = (start + len(idx)) % k
    out = []
    for f in range(k):
        val = np.sort(np.asarray(folds[f], dtype=np.int64))
        train = np.sort(np.concatenate([np.asarray(folds[g], dtype=np.int64)
                                        for g in range(k) if g != f]))
        out.append((train, val))
    return out


def iter_grid(grid: dict):
    """Grid points in enumeration order (first key varies slowest)."""
    keys = list(grid)
    for values in itertools.product(*(grid[key] for key in keys)):
        yield dict(zip(keys, values))


def _check_training(samples):
    for s in samples:
        if not s.is_training:
            raise LeakageError(f"test sample reached grid search: {s.text!r}")


def grid_search(kind, grid, train, k=5, seed=0, **pipeline_params):
    """Best grid point by mean validation accuracy over stratified k folds.

    ``train`` is a sequence of training-split LabeledUtterance. Augmentation
    (inside the pipeline) only ever sees the k-1 training folds. Ties keep
    the earliest grid point.

    Returns
    -------
    best_params : dict
    scores : list of (params, mean accuracy)
    """
    train = list(train)
    _check_training(train)
    points = list(iter_grid(grid))
    if not points:
        raise ValueError("empty parameter grid")
    texts = [s.text for s in train]
    labels = [s.intent for s in train]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        folds = stratified_kfold(labels, k, seed)
    fold_seeds = np.random.SeedSequence(seed).spawn(len(folds))
    scores = []
    best, best_score = None, -np.inf
    for point in points:
        accs = []
        for (tr, va), fseq in zip(folds, fold_seeds):
            model = SemhashIntentClassifier(kind, point, random_state=seed_int(fseq),
                                            **pipeline_params)
            model.fit([texts[i] for i in tr], [labels[i] for i in tr])
            accs.append(accuracy(model.predict([texts[i] for i in va]),
                                 [labels[i] for i in va]))
        score = float(np.mean(accs))
        scores.append((point, score))
        if score > best_score:
            best, best_score = point, score
    return best, scores


@dataclass
class CellResult:
    """One (dataset, classifier) cell over all runs."""

    dataset: str
    classifier: str
    accuracies: list = field(default_factory=list)
    micro_f1: list = field(default_factory=list)
    correct: list = field(default_factory=list)
    n_test: int = 0
    params: list = field(default_factory=list)
    vocabulary_size: list = field(default_factory=list)
    train_time: list = field(default_factory=list)
    test_time: list = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def variance(self) -> float:
        return float(np.var(self.accuracies))

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "classifier": self.classifier,
            "mean_accuracy": self.mean,
            "variance": self.variance,
            "accuracies": self.accuracies,
            "micro_f1": self.micro_f1,
            "correct": self.correct,
            "n_test": self.n_test,
            "params": self.params,
            "vocabulary_size": self.vocabulary_size,
            "train_time": self.train_time,
            "test_time": self.test_time,
        }


def _pooled(cells) -> list[float]:
    """Per-run micro-F1 over the union of the given cells' test sets."""
    runs = len(cells[0].correct)
    out = []
    for r in range(runs):
        tally = ConfusionTally()
        for c in cells:
            wrong = c.n_test - c.correct[r]
            tally = tally + ConfusionTally(c.correct[r], wrong, wrong)
        out.append(micro_f1(tally).f1)
    return out


@dataclass
class EvalReport:
    datasets: list
    classifiers: list
    runs: int
    base_seed: int
    cells: dict = field(default_factory=dict)
    generated_at: float = 0.0

    def cell(self, dataset, classifier) -> CellResult:
        return self.cells[(dataset, classifier)]

    def best_per_dataset(self, exclude=("kmeans",)) -> dict:
        """Classifier with the highest mean accuracy per dataset (first on ties)."""
        out = {}
        for ds in self.datasets:
            ranked = [k for k in self.classifiers if k not in exclude] or list(self.classifiers)
            out[ds] = max(ranked, key=lambda k: self.cell(ds, k).mean)
        return out

    def best_overall(self, exclude=("kmeans",)) -> str:
        """Single classifier with the best unweighted mean over datasets."""
        ranked = [k for k in self.classifiers if k not in exclude] or list(self.classifiers)
        return max(ranked, key=lambda k: np.mean([self.cell(ds, k).mean for ds in self.datasets]))

    def summary(self) -> dict:
        """Pooled rows for the best single classifier and for the best classifier per dataset."""
        single = self.best_overall()
        per_ds = self.best_per_dataset()

        def row(choice):
            cells = [self.cell(ds, choice[ds]) for ds in self.datasets]
            pooled = _pooled(cells)
            return {
                "classifiers": {ds: choice[ds] for ds in self.datasets},
                "accuracy": {c.dataset: c.mean for c in cells},
                "overall_micro_f1": float(np.mean(pooled)),
                "overall_micro_f1_runs": pooled,
                "average": float(np.mean([c.mean for c in cells])),
            }

        return {
            "best_single": row({ds: single for ds in self.datasets}),
            "best_per_dataset": row(per_ds),
        }

    def variance_warnings(self) -> list[str]:
        return [
            f"{c.dataset}/{c.classifier}: accuracy variance {c.variance:.2e} >= {VARIANCE_EXPECTED:g}"
            for c in self.cells.values() if c.variance >= VARIANCE_EXPECTED
        ]

    def to_dict(self) -> dict:
        return {
            "generated_at": self.generated_at,
            "runs": self.runs,
            "base_seed": self.base_seed,
            "datasets": self.datasets,
            "classifiers": self.classifiers,
            "cells": [self.cells[(ds, k)].to_dict()
                      for ds in self.datasets for k in self.classifiers],
            "summary": self.summary(),
            "warnings": self.variance_warnings(),
        }

    def to_text(self) -> str:
        lines = []
        for ds in self.datasets:
            lines.append(f"== {ds} ==")
            lines.append(f"{'classifier':<20} {'mean acc':>9} {'variance':>10} "
                         f"{'train s':>9} {'test ms':>9}")
            for k in self.classifiers:
                c = self.cell(ds, k)
                lines.append(f"{k:<20} {c.mean:>9.4f} {c.variance:>10.2e} "
                             f"{np.mean(c.train_time):>9.3f} {1e3 * np.mean(c.test_time):>9.1f}")
            lines.append("")
        summ = self.summary()
        head = " ".join(f"{ds:>10}" for ds in self.datasets)
        lines.append(f"{'row':<18} {head} {'overall':>9} {'avg':>7}")
        for name, key in (("best single", "best_single"), ("best per dataset", "best_per_dataset")):
            r = summ[key]
            accs = " ".join(f"{r['accuracy'][ds]:>10.4f}" for ds in self.datasets)
            lines.append(f"{name:<18} {accs} {r['overall_micro_f1']:>9.4f} {r['average']:>7.4f}")
        for ds, k in summ["best_per_dataset"]["classifiers"].items():
            lines.append(f"best on {ds}: {k}")
        lines.append(f"best single classifier: {summ['best_single']['classifiers'][self.datasets[0]]}")
        for w in self.variance_warnings():
            lines.append(f"warning: {w}")
        return "\n".join(lines) + "\n"


def cell_seed(base_seed, run, dataset, classifier) -> int:
    """Seed of one (run, dataset, classifier) cell, independent of execution order."""
    salt = [zlib.crc32(dataset.encode("utf-8")), zlib.crc32(classifier.encode("utf-8"))]
    return seed_int(np.random.SeedSequence([base_seed + run, *salt]))


def run_cell(dataset, kind, run, base_seed=0, grids=None, cv_folds=5, **pipeline_params):
    """Train on the training split of ``dataset`` and score on its test split."""
    grids = PARAM_GRIDS if grids is None else grids
    seed = cell_seed(base_seed, run, dataset.name, kind)
    train, test = dataset.train, dataset.test
    try:
        params = {}
        t0 = time.perf_counter()
        if kind in grids:
            params, _ = grid_search(kind, grids[kind], train, k=cv_folds, seed=seed,
                                    **pipeline_params)
        model = SemhashIntentClassifier(kind, params, random_state=seed, **pipeline_params)
        model.fit([s.text for s in train], [s.intent for s in train])
        t1 = time.perf_counter()
        pred = model.predict([s.text for s in test])
        t2 = time.perf_counter()
    except Exception as exc:
        raise RuntimeError(f"{dataset.name}/{kind}/run {run}: {exc}") from exc
    gold = [s.intent for s in test]
    tally = ConfusionTally.from_predictions(pred, gold)
    return {
        "accuracy": accuracy(pred, gold),
        "micro_f1": micro_f1(tally).f1,
        "correct": tally.tp,
        "params": params,
        "vocabulary_size": model.vectorizer_.feature_space_.size,
        "train_time": t1 - t0,
        "test_time": t2 - t1,
    }


def benchmark(datasets, classifiers=None, runs=10, base_seed=0, n_jobs=1, grids=None,
              cv_folds=5, **pipeline_params) -> EvalReport:
    """Repeat train/test over seeded runs for every (dataset, classifier) cell.

    Run ``r`` uses seed ``base_seed + r`` salted with the cell id, so results
    do not depend on ``n_jobs`` or on which cells are requested together.
    """
    classifiers = list(classifiers or CLASSIFIERS)
    for kind in classifiers:
        if kind not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {kind!r}; choose from {', '.join(CLASSIFIERS)}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    for ds in datasets:
        if not ds.train or not ds.test:
            raise ValueError(f"dataset {ds.name!r} needs both training and test samples")
        ds.check()
    jobs = [(ds, kind, r) for ds in datasets for kind in classifiers for r in range(runs)]
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_cell)(ds, kind, r, base_seed, grids, cv_folds, **pipeline_params)
        for ds, kind, r in jobs)
    report = EvalReport([ds.name for ds in datasets], classifiers, runs, base_seed,
                        generated_at=time.time())
    for (ds, kind, _r), res in zip(jobs, results):
        cell = report.cells.setdefault((ds.name, kind), CellResult(ds.name, kind, n_test=len(ds.test)))
        for key in ("accuracies", "micro_f1", "correct", "params", "vocabulary_size",
                    "train_time", "test_time"):
            src = "accuracy" if key == "accuracies" else key
            getattr(cell, key).append(res[src])
    for w in report.variance_warnings():
        log.warning(w)
    return report


# Acceptance thresholds checked by ``bench --check``.
THRESHOLDS = {
    "chatbot_best": 0.95,
    "chatbot_any": 0.98,
    "askubuntu_best": 0.88,
    "webapp_best": 0.74,
    "overall_micro_f1": 0.88,
    "variance": VARIANCE_LIMIT,
}


def check_report(report: EvalReport) -> list[tuple[str, bool, str]]:
    """Evaluate the reproduction thresholds that apply to the datasets in ``report``."""
    results = []
    best = report.best_per_dataset()
    if "chatbot" in report.datasets:
        m = report.cell("chatbot", best["chatbot"]).mean
        results.append(("chatbot best mean accuracy >= 0.95", m >= THRESHOLDS["chatbot_best"],
                        f"{best['chatbot']}: {m:.4f}"))
        results.append(("chatbot some classifier >= 0.98", m >= THRESHOLDS["chatbot_any"],
                        f"{best['chatbot']}: {m:.4f}"))
    for ds, key in (("askubuntu", "askubuntu_best"), ("webapp", "webapp_best")):
        if ds in report.datasets:
            m = report.cell(ds, best[ds]).mean
            results.append((f"{ds} best mean accuracy >= {THRESHOLDS[key]}",
                            m >= THRESHOLDS[key], f"{best[ds]}: {m:.4f}"))
    if {"chatbot", "askubuntu", "webapp"} <= set(report.datasets):
        f1 = report.summary()["best_single"]["overall_micro_f1"]
        results.append(("pooled micro-F1 >= 0.88", f1 >= THRESHOLDS["overall_micro_f1"],
                        f"{report.best_overall()}: {f1:.4f}"))
    worst = max(report.cells.values(), key=lambda c: c.variance)
    results.append((f"accuracy variance < {VARIANCE_LIMIT:g}", worst.variance < VARIANCE_LIMIT,
                    f"max {worst.variance:.2e} at {worst.dataset}/{worst.classifier}"))
    return results
