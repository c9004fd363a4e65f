"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines.

Criteria 3-7 need the three benchmark corpora (ChatbotCorpus.json,
AskUbuntuCorpus.json, WebApplicationsCorpus.json) in ``$SEMHASH_CORPUS_DIR``
or ``<repo>/data``. Without them those criteria fail with an explanation.
"""
import json
import math
import shutil
import warnings
from collections import Counter

import numpy as np
import pytest
import scipy.sparse as sp

import oracles
from conftest import DATA, REAL_CORPUS_DIR, real_corpus
from semhash_intent import augment, evaluate, pipeline, vectorize
from semhash_intent.classifiers import (
    BernoulliNB,
    KNeighborsClassifier,
    MultinomialNB,
    NearestCentroid,
)
from semhash_intent.cli import main
from semhash_intent.corpus import Dataset, LabeledUtterance, load_dataset
from semhash_intent.evaluate import stratified_kfold
from semhash_intent.semhash import subtokenize_word
from semhash_intent.vectorize import fit, transform_many
from test_classifiers import random_instance

REAL = ("chatbot", "askubuntu", "webapp")
RUNS = 10


@pytest.fixture(scope="module")
def real_report():
    paths = {name: real_corpus(name) for name in REAL}
    missing = [n for n, p in paths.items() if p is None]
    if missing:
        return None, (f"benchmark corpora not found in {REAL_CORPUS_DIR}: {', '.join(missing)}; "
                      "set SEMHASH_CORPUS_DIR to the directory holding them")
    datasets = [load_dataset(paths[n], n) for n in REAL]
    return evaluate.benchmark(datasets, runs=RUNS, base_seed=0, n_jobs=-1), None


def _require(real_report):
    report, reason = real_report
    if report is None:
        pytest.fail(reason, pytrace=False)
    return report


def _best(report, ds):
    name = report.best_per_dataset()[ds]
    return name, report.cell(ds, name).mean


def test_criterion_01_featurizer_golden():
    assert subtokenize_word("have") == ["#ha", "hav", "ave", "ve#"]


HAND_CORPUS = [
    ["#ha", "hav", "ave", "ve#", "#a#"],
    ["#ha", "hav", "hav", "#a#", "#a#", "#a#"],
    ["#di", "dis", "isk", "sk#"],
    ["#di", "dis", "ave", "#fl", "fly"],
    ["ve#", "ve#", "sk#", "fly", "fly", "fly", "#a#"],
]


def test_criterion_02_vectorizer_oracle():
    fs = fit(HAND_CORPUS)
    X = transform_many(fs, HAND_CORPUS).toarray()
    vocab, rows = oracles.tfidf_dense(HAND_CORPUS)
    assert list(fs.tokens) == vocab
    assert np.max(np.abs(X - np.array(rows))) <= 1e-12
    for row in X:
        assert abs(math.sqrt(float(row @ row)) - 1.0) <= 1e-9


def test_criterion_03_chatbot_reproduction(real_report):
    report = _require(real_report)
    name, mean = _best(report, "chatbot")
    assert mean >= 0.95, f"{name}: {mean:.4f}"
    assert max(report.cell("chatbot", k).mean for k in report.classifiers) >= 0.98


def test_criterion_04_askubuntu_reproduction(real_report):
    name, mean = _best(_require(real_report), "askubuntu")
    assert mean >= 0.88, f"{name}: {mean:.4f}"


def test_criterion_05_webapp_reproduction(real_report):
    name, mean = _best(_require(real_report), "webapp")
    assert mean >= 0.74, f"{name}: {mean:.4f}"


def test_criterion_06_pooled_micro_f1(real_report):
    report = _require(real_report)
    f1 = report.summary()["best_single"]["overall_micro_f1"]
    assert f1 >= 0.88, f"{report.best_overall()}: {f1:.4f}"


def test_criterion_07_variance(real_report):
    report = _require(real_report)
    for cell in report.cells.values():
        assert cell.variance < 1e-2, f"{cell.dataset}/{cell.classifier}: {cell.variance:.2e}"
    for w in report.variance_warnings():
        warnings.warn(w)


def test_criterion_08_micro_f1_equals_accuracy(real_report):
    toy = load_dataset(DATA / "toy_corpus.json", "toy")
    reports = [evaluate.benchmark([toy], runs=2, base_seed=3)]
    if real_report[0] is not None:
        reports.append(real_report[0])
    for report in reports:
        for cell in report.cells.values():
            assert cell.micro_f1 == cell.accuracies, (cell.dataset, cell.classifier)


TIMING_KEYS = ("generated_at", "train_time", "test_time")


def _strip_timing(blob):
    if isinstance(blob, dict):
        return {k: _strip_timing(v) for k, v in blob.items() if k not in TIMING_KEYS}
    if isinstance(blob, list):
        return [_strip_timing(v) for v in blob]
    return blob


def test_criterion_09_bench_determinism(tmp_path, capsys):
    if all(real_corpus(n) for n in REAL):
        corpus_dir, names = REAL_CORPUS_DIR, ",".join(REAL)
    else:
        corpus_dir, names = tmp_path, "toy"
        shutil.copy(DATA / "toy_corpus.json", tmp_path / "toy.json")
    blobs = []
    for i, jobs in enumerate(("1", "2")):
        out = tmp_path / f"run{i}.txt"
        assert main(["bench", "--corpus-dir", str(corpus_dir), "--datasets", names,
                     "--runs", "2", "--seed", "7", "--jobs", jobs, "--report", str(out)]) == 0
        raw = (tmp_path / f"run{i}.json").read_bytes()
        blobs.append(json.dumps(_strip_timing(json.loads(raw)), indent=2, sort_keys=True))
    capsys.readouterr()
    assert blobs[0].encode() == blobs[1].encode()


def _csr(a):
    return sp.csr_matrix(np.asarray(a, dtype=float))


@pytest.mark.parametrize("seed", range(20))
def test_criterion_10_oracle_equivalence(seed):
    X, y, Q = random_instance(seed)
    for k in (1, 3, 5):
        got = KNeighborsClassifier(k).fit(_csr(X), y).predict(_csr(Q)).tolist()
        assert got == [oracles.knn_predict(X.tolist(), y.tolist(), q, min(k, len(X)))
                       for q in Q.tolist()]
    if seed % 2:
        counts = np.bincount(y)
        if not all(c & (c - 1) == 0 for c in counts):
            X, Q = X * np.lcm.reduce(counts), Q * np.lcm.reduce(counts)
    got = NearestCentroid().fit(_csr(X), y).predict(_csr(Q)).tolist()
    assert got == [oracles.centroid_predict(X.tolist(), y.tolist(), q) for q in Q.tolist()]
    # NB needs non-negative features
    rng = np.random.default_rng(1000 + seed)
    Xp = np.abs(X) * (rng.random(X.shape) < 0.7)
    Qp = np.abs(Q) * (rng.random(Q.shape) < 0.7)
    for cls, ref in ((MultinomialNB, oracles.multinomial_nb_posterior),
                     (BernoulliNB, oracles.bernoulli_nb_posterior)):
        post = np.exp(cls().fit(_csr(Xp), y).predict_log_proba(_csr(Qp)))
        for row, q in zip(post, Qp.tolist()):
            assert np.max(np.abs(row - ref(Xp.tolist(), y.tolist(), q))) <= 1e-10


def test_criterion_11_stratification():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n_classes = int(rng.integers(1, 8))
        labels = [f"c{c}" for c in range(n_classes) for _ in range(int(rng.integers(1, 30)))]
        rng.shuffle(labels)
        k = int(rng.integers(2, 6))
        if len(labels) < k:
            labels += labels[:1] * (k - len(labels))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            folds = stratified_kfold(labels, k=k, seed=seed)
        per_class = {c: [0] * k for c in set(labels)}
        for f, (_, val) in enumerate(folds):
            for i in val:
                per_class[labels[i]][f] += 1
        for c, counts in per_class.items():
            assert max(counts) - min(counts) <= 1, (seed, c, counts)


MARKER = "qqleakmarker"


def test_criterion_12_leakage_guard(monkeypatch):
    toy = load_dataset(DATA / "toy_corpus.json", "toy")
    tagged = Dataset("toy", tuple(
        s if s.is_training else LabeledUtterance(f"{s.text} {MARKER}", s.intent, False)
        for s in toy.samples))
    seen = Counter()

    def record(where, texts):
        for t in texts:
            seen[where] += 1
            assert MARKER not in t, f"test sample reached {where}"

    real_balance = pipeline.balance_classes
    real_vec_fit = vectorize.SemhashVectorizer.fit
    real_grid = evaluate.grid_search

    def balance(samples, *a, **kw):
        record("augment", [s.text for s in samples])
        return real_balance(samples, *a, **kw)

    def vec_fit(self, X, y=None):
        record("fit", X)
        return real_vec_fit(self, X, y)

    def grid(kind, grid_, train, *a, **kw):
        record("grid_search", [s.text for s in train])
        return real_grid(kind, grid_, train, *a, **kw)

    monkeypatch.setattr(pipeline, "balance_classes", balance)
    monkeypatch.setattr(vectorize.SemhashVectorizer, "fit", vec_fit)
    monkeypatch.setattr(evaluate, "grid_search", grid)
    evaluate.benchmark([tagged], ["ridge", "knn", "sgd"], runs=1, n_jobs=1)
    assert seen["augment"] and seen["fit"] and seen["grid_search"]
    # control: the instrumentation does catch a leaking call
    with pytest.raises(AssertionError, match="reached"):
        pipeline.SemhashIntentClassifier(augment=False).fit(
            [s.text for s in tagged.samples], [s.intent for s in tagged.samples])
    # the guards themselves reject test samples
    test_only = list(tagged.test)
    with pytest.raises(augment.LeakageError):
        augment.balance_classes(test_only, augment.default_thesaurus())
    with pytest.raises(augment.LeakageError):
        real_grid("knn", {"n_neighbors": [3]}, test_only)
