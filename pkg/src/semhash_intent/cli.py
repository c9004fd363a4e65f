"""Command line: ``semhash-intent {bench,train,predict,featurize}``.

Exit codes: 0 success, 1 usage or input error, 2 ``bench --check`` failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import evaluate
from .augment import THESAURUS_ENV, ThesaurusError, load_thesaurus
from .classifiers import CLASSIFIERS, PARAM_GRIDS
from .corpus import CorpusFormatError, find_corpus, load_dataset
from .persist import ModelFormatError, load_model, save_model
from .pipeline import SemhashIntentClassifier
from .preprocess import normalize_text, split_words
from .semhash import subtokenize_word

DEFAULT_DATASETS = "chatbot,askubuntu,webapp"


class UsageError(Exception):
    pass


def _csv(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _classifier_list(value):
    names = _csv(value) if value else list(CLASSIFIERS)
    bad = [n for n in names if n not in CLASSIFIERS]
    if bad:
        raise UsageError(f"unknown classifier(s) {', '.join(bad)}; valid names: "
                         f"{', '.join(CLASSIFIERS)}")
    return names


def _thesaurus(args):
    try:
        return load_thesaurus(args.thesaurus)
    except OSError as exc:
        raise UsageError(f"cannot read thesaurus: {exc}") from None
    except ThesaurusError as exc:
        raise UsageError(str(exc)) from None


def _load(path, name):
    try:
        return load_dataset(path, name)
    except OSError as exc:
        raise UsageError(f"cannot read corpus {path}: {exc.strerror or exc}") from None
    except CorpusFormatError as exc:
        raise UsageError(str(exc)) from None


def cmd_bench(args):
    classifiers = _classifier_list(args.classifiers)
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    datasets = []
    for short in _csv(args.datasets):
        try:
            path = find_corpus(args.corpus_dir, short)
        except FileNotFoundError as exc:
            raise UsageError(str(exc)) from None
        datasets.append(_load(path, short))
    report = evaluate.benchmark(
        datasets, classifiers, runs=args.runs, base_seed=args.seed, n_jobs=args.jobs,
        augment=not args.no_augment, thesaurus=_thesaurus(args))
    text = report.to_text()
    payload = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(os.path.splitext(args.report)[0] + ".json", "w", encoding="utf-8") as fh:
            fh.write(payload)
    sys.stdout.write(payload if args.json else text)
    if args.check:
        failed = False
        for name, ok, detail in evaluate.check_report(report):
            print(f"[{'PASS' if ok else 'FAIL'}] {name} ({detail})", file=sys.stderr)
            failed |= not ok
        if failed:
            return 2
    return 0


def cmd_train(args):
    if args.classifier not in CLASSIFIERS:
        raise UsageError(f"unknown classifier {args.classifier!r}; valid names: "
                         f"{', '.join(CLASSIFIERS)}")
    ds = _load(args.corpus, None)
    train = ds.train
    if not train:
        raise UsageError(f"{args.corpus} has no training samples")
    thesaurus = _thesaurus(args)
    pipeline_params = {"augment": not args.no_augment, "thesaurus": thesaurus}
    params = {}
    if args.classifier in PARAM_GRIDS:
        params, _ = evaluate.grid_search(args.classifier, PARAM_GRIDS[args.classifier], train,
                                         seed=args.seed, **pipeline_params)
    model = SemhashIntentClassifier(args.classifier, params, random_state=args.seed,
                                    **pipeline_params)
    model.fit([s.text for s in train], [s.intent for s in train])
    provenance = {
        "corpus": ds.name,
        "seed": args.seed,
        "augment": not args.no_augment,
        "thesaurus": args.thesaurus or os.environ.get(THESAURUS_ENV) or "builtin",
        "n_train_samples": model.n_train_samples_,
    }
    save_model(model, args.out, provenance)
    if ds.test:
        acc = evaluate.accuracy(model.predict([s.text for s in ds.test]),
                                [s.intent for s in ds.test])
        print(f"test accuracy: {acc:.4f} ({len(ds.test)} samples)", file=sys.stderr)
    print(f"model written to {args.out}", file=sys.stderr)
    return 0


def cmd_predict(args):
    try:
        model = load_model(args.model)
    except OSError as exc:
        raise UsageError(f"cannot read model {args.model}: {exc.strerror or exc}") from None
    except (ModelFormatError, KeyError) as exc:
        raise UsageError(f"{args.model}: {exc}") from None
    if args.input and args.input != "-":
        with open(args.input, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    if not lines:
        return 0
    labels = model.predict(lines)
    scores = model.decision_function(lines) if args.scores else None
    out = sys.stdout
    for i, label in enumerate(labels):
        if scores is None:
            out.write(f"{label}\n")
        else:
            row = {str(c): float(s) for c, s in zip(model.classes_, scores[i])}
            out.write(f"{label}\t{json.dumps(row)}\n")
    return 0


def cmd_featurize(args):
    nt = normalize_text(args.text)
    words = [{"word": w, "subtokens": subtokenize_word(w.lower())} for w in split_words(nt)]
    if args.json:
        print(json.dumps({"input": args.text, "normalized": nt.text, "words": words},
                         ensure_ascii=False))
    else:
        print(f"normalized: {nt.text}")
        for w in words:
            print(f"{w['word']}: {' '.join(w['subtokens'])}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="semhash-intent",
                                description="Subword semantic hashing intent classifier")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp_):
        sp_.add_argument("--seed", type=int, default=0)
        sp_.add_argument("--thesaurus", help=f"TSV lexicon (default: ${THESAURUS_ENV} or built-in)")
        sp_.add_argument("--no-augment", action="store_true",
                         help="disable synonym oversampling of minority classes")

    b = sub.add_parser("bench", help="multi-run benchmark over corpora")
    b.add_argument("--corpus-dir", default=os.environ.get("SEMHASH_CORPUS_DIR", "data"))
    b.add_argument("--datasets", default=DEFAULT_DATASETS)
    b.add_argument("--classifiers", default=None, help="comma separated (default: all)")
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--report", help="write the text report here and JSON next to it")
    b.add_argument("--json", action="store_true", help="print JSON instead of the table")
    b.add_argument("--check", action="store_true", help="exit 2 if a reproduction threshold fails")
    common(b)
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("train", help="train a model on a corpus training split")
    t.add_argument("--corpus", required=True)
    t.add_argument("--classifier", default="ridge")
    t.add_argument("--out", default="model.shm")
    common(t)
    t.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="label each input line")
    pr.add_argument("--model", required=True)
    pr.add_argument("input", nargs="?", help="text file, one sentence per line (default: stdin)")
    pr.add_argument("--scores", action="store_true", help="append per-class decision values")
    pr.set_defaults(func=cmd_predict)

    f = sub.add_parser("featurize", help="show normalization and semhash sub-tokens")
    f.add_argument("text")
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=cmd_featurize)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
