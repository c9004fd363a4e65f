"""Intent classification with subword semantic hashing (semhash) features."""
from .augment import AugmentationPlan, Thesaurus, balance_classes, load_thesaurus, synonym_augment
from .classifiers import (
    CLASSIFIERS,
    BernoulliNB,
    KMeansClassifier,
    KNeighborsClassifier,
    LinearSVC,
    MultinomialNB,
    NearestCentroid,
    PassiveAggressiveClassifier,
    RidgeClassifier,
    SGDClassifier,
    make_classifier,
)
from .corpus import Dataset, LabeledUtterance, class_distribution, load_dataset
from .evaluate import accuracy, benchmark, grid_search, micro_f1, stratified_kfold
from .persist import load_model, save_model
from .pipeline import SemhashIntentClassifier
from .preprocess import NormalizedText, normalize_text, split_words
from .semhash import build_subtoken_set, featurize_text, subtokenize_word
from .vectorize import FeatureSpace, SemhashVectorizer

__version__ = "0.1.0"
