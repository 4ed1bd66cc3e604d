"""NER dataset tooling and sequence taggers for Kurdish Sorani.

Corpus handling (CoNLL I/O, IOB2 validation, deterministic splits), text
preprocessing, feature extraction, a linear-chain CRF and a linear SVM
tagger, evaluation metrics, and a CLI tying them together.
"""

from .corpus import (Corpus, CorpusFormatError, EntityDistribution, ENTITY_NAMES, ENTITY_TYPES,
                     DEFAULT_SCHEME, Label, Sentence, TagScheme, Token, Violation,
                     corpus_from_sequences, corpus_stats, load_corpus, parse_conll, repair_bio,
                     save_corpus, serialize_conll, shuffled_indices, split_holdout, split_kfold,
                     validate_bio)
from .crf import CrfTagger, Lattice, TrainConfig, build_lattice, forward_logZ, marginals, \
    nll_and_gradient, train_crf, viterbi_decode
from .evaluation import (CvReport, KappaReport, TagMetrics, TagReport, TTestResult, cohen_kappa,
                         cross_validate, extract_spans, f1, paired_ttest,
                         regularized_incomplete_beta, span_metrics, tag_metrics, to_ndjson)
from .features import (FeatureIndex, MaxAbsScaler, SparseVector, extract_sentence_features,
                       token_features, word_shape)
from .model_io import load_model, save_model
from .preprocess import PreprocessConfig, clean_text, convert_digits, text_to_corpus, \
    tokenize_sentences, tokenize_words
from .svm import LinearSvmTagger, predict_tags, train_svm
from .validation import DataError, NumericalError

__version__ = "0.1.0"

__all__ = [
    "Corpus", "CorpusFormatError", "CrfTagger", "CvReport", "DataError", "DEFAULT_SCHEME",
    "EntityDistribution", "ENTITY_NAMES", "ENTITY_TYPES", "FeatureIndex", "KappaReport",
    "Label", "Lattice", "LinearSvmTagger", "MaxAbsScaler", "NumericalError",
    "PreprocessConfig", "Sentence", "SparseVector", "TagMetrics", "TagReport", "TagScheme",
    "Token", "TrainConfig", "TTestResult", "Violation", "build_lattice", "clean_text",
    "cohen_kappa", "convert_digits", "corpus_from_sequences", "corpus_stats",
    "cross_validate", "extract_sentence_features", "extract_spans", "f1", "forward_logZ",
    "load_corpus", "load_model", "marginals", "nll_and_gradient", "paired_ttest",
    "parse_conll", "predict_tags", "regularized_incomplete_beta", "repair_bio",
    "save_corpus", "save_model", "serialize_conll", "shuffled_indices", "span_metrics",
    "split_holdout", "split_kfold", "tag_metrics", "text_to_corpus", "to_ndjson",
    "token_features", "tokenize_sentences", "tokenize_words", "train_crf", "train_svm",
    "validate_bio", "viterbi_decode", "word_shape",
]
