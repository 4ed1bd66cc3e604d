import math

import numpy as np
import pytest

from conftest import brute_best_path, brute_logz, brute_marginals, enumerate_paths, random_lattice
from sorani_ner.corpus import DEFAULT_SCHEME, corpus_from_sequences, validate_bio
from sorani_ner.crf import (CrfTagger, Lattice, MASK_SCORE, TrainConfig, build_lattice,
                            forward_logZ, marginals, path_score, train_crf, viterbi,
                            viterbi_decode)
from sorani_ner.features import extract_sentence_features


def test_logz_zero_lattice_single_position():
    lattice = Lattice(np.zeros((1, 11)), np.zeros((11, 11)))
    assert forward_logZ(lattice) == pytest.approx(math.log(11), abs=1e-12)


def test_logz_zero_lattice_two_positions():
    lattice = Lattice(np.zeros((2, 11)), np.zeros((11, 11)))
    assert forward_logZ(lattice) == pytest.approx(math.log(121), abs=1e-12)


def test_logz_matches_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(50):
        lattice = random_lattice(rng, int(rng.integers(1, 6)), int(rng.integers(2, 5)))
        assert forward_logZ(lattice) == pytest.approx(brute_logz(lattice), abs=1e-8)


def test_all_path_probabilities_sum_to_one():
    rng = np.random.default_rng(8)
    lattice = random_lattice(rng, 4, 3)
    log_z = forward_logZ(lattice)
    probs = [math.exp(score - log_z) for _, score in enumerate_paths(lattice)]
    assert all(0.0 < p <= 1.0 for p in probs)
    assert sum(probs) == pytest.approx(1.0, abs=1e-8)


def test_marginals_uniform_on_zero_lattice():
    lattice = Lattice(np.zeros((3, 11)), np.zeros((11, 11)))
    node, edge = marginals(lattice)
    np.testing.assert_allclose(node, 1.0 / 11.0, atol=1e-12)
    np.testing.assert_allclose(edge, 1.0 / 121.0, atol=1e-12)


def test_marginals_match_enumeration():
    rng = np.random.default_rng(9)
    for _ in range(30):
        lattice = random_lattice(rng, int(rng.integers(1, 6)), int(rng.integers(2, 5)))
        node, edge = marginals(lattice)
        bnode, bedge = brute_marginals(lattice)
        np.testing.assert_allclose(node, bnode, atol=1e-8)
        np.testing.assert_allclose(edge, bedge, atol=1e-8)


def test_marginal_consistency_laws():
    rng = np.random.default_rng(10)
    for _ in range(30):
        lattice = random_lattice(rng, int(rng.integers(2, 8)), int(rng.integers(2, 12)))
        node, edge = marginals(lattice)
        np.testing.assert_allclose(node.sum(axis=1), 1.0, atol=1e-10)
        # Edge posteriors marginalize to the node posteriors on both ends.
        np.testing.assert_allclose(edge.sum(axis=2), node[:-1], atol=1e-10)
        np.testing.assert_allclose(edge.sum(axis=1), node[1:], atol=1e-10)


def test_viterbi_matches_enumeration_argmax():
    rng = np.random.default_rng(11)
    for _ in range(60):
        lattice = random_lattice(rng, int(rng.integers(1, 7)), int(rng.integers(2, 5)))
        path, score = viterbi(lattice)
        best, best_score = brute_best_path(lattice)
        assert tuple(path) == best
        assert score == pytest.approx(best_score, abs=1e-9)
        assert score == pytest.approx(path_score(lattice, path), abs=1e-9)


def test_viterbi_tie_break_lowest_index():
    lattice = Lattice(np.zeros((3, 4)), np.zeros((4, 4)))
    path, score = viterbi(lattice)
    assert path == [0, 0, 0]
    assert score == 0.0


def test_emission_shift_moves_logz_but_not_argmax():
    rng = np.random.default_rng(12)
    lattice = random_lattice(rng, 5, 4)
    shifted = Lattice(lattice.emissions.copy(), lattice.transitions)
    shifted.emissions[2] += 3.7
    assert forward_logZ(shifted) == pytest.approx(forward_logZ(lattice) + 3.7, abs=1e-9)
    assert viterbi(shifted)[0] == viterbi(lattice)[0]


def _fitted_toy_tagger() -> CrfTagger:
    corpus = corpus_from_sequences(
        [["kak1", "res1", "naw1", "."], ["sar2", "naw2", "."]],
        [["B-PER", "I-PER", "O", "O"], ["B-LOC", "O", "O"]])
    return train_crf(corpus, TrainConfig(l1=0.0, l2=0.1, max_iterations=40))


def test_build_lattice_matches_direct_dot_products():
    tagger = _fitted_toy_tagger()
    sent = ["kak1", "res1", "."]
    featuresets = extract_sentence_features(sent, tagger.window)
    lattice = build_lattice(tagger, featuresets)
    assert lattice.emissions.shape == (3, 11)
    for i, fs in enumerate(featuresets):
        vec = tagger.index_.vectorize(fs)
        expected = np.zeros(11)
        for col, val in zip(vec.indices, vec.values):
            expected += val * tagger.emission_weights_[col]
        np.testing.assert_allclose(lattice.emissions[i], expected, atol=1e-12)
    np.testing.assert_allclose(lattice.transitions, tagger.transition_weights_)


def test_zero_weight_model_yields_zero_lattice():
    tagger = _fitted_toy_tagger()
    tagger.emission_weights_ = np.zeros_like(tagger.emission_weights_)
    tagger.transition_weights_ = np.zeros_like(tagger.transition_weights_)
    lattice = build_lattice(tagger, extract_sentence_features(["naw9", "."], 2))
    assert not lattice.emissions.any()
    labels, score = viterbi_decode(tagger, extract_sentence_features(["naw9", "."], 2), True)
    assert [str(l) for l in labels] == ["O", "O"]
    assert score == 0.0


def test_single_feature_weight_lands_in_label_column():
    tagger = _fitted_toy_tagger()
    tagger.emission_weights_ = np.zeros_like(tagger.emission_weights_)
    tagger.transition_weights_ = np.zeros_like(tagger.transition_weights_)
    col = tagger.index_.lookup("word.lower=kak1")
    label = tagger.scheme_.index("B-PER")
    tagger.emission_weights_[col, label] = 2.5
    lattice = build_lattice(tagger, extract_sentence_features(["kak1"], 2))
    expected = np.zeros(11)
    expected[label] = 2.5
    np.testing.assert_allclose(lattice.emissions[0], expected)


def _random_scheme_tagger(rng: np.random.Generator) -> CrfTagger:
    tagger = _random_scheme_tagger.base
    clone = CrfTagger(**tagger.get_params())
    clone.scheme_ = tagger.scheme_
    clone.index_ = tagger.index_
    clone.emission_weights_ = rng.normal(scale=2.0, size=tagger.emission_weights_.shape)
    clone.transition_weights_ = rng.normal(scale=2.0, size=tagger.transition_weights_.shape)
    return clone


_random_scheme_tagger.base = None


def test_constrained_decode_never_violates_bio():
    if _random_scheme_tagger.base is None:
        _random_scheme_tagger.base = _fitted_toy_tagger()
    rng = np.random.default_rng(13)
    vocab = ["kak1", "res1", "sar2", "naw1", "naw2", ".", "zz9"]
    for _ in range(200):
        tagger = _random_scheme_tagger(rng)
        n = int(rng.integers(1, 7))
        sent = [vocab[int(rng.integers(len(vocab)))] for _ in range(n)]
        labels, _ = viterbi_decode(tagger, extract_sentence_features(sent, 2), True)
        tags = [str(l) for l in labels]
        corpus = corpus_from_sequences([sent], [tags])
        assert validate_bio(corpus) == []


def test_unconstrained_decode_can_violate_bio():
    if _random_scheme_tagger.base is None:
        _random_scheme_tagger.base = _fitted_toy_tagger()
    tagger = _random_scheme_tagger(np.random.default_rng(0))
    tagger.emission_weights_ = np.zeros_like(tagger.emission_weights_)
    tagger.transition_weights_ = np.zeros_like(tagger.transition_weights_)
    idx = tagger.scheme_.index("I-PER")
    tagger.emission_weights_[:, idx] = 1.0
    labels, _ = viterbi_decode(tagger, extract_sentence_features(["naw1", "naw2"], 2), False)
    assert [str(l) for l in labels] == ["I-PER", "I-PER"]


def test_mask_constant_documented_value():
    assert MASK_SCORE == -1e4
