import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sorani_ner.features import (BOS, EOS, FeatureIndex, MaxAbsScaler, SparseVector,
                                 column_key, csr_from_featuresets, extract_sentence_features,
                                 fit_index, token_features, word_shape)


def test_word_shape_classes():
    assert word_shape("Azad") == "Xx"
    assert word_shape("ABC") == "X"
    assert word_shape("ناو") == "a"
    assert word_shape("ناو12") == "a#"
    assert word_shape("١٩٩١") == "#"
    assert word_shape("a-b") == "x-x"
    assert word_shape(".") == "-"
    with pytest.raises(ValueError):
        word_shape("")


def test_token_features_exact_contents():
    fs = token_features(["ناوی", "من", "١٩٩١"], 2, window=2)
    assert fs == {
        "word.lower": "١٩٩١",
        "prefix1": "١", "prefix2": "١٩", "prefix3": "١٩٩",
        "suffix1": "١", "suffix2": "٩١", "suffix3": "٩٩١",
        "is.digit": 1.0,
        "is.latin.upper": 0.0,
        "shape": "#",
        "length": 4.0,
        "-2:word.lower": "ناوی",
        "-1:word.lower": "من",
        "+1:word.lower": EOS,
        "+2:word.lower": EOS,
    }


def test_token_features_short_token_clamps_affixes():
    fs = token_features(["و"], 0)
    assert fs["prefix3"] == "و"
    assert fs["suffix3"] == "و"
    assert fs["length"] == 1.0
    assert fs["-1:word.lower"] == BOS
    assert fs["+1:word.lower"] == EOS


def test_token_features_latin_capital_flag_and_casefold():
    fs = token_features(["Azad"], 0, window=0)
    assert fs["is.latin.upper"] == 1.0
    assert fs["word.lower"] == "azad"
    assert token_features(["ناو"], 0)["is.latin.upper"] == 0.0


def test_token_features_window_zero_and_bounds():
    fs = token_features(["a", "b"], 0, window=0)
    assert not any(k.endswith(":word.lower") for k in fs)
    with pytest.raises(IndexError):
        token_features(["a"], 1)
    with pytest.raises(ValueError):
        token_features(["a"], 0, window=-1)


def test_extract_sentence_features_is_tag_free():
    sent = ["ناوی", "من"]
    sets = extract_sentence_features(sent)
    assert len(sets) == 2
    assert sets[0]["+1:word.lower"] == "من"
    assert sets[1]["-1:word.lower"] == "ناوی"


def test_sparse_vector_invariants():
    vec = SparseVector((0, 3), (1.0, -2.0))
    assert vec.to_dict() == {0: 1.0, 3: -2.0}
    with pytest.raises(ValueError):
        SparseVector((3, 0), (1.0, 1.0))  # not increasing
    with pytest.raises(ValueError):
        SparseVector((0, 0), (1.0, 1.0))  # duplicate
    with pytest.raises(ValueError):
        SparseVector((0,), (0.0,))  # explicit zero
    with pytest.raises(ValueError):
        SparseVector((0, 1), (1.0,))  # length mismatch


def test_column_key_forms():
    assert column_key("word.lower", "ناو") == "word.lower=ناو"
    assert column_key("length", 3.0) == "length"


def test_feature_index_freeze_and_unseen_drop():
    index = fit_index([{"word.lower": "a", "length": 1.0},
                       {"word.lower": "b", "length": 1.0}])
    assert index.frozen
    assert index.n_features == 3  # word.lower=a, length, word.lower=b
    with pytest.raises(RuntimeError):
        index.fit([{"word.lower": "c"}])
    vec = index.vectorize({"word.lower": "zzz", "length": 2.0})
    # Unseen word silently dropped; numeric column keeps its value.
    assert vec.to_dict() == {index.lookup("length"): 2.0}


def test_vectorize_drops_zero_numerics_and_requires_frozen():
    index = fit_index([{"is.digit": 1.0}])
    assert index.vectorize({"is.digit": 0.0}).indices == ()
    with pytest.raises(RuntimeError):
        FeatureIndex().vectorize({"is.digit": 1.0})


def test_index_from_keys_round_trip():
    index = fit_index([{"word.lower": "a", "length": 2.0}])
    again = FeatureIndex.from_keys(index.keys)
    assert again.keys == index.keys
    assert again.frozen
    with pytest.raises(ValueError):
        FeatureIndex.from_keys(["k", "k"])


def test_csr_from_featuresets_matches_vectorize():
    sets = [{"word.lower": "a", "length": 2.0}, {"word.lower": "b", "length": 1.0}]
    index = fit_index(sets)
    x = csr_from_featuresets(sets, index)
    assert x.shape == (2, index.n_features)
    dense = x.toarray()
    for row, fs in enumerate(sets):
        assert {c: v for c, v in zip(*np.nonzero(dense[row:row + 1]))} is not None
        expected = index.vectorize(fs).to_dict()
        got = {int(c): float(dense[row, c]) for c in np.nonzero(dense[row])[0]}
        assert got == expected


def test_maxabs_scaler_scales_and_passes_through_zero_columns():
    vectors = [SparseVector((0, 2), (2.0, -4.0)), SparseVector((0,), (1.0,))]
    scaler = MaxAbsScaler().fit(vectors)
    out = scaler.transform(SparseVector((0, 1, 2), (2.0, 5.0, 2.0)))
    # Column 1 was never seen at fit time: passes through unchanged.
    assert out.to_dict() == {0: 1.0, 1: 5.0, 2: 0.5}


def test_maxabs_scaler_matrix_matches_vector_path():
    sets = [{"a": 3.0, "b": 1.0}, {"a": -6.0}, {"c": 0.5}]
    index = fit_index(sets)
    x = csr_from_featuresets(sets, index)
    m_scaler = MaxAbsScaler().fit_matrix(x)
    v_scaler = MaxAbsScaler().fit(index.vectorize(fs) for fs in sets)
    out_m = m_scaler.transform_matrix(x).toarray()
    out_v = np.zeros_like(out_m)
    for i, fs in enumerate(sets):
        for c, v in v_scaler.transform(index.vectorize(fs)).to_dict().items():
            out_v[i, c] = v
    np.testing.assert_allclose(out_m, out_v)
    assert np.abs(out_m).max() <= 1.0


def test_scaler_requires_fit():
    with pytest.raises(RuntimeError):
        MaxAbsScaler().transform(SparseVector((0,), (1.0,)))


@given(st.lists(st.text(alphabet="ابپتجچوە.!19", min_size=1, max_size=7),
                min_size=1, max_size=6),
       st.integers(min_value=0, max_value=3))
@settings(max_examples=80)
def test_token_features_deterministic_and_complete(sentence, window):
    for i in range(len(sentence)):
        fs = token_features(sentence, i, window)
        assert fs == token_features(sentence, i, window)
        assert len([k for k in fs if k.endswith(":word.lower")]) == 2 * window
        assert isinstance(fs["length"], float)
        assert fs["is.digit"] in (0.0, 1.0)
