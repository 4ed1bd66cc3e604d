import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sorani_ner.preprocess import (ARABIC_INDIC_DIGITS, PreprocessConfig, clean_text,
                                   convert_digits, default_digit_map, text_to_corpus,
                                   tokenize_sentences, tokenize_words)

SORANI = "ناوی من ئالان"


def test_clean_text_removes_unwanted_punctuation():
    # Covers ASCII and Arabic-script punctuation alike (U+060C comma,
    # guillemets) while keeping sentence delimiters.
    assert clean_text("سڵاو، (بەیانی) «باش»") == "سڵاو بەیانی باش"
    config = PreprocessConfig(strip_punctuation=False)
    assert clean_text("سڵاو، باش", config) == "سڵاو، باش"


def test_clean_text_keeps_sentence_delimiters():
    assert clean_text("باش. زۆر باش! ئایا؟") == "باش. زۆر باش! ئایا؟"


def test_clean_text_strips_latin_runs_by_default():
    assert clean_text("ناوی Facebook من") == "ناوی من"
    config = PreprocessConfig(strip_latin=False)
    assert clean_text("ناوی Facebook من", config) == "ناوی Facebook من"


def test_clean_text_collapses_whitespace():
    assert clean_text("  ناو\t\tمن \n دوو  ") == "ناو من دوو"


def test_clean_text_removes_controls_and_zero_width():
    assert clean_text("ناو‌من\x00دوو") == "ناومندوو"


def test_convert_digits_to_arabic_indic():
    assert convert_digits("ساڵی 1991") == "ساڵی ١٩٩١"
    assert convert_digits("123") == "١٢٣"
    # Length-preserving and total on 0-9.
    assert len(convert_digits("0123456789")) == 10
    assert convert_digits("0123456789") == ARABIC_INDIC_DIGITS


def test_digit_map_validation():
    with pytest.raises(ValueError):
        PreprocessConfig(digit_map={"0": "٠"})
    bad = default_digit_map()
    bad["1"] = bad["2"]
    with pytest.raises(ValueError):
        PreprocessConfig(digit_map=bad)


def test_tokenize_sentences_keeps_delimiters():
    assert tokenize_sentences("یەک. دوو؟ سێ") == ["یەک.", "دوو؟", "سێ"]
    assert tokenize_sentences("") == []
    assert tokenize_sentences("...") == [".", ".", "."]


def test_tokenize_words_detaches_final_delimiter():
    assert tokenize_words("ناوی من ئالانە.") == ["ناوی", "من", "ئالانە", "."]
    # A bare delimiter stays a single token, interior dots stay attached.
    assert tokenize_words(".") == ["."]
    assert tokenize_words("بەشی د.خ ناو.") == ["بەشی", "د.خ", "ناو", "."]


def test_text_to_corpus_pipeline():
    corpus = text_to_corpus("ناوی من، ساڵی 1991. (زۆر) باش!")
    assert len(corpus) == 2
    assert corpus.sentences[0].surfaces == ["ناوی", "من", "ساڵی", "١٩٩١", "."]
    assert corpus.sentences[1].surfaces == ["زۆر", "باش", "!"]
    assert all(t == "O" for s in corpus.sentences for t in s.tags)


def test_text_to_corpus_empty_input():
    assert len(text_to_corpus("")) == 0
    assert len(text_to_corpus("   \n\t ")) == 0


@given(st.text(alphabet="ئابپتجچحخدرزژسشعغفڤقکگلڵمنوۆهەیێ ٠١٢٣0123.!?،؛", max_size=80))
@settings(max_examples=80)
def test_pipeline_tokens_never_contain_whitespace(raw):
    corpus = text_to_corpus(raw)
    for sent in corpus.sentences:
        for tok in sent.surfaces:
            assert tok
            assert not any(c.isspace() for c in tok)
            assert not any(c.isascii() and c.isdigit() for c in tok)
