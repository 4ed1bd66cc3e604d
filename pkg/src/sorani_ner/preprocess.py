"""Raw-text preprocessing: cleaning, digit conversion, tokenization.

The pipeline turns raw Kurdish Sorani text into clean, tokenized sentences:
remove unwanted characters, optionally drop embedded Latin words, convert
ASCII digits to Arabic-Indic glyphs, then split into sentences and words.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from collections.abc import Mapping

from .corpus import Corpus, Label, Sentence, Token

#: Sentence-final punctuation: ASCII period/bang/question plus U+061F.
SENTENCE_DELIMITERS = (".", "!", "?", "؟")

ARABIC_INDIC_DIGITS = "٠١٢٣٤٥٦٧٨٩"
EXTENDED_ARABIC_INDIC_DIGITS = "۰۱۲۳۴۵۶۷۸۹"


def default_digit_map() -> dict[str, str]:
    """ASCII digits to Arabic-Indic (U+0660-U+0669), the Sorani default."""
    return {str(i): ARABIC_INDIC_DIGITS[i] for i in range(10)}


def _default_unwanted() -> frozenset[str]:
    # Control characters (minus the whitespace ones, which normalization
    # handles) and zero-width characters.  Punctuation is handled separately
    # by category so Arabic marks are covered without enumeration.
    controls = {chr(c) for c in range(0x20)} - {"\t", "\n", "\r"}
    controls.add(chr(0x7F))
    zero_width = {"​", "‌", "‍"}
    return frozenset(controls | zero_width)


DEFAULT_UNWANTED = _default_unwanted()

_LATIN_RUN = re.compile(r"[A-Za-z]+")
_WHITESPACE_RUN = re.compile(r"\s+")
_SENTENCE_SEGMENT = re.compile(
    "[^" + re.escape("".join(SENTENCE_DELIMITERS)) + "]*"
    "[" + re.escape("".join(SENTENCE_DELIMITERS)) + "]"
    "|[^" + re.escape("".join(SENTENCE_DELIMITERS)) + "]+"
)


@dataclass(frozen=True)
class PreprocessConfig:
    """Settings for clean_text / convert_digits.

    digit_map must map every ASCII digit to a distinct target glyph.
    strip_punctuation removes every Unicode punctuation character except the
    sentence delimiters, which covers Arabic marks like U+060C without
    enumerating them.
    """

    digit_map: Mapping[str, str] = field(default_factory=default_digit_map)
    strip_latin: bool = True
    strip_punctuation: bool = True
    unwanted_chars: frozenset[str] = DEFAULT_UNWANTED

    def __post_init__(self):
        keys = set(self.digit_map)
        if keys != set("0123456789"):
            raise ValueError("digit_map must be total on ASCII digits 0-9")
        values = list(self.digit_map.values())
        if len(set(values)) != len(values):
            raise ValueError("digit_map must be injective")


DEFAULT_CONFIG = PreprocessConfig()


def _keep_char(ch: str, config: PreprocessConfig) -> bool:
    if ch in config.unwanted_chars:
        return False
    if (config.strip_punctuation and ch not in SENTENCE_DELIMITERS
            and unicodedata.category(ch).startswith("P")):
        return False
    return True


def clean_text(raw: str, config: PreprocessConfig = DEFAULT_CONFIG) -> str:
    """Delete unwanted characters and non-delimiter punctuation, optionally
    remove whole Latin words, and normalize whitespace runs to single spaces."""
    text = "".join(ch for ch in raw if _keep_char(ch, config))
    if config.strip_latin:
        text = _LATIN_RUN.sub(" ", text)
    return _WHITESPACE_RUN.sub(" ", text).strip()


def convert_digits(text: str, config: PreprocessConfig = DEFAULT_CONFIG) -> str:
    """Replace every ASCII digit via the configured map; length-preserving."""
    table = {ord(k): v for k, v in config.digit_map.items()}
    return text.translate(table)


def tokenize_sentences(text: str) -> list[str]:
    """Split on sentence-final punctuation, keeping the delimiter attached to
    the end of its sentence; empty segments are dropped."""
    return [seg for seg in (s.strip() for s in _SENTENCE_SEGMENT.findall(text)) if seg]


def tokenize_words(sentence: str) -> list[str]:
    """Whitespace-split, then detach sentence-final punctuation as its own
    token.  Interior punctuation stays attached."""
    tokens = sentence.split()
    if tokens and len(tokens[-1]) > 1 and tokens[-1][-1] in SENTENCE_DELIMITERS:
        last = tokens.pop()
        tokens.extend([last[:-1], last[-1]])
    return tokens


def text_to_corpus(raw: str, config: PreprocessConfig = DEFAULT_CONFIG) -> Corpus:
    """Full pipeline: clean, convert digits, tokenize; every token tagged O.

    Digit conversion runs before tokenization (the transforms commute for
    digit-only rewrites, so the order is observationally irrelevant).
    """
    text = convert_digits(clean_text(raw, config), config)
    outside = Label("O")
    sentences = []
    for sent_text in tokenize_sentences(text):
        words = tokenize_words(sent_text)
        if words:
            sentences.append(Sentence(tuple(Token(w, outside) for w in words)))
    return Corpus(tuple(sentences))
