"""Hand-engineered token features, global indexing, and sparse vectorization.

Every token position yields a FeatureSet (an ordered dict of named values,
string-valued for categorical features and float-valued for numeric ones).
A FeatureIndex maps feature occurrences to dense columns: categorical features
become one-hot "name=value" columns, numeric features one column per name.
docs/FEATURES.md lists the full template.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from collections.abc import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .validation import check_position

FeatureValue = str | float
FeatureSet = dict[str, FeatureValue]

#: Sentinel surface for neighbor offsets before the first token / after the last.
BOS = "<s>"
EOS = "</s>"

_ARABIC_BLOCKS = (
    (0x0600, 0x06FF),  # Arabic
    (0x0750, 0x077F),  # Arabic Supplement
    (0x08A0, 0x08FF),  # Arabic Extended-A
    (0xFB50, 0xFDFF),  # Presentation Forms-A
    (0xFE70, 0xFEFF),  # Presentation Forms-B
)


def _is_arabic_letter(ch: str) -> bool:
    cp = ord(ch)
    if not any(lo <= cp <= hi for lo, hi in _ARABIC_BLOCKS):
        return False
    return unicodedata.category(ch).startswith("L")


def word_shape(token: str) -> str:
    """Character-class sketch of a token.

    Latin upper -> 'X', Latin lower -> 'x', any digit -> '#', Arabic-script
    letter -> 'a', anything else -> '-'; consecutive duplicates collapse.
    """
    if not token:
        raise ValueError("word_shape requires a non-empty token")
    out = []
    for ch in token:
        if "A" <= ch <= "Z":
            cls = "X"
        elif "a" <= ch <= "z":
            cls = "x"
        elif unicodedata.category(ch) == "Nd":
            cls = "#"
        elif _is_arabic_letter(ch):
            cls = "a"
        else:
            cls = "-"
        if not out or out[-1] != cls:
            out.append(cls)
    return "".join(out)


def _is_digit_token(token: str) -> bool:
    # Counts Arabic-Indic and Extended Arabic-Indic digits as digits too.
    return all(unicodedata.category(c) == "Nd" for c in token)


def token_features(sentence: Sequence[str], i: int, window: int = 2) -> FeatureSet:
    """Features for position i of a sentence of surface strings.

    Focus token: case-folded form, prefixes and suffixes of length 1-3
    (clamped to the token), digit flag, Latin-capitalization flag, shape, and
    length.  Neighbors within +/-window contribute their case-folded surface
    keyed by offset, with BOS/EOS sentinels past the sentence edge.  Depends
    only on surfaces, never on tags.
    """
    check_position(i, len(sentence))
    if window < 0:
        raise ValueError(f"window must be >= 0, got {window}")
    token = sentence[i]
    lower = token.casefold()
    fs: FeatureSet = {
        "word.lower": lower,
        "prefix1": lower[:1],
        "prefix2": lower[:2],
        "prefix3": lower[:3],
        "suffix1": lower[-1:],
        "suffix2": lower[-2:],
        "suffix3": lower[-3:],
        "is.digit": 1.0 if _is_digit_token(token) else 0.0,
        # Inert on native Sorani text (Arabic script has no case); meaningful
        # only for embedded Latin material.
        "is.latin.upper": 1.0 if token[:1].isupper() and token[:1].isascii() else 0.0,
        "shape": word_shape(token),
        "length": float(len(token)),
    }
    for offset in range(-window, window + 1):
        if offset == 0:
            continue
        j = i + offset
        if 0 <= j < len(sentence):
            value = sentence[j].casefold()
        else:
            value = BOS if j < 0 else EOS
        fs[f"{offset:+d}:word.lower"] = value
    return fs


def extract_sentence_features(sentence: Sequence[str], window: int = 2) -> list[FeatureSet]:
    return [token_features(sentence, i, window) for i in range(len(sentence))]


@dataclass(frozen=True)
class SparseVector:
    """Sorted (column id, value) pairs with no explicit zeros."""

    indices: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have equal length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if any(v == 0.0 for v in self.values):
            raise ValueError("explicit zeros are not allowed")

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))


def column_key(name: str, value: FeatureValue) -> str:
    """Column identity for one feature occurrence."""
    return f"{name}={value}" if isinstance(value, str) else name


class FeatureIndex:
    """Bijection from feature column keys to dense ids 0..N-1.

    Mutable while fitting; frozen afterwards, when lookups never allocate.
    """

    def __init__(self):
        self._ids: dict[str, int] = {}
        self._frozen = False

    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def n_features(self) -> int:
        return len(self._ids)

    @property
    def keys(self) -> list[str]:
        """Column keys in id order."""
        return list(self._ids)

    @classmethod
    def from_keys(cls, keys: Iterable[str]) -> "FeatureIndex":
        """Rebuild a frozen index from a stored key table."""
        index = cls()
        for key in keys:
            if key in index._ids:
                raise ValueError(f"duplicate feature key {key!r}")
            index._ids[key] = len(index._ids)
        index._frozen = True
        return index

    def fit(self, featuresets: Iterable[FeatureSet]) -> "FeatureIndex":
        """Allocate ids for every feature occurrence, then freeze."""
        if self._frozen:
            raise RuntimeError("FeatureIndex is frozen; cannot fit again")
        for fs in featuresets:
            for name, value in fs.items():
                key = column_key(name, value)
                if key not in self._ids:
                    self._ids[key] = len(self._ids)
        self._frozen = True
        return self

    def lookup(self, key: str) -> int | None:
        return self._ids.get(key)

    def vectorize(self, fs: FeatureSet) -> SparseVector:
        """One-hot categorical features, pass-through numeric values; unseen
        features are silently dropped.  Requires a frozen index."""
        if not self._frozen:
            raise RuntimeError("vectorize requires a fitted (frozen) FeatureIndex")
        pairs = []
        for name, value in fs.items():
            col = self._ids.get(column_key(name, value))
            if col is None:
                continue
            numeric = 1.0 if isinstance(value, str) else float(value)
            if numeric != 0.0:
                pairs.append((col, numeric))
        pairs.sort()
        return SparseVector(tuple(c for c, _ in pairs), tuple(v for _, v in pairs))


def fit_index(featuresets: Iterable[FeatureSet]) -> FeatureIndex:
    return FeatureIndex().fit(featuresets)


def vectorize(fs: FeatureSet, index: FeatureIndex) -> SparseVector:
    return index.vectorize(fs)


def csr_from_featuresets(featuresets: Sequence[FeatureSet], index: FeatureIndex) -> sp.csr_matrix:
    """Vectorize a batch of FeatureSets into one CSR matrix (rows = positions)."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for fs in featuresets:
        vec = index.vectorize(fs)
        indices.extend(vec.indices)
        data.extend(vec.values)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=np.float64),
         np.asarray(indices, dtype=np.int32),
         np.asarray(indptr, dtype=np.int32)),
        shape=(len(featuresets), index.n_features),
    )


class MaxAbsScaler:
    """Per-column division by the max absolute value seen at fit time.

    Sparsity-preserving; columns never seen (or all-zero) at fit time pass
    through unchanged.
    """

    def __init__(self):
        self.scale_: np.ndarray | None = None

    def fit(self, vectors: Iterable[SparseVector]) -> "MaxAbsScaler":
        maxabs: dict[int, float] = {}
        top = -1
        for vec in vectors:
            for col, val in zip(vec.indices, vec.values):
                a = abs(val)
                if a > maxabs.get(col, 0.0):
                    maxabs[col] = a
                top = max(top, col)
        self.scale_ = np.zeros(top + 1)
        for col, a in maxabs.items():
            self.scale_[col] = a
        return self

    def fit_matrix(self, X: sp.csr_matrix) -> "MaxAbsScaler":
        self.scale_ = np.abs(X).max(axis=0).toarray().ravel() if X.shape[0] else np.zeros(X.shape[1])
        return self

    def _factor(self, col: int) -> float:
        if self.scale_ is None:
            raise RuntimeError("scaler is not fitted")
        if col < len(self.scale_) and self.scale_[col] > 0.0:
            return self.scale_[col]
        return 1.0

    def transform(self, vec: SparseVector) -> SparseVector:
        return SparseVector(
            vec.indices,
            tuple(v / self._factor(c) for c, v in zip(vec.indices, vec.values)),
        )

    def transform_matrix(self, X: sp.csr_matrix) -> sp.csr_matrix:
        if self.scale_ is None:
            raise RuntimeError("scaler is not fitted")
        factors = np.ones(X.shape[1])
        k = min(len(self.scale_), X.shape[1])
        nonzero = self.scale_[:k] > 0.0
        factors[:k][nonzero] = self.scale_[:k][nonzero]
        out = X.copy()
        out.data = out.data / factors[out.indices]
        return out


def fit_scaler(vectors: Iterable[SparseVector]) -> MaxAbsScaler:
    return MaxAbsScaler().fit(vectors)


def apply_scaler(vec: SparseVector, scaler: MaxAbsScaler) -> SparseVector:
    return scaler.transform(vec)
