"""Shared input-validation helpers and error types."""

from __future__ import annotations

from collections.abc import Sequence


class DataError(ValueError):
    """Malformed or inconsistent input data (files, tags, alignments)."""


class NumericalError(RuntimeError):
    """A numerical procedure produced a non-finite or unusable result."""


def check_token_sequences(X) -> list[list[str]]:
    """Coerce X to a list of sentences, each a non-empty list of token strings."""
    sentences = []
    for s_idx, sent in enumerate(X):
        tokens = list(sent)
        if not tokens:
            raise DataError(f"sentence {s_idx} is empty")
        for tok in tokens:
            if not isinstance(tok, str) or not tok:
                raise DataError(f"sentence {s_idx} contains a non-string or empty token")
        sentences.append(tokens)
    return sentences


def check_aligned_tags(X: Sequence[Sequence[str]], y) -> list[list[str]]:
    """Check y is a tag sequence list aligned 1:1 with the sentences in X."""
    tags = [list(t) for t in y]
    if len(tags) != len(X):
        raise DataError(f"got {len(X)} sentences but {len(tags)} tag sequences")
    for s_idx, (sent, seq) in enumerate(zip(X, tags)):
        if len(seq) != len(sent):
            raise DataError(
                f"sentence {s_idx}: {len(sent)} tokens but {len(seq)} tags"
            )
    return tags


def check_position(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise IndexError(f"position {i} out of range for sentence of length {n}")
