"""CoNLL corpus handling: BIO tag scheme, parsing, validation, splits, statistics.

The file format is two columns per line ("<token> <tag>", any run of spaces or
tabs accepted on read, a single ASCII space written), with blank lines between
sentences.  Tags are case-sensitive and follow the IOB2 convention.  See
docs/FORMAT.md for the full contract, including the portable shuffle algorithm
used by the split operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .validation import DataError

ENTITY_TYPES = ("PER", "LOC", "ORG", "DATE", "MISC")

#: Full entity names as used in dataset documentation and reports.
ENTITY_NAMES = {
    "PER": "PERSON",
    "LOC": "LOCATION",
    "ORG": "ORGANIZATION",
    "DATE": "DATE",
    "MISC": "MISCELLANEOUS",
}


class CorpusFormatError(DataError):
    """A CoNLL file violated the two-column format or used an unknown tag."""


@dataclass(frozen=True, order=True)
class Label:
    """A BIO tag: kind 'O', 'B' or 'I', plus an entity type for B/I."""

    kind: str
    entity: str | None = None

    def __post_init__(self):
        if self.kind not in ("O", "B", "I"):
            raise ValueError(f"label kind must be O, B or I, got {self.kind!r}")
        if self.kind == "O":
            if self.entity is not None:
                raise ValueError("O label cannot carry an entity type")
        elif self.entity is None:
            raise ValueError(f"{self.kind}- label requires an entity type")

    def __str__(self) -> str:
        return self.kind if self.kind == "O" else f"{self.kind}-{self.entity}"

    @classmethod
    def parse(cls, text: str) -> "Label":
        if text == "O":
            return cls("O")
        if len(text) > 2 and text[1] == "-" and text[0] in ("B", "I"):
            return cls(text[0], text[2:])
        raise ValueError(f"not a BIO label: {text!r}")


class TagScheme:
    """The closed label set and its IOB2 transition legality.

    Label order is fixed: O first, then B-/I- pairs in entity order.  That
    order is the tie-break order used by decoders and the column order of
    reports.
    """

    def __init__(self, entity_types: tuple[str, ...] = ENTITY_TYPES):
        self.entity_types = tuple(entity_types)
        labels = [Label("O")]
        for ent in self.entity_types:
            labels.append(Label("B", ent))
            labels.append(Label("I", ent))
        self.labels: tuple[Label, ...] = tuple(labels)
        self.label_strings: tuple[str, ...] = tuple(str(l) for l in labels)
        self._index = {s: i for i, s in enumerate(self.label_strings)}

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, tag) -> bool:
        return str(tag) in self._index

    def index(self, tag) -> int:
        try:
            return self._index[str(tag)]
        except KeyError:
            raise KeyError(f"unknown tag {str(tag)!r}") from None

    def parse(self, text: str) -> Label:
        """Parse a tag string, accepting only members of this scheme."""
        if text not in self._index:
            raise ValueError(f"unknown tag {text!r}")
        return self.labels[self._index[text]]

    def is_legal_transition(self, prev: str | None, cur: str) -> bool:
        """IOB2 legality: I-X may only follow B-X or I-X (prev=None: start)."""
        cur_label = self.parse(cur)
        if cur_label.kind != "I":
            return True
        if prev is None:
            return False
        prev_label = self.parse(prev)
        return prev_label.kind in ("B", "I") and prev_label.entity == cur_label.entity


#: The scheme used throughout: O plus B-/I- over PER, LOC, ORG, DATE, MISC.
DEFAULT_SCHEME = TagScheme()


@dataclass(frozen=True)
class Token:
    surface: str
    tag: Label

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(c in self.surface for c in " \t\n\r"):
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence must contain at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def tags(self) -> list[str]:
        return [str(t.tag) for t in self.tokens]


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...] = ()
    provenance: str | None = None

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def surfaces(self) -> list[list[str]]:
        return [s.surfaces for s in self.sentences]

    def tag_sequences(self) -> list[list[str]]:
        return [s.tags for s in self.sentences]


def corpus_from_sequences(surfaces: list[list[str]], tags: list[list[str]] | None = None,
                          scheme: TagScheme = DEFAULT_SCHEME) -> Corpus:
    """Build a Corpus from parallel surface/tag sequences (tags default to all O)."""
    if tags is None:
        tags = [["O"] * len(s) for s in surfaces]
    if len(surfaces) != len(tags):
        raise DataError("surface and tag sequence counts differ")
    sentences = []
    for n, (words, sent_tags) in enumerate(zip(surfaces, tags)):
        if len(words) != len(sent_tags):
            raise DataError(f"sentence {n}: {len(words)} tokens but {len(sent_tags)} tags")
        sentences.append(Sentence(tuple(
            Token(w, scheme.parse(t)) for w, t in zip(words, sent_tags))))
    return Corpus(tuple(sentences))


@dataclass(frozen=True)
class Violation:
    """An IOB2 inconsistency.  Indices are 0-based; descriptions are 1-based."""

    sentence_index: int
    token_index: int
    description: str


@dataclass(frozen=True)
class EntityDistribution:
    """Token-level occurrence counts per entity type, as in dataset reports."""

    entity_counts: dict[str, int]  # keyed by entity code, scheme order
    outside: int
    total: int

    def percentage(self, key: str) -> float:
        """Percentage of total tokens for an entity code, or 'O' for outside."""
        count = self.outside if key == "O" else self.entity_counts[key]
        return 100.0 * count / self.total if self.total else 0.0


def parse_conll(text: str, scheme: TagScheme = DEFAULT_SCHEME,
                provenance: str | None = None) -> Corpus:
    """Parse CoNLL two-column text into a Corpus.

    Blank lines delimit sentences; consecutive blank lines collapse and
    trailing blank lines are ignored.  Raises CorpusFormatError with a 1-based
    line number for a wrong column count or an unknown tag string.
    """
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields:
            if tokens:
                sentences.append(Sentence(tuple(tokens)))
                tokens = []
            continue
        if len(fields) != 2:
            raise CorpusFormatError(
                f"line {line_no}: expected 2 columns, got {len(fields)}"
            )
        surface, tag_text = fields
        try:
            tag = scheme.parse(tag_text)
        except ValueError:
            raise CorpusFormatError(
                f"line {line_no}: unknown tag {tag_text!r}"
            ) from None
        tokens.append(Token(surface, tag))
    if tokens:
        sentences.append(Sentence(tuple(tokens)))
    return Corpus(tuple(sentences), provenance)


def serialize_conll(corpus: Corpus) -> str:
    """Render a Corpus in canonical form: single-space columns, LF newlines,
    one blank line between sentences, newline-terminated (empty for an empty
    corpus)."""
    blocks = []
    for sent in corpus.sentences:
        blocks.append("\n".join(f"{t.surface} {t.tag}" for t in sent.tokens))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def load_corpus(path: str | Path, scheme: TagScheme = DEFAULT_SCHEME) -> Corpus:
    text = Path(path).read_text(encoding="utf-8")
    return parse_conll(text, scheme, provenance=str(path))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_conll(corpus))


def validate_bio(corpus: Corpus, scheme: TagScheme = DEFAULT_SCHEME) -> list[Violation]:
    """Report every I-X token whose predecessor (or sentence start) is not
    B-X or I-X.  Empty result iff the corpus is IOB2-consistent."""
    violations = []
    for s_idx, sent in enumerate(corpus.sentences):
        prev: str | None = None
        for t_idx, token in enumerate(sent.tokens):
            cur = str(token.tag)
            if not scheme.is_legal_transition(prev, cur):
                context = f"after {prev}" if prev is not None else "at sentence start"
                violations.append(Violation(
                    s_idx, t_idx,
                    f"sentence {s_idx + 1}, token {t_idx + 1}: {cur} {context}",
                ))
            prev = cur
    return violations


def repair_bio(corpus: Corpus, scheme: TagScheme = DEFAULT_SCHEME) -> Corpus:
    """Rewrite every violating I-X to B-X, left to right.

    Repairs are applied against the already-repaired prefix, so a run like
    B-LOC I-PER I-PER becomes B-LOC B-PER I-PER.  O and B tags are untouched.
    """
    new_sentences = []
    for sent in corpus.sentences:
        prev: str | None = None
        new_tokens = []
        for token in sent.tokens:
            cur = str(token.tag)
            if not scheme.is_legal_transition(prev, cur):
                token = Token(token.surface, Label("B", token.tag.entity))
                cur = str(token.tag)
            new_tokens.append(token)
            prev = cur
        new_sentences.append(Sentence(tuple(new_tokens)))
    return Corpus(tuple(new_sentences), corpus.provenance)


def lint_final_period(corpus: Corpus) -> list[Violation]:
    """Optional lint: each sentence should end with a '.' token tagged O.

    Informational only; never enforced by the parser.
    """
    violations = []
    for s_idx, sent in enumerate(corpus.sentences):
        last = sent.tokens[-1]
        if last.surface != "." or str(last.tag) != "O":
            violations.append(Violation(
                s_idx, len(sent) - 1,
                f"sentence {s_idx + 1} does not end with '. O' "
                f"(found {last.surface!r} {last.tag})",
            ))
    return violations


def corpus_stats(corpus: Corpus, scheme: TagScheme = DEFAULT_SCHEME) -> EntityDistribution:
    """Token-level entity distribution: B- and I- tokens count toward their
    entity type, O tokens toward outside."""
    counts = {ent: 0 for ent in scheme.entity_types}
    outside = 0
    for sent in corpus.sentences:
        for token in sent.tokens:
            if token.tag.kind == "O":
                outside += 1
            else:
                counts[token.tag.entity] += 1
    return EntityDistribution(counts, outside, outside + sum(counts.values()))


_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output).  See docs/FORMAT.md."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def shuffled_indices(n: int, seed: int) -> list[int]:
    """Deterministic, portable permutation of range(n).

    Fisher-Yates driven by splitmix64, as documented in docs/FORMAT.md, so
    that any implementation of this toolkit reproduces identical splits from
    the same seed.
    """
    state = seed & _MASK64
    indices = list(range(n))
    for i in range(n - 1, 0, -1):
        state, value = _splitmix64(state)
        j = value % (i + 1)
        indices[i], indices[j] = indices[j], indices[i]
    return indices


def split_holdout(corpus: Corpus, train_fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Shuffle sentences with the seeded generator, then take the first
    round(train_fraction * N) for training and the rest for testing."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if len(corpus) < 2:
        raise ValueError("holdout split requires at least 2 sentences")
    order = shuffled_indices(len(corpus), seed)
    n_train = int(math.floor(train_fraction * len(corpus) + 0.5))
    train = Corpus(tuple(corpus.sentences[i] for i in order[:n_train]))
    test = Corpus(tuple(corpus.sentences[i] for i in order[n_train:]))
    return train, test


def split_kfold(corpus: Corpus, k: int, seed: int) -> list[tuple[Corpus, Corpus]]:
    """Shuffle then partition into k folds differing in size by at most one
    sentence; fold i's test set is fold i, its train set the rest."""
    n = len(corpus)
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds sentence count {n}")
    order = shuffled_indices(n, seed)
    base, extra = divmod(n, k)
    folds: list[list[int]] = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(order[start:start + size])
        start += size
    pairs = []
    for i in range(k):
        test_idx = folds[i]
        train_idx = [j for f_idx, fold in enumerate(folds) if f_idx != i for j in fold]
        pairs.append((
            Corpus(tuple(corpus.sentences[j] for j in train_idx)),
            Corpus(tuple(corpus.sentences[j] for j in test_idx)),
        ))
    return pairs
