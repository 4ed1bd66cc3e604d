"""Shared fixtures: brute-force oracles and synthetic corpus generators.

The oracles recompute CRF quantities by full path enumeration so the dynamic
programs in the package are tested against an independent route.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from sorani_ner.corpus import Corpus, corpus_from_sequences
from sorani_ner.crf import Lattice


def enumerate_paths(lattice: Lattice):
    """Yield (path tuple, raw score) over all |labels|^n label sequences."""
    n, n_labels = lattice.emissions.shape
    for path in itertools.product(range(n_labels), repeat=n):
        score = sum(lattice.emissions[i, y] for i, y in enumerate(path))
        score += sum(lattice.transitions[path[i - 1], path[i]] for i in range(1, n))
        yield path, score


def brute_logz(lattice: Lattice) -> float:
    scores = np.array([s for _, s in enumerate_paths(lattice)])
    m = scores.max()
    return float(m + np.log(np.exp(scores - m).sum()))


def brute_best_path(lattice: Lattice) -> tuple[tuple[int, ...], float]:
    """Argmax path; lexicographic iteration plus strict > keeps the smallest
    path on exact ties."""
    best, best_score = None, -np.inf
    for path, score in enumerate_paths(lattice):
        if score > best_score:
            best, best_score = path, score
    return best, best_score


def brute_marginals(lattice: Lattice) -> tuple[np.ndarray, np.ndarray]:
    n, n_labels = lattice.emissions.shape
    log_z = brute_logz(lattice)
    node = np.zeros((n, n_labels))
    edge = np.zeros((max(n - 1, 0), n_labels, n_labels))
    for path, score in enumerate_paths(lattice):
        p = np.exp(score - log_z)
        for i, y in enumerate(path):
            node[i, y] += p
            if i:
                edge[i - 1, path[i - 1], y] += p
    return node, edge


def random_lattice(rng: np.random.Generator, n: int, n_labels: int, scale: float = 1.5) -> Lattice:
    return Lattice(scale * rng.standard_normal((n, n_labels)),
                   scale * rng.standard_normal((n_labels, n_labels)))


# Chunk vocabulary for synthetic corpora: every surface prefix determines the
# tag, so a model with prefix features can tag the corpus near-perfectly.
_CHUNKS = [
    ("O", [("naw{}", "O")]),
    ("O", [("ke{}", "O")]),
    ("PER", [("kak{}", "B-PER"), ("res{}", "I-PER")]),
    ("LOC", [("sar{}", "B-LOC"), ("bar{}", "I-LOC")]),
    ("ORG", [("rek{}", "B-ORG"), ("kom{}", "I-ORG")]),
    ("DATE", [("19{}0", "B-DATE"), ("sal{}", "I-DATE")]),
    ("MISC", [("cer{}", "B-MISC"), ("mai{}", "I-MISC")]),
]


def make_synthetic_corpus(n_sentences: int = 500, seed: int = 1234) -> Corpus:
    """Sentences over a closed vocabulary where tags follow from surfaces."""
    rng = random.Random(seed)
    surfaces, tags = [], []
    for _ in range(n_sentences):
        words, word_tags = [], []
        for _ in range(rng.randint(3, 6)):
            _, parts = rng.choice(_CHUNKS)
            keep = 1 if len(parts) > 1 and rng.random() < 0.4 else len(parts)
            for template, tag in parts[:keep] if keep == 1 else parts:
                words.append(template.format(rng.randrange(30)))
                word_tags.append(tag)
        words.append(".")
        word_tags.append("O")
        surfaces.append(words)
        tags.append(word_tags)
    return corpus_from_sequences(surfaces, tags)
