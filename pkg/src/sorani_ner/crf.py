"""Linear-chain conditional random field tagger.

Scoring: a sentence lattice holds per-position emission scores (one per
label) and a shared label-pair transition matrix, all in log space.  The
probability of a tag path is exp(path score - logZ), with logZ computed by
the forward recursion under log-sum-exp.  Training minimizes the summed
negative log-likelihood plus l1*||w||_1 + (l2/2)*||w||_2^2 with the
limited-memory quasi-Newton optimizer from optim (orthant-wise when l1 > 0),
starting from all-zero weights so runs are deterministic.

BIO-constrained decoding replaces illegal transition scores (into I-X from
anything but B-X/I-X) with MASK_SCORE and adds MASK_SCORE to every I-X
emission at the first position.  The constant is finite so arithmetic stays
exception-free but is far below any reachable path score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .corpus import Corpus, DEFAULT_SCHEME, Label, TagScheme
from .features import FeatureIndex, FeatureSet, csr_from_featuresets, extract_sentence_features, fit_index
from .optim import minimize
from .validation import DataError, check_aligned_tags, check_token_sequences

MASK_SCORE = -1e4


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings; the defaults are the reference configuration."""

    l1: float = 0.1
    l2: float = 0.1
    max_iterations: int = 200
    tolerance: float = 1e-5
    memory: int = 10

    def __post_init__(self):
        if self.l1 < 0 or self.l2 < 0:
            raise ValueError("regularization coefficients must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class Lattice:
    """Log-space scores: emissions (n, L) and transitions (L, L) as [prev, cur]."""

    emissions: np.ndarray
    transitions: np.ndarray

    def __post_init__(self):
        self.emissions = np.asarray(self.emissions, dtype=np.float64)
        self.transitions = np.asarray(self.transitions, dtype=np.float64)
        if self.emissions.ndim != 2 or self.transitions.ndim != 2:
            raise ValueError("emissions and transitions must be 2-d")
        n_labels = self.emissions.shape[1]
        if self.transitions.shape != (n_labels, n_labels):
            raise ValueError("transition matrix does not match label count")

    @property
    def n_positions(self) -> int:
        return self.emissions.shape[0]

    @property
    def n_labels(self) -> int:
        return self.emissions.shape[1]


def lattice_from_matrix(x: sp.csr_matrix, emission_weights: np.ndarray,
                        transition_weights: np.ndarray) -> Lattice:
    return Lattice(np.asarray(x @ emission_weights), transition_weights)


def _forward(lattice: Lattice) -> np.ndarray:
    alpha = np.empty_like(lattice.emissions)
    alpha[0] = lattice.emissions[0]
    for i in range(1, lattice.n_positions):
        alpha[i] = lattice.emissions[i] + logsumexp(
            alpha[i - 1][:, None] + lattice.transitions, axis=0)
    return alpha


def _backward(lattice: Lattice) -> np.ndarray:
    beta = np.zeros_like(lattice.emissions)
    for i in range(lattice.n_positions - 2, -1, -1):
        beta[i] = logsumexp(
            lattice.transitions + (lattice.emissions[i + 1] + beta[i + 1])[None, :], axis=1)
    return beta


def forward_logZ(lattice: Lattice) -> float:
    """log of the sum of exp(path score) over all label sequences."""
    if lattice.n_positions < 1:
        raise ValueError("lattice must cover at least one position")
    return float(logsumexp(_forward(lattice)[-1]))


def path_score(lattice: Lattice, labels: np.ndarray) -> float:
    y = np.asarray(labels, dtype=np.intp)
    score = float(lattice.emissions[np.arange(len(y)), y].sum())
    score += float(lattice.transitions[y[:-1], y[1:]].sum())
    return score


def marginals(lattice: Lattice) -> tuple[np.ndarray, np.ndarray]:
    """Node posteriors (n, L) and edge posteriors (n-1, L, L) as [prev, cur]."""
    alpha = _forward(lattice)
    beta = _backward(lattice)
    log_z = logsumexp(alpha[-1])
    node = np.exp(alpha + beta - log_z)
    n, n_labels = lattice.emissions.shape
    edge = np.empty((max(n - 1, 0), n_labels, n_labels))
    for i in range(1, n):
        edge[i - 1] = np.exp(alpha[i - 1][:, None] + lattice.transitions
                             + (lattice.emissions[i] + beta[i])[None, :] - log_z)
    return node, edge


def viterbi(lattice: Lattice, start_penalty: np.ndarray | None = None) -> tuple[list[int], float]:
    """Highest-scoring path; exact ties resolved toward the lowest label index."""
    n, n_labels = lattice.emissions.shape
    delta = lattice.emissions[0].copy()
    if start_penalty is not None:
        delta += start_penalty
    back = np.empty((n, n_labels), dtype=np.intp)
    for i in range(1, n):
        scores = delta[:, None] + lattice.transitions
        back[i] = np.argmax(scores, axis=0)
        delta = lattice.emissions[i] + np.max(scores, axis=0)
    best = int(np.argmax(delta))
    path = [best]
    for i in range(n - 1, 0, -1):
        path.append(int(back[i][path[-1]]))
    path.reverse()
    return path, float(delta[best])


def _transition_legality(scheme: TagScheme) -> np.ndarray:
    tags = scheme.label_strings
    return np.array([[scheme.is_legal_transition(p, c) for c in tags] for p in tags])


def _start_penalty(scheme: TagScheme) -> np.ndarray:
    return np.array([0.0 if scheme.is_legal_transition(None, c) else MASK_SCORE
                     for c in scheme.label_strings])


def _sequence_nll_grad(x: sp.csr_matrix, y: np.ndarray, emission_weights: np.ndarray,
                       transition_weights: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Reference per-sentence route: nll plus gradients w.r.t. both weight blocks."""
    lattice = lattice_from_matrix(x, emission_weights, transition_weights)
    nll = forward_logZ(lattice) - path_score(lattice, y)
    node, edge = marginals(lattice)
    residual = node.copy()
    residual[np.arange(len(y)), y] -= 1.0
    g_emit = np.asarray(x.T @ residual)
    g_trans = edge.sum(axis=0)
    np.subtract.at(g_trans, (y[:-1], y[1:]), 1.0)
    return nll, g_emit, g_trans


class _PackedCorpus:
    """Padded tensors for corpus-level nll/gradient in a few vector ops.

    Rows of the stacked feature matrix map to (sentence, position) cells of
    the padded (S, N, L) emission tensor; padding cells are never read.
    """

    def __init__(self, xs: list[sp.csr_matrix], ys: list[np.ndarray], n_labels: int):
        self.n_labels = n_labels
        self.lengths = np.array([x.shape[0] for x in xs], dtype=np.intp)
        self.x_all = sp.vstack(xs, format="csr")
        self.sent_of_row = np.repeat(np.arange(len(xs), dtype=np.intp), self.lengths)
        self.pos_of_row = np.concatenate([np.arange(n, dtype=np.intp) for n in self.lengths])
        self.y_all = np.concatenate(ys)
        self.n_rows = int(self.lengths.sum())
        # Observed counts are constant across iterations.
        self.obs_trans = np.zeros((n_labels, n_labels))
        for y in ys:
            np.add.at(self.obs_trans, (y[:-1], y[1:]), 1.0)

    def nll_and_gradient(self, emission_weights: np.ndarray,
                         transition_weights: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        n_sent = len(self.lengths)
        n_max = int(self.lengths.max())
        n_labels = self.n_labels
        emit_rows = np.asarray(self.x_all @ emission_weights)
        e = np.zeros((n_sent, n_max, n_labels))
        e[self.sent_of_row, self.pos_of_row] = emit_rows

        alpha = np.empty_like(e)
        alpha[:, 0] = e[:, 0]
        for t in range(1, n_max):
            active = self.lengths > t
            prev = alpha[active, t - 1][:, :, None] + transition_weights[None, :, :]
            m = prev.max(axis=1, keepdims=True)
            alpha[active, t] = e[active, t] + (m + np.log(np.exp(prev - m).sum(axis=1, keepdims=True)))[:, 0, :]

        last = alpha[np.arange(n_sent), self.lengths - 1]
        m = last.max(axis=1, keepdims=True)
        log_z = (m[:, 0] + np.log(np.exp(last - m).sum(axis=1)))

        beta = np.zeros_like(e)
        for t in range(n_max - 2, -1, -1):
            active = self.lengths > t + 1
            nxt = transition_weights[None, :, :] + (e[active, t + 1] + beta[active, t + 1])[:, None, :]
            m = nxt.max(axis=2, keepdims=True)
            beta[active, t] = (m + np.log(np.exp(nxt - m).sum(axis=2, keepdims=True)))[:, :, 0]

        gold_emit = emit_rows[np.arange(self.n_rows), self.y_all].sum()
        gold_trans = (self.obs_trans * transition_weights).sum()
        nll = float(log_z.sum() - gold_emit - gold_trans)

        # Gather valid (sentence, position) cells before exponentiating so
        # uninitialized padding never enters the arithmetic.
        residual = np.exp(alpha[self.sent_of_row, self.pos_of_row]
                          + beta[self.sent_of_row, self.pos_of_row]
                          - log_z[self.sent_of_row][:, None])
        residual[np.arange(self.n_rows), self.y_all] -= 1.0
        g_emit = np.asarray(self.x_all.T @ residual)

        g_trans = -self.obs_trans.copy()
        for t in range(n_max - 1):
            active = self.lengths > t + 1
            edge = np.exp(alpha[active, t][:, :, None] + transition_weights[None, :, :]
                          + (e[active, t + 1] + beta[active, t + 1])[:, None, :]
                          - log_z[active, None, None])
            g_trans += edge.sum(axis=0)
        return nll, g_emit, g_trans


def _split_weights(w: np.ndarray, n_features: int, n_labels: int) -> tuple[np.ndarray, np.ndarray]:
    emit = w[: n_features * n_labels].reshape(n_features, n_labels)
    trans = w[n_features * n_labels:].reshape(n_labels, n_labels)
    return emit, trans


class CrfTagger(BaseEstimator):
    """Sequence tagger with fit/predict over token sequences or a Corpus.

    Parameters mirror TrainConfig plus the feature window and a decoding
    switch.  Fitted attributes: scheme_, index_, emission_weights_ (F, L),
    transition_weights_ (L, L), objective_path_, n_iter_, converged_.
    """

    def __init__(self, l1: float = 0.1, l2: float = 0.1, max_iterations: int = 200,
                 tolerance: float = 1e-5, memory: int = 10, window: int = 2,
                 constrain_bio: bool = False):
        self.l1 = l1
        self.l2 = l2
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.memory = memory
        self.window = window
        self.constrain_bio = constrain_bio

    def _check_fitted(self):
        if not hasattr(self, "emission_weights_"):
            raise NotFittedError("this CrfTagger instance is not fitted yet")

    def fit(self, X, y=None):
        surfaces, tags = _as_training_data(X, y)
        scheme = DEFAULT_SCHEME
        featuresets = [extract_sentence_features(s, self.window) for s in surfaces]
        index = fit_index(fs for sent in featuresets for fs in sent)
        xs = [csr_from_featuresets(sent, index) for sent in featuresets]
        ys = [np.array([scheme.index(t) for t in sent], dtype=np.intp) for sent in tags]

        n_features, n_labels = index.n_features, len(scheme)
        packed = _PackedCorpus(xs, ys, n_labels)
        l2 = self.l2

        def objective(w: np.ndarray) -> tuple[float, np.ndarray]:
            emit, trans = _split_weights(w, n_features, n_labels)
            nll, g_emit, g_trans = packed.nll_and_gradient(emit, trans)
            value = nll + 0.5 * l2 * float(w @ w)
            grad = np.concatenate([g_emit.ravel(), g_trans.ravel()]) + l2 * w
            return value, grad

        result = minimize(objective, np.zeros(n_features * n_labels + n_labels * n_labels),
                          l1=self.l1, max_iterations=self.max_iterations,
                          tol=self.tolerance, memory=self.memory)
        emit, trans = _split_weights(result.x, n_features, n_labels)
        self.scheme_ = scheme
        self.index_ = index
        self.emission_weights_ = emit
        self.transition_weights_ = trans
        self.objective_path_ = result.objective_path
        self.n_iter_ = result.n_iterations
        self.converged_ = result.converged
        return self

    def predict(self, X) -> list[list[str]]:
        self._check_fitted()
        surfaces = _as_surfaces(X)
        check_token_sequences(surfaces)
        out = []
        for sent in surfaces:
            featuresets = extract_sentence_features(sent, self.window)
            labels, _ = viterbi_decode(self, featuresets, self.constrain_bio)
            out.append([str(l) for l in labels])
        return out


def _as_training_data(X, y) -> tuple[list[list[str]], list[list[str]]]:
    if isinstance(X, Corpus):
        if len(X) == 0:
            raise DataError("training corpus is empty")
        return X.surfaces(), X.tag_sequences()
    if y is None:
        raise DataError("y is required when X is not a Corpus")
    surfaces = [list(s) for s in X]
    tags = [list(t) for t in y]
    check_token_sequences(surfaces)
    check_aligned_tags(surfaces, tags)
    if not surfaces:
        raise DataError("training corpus is empty")
    return surfaces, tags


def _as_surfaces(X) -> list[list[str]]:
    if isinstance(X, Corpus):
        return X.surfaces()
    return [list(s) for s in X]


def build_lattice(model: CrfTagger, featuresets: list[FeatureSet]) -> Lattice:
    """Score a sentence's feature sets against a fitted model."""
    model._check_fitted()
    x = csr_from_featuresets(featuresets, model.index_)
    return lattice_from_matrix(x, model.emission_weights_, model.transition_weights_)


def nll_and_gradient(model: CrfTagger, featuresets: list[FeatureSet],
                     tags: list[str]) -> tuple[float, np.ndarray]:
    """Per-instance negative log-likelihood and its flat gradient.

    Regularization is excluded here; the trainer adds it separately.
    """
    model._check_fitted()
    x = csr_from_featuresets(featuresets, model.index_)
    y = np.array([model.scheme_.index(t) for t in tags], dtype=np.intp)
    nll, g_emit, g_trans = _sequence_nll_grad(
        x, y, model.emission_weights_, model.transition_weights_)
    return nll, np.concatenate([g_emit.ravel(), g_trans.ravel()])


def viterbi_decode(model: CrfTagger, featuresets: list[FeatureSet],
                   constrain_bio: bool = False) -> tuple[list[Label], float]:
    """Best tag sequence and its path score, optionally BIO-masked."""
    lattice = build_lattice(model, featuresets)
    start = None
    if constrain_bio:
        legal = _transition_legality(model.scheme_)
        lattice = Lattice(lattice.emissions, np.where(legal, lattice.transitions, MASK_SCORE))
        start = _start_penalty(model.scheme_)
    path, score = viterbi(lattice, start)
    return [model.scheme_.labels[i] for i in path], score


def train_crf(corpus: Corpus, config: TrainConfig = TrainConfig(), *, window: int = 2) -> CrfTagger:
    return CrfTagger(l1=config.l1, l2=config.l2, max_iterations=config.max_iterations,
                     tolerance=config.tolerance, memory=config.memory,
                     window=window).fit(corpus)
