"""Linear one-vs-rest SVM token classifier.

Each token is classified independently into one of the BIO labels.  Per
label, a binary L1-loss SVM (hinge loss, primal (1/2)||w||^2 + C * sum of
hinges) is solved in the dual by coordinate descent over the training tokens,
visited in a seed-fixed shuffled order each epoch, so training is fully
deterministic.  The bias is
an augmented all-ones column appended after max-abs scaling.  Prediction is
the argmax of the label scores with ties broken toward the lowest label
index; no sequence constraint is applied, so raw output may violate BIO
unless repair is requested.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .corpus import Corpus, DEFAULT_SCHEME, corpus_from_sequences, repair_bio, shuffled_indices
from .crf import _as_surfaces, _as_training_data
from .features import MaxAbsScaler, csr_from_featuresets, extract_sentence_features, fit_index
from .validation import check_token_sequences

_PG_EPS = 1e-12


def _dual_coordinate_descent(x: sp.csr_matrix, targets: np.ndarray, c: float,
                             tolerance: float, max_epochs: int) -> tuple[np.ndarray, list[list[float]]]:
    """Solve all one-vs-rest binary duals in lockstep row sweeps.

    targets is (n, L) of +/-1.  Returns the (L, cols) weight matrix and the
    per-label dual objective after each epoch (recorded while the label is
    still active; single-coordinate exact minimization makes it
    non-increasing).  A label stops updating once the largest projected
    gradient magnitude seen in a full sweep falls below tolerance.

    Each epoch visits rows in a splitmix64-seeded Fisher-Yates order (seed =
    epoch number), so training stays fully deterministic while avoiding the
    slow zig-zag that strictly sequential sweeps exhibit on corpora with many
    near-duplicate rows.
    """
    n_rows, n_cols = x.shape
    n_labels = targets.shape[1]
    weights = np.zeros((n_cols, n_labels))
    alpha = np.zeros((n_rows, n_labels))
    qii = np.asarray(x.multiply(x).sum(axis=1)).ravel()
    indptr, indices, data = x.indptr, x.indices, x.data
    row_cols = [indices[indptr[i]:indptr[i + 1]] for i in range(n_rows)]
    row_vals = [data[indptr[i]:indptr[i + 1]] for i in range(n_rows)]
    active = np.ones(n_labels, dtype=bool)
    inactive = ~active
    objective_paths: list[list[float]] = [[] for _ in range(n_labels)]

    for epoch in range(max_epochs):
        max_pg = np.zeros(n_labels)
        for i in shuffled_indices(n_rows, seed=epoch):
            cols = row_cols[i]
            vals = row_vals[i]
            y_i = targets[i]
            grad = y_i * (vals @ weights[cols]) - 1.0
            a_i = alpha[i]
            pg = grad.copy()
            pg[(a_i <= 0.0) & (grad > 0.0)] = 0.0
            pg[(a_i >= c) & (grad < 0.0)] = 0.0
            pg[inactive] = 0.0
            pg_abs = np.abs(pg)
            np.maximum(max_pg, pg_abs, out=max_pg)
            moving = pg_abs > _PG_EPS
            if not moving.any():
                continue
            a_new = np.where(moving, np.minimum(c, np.maximum(0.0, a_i - grad / qii[i])), a_i)
            delta = (a_new - a_i) * y_i
            weights[cols] += vals[:, None] * delta[None, :]
            alpha[i] = a_new
        for label in np.flatnonzero(active):
            objective_paths[label].append(
                0.5 * float(weights[:, label] @ weights[:, label]) - float(alpha[:, label].sum()))
        active &= max_pg >= tolerance
        inactive = ~active
        if not active.any():
            break
    return weights.T.copy(), objective_paths


class LinearSvmTagger(BaseEstimator):
    """Token tagger: one linear classifier per BIO label, argmax decision.

    Fitted attributes: scheme_, index_, scaler_, weights_ (L, F), biases_
    (L,), dual_objective_paths_, n_epochs_.
    """

    def __init__(self, C: float = 1.0, tolerance: float = 1e-4, max_epochs: int = 1000,
                 window: int = 2, repair_bio: bool = False):
        self.C = C
        self.tolerance = tolerance
        self.max_epochs = max_epochs
        self.window = window
        self.repair_bio = repair_bio

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise NotFittedError("this LinearSvmTagger instance is not fitted yet")

    def fit(self, X, y=None):
        if self.C <= 0:
            raise ValueError("C must be > 0")
        surfaces, tags = _as_training_data(X, y)
        scheme = DEFAULT_SCHEME
        featuresets = [fs for sent in surfaces
                       for fs in extract_sentence_features(sent, self.window)]
        index = fit_index(featuresets)
        x = csr_from_featuresets(featuresets, index)
        scaler = MaxAbsScaler().fit_matrix(x)
        x = scaler.transform_matrix(x)
        x = sp.hstack([x, np.ones((x.shape[0], 1))], format="csr")

        y_idx = np.array([scheme.index(t) for sent in tags for t in sent])
        targets = np.full((x.shape[0], len(scheme)), -1.0)
        targets[np.arange(len(y_idx)), y_idx] = 1.0

        augmented, paths = _dual_coordinate_descent(
            x, targets, self.C, self.tolerance, self.max_epochs)
        self.scheme_ = scheme
        self.index_ = index
        self.scaler_ = scaler
        self.weights_ = augmented[:, :-1]
        self.biases_ = augmented[:, -1]
        self.dual_objective_paths_ = paths
        self.n_epochs_ = max(len(p) for p in paths)
        return self

    def decision_scores(self, sentence: list[str]) -> np.ndarray:
        """Per-token raw classifier scores, shape (len(sentence), L)."""
        self._check_fitted()
        featuresets = extract_sentence_features(sentence, self.window)
        x = self.scaler_.transform_matrix(csr_from_featuresets(featuresets, self.index_))
        return np.asarray(x @ self.weights_.T) + self.biases_

    def predict(self, X) -> list[list[str]]:
        self._check_fitted()
        surfaces = _as_surfaces(X)
        check_token_sequences(surfaces)
        out = []
        for sent in surfaces:
            picks = np.argmax(self.decision_scores(sent), axis=1)
            out.append([self.scheme_.label_strings[j] for j in picks])
        if self.repair_bio:
            repaired = repair_bio(corpus_from_sequences(surfaces, out, self.scheme_))
            out = repaired.tag_sequences()
        return out


def train_svm(corpus: Corpus, C: float = 1.0, tolerance: float = 1e-4,
              max_epochs: int = 1000, *, window: int = 2,
              repair: bool = False) -> LinearSvmTagger:
    return LinearSvmTagger(C=C, tolerance=tolerance, max_epochs=max_epochs,
                           window=window, repair_bio=repair).fit(corpus)


def predict_tags(model: LinearSvmTagger, sentence: list[str]) -> list[str]:
    return model.predict([sentence])[0]
