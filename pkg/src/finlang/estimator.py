"""A scikit-learn style classifier over schemes: FINITE or INFINITE."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .engine import Verdict, decide_finiteness
from .validation import check_positive, check_terms

LABELS = ("FINITE", "INFINITE")


class FinitenessClassifier(ClassifierMixin, BaseEstimator):
    """Decides finiteness of the tree language of each input.

    Inputs are λY-terms, Scheme objects or scheme text.  Nothing is learned;
    ``fit`` only checks its inputs, so that the estimator composes with
    cross-validation and pipelines.
    """

    def __init__(self, budget=None, threads=1):
        self.budget = budget
        self.threads = threads

    def _check_params(self):
        check_positive("budget", self.budget, allow_none=True)
        check_positive("threads", self.threads)

    def fit(self, X, y=None):
        self._check_params()
        terms = check_terms(X)
        if y is not None:
            y = np.asarray(y)
            if len(y) != len(terms):
                raise ValueError(f"X has {len(terms)} samples but y has {len(y)}")
            unknown = set(y.tolist()) - set(LABELS)
            if unknown:
                raise ValueError(f"unknown labels {sorted(unknown)}; expected {LABELS}")
        self.classes_ = np.array(LABELS)
        self.n_samples_seen_ = len(terms)
        return self

    def decide(self, X) -> list[Verdict]:
        check_is_fitted(self, "classes_")
        self._check_params()
        return [decide_finiteness(t, self.budget, self.threads) for t in check_terms(X)]

    def predict(self, X):
        self.verdicts_ = self.decide(X)
        return np.array([v.kind for v in self.verdicts_])

    def predict_proba(self, X):
        # the procedure is exact, so probabilities are 0 or 1
        pred = self.predict(X)
        return np.stack([pred == c for c in self.classes_], axis=1).astype(float)
