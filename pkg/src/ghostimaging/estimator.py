"""scikit-learn compatible front end.

:class:`GhostImager` treats each row of ``X`` as a flattened scene.  ``fit``
builds the pattern set for the scene size, ``transform`` simulates the bucket
readings, ``inverse_transform`` performs the correlation reconstruction and
``predict`` runs the whole pipeline down to normalized images, so the imager
drops into a :class:`sklearn.pipeline.Pipeline` or a grid search.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted, validate_data

from . import imaging
from .hadamard import is_valid_order
from .patterns import KINDS, PSEUDO_HADAMARD, SPECIAL_HADAMARD, make_patterns


def _next_order_above(n: int) -> int:
    k = n + 1
    while not is_valid_order(k):
        k += 1
    return k


class GhostImager(TransformerMixin, BaseEstimator):
    """Computational ghost imaging simulator.

    Parameters
    ----------
    pattern_kind : {"special_hadamard", "pseudo_hadamard", "random_binary"}
    n_measurements : int or None
        Number of patterns. ``None`` picks the smallest admissible order above
        the pixel count for Special-Hadamard, the pixel count otherwise.
    sigma : float
        Detector noise relative to the mean bucket reading.
    exclude_first : bool or None
        Drop pixel 0 before normalizing; ``None`` does so for pseudo-Hadamard
        patterns only.
    random_state : int, RandomState instance or None
        An int ``s`` seeds patterns with ``s`` and the noise on sample ``i``
        with ``[s, 1 + i]``, matching the experiment runner.

    Attributes
    ----------
    patterns_ : PatternMatrix
    n_measurements_ : int
    seed_ : int
    n_features_in_ : int
    """

    def __init__(self, pattern_kind=SPECIAL_HADAMARD, n_measurements=None, sigma=0.0,
                 exclude_first=None, random_state=None):
        self.pattern_kind = pattern_kind
        self.n_measurements = n_measurements
        self.sigma = sigma
        self.exclude_first = exclude_first
        self.random_state = random_state

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64)
        if self.pattern_kind not in KINDS:
            raise ValueError(f"pattern_kind must be one of {KINDS}, got {self.pattern_kind!r}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        n = X.shape[1]
        m = self.n_measurements
        if m is None:
            m = _next_order_above(n) if self.pattern_kind == SPECIAL_HADAMARD else n
        if isinstance(self.random_state, (int, np.integer)):
            self.seed_ = int(self.random_state)
        else:
            self.seed_ = int(check_random_state(self.random_state).randint(2**31 - 1))
        self.patterns_ = make_patterns(self.pattern_kind, n, int(m), self.seed_)
        self.n_measurements_ = self.patterns_.cols
        return self

    def _excludes_first(self):
        if self.exclude_first is None:
            return self.pattern_kind == PSEUDO_HADAMARD
        return bool(self.exclude_first)

    def transform(self, X):
        """Bucket readings, shape ``(n_samples, n_measurements_)``."""
        check_is_fitted(self)
        X = validate_data(self, X, dtype=np.float64, reset=False)
        out = np.empty((X.shape[0], self.n_measurements_))
        for i, t in enumerate(X):
            b = imaging.bucket_signal(self.patterns_, t)
            out[i] = imaging.add_noise(b, self.sigma, seed=[self.seed_, 1 + i]).values
        return out

    def inverse_transform(self, B):
        """Raw correlation images, shape ``(n_samples, n_features_in_)``."""
        check_is_fitted(self)
        B = np.atleast_2d(np.asarray(B, dtype=np.float64))
        if B.shape[1] != self.n_measurements_:
            raise ValueError(
                f"expected {self.n_measurements_} bucket readings per sample, got {B.shape[1]}"
            )
        return np.vstack([imaging.reconstruct(self.patterns_, b).raw for b in B])

    def predict(self, X):
        """Normalized reconstructions; one column short when pixel 0 is excluded."""
        G = self.inverse_transform(self.transform(X))
        return np.vstack([imaging.normalize(g, self._excludes_first())[0] for g in G])

    def score(self, X, y=None):
        """Negative mean MSE between normalized reconstructions and ``X``."""
        X = np.asarray(X, dtype=np.float64)
        g = self.predict(X)
        excl = self._excludes_first()
        return -float(np.mean([imaging.mse(gi, xi, excl) for gi, xi in zip(g, X)]))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self)
        return np.array([f"bucket{i}" for i in range(self.n_measurements_)], dtype=object)
