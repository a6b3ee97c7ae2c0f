"""scikit-learn wrappers around the functional core.

Points go in as rows of an ``(n_samples, 4)`` array of chart coordinates and
curvature features come out; nothing is learned, so ``fit`` only validates
the configuration and records the feature count.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import forms
from .curvature import christoffel, riemann_tensor
from .metrics import builtin_model, load_metric_spec, metric_at
from .spectral import POLOMBO_LOWER, POLOMBO_UPPER

SPECTRUM_FEATURES = (
    "scalar",
    "lambda1_plus",
    "lambda2_plus",
    "lambda3_plus",
    "lambda1_minus",
    "lambda2_minus",
    "lambda3_minus",
    "ric0_frobenius",
)
PINCH_FEATURES = ("det_margin", "sum13_margin", "polombo_lower_margin", "polombo_upper_margin", "gursky_margin")


class CurvatureSpectrumTransformer(BaseEstimator, TransformerMixin):
    """Map chart points to (s, W+ eigenvalues, W- eigenvalues, |ric0 block|_F).

    Parameters
    ----------
    model : catalog model name, ignored when ``metric_path`` is given
    params : model parameters (empty for defaults)
    metric_path : path of a metric spec file
    orientation : +1 or -1, orientation of the chart
    backend : "hyperdual" or "finite_difference" (None keeps the metric default)
    """

    def __init__(self, model="fubini_study_cp2", params=(), metric_path=None, orientation=1, backend=None):
        self.model = model
        self.params = params
        self.metric_path = metric_path
        self.orientation = orientation
        self.backend = backend

    def _metric(self):
        if self.metric_path is not None:
            return load_metric_spec(self.metric_path)
        return builtin_model(self.model, tuple(self.params))

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if X.shape[1] != 4:
            raise ValueError(f"expected 4 coordinates per row, got {X.shape[1]}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.metric_ = self._metric()
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "metric_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} coordinates per row, got {X.shape[1]}")
        mv = metric_at(self.metric_, X, self.backend)
        frame = forms.orthonormal_frame(mv, self.orientation)
        blocks = forms.blocks_from_simple(forms.simple_operator(riemann_tensor(mv, christoffel(mv)), frame.vectors))
        out = np.empty((len(X), len(SPECTRUM_FEATURES)))
        out[:, 0] = 12.0 * blocks.scalar_term
        out[:, 1:4] = np.linalg.eigvalsh(blocks.wplus_block)
        out[:, 4:7] = np.linalg.eigvalsh(blocks.wminus_block)
        out[:, 7] = np.linalg.norm(blocks.ric0_block, axis=(-2, -1))
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(SPECTRUM_FEATURES, dtype=object)


class PinchMarginTransformer(BaseEstimator, TransformerMixin):
    """Pinching margins from rows (s, lambda1, lambda2, lambda3).

    A margin is >= 0 exactly when the corresponding predicate holds.  Rows
    from :class:`CurvatureSpectrumTransformer` can be fed through
    ``columns=(0, 1, 2, 3)`` (W+) or ``(0, 4, 5, 6)`` (W-).
    """

    def __init__(self, columns=(0, 1, 2, 3)):
        self.columns = columns

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        cols = tuple(self.columns)
        if len(cols) != 4 or max(cols) >= X.shape[1]:
            raise ValueError("columns must name four existing columns: s, lambda1, lambda2, lambda3")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        s, a, b, c = (X[:, k] for k in self.columns)
        lam = np.sort(np.stack([a, b, c], axis=1), axis=1)
        lam -= lam.mean(axis=1, keepdims=True)
        l1, l2, l3 = lam.T
        return np.stack(
            [
                l1 * l2 * l3,
                l1 + l3,
                l3 - POLOMBO_LOWER * l1,
                POLOMBO_UPPER * l1 - l3,
                (l1 + l3) - s / 12.0,
            ],
            axis=1,
        )

    def get_feature_names_out(self, input_features=None):
        return np.asarray(PINCH_FEATURES, dtype=object)
