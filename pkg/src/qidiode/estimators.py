"""scikit-learn compatible wrappers.

``fit`` precomputes the mode set or the spectral decomposition, ``transform``
evaluates the OTOC at a column of times, so the models can sit in pipelines
and be cloned or grid-searched through ``get_params``/``set_params``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .model import ModelParams, build_mode_set, suppression_rate
from .oracle import build_chain_hamiltonian, otoc_exact, spectral_decompose
from .otoc import lattice_propagator_otoc, otoc_series, rectification_coefficient


def _times(X) -> np.ndarray:
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single column of times, got {X.shape[1]} columns")
    return X[:, 0]


class _ModelMixin:
    def _model_params(self, n=None) -> ModelParams:
        return ModelParams(j1=self.j1, j2=self.j2, d=self.d, a=self.a, a0=self.a0,
                           n=self.n if n is None else n, zeta_decay=self.zeta_decay)


class DiodeOTOC(_ModelMixin, TransformerMixin, BaseEstimator):
    """Left and right OTOCs over the Bragg mode set.

    ``transform`` maps an (n_samples, 1) array of times to columns
    (c_left, c_right).
    """

    def __init__(self, j1=1.0, j2=0.5, d=1.0, a=1e-3, a0=1.0, n=1000, zeta_decay=5.0,
                 zeta=None, r_sites=10):
        self.j1 = j1
        self.j2 = j2
        self.d = d
        self.a = a
        self.a0 = a0
        self.n = n
        self.zeta_decay = zeta_decay
        self.zeta = zeta
        self.r_sites = r_sites

    def fit(self, X=None, y=None):
        self.params_ = self._model_params()
        self.modes_ = build_mode_set(self.params_)
        self.zeta_ = suppression_rate(self.params_, self.zeta)
        if self.r_sites < 0:
            raise ValueError("r_sites must be non-negative")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        s = otoc_series(self.params_, self.r_sites * self.params_.a, _times(X), self.zeta)
        return np.column_stack([s.c_left, s.c_right])

    def get_feature_names_out(self, input_features=None):
        return np.array(["c_left", "c_right"], dtype=object)


class LatticeOTOC(_ModelMixin, TransformerMixin, BaseEstimator):
    """OTOC between two sites of the periodic chain.

    ``method='exact'`` evolves the dense one-magnon Hamiltonian,
    ``method='propagator'`` uses the plane-wave closed form.
    """

    def __init__(self, j1=1.0, j2=0.5, d=1.0, n_sites=16, source=0, displacement=3,
                 method="exact"):
        self.j1 = j1
        self.j2 = j2
        self.d = d
        self.n_sites = n_sites
        self.source = source
        self.displacement = displacement
        self.method = method

    # the chain has no crystal period or decay scale; fixed placeholders
    a, a0, zeta_decay = 1.0, 1.0, 5.0

    def fit(self, X=None, y=None):
        if self.method not in ("exact", "propagator"):
            raise ValueError(f"method must be 'exact' or 'propagator', got {self.method!r}")
        self.params_ = self._model_params(n=self.n_sites)
        self.probe_ = (self.source + self.displacement) % self.n_sites
        if self.method == "exact":
            dec = spectral_decompose(build_chain_hamiltonian(self.params_))
            self.eigenvalues_ = dec.eigenvalues
            self.decomposition_ = dec
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        t = _times(X)
        if self.method == "exact":
            c = otoc_exact(self.decomposition_, self.source, self.probe_, t)
        else:
            c = lattice_propagator_otoc(self.params_, self.displacement, t).c
        return np.asarray(c)[:, None]

    def get_feature_names_out(self, input_features=None):
        return np.array(["c"], dtype=object)


class RectificationCurve(_ModelMixin, RegressorMixin, BaseEstimator):
    """Maps DMI strengths (n_samples, 1) to the integrated rectification coefficient."""

    def __init__(self, j1=1.0, j2=0.5, a=1e-3, a0=1.0, n=1000, zeta_decay=5.0, r_sites=10,
                 t_truncation=None, dt=None):
        self.j1 = j1
        self.j2 = j2
        self.a = a
        self.a0 = a0
        self.n = n
        self.zeta_decay = zeta_decay
        self.r_sites = r_sites
        self.t_truncation = t_truncation
        self.dt = dt

    d = 0.0

    def fit(self, X=None, y=None):
        self.params_ = self._model_params()
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        d_values = _times(X)
        self.results_ = [
            rectification_coefficient(self.params_.with_(d=float(d)), self.r_sites * self.params_.a,
                                      t_truncation=self.t_truncation, dt=self.dt)
            for d in d_values
        ]
        return np.array([r.r_coeff for r in self.results_])
