"""scikit-learn style wrappers: a potentials transformer and a model-fit estimator."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DomainError
from .fit import fit_model, uhlmann_fidelity
from .potentials import potentials
from .states import ChannelParams, density

__all__ = ["NonclassicalityPotentials", "ChannelModelFit"]

_COLUMNS = ("cp", "np", "sp", "sp_prime", "bp", "bp_prime", "uwep")


class NonclassicalityPotentials(TransformerMixin, BaseEstimator):
    """Map VOPS parameters to the seven nonclassicality potentials.

    Rows of ``X`` are ``[p, |x|]`` or ``[p, Re x, Im x]``. ``fit`` is
    stateless apart from recording the input width; ``predict`` returns the
    regime label (``"I"`` .. ``"IV"``) of each row.
    """

    def __init__(self, q: float = 0.0, rsq: float = 0.5):
        self.q = q
        self.rsq = rsq

    def _params(self) -> ChannelParams:
        return ChannelParams.from_rsq(self.q, self.rsq)

    def _check(self, X, reset: bool):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] not in (2, 3):
            raise DomainError(f"X needs 2 or 3 columns ([p, |x|] or [p, Re x, Im x]), got {X.shape[1]}")
        if reset:
            self.n_features_in_ = X.shape[1]
        elif X.shape[1] != self.n_features_in_:
            raise DomainError(f"X has {X.shape[1]} columns, estimator was fitted with {self.n_features_in_}")
        x = X[:, 1] if X.shape[1] == 2 else X[:, 1] + 1j * X[:, 2]
        return X[:, 0], x

    def fit(self, X, y=None):
        self._params()
        self._check(X, reset=True)
        return self

    def _sets(self, X):
        check_is_fitted(self, "n_features_in_")
        params = self._params()
        p, x = self._check(X, reset=False)
        return [potentials(pi, xi, params) for pi, xi in zip(p, x)]

    def transform(self, X):
        sets = self._sets(X)
        return np.array([[getattr(s, c) for c in _COLUMNS] for s in sets], dtype=float).reshape(-1, len(_COLUMNS))

    def predict(self, X):
        return np.array([str(s.regime) for s in self._sets(X)], dtype=object)

    def get_feature_names_out(self, input_features=None):
        return np.array(_COLUMNS, dtype=object)


class ChannelModelFit(BaseEstimator):
    """Fidelity fit of the dephased beam-splitter model to a 4x4 density matrix."""

    def __init__(self, restarts: int = 16, seed: int = 0, fix_q: float | None = None):
        self.restarts = restarts
        self.seed = seed
        self.fix_q = fix_q

    def fit(self, X, y=None):
        res = fit_model(density(X), restarts=self.restarts, seed=self.seed, fix_q=self.fix_q)
        self.result_ = res
        self.p_, self.x_, self.q_, self.r_ = res.p, res.x, res.q, res.r
        self.fidelity_ = res.fidelity
        self.unidentifiable_ = res.unidentifiable
        return self

    def predict(self, X=None):
        """Fitted model density matrix (``X`` is ignored)."""
        check_is_fitted(self, "result_")
        return self.result_.model.rho.copy()

    def score(self, X, y=None):
        """Fidelity between ``X`` and the fitted model."""
        check_is_fitted(self, "result_")
        return uhlmann_fidelity(density(X), self.result_.model)
