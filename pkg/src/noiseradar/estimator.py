"""Least-squares fit of the structured covariance to a sample covariance.

The Frobenius objective splits into independent pieces. The diagonal blocks
fix the powers (mean of each block's diagonal), and the cross block fixes the
amplitude ``k = rho*sqrt(p1*p2)`` and phase from the projection of the
averaged cross block onto ``C(phi)``:

    rotation:    c = (M11 + M22)/2, s = (M12 - M21)/2
    reflection:  c = (M11 - M22)/2, s = (M12 + M21)/2
    k = hypot(c, s), phi = atan2(s, c) mod 2*pi

``rho`` is ``k / sqrt(p1*p2)`` clipped to 1. Without clipping this is the
global minimizer. When clipping triggers, the powers are kept at their
block estimates and ``clipped`` is set, so the result can be slightly
suboptimal jointly, although it is still optimal for those powers.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    DegenerateInputError,
    check_covariance,
    check_samples,
    check_unit_interval,
)
from .model import TWO_PI, CouplingKind, QtmsCovariance, build_covariance
from .synthesis import SampleBlock, sample_covariance


@dataclass(frozen=True)
class FitResult:
    p1: float
    p2: float
    rho: float
    phi: float
    residual: float
    clipped: bool

    def params(self, coupling=CouplingKind.ROTATION):
        return QtmsCovariance(self.p1, self.p2, self.rho, self.phi, coupling)

    def to_dict(self):
        return {
            "p1": self.p1,
            "p2": self.p2,
            "rho": self.rho,
            "phi": self.phi,
            "residual": self.residual,
            "clipped": self.clipped,
        }


def _model_matrices(p1, p2, rho, phi, coupling):
    """Stacked model matrices for arrays of parameters."""
    k = rho * np.sqrt(p1 * p2)
    c, s = k * np.cos(phi), k * np.sin(phi)
    out = np.zeros(np.shape(p1) + (4, 4))
    out[..., 0, 0] = out[..., 1, 1] = p1
    out[..., 2, 2] = out[..., 3, 3] = p2
    out[..., 0, 2] = c
    out[..., 0, 3] = s
    if coupling is CouplingKind.ROTATION:
        out[..., 1, 2] = -s
        out[..., 1, 3] = c
    else:
        out[..., 1, 2] = s
        out[..., 1, 3] = -c
    out[..., 2:4, 0:2] = np.swapaxes(out[..., 0:2, 2:4], -1, -2)
    return out


def fit_many(S, coupling=CouplingKind.ROTATION, *, check=True):
    """Vectorized fit over a stack ``(..., 4, 4)`` of sample covariances.

    Returns a dict of arrays with keys ``p1, p2, rho, phi, residual, clipped``.
    """
    coupling = CouplingKind.coerce(coupling)
    S = check_covariance(S) if check else np.asarray(S, dtype=float)
    p1 = (S[..., 0, 0] + S[..., 1, 1]) / 2.0
    p2 = (S[..., 2, 2] + S[..., 3, 3]) / 2.0
    if np.any(p1 <= 0.0) or np.any(p2 <= 0.0):
        raise DegenerateInputError("estimated channel power is zero; rho is undefined")
    M = (S[..., 0:2, 2:4] + np.swapaxes(S[..., 2:4, 0:2], -1, -2)) / 2.0
    if coupling is CouplingKind.ROTATION:
        c = (M[..., 0, 0] + M[..., 1, 1]) / 2.0
        s = (M[..., 0, 1] - M[..., 1, 0]) / 2.0
    else:
        c = (M[..., 0, 0] - M[..., 1, 1]) / 2.0
        s = (M[..., 0, 1] + M[..., 1, 0]) / 2.0
    k = np.hypot(c, s)
    phi = np.where(k > 0.0, np.mod(np.arctan2(s, c), TWO_PI), 0.0)
    phi = np.where(phi >= TWO_PI, 0.0, phi)
    scale = np.sqrt(p1 * p2)
    clipped = k > scale
    rho = np.where(clipped, 1.0, k / scale)
    resid = S - _model_matrices(p1, p2, rho, phi, coupling)
    residual = np.sqrt(np.sum(resid * resid, axis=(-1, -2)))
    return {"p1": p1, "p2": p2, "rho": rho, "phi": phi, "residual": residual, "clipped": clipped}


def fit(s_hat, coupling=CouplingKind.ROTATION):
    """Fit ``(p1, p2, rho, phi)`` to a single 4x4 sample covariance."""
    s_hat = np.asarray(s_hat, dtype=float)
    if s_hat.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {s_hat.shape}")
    r = fit_many(s_hat, coupling)
    return FitResult(
        p1=float(r["p1"]),
        p2=float(r["p2"]),
        rho=float(r["rho"]),
        phi=float(r["phi"]),
        residual=float(r["residual"]),
        clipped=bool(r["clipped"]),
    )


def objective(s_hat, p1, p2, rho, phi, coupling=CouplingKind.ROTATION):
    """Frobenius distance between the model matrix and ``s_hat`` (broadcasts over parameters)."""
    coupling = CouplingKind.coerce(coupling)
    p1, p2, rho, phi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (p1, p2, rho, phi)))
    diff = _model_matrices(p1, p2, rho, phi, coupling) - np.asarray(s_hat, dtype=float)
    return np.sqrt(np.sum(diff * diff, axis=(-1, -2)))


def _check_not_constant(X):
    if np.any(np.ptp(X, axis=-2) == 0.0):
        raise DegenerateInputError("a voltage channel has zero variance")


def estimate_rho(X, coupling=CouplingKind.ROTATION, *, demean=False):
    """Estimated rho for a single ``(n, 4)`` record or a stack ``(m, n, 4)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = check_samples(X, min_rows=2)
        _check_not_constant(X)
        return fit(sample_covariance(X, demean=demean), coupling).rho
    if X.ndim != 3 or X.shape[-1] != 4 or X.shape[1] < 2:
        raise ValueError(f"expected (m, n, 4) voltage records, got shape {X.shape}")
    _check_not_constant(X)
    return fit_many(batch_sample_covariance(X, demean=demean), coupling, check=False)["rho"]


def batch_sample_covariance(X, *, demean=False):
    """Zero-mean-form sample covariances for a stack of records ``(m, n, 4)``."""
    X = np.asarray(X, dtype=float)
    if demean:
        X = X - X.mean(axis=1, keepdims=True)
    S = np.matmul(np.swapaxes(X, -1, -2), X) / X.shape[1]
    return (S + np.swapaxes(S, -1, -2)) / 2.0


def detect(block, threshold, coupling=CouplingKind.ROTATION, *, demean=False):
    """Declare a detection when the estimated rho strictly exceeds ``threshold``.

    Returns ``{"detection": bool, "rho_hat": float}``.
    """
    threshold = check_unit_interval(threshold, "threshold")
    X = block.channels if isinstance(block, SampleBlock) else block
    rho_hat = estimate_rho(X, coupling, demean=demean)
    return {"detection": bool(rho_hat > threshold), "rho_hat": float(rho_hat)}


def _as_records(X):
    if isinstance(X, SampleBlock):
        return X.channels[np.newaxis]
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], SampleBlock):
        if len({b.n for b in X}) != 1:
            raise ValueError("all sample blocks must have the same length")
        return np.stack([b.channels for b in X])
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[np.newaxis]
    if X.ndim != 3 or X.shape[-1] != 4:
        raise ValueError(f"expected (m, n, 4) voltage records, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("voltage records contain non-finite entries")
    return X


class CorrelationEstimator(BaseEstimator):
    """Fit the structured covariance to one ``(n, 4)`` voltage record.

    Parameters
    ----------
    coupling : {"rotation", "reflection"}
        Cross-block form assumed by the fit.
    demean : bool
        Subtract channel means before forming the sample covariance.

    Attributes
    ----------
    p1_, p2_, rho_, phi_ : float
        Fitted parameters.
    residual_ : float
        Frobenius norm of the fit residual.
    clipped_ : bool
        True when the unconstrained rho exceeded 1.
    covariance_ : ndarray of shape (4, 4)
        Sample covariance the fit was computed from.
    """

    def __init__(self, coupling="rotation", demean=False):
        self.coupling = coupling
        self.demean = demean

    def fit(self, X, y=None):
        X = check_samples(X, min_rows=2)
        _check_not_constant(X)
        self.covariance_ = sample_covariance(X, demean=self.demean)
        self.result_ = fit(self.covariance_, CouplingKind.coerce(self.coupling))
        self.p1_ = self.result_.p1
        self.p2_ = self.result_.p2
        self.rho_ = self.result_.rho
        self.phi_ = self.result_.phi
        self.residual_ = self.result_.residual
        self.clipped_ = self.result_.clipped
        self.n_samples_ = X.shape[0]
        return self

    def model_covariance(self):
        check_is_fitted(self, "result_")
        return build_covariance(self.result_.params(CouplingKind.coerce(self.coupling)))


class NoiseRadarDetector(ClassifierMixin, BaseEstimator):
    """Threshold detector on the estimated correlation coefficient.

    Each sample of ``X`` is a whole voltage record, so ``X`` has shape
    ``(m, n, 4)``. ``decision_function`` returns the estimated rho per record
    and ``predict`` returns 1 (target present) when it exceeds ``threshold_``.

    If ``p_fa`` is given, ``fit`` calibrates ``threshold_`` as the empirical
    ``1 - p_fa`` quantile (``method="higher"``) of the estimated rho over the
    target-absent records (``y == 0``, or all records when ``y`` is None).
    Otherwise ``threshold_`` is simply ``threshold``.
    """

    def __init__(self, threshold=None, p_fa=None, coupling="rotation", demean=False):
        self.threshold = threshold
        self.p_fa = p_fa
        self.coupling = coupling
        self.demean = demean

    def fit(self, X, y=None):
        if self.p_fa is None:
            if self.threshold is None:
                raise ValueError("set either threshold or p_fa")
            self.threshold_ = check_unit_interval(self.threshold, "threshold")
        else:
            if self.threshold is not None:
                raise ValueError("threshold and p_fa are mutually exclusive")
            p_fa = float(self.p_fa)
            if not 0.0 < p_fa < 1.0:
                raise ValueError("p_fa must lie in (0, 1)")
            records = _as_records(X)
            if y is not None:
                y = np.asarray(y)
                if y.shape != (records.shape[0],):
                    raise ValueError("y must have one label per record")
                records = records[y == 0]
                if records.shape[0] == 0:
                    raise ValueError("calibration needs at least one target-absent record")
            h0 = self._rho_hat(records)
            self.threshold_ = float(np.quantile(h0, 1.0 - p_fa, method="higher"))
        self.classes_ = np.array([0, 1])
        return self

    def _rho_hat(self, records):
        return np.atleast_1d(estimate_rho(records, CouplingKind.coerce(self.coupling), demean=self.demean))

    def decision_function(self, X):
        check_is_fitted(self, "threshold_")
        return self._rho_hat(_as_records(X))

    def predict(self, X):
        return (self.decision_function(X) > self.threshold_).astype(int)
