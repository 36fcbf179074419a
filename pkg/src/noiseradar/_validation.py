"""Input validation helpers shared by the estimators and the functional API."""

import math
import numbers

import numpy as np


class DegenerateInputError(ValueError):
    """Raised when the data cannot support an estimate (e.g. zero channel power)."""


def check_positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be a finite non-negative number, got {value!r}")
    return value


def check_unit_interval(value, name, *, closed_right=True):
    """Check ``0 <= value <= 1`` (or ``< 1`` when ``closed_right`` is False)."""
    value = float(value)
    upper_ok = value <= 1.0 if closed_right else value < 1.0
    if not math.isfinite(value) or value < 0.0 or not upper_ok:
        bound = "]" if closed_right else ")"
        raise ValueError(f"{name} must lie in [0, 1{bound}, got {value!r}")
    return value


def check_probability_open(p, name="p_fa"):
    """Validate probabilities strictly inside (0, 1); accepts scalars or arrays."""
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError(f"{name} must lie strictly inside (0, 1)")
    return arr


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_samples(X, *, min_rows=1):
    """Validate an ``(n, 4)`` array of real voltages ordered I1, Q1, I2, Q2."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 4:
        raise ValueError(f"expected an (n, 4) array of voltages, got shape {X.shape}")
    if X.shape[0] < min_rows:
        raise ValueError(f"need at least {min_rows} samples, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("voltage samples contain non-finite entries")
    return X


def check_covariance(S, *, rtol=1e-9):
    """Validate a 4x4 (or stacked ``(..., 4, 4)``) symmetric finite matrix."""
    S = np.asarray(S, dtype=float)
    if S.shape[-2:] != (4, 4):
        raise ValueError(f"expected 4x4 covariance matrices, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("covariance matrix contains non-finite entries")
    asym = np.abs(S - np.swapaxes(S, -1, -2)).max(axis=(-1, -2))
    scale = np.abs(S).max(axis=(-1, -2))
    if np.any(asym > rtol * np.maximum(scale, np.finfo(float).tiny)):
        raise ValueError("covariance matrix is not symmetric within tolerance")
    return S
