"""Closed-form ROC curves for the noise radar and a coherent conventional radar.

Both are expressed through the first-order Marcum Q-function

    Q1(a, b) = integral_b^inf x exp(-(x^2 + a^2)/2) I0(a x) dx.

The noise-radar curve at correlation ``rho`` and ``N`` integrated samples is
``Q1(rho*sqrt(2N)/(1-rho^2), sqrt(-2 ln pfa)/(1-rho^2))``; it is an
approximation meant for ``N`` above roughly 100. The conventional curve with
perfect coherent integration is ``Q1(sqrt(2 N SNR), sqrt(-2 ln pfa))``.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import ive

from ._validation import check_count, check_probability_open, check_unit_interval
from .range_model import rho_at_range

_CHUNK = 64
_LARGE_N_HINT = 100


def _marcum_pair(a, b):
    """Return ``(Q1(a, b), 1 - Q1(a, b))``, each computed without cancellation.

    For ``a < b``: Q1 = exp(-(a-b)^2/2) * sum_{k>=0} (a/b)^k ive(k, ab).
    For ``a >= b``: 1 - Q1 = exp(-(a-b)^2/2) * sum_{k>=1} (b/a)^k ive(k, ab).
    The directly summed quantity is accurate relative to itself; the other one
    is obtained by subtraction from 1.
    """
    if b == 0.0:
        return 1.0, 0.0
    if a == 0.0:
        q = math.exp(-0.5 * b * b)
        return q, -math.expm1(-0.5 * b * b)
    prefactor = math.exp(-0.5 * (a - b) ** 2)
    if a < b:
        ratio, k = a / b, 0
    else:
        ratio, k = b / a, 1
    total = 0.0
    if prefactor > 0.0:
        x = a * b
        while True:
            ks = np.arange(k, k + _CHUNK, dtype=float)
            terms = np.power(ratio, ks) * ive(ks, x)
            total += float(np.sum(terms[::-1]))
            # terms decrease in k, so the last one bounds the rest of the chunk
            if terms[-1] <= 1e-17 * total or terms[-1] == 0.0:
                break
            k += _CHUNK
    direct = min(1.0, prefactor * total)
    if a < b:
        return direct, 1.0 - direct
    return 1.0 - direct, direct


def _checked_args(a, b):
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(b_arr))):
        raise ValueError("marcum_q1 arguments must be finite")
    if np.any(a_arr < 0.0) or np.any(b_arr < 0.0):
        raise ValueError("marcum_q1 arguments must be non-negative")
    return np.broadcast_arrays(a_arr, b_arr)


def _evaluate(a, b, which):
    a_arr, b_arr = _checked_args(a, b)
    out = np.empty(a_arr.shape)
    for idx in np.ndindex(a_arr.shape):
        out[idx] = _marcum_pair(float(a_arr[idx]), float(b_arr[idx]))[which]
    return float(out) if out.ndim == 0 else out


def marcum_q1(a, b):
    """First-order Marcum Q-function ``Q1(a, b)`` for ``a, b >= 0``.

    Sums the Bessel series ``exp(-(a^2+b^2)/2) sum_k (a/b)^k I_k(ab)`` when
    ``a < b`` and the complementary series for ``1 - Q1`` when ``a >= b``,
    using exponentially scaled Bessel functions so large arguments neither
    overflow nor lose the ``exp(-(a-b)^2/2)`` factor. Absolute error is
    around 1e-15. Broadcasts over array arguments.
    """
    return _evaluate(a, b, 0)


def marcum_q1_complement(a, b):
    """``1 - Q1(a, b)`` with full relative accuracy when it is tiny (``a >> b``)."""
    return _evaluate(a, b, 1)


def _warn_small_n(n):
    if n < _LARGE_N_HINT:
        warnings.warn(
            f"n = {n} is below ~{_LARGE_N_HINT}; the noise-radar ROC approximation may be inaccurate",
            RuntimeWarning,
            stacklevel=4,
        )


def noise_radar_pd(p_fa, rho, n):
    """Detection probability of the rho-estimate detector at false-alarm rate ``p_fa``."""
    return marcum_q1(*_noise_radar_args(p_fa, rho, n))


def noise_radar_pmiss(p_fa, rho, n):
    """Miss probability ``1 - p_d`` of the noise-radar detector, accurate when ``p_d`` rounds to 1."""
    return marcum_q1_complement(*_noise_radar_args(p_fa, rho, n))


def _noise_radar_args(p_fa, rho, n):
    p_fa = check_probability_open(p_fa)
    rho = float(rho)
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho!r}")
    n = check_count(n, "n")
    _warn_small_n(n)
    shrink = 1.0 - rho * rho
    return rho * math.sqrt(2.0 * n) / shrink, np.sqrt(-2.0 * np.log(p_fa)) / shrink


def conventional_pd(p_fa, snr, n):
    """Detection probability of a coherently integrating conventional radar."""
    p_fa = check_probability_open(p_fa)
    snr = float(snr)
    if not math.isfinite(snr) or snr < 0.0:
        raise ValueError(f"snr must be finite and non-negative, got {snr!r}")
    n = check_count(n, "n")
    return marcum_q1(math.sqrt(2.0 * n * snr), np.sqrt(-2.0 * np.log(p_fa)))


class RocModel(enum.Enum):
    NOISE_RADAR = "noise"
    CONVENTIONAL = "conventional"
    EMPIRICAL = "empirical"


def default_pfa_grid():
    """50 log-spaced points on [1e-4, 0.5] followed by linear points up to 1 - 1e-3."""
    log_part = np.logspace(-4.0, math.log10(0.5), 50)
    lin_part = np.linspace(0.5, 1.0 - 1e-3, 26)[1:]
    return np.concatenate([log_part, lin_part])


def parse_pfa_grid(spec):
    """Parse ``"min:max:steps:log|lin"`` into a grid."""
    parts = spec.split(":")
    if len(parts) != 4 or parts[3] not in ("log", "lin"):
        raise ValueError(f"grid spec must look like min:max:steps:log|lin, got {spec!r}")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if not 0.0 < lo < hi < 1.0 or steps < 2:
        raise ValueError("grid needs 0 < min < max < 1 and steps >= 2")
    if parts[3] == "log":
        return np.logspace(math.log10(lo), math.log10(hi), steps)
    return np.linspace(lo, hi, steps)


def _check_grid(grid):
    grid = check_probability_open(grid, "p_fa grid")
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("p_fa grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("p_fa grid must be strictly increasing")
    return grid


@dataclass(frozen=True, eq=False)
class RocCurve:
    p_fa: np.ndarray
    p_d: np.ndarray
    model: RocModel
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p_fa = np.asarray(self.p_fa, dtype=float)
        p_d = np.asarray(self.p_d, dtype=float)
        if p_fa.shape != p_d.shape or p_fa.ndim != 1:
            raise ValueError("p_fa and p_d must be 1-D arrays of equal length")
        if np.any((p_d < 0.0) | (p_d > 1.0)) or np.any((p_fa < 0.0) | (p_fa > 1.0)):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "p_fa", p_fa)
        object.__setattr__(self, "p_d", p_d)
        object.__setattr__(self, "model", RocModel(self.model))

    @property
    def points(self):
        return list(zip(self.p_fa.tolist(), self.p_d.tolist()))

    def to_dict(self):
        return {
            "model": self.model.value,
            "params": self.params,
            "p_fa": self.p_fa.tolist(),
            "p_d": self.p_d.tolist(),
        }


def roc_curve(model, strength, n, p_fa_grid=None):
    """Evaluate a theoretical ROC curve.

    ``strength`` is rho for the noise-radar model and SNR (linear) for the
    conventional model.
    """
    model = RocModel(model)
    grid = _check_grid(default_pfa_grid() if p_fa_grid is None else p_fa_grid)
    if model is RocModel.NOISE_RADAR:
        p_d = noise_radar_pd(grid, strength, n)
        params = {"rho": float(strength), "n": int(n)}
    elif model is RocModel.CONVENTIONAL:
        p_d = conventional_pd(grid, strength, n)
        params = {"snr": float(strength), "n": int(n)}
    else:
        raise ValueError("empirical curves come from the Monte Carlo harness")
    return RocCurve(grid, np.atleast_1d(p_d), model, params)


def roc_vs_range(profile, ranges, n, p_fa_grid=None):
    """Noise-radar ROC curves at each range, with rho taken from the range law."""
    curves = []
    for r in np.atleast_1d(np.asarray(ranges, dtype=float)):
        rho = rho_at_range(profile, r)
        curve = roc_curve(RocModel.NOISE_RADAR, rho, n, p_fa_grid)
        curve.params.update(range_m=float(r), rho0=profile.rho0, r_c=profile.r_c)
        curves.append(curve)
    return curves


def rho_for_pd(p_d, p_fa, n):
    """Correlation giving noise-radar detection probability ``p_d`` at ``p_fa`` (bisection)."""
    check_unit_interval(p_d, "p_d")
    if not float(p_fa) < p_d < 1.0:
        raise ValueError("need p_fa < p_d < 1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return brentq(lambda r: noise_radar_pd(p_fa, r, n) - p_d, 0.0, 1.0 - 1e-9, xtol=1e-14)
