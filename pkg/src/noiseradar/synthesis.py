"""Seeded generation of four-channel Gaussian voltage records.

Random stream
-------------
Standard normals come from NumPy's ``default_rng(seed)`` (PCG64 seeded through
``SeedSequence``), drawn as one ``(n, 4)`` call: row-major, channel-minor, so
row ``k`` holds ``(I1, Q1, I2, Q2)`` of sample ``k``. Correlated samples are
``Z @ L.T`` with ``L`` the lower Cholesky factor of the target covariance.

``seed`` may be an int or a tuple of non-negative ints; the Monte Carlo
harness uses ``(base_seed, hypothesis, trial_index)``.
"""

import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ._validation import check_count, check_samples
from .model import QtmsCovariance, build_covariance

CHANNELS = ("I1", "Q1", "I2", "Q2")
DEGENERATE_RHO = 1.0 - 1e-12

Seed = Union[int, tuple]


def _normalize_seed(seed):
    if isinstance(seed, (list, tuple)):
        seed = tuple(int(s) for s in seed)
        if any(s < 0 for s in seed):
            raise ValueError("seed components must be non-negative")
        return seed
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return seed


def standard_normals(seed, n):
    """The ``(n, 4)`` standard-normal matrix used for a record with this seed."""
    return np.random.default_rng(seed).standard_normal((n, 4))


@dataclass(frozen=True, eq=False)
class SampleBlock:
    """``n`` voltage samples; columns are I1, Q1, I2, Q2."""

    channels: np.ndarray
    seed: Optional[Seed] = None
    params: Optional[QtmsCovariance] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = check_samples(np.array(self.channels, dtype=float))
        X.setflags(write=False)
        object.__setattr__(self, "channels", X)

    @property
    def n(self):
        return self.channels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SampleBlock):
            return NotImplemented
        return (
            np.array_equal(self.channels, other.channels)
            and self.seed == other.seed
            and self.params == other.params
        )

    def metadata(self):
        return {
            "n": self.n,
            "seed": list(self.seed) if isinstance(self.seed, tuple) else self.seed,
            "params": None if self.params is None else self.params.to_dict(),
            "columns": list(CHANNELS),
            **self.meta,
        }


def cholesky_factor(params, *, allow_degenerate=False):
    if params.rho >= 1.0:
        if not allow_degenerate:
            raise ValueError(
                "rho = 1 gives a singular covariance; pass allow_degenerate=True "
                "to sample with rho = 1 - 1e-12"
            )
        warnings.warn("rho = 1 replaced by 1 - 1e-12 for sampling", RuntimeWarning, stacklevel=3)
        params = QtmsCovariance(params.p1, params.p2, DEGENERATE_RHO, params.phi, params.coupling)
    try:
        return np.linalg.cholesky(build_covariance(params))
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"target covariance is not positive definite: {exc}") from exc


def synthesize(params, n, seed, *, allow_degenerate=False):
    """Draw ``n`` i.i.d. zero-mean samples with covariance ``build_covariance(params)``.

    Parameters
    ----------
    params : QtmsCovariance
    n : int
        Number of samples (rows).
    seed : int or tuple of int
        Seed for ``numpy.random.default_rng``; identical seeds give bit-identical blocks.
    allow_degenerate : bool
        Permit ``rho = 1`` by sampling at ``rho = 1 - 1e-12`` (with a warning).
    """
    n = check_count(n, "n")
    seed = _normalize_seed(seed)
    L = cholesky_factor(params, allow_degenerate=allow_degenerate)
    X = standard_normals(seed, n) @ L.T
    return SampleBlock(X, seed=seed, params=params)


def sample_covariance(block, *, demean=False):
    """Sample covariance of a block (or raw ``(n, 4)`` array).

    The default divides ``sum x x^T`` by ``n`` without removing the mean, since
    the model is zero-mean. ``demean=True`` subtracts the column means first
    (still dividing by ``n``).
    """
    X = block.channels if isinstance(block, SampleBlock) else check_samples(block)
    if X.shape[0] < 2:
        raise ValueError("sample covariance needs at least 2 samples")
    if demean:
        X = X - X.mean(axis=0)
    S = X.T @ X / X.shape[0]
    return (S + S.T) / 2.0
