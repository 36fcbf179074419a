"""Monte Carlo validation of the rho-estimate detector.

Each trial draws one voltage record and keeps the rho estimated from its
structured covariance fit. Trial ``i`` under hypothesis ``h`` (0 = target absent,
1 = target present) is seeded with ``(base_seed, h, i)``, exactly as
:func:`noiseradar.synthesis.synthesize` would be, so every trial can be
reproduced on its own. Trials are processed in fixed chunks of
``CHUNK_TRIALS`` and reassembled in index order, which makes the output
independent of the number of worker processes.
"""

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm

from . import __version__
from ._validation import check_count
from .detection import noise_radar_pd
from .estimator import batch_sample_covariance, fit_many
from .model import TWO_PI, CouplingKind, QtmsCovariance
from .synthesis import cholesky_factor, standard_normals

H0, H1 = 0, 1
CHUNK_TRIALS = 1000
ACCEPTANCE_TRIALS = 100_000
SMOKE_TRIALS = 1_000


class TrialError(RuntimeError):
    def __init__(self, hypothesis, index, cause):
        super().__init__(f"trial {index} under H{hypothesis} failed: {cause}")
        self.hypothesis = hypothesis
        self.index = index


@dataclass(frozen=True)
class TrialConfig:
    """One Monte Carlo experiment.

    ``randomize_phase`` draws a fresh uniform phase per trial instead of the
    fixed ``phi`` (a robustness probe; the coherent model has a constant phase).
    """

    n_samples: int
    rho: float
    phi: float = 0.0
    coupling: CouplingKind = CouplingKind.ROTATION
    trials_h0: int = SMOKE_TRIALS
    trials_h1: int = SMOKE_TRIALS
    base_seed: int = 0
    p1: float = 1.0
    p2: float = 1.0
    randomize_phase: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_samples", check_count(self.n_samples, "n_samples", minimum=2))
        object.__setattr__(self, "trials_h0", check_count(self.trials_h0, "trials_h0"))
        object.__setattr__(self, "trials_h1", check_count(self.trials_h1, "trials_h1"))
        object.__setattr__(self, "base_seed", check_count(self.base_seed, "base_seed", minimum=0))
        object.__setattr__(self, "coupling", CouplingKind.coerce(self.coupling))
        rho = float(self.rho)
        if not 0.0 <= rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {rho!r}")
        object.__setattr__(self, "rho", rho)
        # validates powers and phase
        QtmsCovariance(self.p1, self.p2, rho, self.phi, self.coupling)

    def params(self, hypothesis, phi=None):
        rho = 0.0 if hypothesis == H0 else self.rho
        return QtmsCovariance(self.p1, self.p2, rho, self.phi if phi is None else phi, self.coupling)

    def trials(self, hypothesis):
        return self.trials_h0 if hypothesis == H0 else self.trials_h1

    def to_dict(self):
        d = asdict(self)
        d["coupling"] = self.coupling.value
        return d


def trial_seed(base_seed, hypothesis, index):
    """Seed of trial ``index`` under ``hypothesis``."""
    return (int(base_seed), int(hypothesis), int(index))


def _trial_phase(config, hypothesis, index):
    # independent of the sample stream: tagged with hypothesis + 2
    return float(np.random.default_rng((config.base_seed, hypothesis + 2, index)).uniform(0.0, TWO_PI))


def _simulate_chunk(config, hypothesis, start, stop):
    n = config.n_samples
    Z = np.empty((stop - start, n, 4))
    for j, i in enumerate(range(start, stop)):
        Z[j] = standard_normals(trial_seed(config.base_seed, hypothesis, i), n)
    if config.randomize_phase:
        L = np.stack([
            cholesky_factor(config.params(hypothesis, _trial_phase(config, hypothesis, i)))
            for i in range(start, stop)
        ])
        X = np.matmul(Z, np.swapaxes(L, -1, -2))
    else:
        X = Z @ cholesky_factor(config.params(hypothesis)).T
    S = batch_sample_covariance(X)
    try:
        return fit_many(S, config.coupling, check=False)["rho"]
    except Exception:
        for j in range(stop - start):
            try:
                fit_many(S[j], config.coupling, check=False)
            except Exception as exc:
                raise TrialError(hypothesis, start + j, exc) from exc
        raise


def _chunk_job(args):
    return _simulate_chunk(*args)


def simulate_statistics(config, hypothesis, workers=1):
    """Estimated rho for every trial of one hypothesis, in trial order."""
    total = config.trials(hypothesis)
    jobs = [
        (config, hypothesis, s, min(s + CHUNK_TRIALS, total))
        for s in range(0, total, CHUNK_TRIALS)
    ]
    if workers <= 1 or len(jobs) == 1:
        parts = [_chunk_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_job, jobs))
    return np.concatenate(parts)


def empirical_curve(h0_stats, h1_stats, p_fa_grid):
    """Empirical ROC from detector statistics under each hypothesis.

    The threshold for false-alarm rate ``p`` is the ``1 - p`` quantile of the
    H0 statistics with NumPy's ``method="higher"`` rule (the sorted element at
    index ``ceil((1 - p) * (m - 1))``). ``p_d`` is the fraction of H1
    statistics strictly above it.
    """
    h0 = np.sort(np.asarray(h0_stats, dtype=float))
    h1 = np.asarray(h1_stats, dtype=float)
    grid = np.asarray(p_fa_grid, dtype=float)
    if h0.size == 0 or h1.size == 0:
        raise ValueError("statistics must be non-empty")
    if np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise ValueError("p_fa grid must lie inside (0, 1)")
    if grid.min() < 1.0 / h0.size:
        warnings.warn(
            f"p_fa grid reaches {grid.min():g}, finer than 1/trials_h0 = {1.0 / h0.size:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    thresholds = np.quantile(h0, 1.0 - grid, method="higher")
    h1_sorted = np.sort(h1)
    above = h1.size - np.searchsorted(h1_sorted, thresholds, side="right")
    return grid, above / h1.size, thresholds


@dataclass(frozen=True, eq=False)
class EmpiricalRoc:
    h0_stats: np.ndarray
    h1_stats: np.ndarray
    p_fa: np.ndarray
    p_d: np.ndarray
    thresholds: np.ndarray
    config: TrialConfig
    warnings: list = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalRoc):
            return NotImplemented
        return self.config == other.config and all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("h0_stats", "h1_stats", "p_fa", "p_d", "thresholds")
        )


DEFAULT_MC_GRID = (0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5)


def run_trials(config, p_fa_grid=DEFAULT_MC_GRID, workers=1):
    """Simulate all H0 and H1 trials and build the empirical ROC."""
    h0 = np.sort(simulate_statistics(config, H0, workers))
    h1 = np.sort(simulate_statistics(config, H1, workers))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        grid, p_d, thr = empirical_curve(h0, h1, p_fa_grid)
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)
    return EmpiricalRoc(h0, h1, grid, p_d, thr, config, [str(w.message) for w in caught])


def compare_to_theory(emp, confidence=0.99, tolerance=0.02):
    """Compare an empirical ROC with the closed-form noise-radar curve.

    ``ci_half_width`` is the Wald binomial half-width of the empirical
    ``p_d`` at ``confidence``; ``within_ci`` says whether the theoretical value
    falls inside it and ``within_tolerance`` whether the gap is at most
    ``max(tolerance, ci_half_width)``.
    """
    cfg = emp.config
    notes = list(emp.warnings)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        theory = np.atleast_1d(noise_radar_pd(emp.p_fa, cfg.rho, cfg.n_samples))
    notes.extend(str(w.message) for w in caught)
    z = norm.ppf(0.5 + confidence / 2.0)
    half = z * np.sqrt(emp.p_d * (1.0 - emp.p_d) / cfg.trials_h1)
    gaps = emp.p_d - theory
    abs_gaps = np.abs(gaps)
    return {
        "config": cfg.to_dict(),
        "p_fa": emp.p_fa.tolist(),
        "thresholds": emp.thresholds.tolist(),
        "p_d_empirical": emp.p_d.tolist(),
        "p_d_theory": theory.tolist(),
        "gap": gaps.tolist(),
        "ci_half_width": half.tolist(),
        "confidence": confidence,
        "within_ci": (abs_gaps <= half).tolist(),
        "tolerance": tolerance,
        "within_tolerance": (abs_gaps <= np.maximum(tolerance, half)).tolist(),
        "max_abs_gap": float(abs_gaps.max()),
        "warnings": notes,
        "version": __version__,
    }


def critical_ks(n1, n2, alpha=0.01):
    """Asymptotic two-sample Kolmogorov-Smirnov critical value."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n1 + n2) / (n1 * n2))
