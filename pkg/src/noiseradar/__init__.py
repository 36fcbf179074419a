"""Performance prediction and Monte Carlo validation for coherent noise radars."""

__version__ = "0.1.0"

from ._validation import DegenerateInputError
from .detection import (
    RocCurve,
    RocModel,
    conventional_pd,
    marcum_q1,
    noise_radar_pd,
    roc_curve,
    roc_vs_range,
)
from .estimator import CorrelationEstimator, FitResult, NoiseRadarDetector, detect, fit
from .model import (
    CouplingKind,
    QtmsCovariance,
    SignalDecomposition,
    build_covariance,
    rho0_from_reference,
    rho_from_decomposition,
    rho_from_totals,
)
from .range_model import (
    LinkBudget,
    RangeProfile,
    characteristic_range,
    received_powers,
    rho_at_range,
    rho_range_consistency,
    snr_at_range,
)
from .synthesis import SampleBlock, sample_covariance, synthesize

__all__ = [
    "CorrelationEstimator",
    "CouplingKind",
    "DegenerateInputError",
    "FitResult",
    "LinkBudget",
    "NoiseRadarDetector",
    "QtmsCovariance",
    "RangeProfile",
    "RocCurve",
    "RocModel",
    "SampleBlock",
    "SignalDecomposition",
    "build_covariance",
    "characteristic_range",
    "conventional_pd",
    "detect",
    "fit",
    "marcum_q1",
    "noise_radar_pd",
    "received_powers",
    "rho0_from_reference",
    "rho_at_range",
    "rho_from_decomposition",
    "rho_from_totals",
    "rho_range_consistency",
    "roc_curve",
    "roc_vs_range",
    "sample_covariance",
    "snr_at_range",
    "synthesize",
]
