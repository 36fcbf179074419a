"""Covariance model of the four received/reference voltages and power algebra.

The voltage vector is ``x = [I1, Q1, I2, Q2]``: channels 1 are the received
(echo) signal, channels 2 the retained reference. All powers are linear and
scale-free; decibel conversion lives at the CLI boundary.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive, check_unit_interval

TWO_PI = 2.0 * math.pi


class CouplingKind(enum.Enum):
    """Form of the 2x2 cross block between received and reference channels.

    ``ROTATION`` arises when the reference is a direct copy of the transmit
    signal; ``REFLECTION`` when the two signals are sidebands of a single mixed
    noise source.
    """

    ROTATION = "rotation"
    REFLECTION = "reflection"

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown coupling {value!r}; expected 'rotation' or 'reflection'") from None


def coupling_matrix(phi, coupling):
    """Return the 2x2 rotation ``[[c, s], [-s, c]]`` or reflection ``[[c, s], [s, -c]]``."""
    c, s = math.cos(phi), math.sin(phi)
    if CouplingKind.coerce(coupling) is CouplingKind.ROTATION:
        return np.array([[c, s], [-s, c]])
    return np.array([[c, s], [s, -c]])


def canonical_phase(phi):
    phi = float(phi)
    if not math.isfinite(phi):
        raise ValueError(f"phi must be finite, got {phi!r}")
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    # fmod of a tiny negative value can round up to exactly 2*pi
    return 0.0 if phi >= TWO_PI else phi


@dataclass(frozen=True)
class QtmsCovariance:
    """Parameters ``(p1, p2, rho, phi, coupling)`` of the structured covariance.

    ``phi`` is stored modulo 2*pi. ``rho = 1`` is allowed here (the matrix is
    then singular); the sampler refuses it unless asked to regularize.
    """

    p1: float
    p2: float
    rho: float
    phi: float = 0.0
    coupling: CouplingKind = CouplingKind.ROTATION

    def __post_init__(self):
        object.__setattr__(self, "p1", check_positive(self.p1, "p1"))
        object.__setattr__(self, "p2", check_positive(self.p2, "p2"))
        object.__setattr__(self, "rho", check_unit_interval(self.rho, "rho"))
        object.__setattr__(self, "phi", canonical_phase(self.phi))
        object.__setattr__(self, "coupling", CouplingKind.coerce(self.coupling))

    def matrix(self):
        return build_covariance(self)

    def to_dict(self):
        return {
            "p1": self.p1,
            "p2": self.p2,
            "rho": self.rho,
            "phi": self.phi,
            "coupling": self.coupling.value,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["p1"], d["p2"], d["rho"], d.get("phi", 0.0), d.get("coupling", "rotation"))


def build_covariance(params):
    """Realize the 4x4 covariance matrix for ``params``.

    Diagonal blocks are ``p1*I`` and ``p2*I``; the upper-right block is
    ``rho*sqrt(p1*p2)*C(phi)`` with ``C`` the rotation or reflection matrix and
    the lower-left block its transpose, so the result is exactly symmetric.
    """
    if not isinstance(params, QtmsCovariance):
        raise TypeError("build_covariance expects a QtmsCovariance")
    k = params.rho * math.sqrt(params.p1 * params.p2)
    cross = k * coupling_matrix(params.phi, params.coupling)
    out = np.zeros((4, 4))
    out[0, 0] = out[1, 1] = params.p1
    out[2, 2] = out[3, 3] = params.p2
    out[0:2, 2:4] = cross
    out[2:4, 0:2] = cross.T
    return out


@dataclass(frozen=True)
class SignalDecomposition:
    """Split of both signals into a shared component of power ``p`` plus independent noise."""

    p: float
    pn1: float
    pn2: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_nonnegative(self.p, "p"))
        object.__setattr__(self, "pn1", check_nonnegative(self.pn1, "pn1"))
        object.__setattr__(self, "pn2", check_nonnegative(self.pn2, "pn2"))

    @property
    def p1(self):
        return self.p + self.pn1

    @property
    def p2(self):
        return self.p + self.pn2


def rho_from_decomposition(d):
    """Correlation coefficient ``[(1 + pn1/p)(1 + pn2/p)]**-0.5``.

    With no shared power (``p = 0``) the result is 0 if any noise is present;
    ``p = pn1 = pn2 = 0`` is indeterminate and raises.
    """
    if d.p == 0.0:
        if d.pn1 == 0.0 and d.pn2 == 0.0:
            raise ValueError("rho is indeterminate when all powers are zero")
        return 0.0
    return 1.0 / math.sqrt((1.0 + d.pn1 / d.p) * (1.0 + d.pn2 / d.p))


def rho_from_totals(p1, p2, pn1, pn2):
    """Correlation coefficient from total powers: ``sqrt((1 - pn1/p1)(1 - pn2/p2))``."""
    p1 = check_positive(p1, "p1")
    p2 = check_positive(p2, "p2")
    pn1 = check_nonnegative(pn1, "pn1")
    pn2 = check_nonnegative(pn2, "pn2")
    if pn1 > p1 or pn2 > p2:
        raise ValueError("noise power exceeds total power; no valid decomposition")
    return math.sqrt((1.0 - pn1 / p1) * (1.0 - pn2 / p2))


def rho0_from_reference(p2, pn2):
    """Largest observable correlation when only reference-channel system noise is present."""
    p2 = check_positive(p2, "p2")
    pn2 = check_nonnegative(pn2, "pn2")
    if pn2 > p2:
        raise ValueError("pn2 must not exceed p2")
    return 1.0 - pn2 / p2
