"""Radar range equation and the range dependence of the correlation coefficient.

Received power at range ``R`` is ``kappa*P2 + Pn`` with
``kappa = G*Ae*sigma / ((4*pi)**2 * R**4)``, and the noise inside it is
``kappa*pn2 + Pn``. Eliminating the powers gives
``rho(R) = rho0 / sqrt(1 + (R/Rc)**4)`` with
``Rc = (G*Ae*sigma*P2 / ((4*pi)**2 * Pn))**0.25``, the range at which SNR is 1.

Note on the reference link budget (``REFERENCE_BUDGET``): evaluating ``Rc`` with ``(4*pi)**2`` in
the denominator gives about 534 m for G = 30 dB, Ae = 0.081 m^2,
sigma = 1 m^2, P2 = 18 dBm, Pn = -94 dBm, whereas the commonly quoted value is 1.0 km,
which matches a single ``4*pi`` factor. The ``(4*pi)**2`` form is canonical
here; :func:`characteristic_range_single_4pi` is provided for comparison only.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive
from .model import rho0_from_reference, rho_from_totals

FOUR_PI_SQ = (4.0 * math.pi) ** 2
STATED_EXAMPLE_RC_M = 1000.0

REFERENCE_BUDGET = {
    "gain_db": 30.0,
    "effective_area_m2": 0.081,
    "rcs_m2": 1.0,
    "tx_power_dbm": 18.0,
    "noise_power_dbm": -94.0,
}


class ConfigError(ValueError):
    """Malformed link-budget configuration."""


def db_to_linear(db):
    return 10.0 ** (float(db) / 10.0)


def dbm_to_watts(dbm):
    return 10.0 ** ((float(dbm) - 30.0) / 10.0)


def watts_to_dbm(w):
    return 10.0 * math.log10(w) + 30.0


@dataclass(frozen=True)
class LinkBudget:
    """Radar parameters in linear units (gain dimensionless, areas m^2, powers W)."""

    gain: float
    effective_area: float
    rcs: float
    tx_power: float
    noise_power: float
    rho0: float = 1.0

    def __post_init__(self):
        for name in ("gain", "effective_area", "rcs", "tx_power", "noise_power"):
            object.__setattr__(self, name, check_positive(getattr(self, name), name))
        rho0 = float(self.rho0)
        if not 0.0 < rho0 <= 1.0:
            raise ValueError(f"rho0 must lie in (0, 1], got {rho0!r}")
        object.__setattr__(self, "rho0", rho0)

    @classmethod
    def from_config(cls, cfg):
        """Build from the JSON schema with dB/dBm fields (``rho0`` optional)."""
        required = ("gain_db", "effective_area_m2", "rcs_m2", "tx_power_dbm", "noise_power_dbm")
        if not isinstance(cfg, dict):
            raise ConfigError("link budget config must be a JSON object")
        missing = [k for k in required if k not in cfg]
        if missing:
            raise ConfigError(f"missing field(s): {', '.join(missing)}")
        unknown = sorted(set(cfg) - set(required) - {"rho0"})
        if unknown:
            raise ConfigError(f"unknown field(s): {', '.join(unknown)}")
        for key in required + ("rho0",):
            if key in cfg and (isinstance(cfg[key], bool) or not isinstance(cfg[key], (int, float))):
                raise ConfigError(f"field {key!r} must be a number, got {cfg[key]!r}")
        try:
            return cls(
                gain=db_to_linear(cfg["gain_db"]),
                effective_area=cfg["effective_area_m2"],
                rcs=cfg["rcs_m2"],
                tx_power=dbm_to_watts(cfg["tx_power_dbm"]),
                noise_power=dbm_to_watts(cfg["noise_power_dbm"]),
                rho0=cfg.get("rho0", 1.0),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        return cls.from_config(cfg)

    def to_config(self):
        return {
            "gain_db": 10.0 * math.log10(self.gain),
            "effective_area_m2": self.effective_area,
            "rcs_m2": self.rcs,
            "tx_power_dbm": watts_to_dbm(self.tx_power),
            "noise_power_dbm": watts_to_dbm(self.noise_power),
            "rho0": self.rho0,
        }

    def path_factor(self, range_m):
        """``G*Ae*sigma / ((4*pi)**2 * R**4)``."""
        r = check_positive(range_m, "range")
        return self.gain * self.effective_area * self.rcs / (FOUR_PI_SQ * r**4)

    def profile(self):
        return RangeProfile(self.rho0, characteristic_range(self))


@dataclass(frozen=True)
class RangeProfile:
    rho0: float
    r_c: float

    def __post_init__(self):
        rho0 = float(self.rho0)
        if not 0.0 < rho0 <= 1.0:
            raise ValueError(f"rho0 must lie in (0, 1], got {rho0!r}")
        object.__setattr__(self, "rho0", rho0)
        object.__setattr__(self, "r_c", check_positive(self.r_c, "r_c"))

    @classmethod
    def from_reference_noise(cls, budget, pn2):
        """Profile with ``rho0 = 1 - pn2/P2`` derived from the reference-channel noise."""
        return cls(rho0_from_reference(budget.tx_power, pn2), characteristic_range(budget))


def characteristic_range(budget):
    """Range (m) at which received signal power equals the external noise power."""
    return (
        budget.gain * budget.effective_area * budget.rcs * budget.tx_power
        / (FOUR_PI_SQ * budget.noise_power)
    ) ** 0.25


def characteristic_range_single_4pi(budget):
    """Same as :func:`characteristic_range` with ``4*pi`` instead of ``(4*pi)**2``. Comparison only."""
    return (
        budget.gain * budget.effective_area * budget.rcs * budget.tx_power
        / (4.0 * math.pi * budget.noise_power)
    ) ** 0.25


def received_powers(budget, pn2, range_m):
    """Total received power ``p1`` and its noise part ``pn1`` at ``range_m``."""
    pn2 = check_nonnegative(pn2, "pn2")
    kappa = budget.path_factor(range_m)
    return {
        "p1": kappa * budget.tx_power + budget.noise_power,
        "pn1": kappa * pn2 + budget.noise_power,
    }


def rho_at_range(profile, range_m):
    """``rho0 / sqrt(1 + (R/Rc)**4)``; accepts scalar or array ranges >= 0."""
    r = np.asarray(range_m, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r < 0.0):
        raise ValueError("range must be finite and non-negative")
    out = profile.rho0 / np.sqrt(1.0 + (r / profile.r_c) ** 4)
    return float(out) if out.ndim == 0 else out


def snr_at_range(profile, range_m):
    """Single-pulse SNR ``(Rc/R)**4``; range must be strictly positive."""
    r = np.asarray(range_m, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
        raise ValueError("range must be finite and positive (SNR diverges at R = 0)")
    out = (profile.r_c / r) ** 4
    return float(out) if out.ndim == 0 else out


def rho_range_consistency(budget, pn2, range_m):
    """Rho at ``range_m`` computed through the explicit power chain.

    Received powers come from the range equation and go through
    :func:`noiseradar.model.rho_from_totals` together with the reference
    channel ``(P2, pn2)``. For consistent inputs this equals
    ``rho_at_range(RangeProfile.from_reference_noise(budget, pn2), range_m)``.
    Far beyond ``Rc`` the subtraction ``p1 - pn1`` loses about
    ``log10((R/Rc)**4)`` digits.
    """
    pw = received_powers(budget, pn2, range_m)
    return rho_from_totals(pw["p1"], budget.tx_power, pw["pn1"], pn2)
