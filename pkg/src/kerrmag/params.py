"""Physical parameters, drive amplitudes and unit handling.

All rates and detunings are stored as angular frequencies (rad/s).  Human
facing values are frequencies f = omega / 2pi and are converted exactly once,
by :func:`parse_quantity`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

from scipy import constants as _sc

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    # gamma / 2pi = 28 GHz/T
    gyromagnetic_gamma: float = TWO_PI * 28e9
    mu0: float = _sc.mu_0


CONSTANTS = PhysicalConstants()


def _check_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Fixed rates and detunings of the PDC / MC / magnon chain (rad/s).

    ``kappa1``, ``kappa2`` and ``gamma_m`` are total loss rates; the equations
    of motion damp amplitudes at half these rates.
    """

    delta1: float
    delta2: float
    delta_m: float
    kappa1: float
    kappa2: float
    gamma_m: float
    g: float
    j_coupling: float
    lambda_p: float
    kerr_k: float
    eta1: float = 0.5
    eta2: float = 0.5
    eta_m: float = 0.5

    def __post_init__(self):
        for f in ("delta1", "delta2", "delta_m", "kappa1", "kappa2", "gamma_m",
                  "g", "j_coupling", "lambda_p", "kerr_k", "eta1", "eta2", "eta_m"):
            _check_finite(f, getattr(self, f))
        for f in ("kappa1", "kappa2", "gamma_m", "g"):
            if getattr(self, f) <= 0:
                raise DomainError(f"{f} must be strictly positive")
        if self.j_coupling < 0:
            raise DomainError("j_coupling must be nonnegative")
        for f in ("eta1", "eta2", "eta_m"):
            if not 0.0 <= getattr(self, f) <= 1.0:
                raise DomainError(f"{f} must lie in [0, 1]")

    @classmethod
    def from_frequencies(cls, omega1, omega2, omega_m, omega_d, **rates):
        """Build from absolute mode frequencies and the drive frequency."""
        return cls(delta1=omega1 - omega_d, delta2=omega2 - omega_d,
                   delta_m=omega_m - omega_d, **rates)

    def frequencies(self, omega_d):
        """Absolute (omega1, omega2, omega_m) for a given drive frequency."""
        return (self.delta1 + omega_d, self.delta2 + omega_d, self.delta_m + omega_d)

    def replace(self, **changes):
        return replace(self, **changes)


def drive_amplitude(eta, loss_rate, power, omega_d, hbar=CONSTANTS.hbar):
    """Rabi amplitude sqrt(eta * loss_rate * power / (hbar * omega_d)) in 1/s."""
    if power < 0:
        raise DomainError("power must be nonnegative")
    if omega_d <= 0:
        raise DomainError("omega_d must be positive")
    if not 0.0 <= eta <= 1.0:
        raise DomainError("eta must lie in [0, 1]")
    if loss_rate <= 0:
        raise DomainError("loss_rate must be positive")
    return math.sqrt(eta * loss_rate * power / (hbar * omega_d))


@dataclass(frozen=True)
class DriveConfig:
    """Input powers (W), drive frequency (rad/s) and the Rabi amplitudes.

    Use :meth:`from_powers` to derive the amplitudes.  Constructing directly
    sets the amplitudes verbatim, which the tests use for signed drives.
    """

    p1: float = 0.0
    p2: float = 0.0
    p_m: float = 0.0
    omega_d: float = TWO_PI * 10.1e9
    omega1_amp: float = 0.0
    omega2_amp: float = 0.0
    omega_m_amp: float = 0.0

    def __post_init__(self):
        for f in ("p1", "p2", "p_m"):
            if not getattr(self, f) >= 0:
                raise DomainError(f"{f} must be nonnegative")
        if not self.omega_d > 0:
            raise DomainError("omega_d must be positive")

    @classmethod
    def from_powers(cls, params: SystemParams, p1=0.0, p2=0.0, p_m=0.0,
                    omega_d=TWO_PI * 10.1e9):
        return cls(
            p1=p1, p2=p2, p_m=p_m, omega_d=omega_d,
            omega1_amp=drive_amplitude(params.eta1, params.kappa1, p1, omega_d),
            omega2_amp=drive_amplitude(params.eta2, params.kappa2, p2, omega_d),
            omega_m_amp=drive_amplitude(params.eta_m, params.gamma_m, p_m, omega_d),
        )

    @property
    def amplitudes(self):
        return (self.omega1_amp, self.omega2_amp, self.omega_m_amp)

    @property
    def is_off(self):
        return not any(self.amplitudes)

    def only(self, which):
        """Copy keeping a single drive ('pdc', 'mc' or 'magnon') plus nothing else."""
        keep = {"pdc": 0, "mc": 1, "magnon": 2}[which]
        p = [self.p1, self.p2, self.p_m]
        a = list(self.amplitudes)
        for i in range(3):
            if i != keep:
                p[i] = 0.0
                a[i] = 0.0
        return DriveConfig(p[0], p[1], p[2], self.omega_d, a[0], a[1], a[2])


def magnon_frequency_from_field(h_field, gamma=CONSTANTS.gyromagnetic_gamma):
    """omega_m = gamma * H in rad/s, H in tesla."""
    if h_field < 0:
        raise DomainError("h_field must be nonnegative")
    return gamma * h_field


def field_from_magnon_frequency(omega_m, gamma=CONSTANTS.gyromagnetic_gamma):
    return omega_m / gamma


def kerr_from_material(mu0, k_an, saturation_m, volume,
                       gamma=CONSTANTS.gyromagnetic_gamma):
    """Kerr coefficient mu0 * K_an * gamma / (M^2 V_m) in rad/s.

    Convenience helper; sweeps take K directly.
    """
    for name, v in (("mu0", mu0), ("k_an", k_an), ("saturation_m", saturation_m),
                    ("volume", volume)):
        if not v > 0:
            raise DomainError(f"{name} must be strictly positive")
    return mu0 * k_an * gamma / (saturation_m ** 2 * volume)


# ---------------------------------------------------------------- units

_FREQ_UNITS = {"GHz": 1e9, "MHz": 1e6, "kHz": 1e3, "Hz": 1.0, "mHz": 1e-3,
               "uHz": 1e-6, "µHz": 1e-6, "μHz": 1e-6, "nHz": 1e-9}
_POWER_UNITS = {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "µW": 1e-6, "μW": 1e-6,
                "nW": 1e-9}
_FIELD_UNITS = {"T": 1.0, "mT": 1e-3}

UNIT_TABLES = {"frequency": _FREQ_UNITS, "power": _POWER_UNITS, "field": _FIELD_UNITS}

_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def split_quantity(text):
    """Split '25 MHz' into (25.0, 'MHz'); the unit may be empty."""
    m = _QUANTITY_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2)


def parse_quantity(text, kind):
    """Convert a human quantity to internal SI.

    ``kind`` is 'frequency' (f/2pi with suffix, returned in rad/s), 'power'
    (W), 'field' (T) or 'dimensionless'.
    """
    value, unit = split_quantity(text)
    if kind == "dimensionless":
        if unit:
            raise DomainError(f"unexpected unit {unit!r} on dimensionless value")
        return value
    table = UNIT_TABLES[kind]
    if unit not in table:
        raise DomainError(f"unit {unit!r} not valid for a {kind}; "
                          f"expected one of {sorted(table)}")
    scale = table[unit]
    if kind == "frequency":
        return TWO_PI * value * scale
    return value * scale


def to_hz(omega):
    """rad/s -> f/2pi in Hz."""
    return omega / TWO_PI


@dataclass(frozen=True)
class CaptionDefaults:
    """Operating point shared by all power-sweep figures (rad/s, W)."""

    kappa1: float = TWO_PI * 25e6
    kappa2: float = TWO_PI * 5e6
    gamma_m: float = TWO_PI * 20e6
    g: float = TWO_PI * 41e6
    omega_m: float = TWO_PI * 10.1e9
    omega_d: float = TWO_PI * 10.1e9
    kerr_k: float = TWO_PI * 0.5e-6
    eta: float = 0.5
    delta: float = field(default=TWO_PI * 80e6)  # 4 * gamma_m


def fig2_params(j_mult=1.0, lambda_mult=1.0, defaults=CaptionDefaults()):
    """SystemParams at the power-sweep operating point with J, lambda as multiples
    of the reciprocity-preserving pair (J_c, lambda_c)."""
    d = defaults
    ratio = math.sqrt(d.kappa2 / d.kappa1)
    return SystemParams(
        delta1=d.delta, delta2=d.delta, delta_m=d.omega_m - d.omega_d,
        kappa1=d.kappa1, kappa2=d.kappa2, gamma_m=d.gamma_m, g=d.g,
        j_coupling=j_mult * ratio * abs(d.delta),
        lambda_p=lambda_mult * (-d.kappa1 / 2.0),
        kerr_k=d.kerr_k, eta1=d.eta, eta2=d.eta, eta_m=d.eta,
    )
