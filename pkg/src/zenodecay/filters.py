"""Measurement-induced dephasing spectra.

Every filter is normalized to unit area, so the decay rate is always
``kappa = 2 pi int G(w) F(w - w_a) dw`` whatever the measurement scheme.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidityError

__all__ = [
    "SincSquaredFilter",
    "LorentzianFilter",
    "eval_filter",
    "width_from_noise",
    "width_from_cw",
]


@dataclass(frozen=True)
class SincSquaredFilter:
    """Window of impulsive interruptions at interval ``tau`` (s)."""

    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError("interruption interval tau must be > 0")

    @property
    def width(self):
        """Distance (rad/s) from the center to the first zero."""
        return 2.0 * math.pi / self.tau

    def __call__(self, delta):
        d = np.asarray(delta, dtype=float)
        # np.sinc(x) = sin(pi x)/(pi x)
        out = self.tau / (2.0 * math.pi) * np.sinc(d * self.tau / (2.0 * math.pi)) ** 2
        return float(out) if out.ndim == 0 else out

    def peak(self):
        return self.tau / (2.0 * math.pi)


@dataclass(frozen=True)
class LorentzianFilter:
    """Lorentzian dephasing window with half width at half maximum ``nu`` (rad/s)."""

    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError("dephasing width nu must be > 0")

    @property
    def width(self):
        return self.nu

    def __call__(self, delta):
        d = np.asarray(delta, dtype=float)
        out = self.nu / (math.pi * (self.nu ** 2 + d * d))
        return float(out) if out.ndim == 0 else out

    def peak(self):
        return 1.0 / (math.pi * self.nu)

    @classmethod
    def from_noise(cls, mean_square_shift, correlation_time):
        """Filter for random Stark shifts; see :func:`width_from_noise`."""
        return cls(width_from_noise(mean_square_shift, correlation_time))

    @classmethod
    def from_cw(cls, rabi, gamma_u):
        """Filter for a CW field driving a fast-decaying auxiliary level."""
        return cls(width_from_cw(rabi, gamma_u))


def eval_filter(filt, delta):
    """``F(delta)`` with ``delta`` the offset (rad/s) from the atomic frequency."""
    return filt(delta)


def width_from_noise(mean_square_shift, correlation_time):
    """HWHM ``nu = <dw^2> tau_c`` of the dephasing spectrum for noisy Stark shifts."""
    if not (mean_square_shift > 0 and correlation_time > 0):
        raise DomainError("mean-square shift and correlation time must be > 0")
    return mean_square_shift * correlation_time


def width_from_cw(rabi, gamma_u):
    """HWHM ``nu = 2 Omega^2 / gamma_u`` for CW dephasing.

    Only valid when the auxiliary decay rate exceeds the Rabi frequency;
    otherwise :class:`ValidityError` is raised.
    """
    if not (rabi > 0 and gamma_u > 0):
        raise DomainError("Rabi frequency and gamma_u must be > 0")
    if gamma_u <= rabi:
        raise ValidityError(f"CW dephasing width needs gamma_u > Omega (got {gamma_u:g} <= {rabi:g})")
    return 2.0 * rabi ** 2 / gamma_u
