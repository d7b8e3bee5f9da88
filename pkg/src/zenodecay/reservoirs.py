"""Reservoir spectral responses G(omega) and their memory kernels Phi(t).

All frequencies are angular (rad/s), all times in seconds.  A response
``G`` is the emission rate density into the reservoir; its memory kernel in
the frame rotating at ``omega_ref`` is

    Phi(t) = int_0^inf G(omega) exp(-i (omega - omega_ref) t) d omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError
from .quadrature import feature_points, fourier_integral

__all__ = [
    "MemoryKernel",
    "SpectralResponse",
    "LorentzianMode",
    "HydrogenicResponse",
    "TabulatedResponse",
    "CompositeResponse",
    "eval_response",
    "correlation_function",
    "numeric_correlation",
    "load_tabulated",
]


def _check_omega(omega):
    arr = np.asarray(omega, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("spectral responses are defined for omega >= 0 only")
    return arr


def _check_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("correlation functions are defined for t >= 0 only")
    return arr


@dataclass(frozen=True)
class MemoryKernel:
    """Reservoir correlation function in a rotating frame.

    Attributes
    ----------
    evaluator : callable
        Maps a scalar time (s) to a complex value (1/s^2).
    omega_ref : float
        Frame frequency (rad/s).
    rate_scale : float
        Fastest rate (1/s) present in the kernel; sets solver resolution.
    timescales : tuple of float
        Characteristic times used as quadrature breakpoints.
    analytic : bool
        True when ``evaluator`` is a closed form.
    """

    evaluator: Callable[[float], complex]
    omega_ref: float
    rate_scale: float
    timescales: tuple = ()
    analytic: bool = False

    def __call__(self, t):
        arr = _check_time(t)
        if arr.ndim == 0:
            return complex(self.evaluator(float(arr)))
        return np.array([self.evaluator(float(x)) for x in arr.ravel()],
                        dtype=complex).reshape(arr.shape)

    @classmethod
    def zero(cls, omega_ref=0.0):
        """Kernel of an uncoupled emitter."""
        return cls(lambda t: 0j, omega_ref, 0.0, (), True)


class SpectralResponse:
    """Common interface of all reservoir responses."""

    #: characteristic frequency used to non-dimensionalize quadratures
    scale: float = 1.0

    def __call__(self, omega):
        arr = _check_omega(omega)
        out = self._eval(arr)
        return float(out) if np.ndim(out) == 0 else out

    def _eval(self, omega):
        raise NotImplementedError

    def features(self):
        """List of ``(center, width)`` of sharp structures."""
        return []

    def breakpoints(self):
        """Frequencies at which quadratures over G should be split."""
        return feature_points(self.features())

    def total_weight(self):
        """``int_0^inf G d omega``."""
        raise NotImplementedError

    def reference_frequency(self):
        """Natural rotating-frame frequency (peak or cutoff)."""
        raise NotImplementedError

    def kernel(self, omega_ref=None):
        """Memory kernel, numerically synthesized unless overridden."""
        ref = self.reference_frequency() if omega_ref is None else float(omega_ref)
        cached = lru_cache(maxsize=4096)(lambda t: numeric_correlation(self, t, ref))
        top = max(abs(p - ref) for p in self.breakpoints())
        rate = max(top, math.sqrt(max(self.total_weight(), 0.0)))
        return MemoryKernel(cached, ref, rate, (1.0 / self.scale,), False)


@dataclass(frozen=True)
class LorentzianMode(SpectralResponse):
    """Single cavity line ``G(w) = g_s^2 Gamma_s / (pi (Gamma_s^2 + (w - w_s)^2))``."""

    g_s: float
    gamma_s: float
    omega_s: float

    def __post_init__(self):
        if not (self.g_s > 0 and self.gamma_s > 0 and self.omega_s > 0):
            raise DomainError("LorentzianMode needs g_s, gamma_s, omega_s > 0")

    @property
    def scale(self):
        return self.gamma_s

    def _eval(self, omega):
        d = omega - self.omega_s
        return self.g_s ** 2 * self.gamma_s / (math.pi * (self.gamma_s ** 2 + d * d))

    def peak_value(self):
        return self.g_s ** 2 / (math.pi * self.gamma_s)

    def features(self):
        return [(self.omega_s, self.gamma_s)]

    def total_weight(self):
        # the line is truncated at omega = 0
        return self.g_s ** 2 * (0.5 + math.atan(self.omega_s / self.gamma_s) / math.pi)

    def reference_frequency(self):
        return self.omega_s

    def kernel(self, omega_ref=None):
        # Full-line Fourier transform; the omega < 0 tail it includes is
        # ~gamma_s/omega_s of the weight and negligible for optical lines.
        ref = self.omega_s if omega_ref is None else float(omega_ref)
        g2, gam = self.g_s ** 2, self.gamma_s
        shift = self.omega_s - ref
        if shift == 0.0:
            def phi(t):
                return complex(g2 * math.exp(-gam * t))
        else:
            def phi(t):
                return g2 * math.exp(-gam * t) * complex(math.cos(shift * t), -math.sin(shift * t))
        times = tuple(1.0 / x for x in (gam, abs(shift)) if x > 0)
        return MemoryKernel(phi, ref, max(gam, self.g_s, abs(shift)), times, True)


@dataclass(frozen=True)
class HydrogenicResponse(SpectralResponse):
    """Free-space hydrogenic response ``alpha w / (1 + (w/w_c)^2)^4``."""

    alpha: float
    omega_c: float = 1.0e19

    def __post_init__(self):
        if not (self.alpha >= 0 and self.omega_c > 0):
            raise DomainError("HydrogenicResponse needs alpha >= 0 and omega_c > 0")

    @property
    def scale(self):
        return self.omega_c

    def _eval(self, omega):
        x = omega / self.omega_c
        return self.alpha * omega / (1.0 + x * x) ** 4

    def peak_frequency(self):
        return self.omega_c / math.sqrt(7.0)

    def breakpoints(self):
        wc = self.omega_c
        pts = [0.0, self.peak_frequency()] + [wc * 10.0 ** k for k in range(-6, 4)]
        return np.unique(np.array(pts))

    def total_weight(self):
        return self.alpha * self.omega_c ** 2 / 6.0

    def reference_frequency(self):
        return self.peak_frequency()

    def kernel(self, omega_ref=None):
        ref = self.reference_frequency() if omega_ref is None else float(omega_ref)
        base = super().kernel(ref)
        return MemoryKernel(base.evaluator, ref, max(self.omega_c, ref),
                            (1.0 / self.omega_c,), False)


@dataclass(frozen=True)
class TabulatedResponse(SpectralResponse):
    """Piecewise-linear response through samples, zero outside their range."""

    omega: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        g = np.array(self.values, dtype=float)
        if w.ndim != 1 or w.shape != g.shape or w.size < 2:
            raise DomainError("tabulated response needs two equal-length columns with >= 2 rows")
        if np.any(np.diff(w) <= 0):
            raise DomainError("tabulated frequencies must be strictly increasing")
        if np.any(w < 0) or np.any(g < 0) or not np.all(np.isfinite(g)):
            raise DomainError("tabulated frequencies and responses must be non-negative")
        w.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "values", g)

    def __eq__(self, other):
        return (isinstance(other, TabulatedResponse)
                and np.array_equal(self.omega, other.omega)
                and np.array_equal(self.values, other.values))

    __hash__ = object.__hash__

    @property
    def scale(self):
        return float(self.omega[-1] - self.omega[0])

    def _eval(self, omega):
        return np.interp(omega, self.omega, self.values, left=0.0, right=0.0)

    def breakpoints(self):
        return np.concatenate(([0.0], self.omega)) if self.omega[0] > 0 else self.omega.copy()

    def total_weight(self):
        return float(np.trapezoid(self.values, self.omega))

    def reference_frequency(self):
        return float(self.omega[np.argmax(self.values)])

    def kernel(self, omega_ref=None):
        ref = self.reference_frequency() if omega_ref is None else float(omega_ref)
        w, g = self.omega, self.values

        def phi(t):
            return _piecewise_linear_fourier(w, g, t, ref)

        spread = max(abs(w[0] - ref), abs(w[-1] - ref))
        rate = max(spread, math.sqrt(max(self.total_weight(), 0.0)))
        return MemoryKernel(phi, ref, rate, (1.0 / self.scale,), True)


def _phase_integrals(x):
    """``I0 = int_0^1 e^{-ixs} ds`` and ``I1 = int_0^1 s e^{-ixs} ds`` (vectorized)."""
    x = np.asarray(x, dtype=float)
    i0 = np.empty(x.shape, dtype=complex)
    i1 = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < 1e-2
    xs = x[small]
    term = np.ones_like(xs, dtype=complex)
    s0 = np.zeros_like(term)
    s1 = np.zeros_like(term)
    fact = 1.0
    for k in range(8):
        if k:
            term = term * (-1j * xs)
            fact *= k
        s0 += term / (fact * (k + 1))
        s1 += term / (fact * (k + 2))
    i0[small], i1[small] = s0, s1
    xl = x[~small]
    e = np.exp(-1j * xl)
    i0[~small] = (1.0 - e) / (1j * xl)
    i1[~small] = (e * (1.0 + 1j * xl) - 1.0) / (xl * xl)
    return i0, i1


def _piecewise_linear_fourier(w, g, t, ref):
    h = np.diff(w)
    i0, i1 = _phase_integrals(h * t)
    phase = np.exp(-1j * (w[:-1] - ref) * t)
    return complex(np.sum(h * phase * (g[:-1] * i0 + (g[1:] - g[:-1]) * i1)))


@dataclass(frozen=True)
class CompositeResponse(SpectralResponse):
    """Sharp spectral feature plus a flat background decay rate ``gamma_b``.

    The background continuum only enters through ``gamma_b = 2 pi G_b(w_a)``;
    evaluation returns the sharp part.
    """

    sharp: SpectralResponse
    gamma_b: float = 0.0

    def __post_init__(self):
        if not self.gamma_b >= 0:
            raise DomainError("background rate gamma_b must be >= 0")

    @property
    def scale(self):
        return self.sharp.scale

    def _eval(self, omega):
        return self.sharp._eval(omega)

    def features(self):
        return self.sharp.features()

    def breakpoints(self):
        return self.sharp.breakpoints()

    def total_weight(self):
        return self.sharp.total_weight()

    def reference_frequency(self):
        return self.sharp.reference_frequency()

    def kernel(self, omega_ref=None):
        return self.sharp.kernel(omega_ref)


def eval_response(model: SpectralResponse, omega):
    """Evaluate ``G(omega)``; raises :class:`DomainError` for omega < 0."""
    return model(omega)


def correlation_function(model: SpectralResponse, t, omega_ref=None):
    """``Phi(t)`` of ``model`` in the frame rotating at ``omega_ref`` (default: its peak)."""
    return model.kernel(omega_ref)(t)


def numeric_correlation(model: SpectralResponse, t, omega_ref, epsrel=1e-12):
    """Direct oscillatory quadrature of the kernel integral for any variant.

    Works in the scaled, shifted variable ``u = (omega - omega_ref)/scale`` so
    that the phase of the weight stays small near the reference frequency.
    """
    t = float(_check_time(t))
    s = float(model.scale)
    shift = omega_ref / s
    pts = np.asarray(model.breakpoints(), dtype=float) / s - shift
    sharp = model.sharp if isinstance(model, CompositeResponse) else model

    def integrand(u):
        return sharp._eval(s * (u + shift))

    norm = max(model.total_weight() / s, 1e-300)
    val, _ = fourier_integral(integrand, pts, s * t, tail=True, epsrel=epsrel,
                              atol=1e-15 * norm)
    return s * val


def load_tabulated(path) -> TabulatedResponse:
    """Read a two-column (omega, G) table; comma or whitespace separated, ``#`` comments."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].replace(",", " ").strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DomainError(f"{path}: no data rows")
    arr = np.array(rows)
    return TabulatedResponse(arr[:, 0], arr[:, 1])
