"""Measurement-modified decay rates.

Two equivalent routes are provided: the spectral overlap of the reservoir
response with a normalized dephasing window, and the time-domain integral of
the memory kernel over one interruption interval.  Closed forms cover the
Lorentzian line at short times and the hydrogenic response under Lorentzian
dephasing.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ValidityWarning
from .filters import LorentzianFilter, SincSquaredFilter
from .quadrature import check_accuracy, feature_points, integrate_panels
from .reservoirs import CompositeResponse, MemoryKernel, SpectralResponse

__all__ = [
    "RateResult",
    "ComplexRatio",
    "CrossCheck",
    "universal_rate",
    "impulsive_rate_time_domain",
    "lorentzian_short_time_amplitude",
    "lorentzian_interrupted_rate",
    "short_time_valid",
    "hydrogenic_lorentzian_rate",
    "hydrogenic_validity_note",
    "sinc_vs_kernel_crosscheck",
]

QUADRATURE = "quadrature"
TIME_DOMAIN = "time-domain"
CLOSED_FORM = "closed-form"

#: dephasing widths above this fraction of the cutoff are flagged
HYDROGENIC_VALIDITY_FRACTION = 0.1

# panels spanning fewer radians than this use plain adaptive quadrature
_FEW_OSCILLATIONS = 50.0


@dataclass(frozen=True)
class RateResult:
    """Effective decay rate split into its sharp and background parts.

    Attributes
    ----------
    kappa_s : float
        Contribution of the sharply varying reservoir (1/s).
    gamma_b : float
        Background-mode rate (1/s), immune to measurements.
    method : str
        ``'quadrature'``, ``'time-domain'`` or ``'closed-form'``.
    error : float
        Absolute error estimate of ``kappa_s``.
    notes : tuple of str
        Validity annotations.
    """

    kappa_s: float
    gamma_b: float = 0.0
    method: str = QUADRATURE
    error: float = 0.0
    notes: tuple = ()

    @property
    def kappa(self):
        return self.kappa_s + self.gamma_b


@dataclass(frozen=True)
class ComplexRatio:
    """``f = (nu - i omega_a) / omega_c`` entering the hydrogenic closed form."""

    nu: float
    omega_a: float
    omega_c: float

    @property
    def value(self) -> complex:
        return complex(self.nu, -self.omega_a) / self.omega_c


class CrossCheck(NamedTuple):
    kappa_freq: float
    kappa_time: float
    discrepancy: float


def _split(G):
    if isinstance(G, CompositeResponse):
        return G.sharp, G.gamma_b
    return G, 0.0


def universal_rate(G: SpectralResponse, F, omega_a, rtol=1e-8) -> RateResult:
    """``kappa_s = 2 pi int G(w) F(w - w_a) dw`` by peak-aware quadrature.

    Parameters
    ----------
    G : SpectralResponse
        Reservoir response; a :class:`CompositeResponse` adds its ``gamma_b``.
    F : SincSquaredFilter or LorentzianFilter
        Dephasing window.
    omega_a : float
        Atomic transition frequency (rad/s).
    rtol : float
        Required relative accuracy; :class:`ConvergenceError` otherwise.
    """
    if not omega_a > 0:
        raise DomainError("omega_a must be > 0")
    if not isinstance(F, (LorentzianFilter, SincSquaredFilter)):
        raise DomainError(f"unsupported filter type {type(F).__name__}")
    sharp, gamma_b = _split(G)
    width = F.width
    lower = -omega_a
    pts = np.concatenate((np.asarray(sharp.breakpoints(), float) - omega_a,
                          feature_points([(0.0, width)], lower=lower)))
    pts = feature_points([], lower=lower) if pts.size == 0 else np.unique(pts[pts >= lower])
    g = sharp._eval

    if isinstance(F, LorentzianFilter):
        val, err = integrate_panels(lambda d: g(omega_a + d) * F(d), pts, tail=True, epsrel=1e-12)
    else:
        val, err = _sinc_overlap(g, F.tau, omega_a, pts)
    kappa_s, err = 2.0 * math.pi * val, 2.0 * math.pi * err
    check_accuracy(kappa_s, err, rtol, 0.0, "universal_rate")
    return RateResult(kappa_s, gamma_b, QUADRATURE, err)


def _sinc_overlap(g, tau, omega_a, pts):
    # F(d) = (1 - cos(d tau)) / (pi tau d^2); away from d = 0 the smooth and
    # cosine parts are integrated separately with the oscillatory rules.
    lobe = 2.0 * math.pi / tau
    d0 = 3.0 * lobe
    lower = pts[0]
    peak = tau / (2.0 * math.pi)

    def near(d):
        x = 0.5 * d * tau
        s = math.sin(x) / x if x != 0.0 else 1.0
        return g(omega_a + d) * peak * s * s

    def smooth(d):
        return g(omega_a + d) / (math.pi * tau * d * d)

    near_lo = max(lower, -d0)
    inner = np.concatenate(([near_lo, d0], lobe * np.arange(-3, 4), pts))
    inner = np.unique(inner[(inner >= near_lo) & (inner <= d0)])
    val, err = integrate_panels(near, inner, epsrel=1e-12)

    regions = [np.unique(np.concatenate(([d0], pts[pts > d0])))]
    if lower < -d0:
        regions.append(np.unique(np.concatenate((pts[pts < -d0], [-d0]))))
    for k, panel in enumerate(regions):
        tail = k == 0
        a, ea = integrate_panels(smooth, panel, tail=tail, epsrel=1e-12)
        b, eb = integrate_panels(smooth, panel, tail=tail, epsrel=1e-12, weight="cos", wvar=tau,
                                 atol=1e-14 * abs(a))
        val += a - b
        err += ea + eb
    return val, err


def impulsive_rate_time_domain(kernel: MemoryKernel, delta, tau, rtol=1e-8) -> float:
    """``kappa_s = (2/tau) Re int_0^tau (tau - t) Phi(t) exp(i delta t) dt``."""
    if not tau > 0:
        raise DomainError("interruption interval tau must be > 0")
    extra = [ts * m for ts in kernel.timescales for m in (1e-2, 1e-1, 1.0, 10.0, 100.0)]
    pts = feature_points([(0.0, x) for x in extra], lower=0.0, upper=tau, multiples=(1.0,))

    def rotated(t):
        return (tau - t) * (kernel.evaluator(t) * cmath.exp(1j * delta * t)).real

    def re_part(t):
        return (tau - t) * kernel.evaluator(t).real

    def im_part(t):
        return (tau - t) * kernel.evaluator(t).imag

    val = err = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        panel = (a, b)
        if abs(delta) * (b - a) <= _FEW_OSCILLATIONS:
            v, e = integrate_panels(rotated, panel, epsrel=1e-12)
        else:
            # QAWO: cos/sin moments for many oscillations per panel
            c, ec = integrate_panels(re_part, panel, epsrel=1e-12, weight="cos", wvar=delta)
            s, es = integrate_panels(im_part, panel, epsrel=1e-12, weight="sin", wvar=delta)
            v, e = c - s, ec + es
        val += v
        err += e
    kappa = 2.0 * val / tau
    check_accuracy(kappa, 2.0 * err / tau, rtol, 0.0, "impulsive_rate_time_domain")
    return kappa


def _phi2(x):
    """``(exp(-x) - 1 + x) / x**2`` without cancellation (complex x)."""
    if abs(x) < 1e-2:
        return 0.5 - x / 6.0 + x * x / 24.0 - x ** 3 / 120.0 + x ** 4 / 720.0 - x ** 5 / 5040.0
    return (cmath.exp(-x) - 1.0 + x) / (x * x)


def short_time_valid(g_s, gamma_s, delta, tau, factor=10.0):
    """True when ``tau`` is at least ``factor`` below both 1/(Gamma_s+|delta|) and 1/g_s."""
    return tau * factor * (gamma_s + abs(delta)) <= 1.0 and tau * factor * g_s <= 1.0


def lorentzian_short_time_amplitude(g_s, gamma_s, delta, tau) -> complex:
    """First-order amplitude after ``tau`` for a Lorentzian line.

    ``1 - g^2/z [tau + (exp(-z tau) - 1)/z]`` with ``z = Gamma_s - i delta``.
    A :class:`ValidityWarning` is emitted outside the short-time regime.
    """
    if tau < 0:
        raise DomainError("tau must be >= 0")
    if not short_time_valid(g_s, gamma_s, delta, tau):
        warnings.warn(f"tau={tau:g} s is not short compared with 1/(Gamma_s+|delta|) and 1/g_s",
                      ValidityWarning, stacklevel=2)
    z = complex(gamma_s, -delta)
    return 1.0 - g_s ** 2 * tau ** 2 * _phi2(z * tau)


def lorentzian_interrupted_rate(g_s, gamma_s, delta, tau) -> float:
    """Closed-form interrupted rate ``(2/tau) Re[1 - alpha_e(tau)]`` of a Lorentzian line."""
    if not tau > 0:
        raise DomainError("interruption interval tau must be > 0")
    z = complex(gamma_s, -delta)
    return 2.0 * g_s ** 2 * tau * _phi2(z * tau).real


# Taylor coefficients of the non-log-free part of the closed form about f = 1
_SERIES = (3 / 4, -9 / 20, 1 / 5, -1 / 35, -1 / 14, 5 / 42, -2 / 15, 149 / 1155,
           -51 / 440, 343 / 3432, -23 / 273, 211 / 3003, -9 / 154, 237 / 4862)
_SERIES_RADIUS = 0.05


def _hydrogenic_bracket(f: complex) -> complex:
    eps = f - 1.0
    if abs(eps) < _SERIES_RADIUS:
        head = 0j
        for c in reversed(_SERIES):
            head = head * eps + c
    else:
        f2m1 = f * f - 1.0
        head = (f * (2 * f ** 4 - 7 * f * f + 11) / (2 * f2m1 ** 3)
                - 6 * f * cmath.log(f) / f2m1 ** 4)
    return head - 3j * math.pi * (f * f + 4 * f + 5) / (16 * (f + 1) ** 4)


def hydrogenic_validity_note(nu, omega_c):
    """Annotation for dephasing widths not small against the cutoff, else None."""
    if nu >= HYDROGENIC_VALIDITY_FRACTION * omega_c:
        return f"nu={nu:.3e} not << omega_c={omega_c:.3e}: outside model validity"
    return None


def hydrogenic_lorentzian_rate(alpha, omega_c, omega_a, nu) -> float:
    """Closed-form rate for the hydrogenic response under Lorentzian dephasing.

    Emits :class:`ValidityWarning` when ``nu`` is not small against ``omega_c``.
    """
    if not (nu > 0 and omega_a > 0 and omega_c > 0):
        raise DomainError("hydrogenic closed form needs nu, omega_a, omega_c > 0")
    note = hydrogenic_validity_note(nu, omega_c)
    if note:
        warnings.warn(note, ValidityWarning, stacklevel=2)
    if alpha == 0:
        return 0.0
    f = ComplexRatio(nu, omega_a, omega_c).value
    return alpha * omega_c / 3.0 * _hydrogenic_bracket(f).real


def sinc_vs_kernel_crosscheck(G: SpectralResponse, omega_a, tau, omega_ref=None) -> CrossCheck:
    """Interrupted rate from the sinc^2 overlap and from the memory kernel.

    The kernel is taken in the frame ``omega_ref`` with detuning
    ``omega_a - omega_ref``.  By default analytic kernels keep their natural
    frame and numerically synthesized ones rotate at ``omega_a``, where the
    time integrand carries no residual fast phase.
    """
    if not tau > 0:
        raise DomainError("interruption interval tau must be > 0")
    sharp, _ = _split(G)
    k_freq = universal_rate(sharp, SincSquaredFilter(tau), omega_a).kappa_s
    kernel = sharp.kernel(omega_ref)
    if omega_ref is None and not kernel.analytic:
        kernel = sharp.kernel(omega_a)
    k_time = impulsive_rate_time_domain(kernel, omega_a - kernel.omega_ref, tau)
    scale = max(abs(k_freq), abs(k_time))
    disc = abs(k_freq - k_time) / scale if scale > 0 else 0.0
    return CrossCheck(k_freq, k_time, disc)
