"""Excited-state dynamics with and without coherence-breaking interruptions.

The amplitude obeys the memory-kernel equation

    d alpha/dt = -int_0^t K(t - t') alpha(t') dt',   K(s) = Phi(s) exp(i delta s),

solved either in closed form (Lorentzian line) or by trapezoidal product
integration.  An interruption keeps the population but erases phase and
kernel memory, so each interval restarts from ``alpha = 1`` scaled by the
surviving amplitude.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .decay import impulsive_rate_time_domain, lorentzian_interrupted_rate
from .errors import DomainError, StepTooCoarseError
from .reservoirs import CompositeResponse, LorentzianMode, MemoryKernel, SpectralResponse

__all__ = [
    "MeasurementSchedule",
    "EvolutionTrace",
    "volterra_solve",
    "lorentzian_exact_amplitude",
    "amplitude_function",
    "sample_step",
    "aligned_times",
    "interrupted_evolution",
    "fit_decay_rate",
    "detuned_enhancement",
    "EnhancementRow",
]

#: largest h * rate accepted by the Volterra solver
STEP_CRITERION = 0.05
#: samples per Rabi period of the population and per 1/Gamma_s
SAMPLES_PER_FEATURE = 40


@dataclass(frozen=True)
class MeasurementSchedule:
    """Equally spaced interruptions every ``tau`` seconds.

    Give either the number of intervals ``n`` or a total duration ``t_max``.
    """

    tau: float
    n: int | None = None
    t_max: float | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError("interruption interval tau must be > 0")
        if (self.n is None) == (self.t_max is None):
            raise DomainError("give exactly one of n or t_max")
        if self.n is not None and (int(self.n) != self.n or self.n < 1):
            raise DomainError("interval count n must be a positive integer")
        if self.t_max is not None and not self.t_max > 0:
            raise DomainError("t_max must be > 0")

    @property
    def duration(self):
        return self.n * self.tau if self.n is not None else self.t_max

    @property
    def count(self):
        """Number of (possibly partial) intervals covering the duration."""
        if self.n is not None:
            return int(self.n)
        return max(1, math.ceil(self.t_max / self.tau - 1e-9))


@dataclass
class EvolutionTrace:
    """Sampled excited-state population and amplitude."""

    times: np.ndarray
    population: np.ndarray
    amplitude: np.ndarray
    interruptions: np.ndarray = field(default_factory=lambda: np.empty(0))
    label: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.population = np.asarray(self.population, dtype=float)
        self.amplitude = np.asarray(self.amplitude, dtype=complex)
        self.interruptions = np.asarray(self.interruptions, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("trace times must be strictly increasing")

    @property
    def interrupted_mask(self):
        if self.interruptions.size == 0:
            return np.zeros(self.times.shape, dtype=bool)
        gap = np.min(np.abs(self.times[:, None] - self.interruptions[None, :]), axis=1)
        return gap <= 1e-9 * max(self.times[-1], 1e-300)

    def to_csv(self, fh):
        """Write columns t, W, Re alpha_e, Im alpha_e, interrupted."""
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_s", "W", "re_alpha_e", "im_alpha_e", "interrupted"])
        for t, w, a, flag in zip(self.times, self.population, self.amplitude,
                                 self.interrupted_mask):
            writer.writerow([f"{t:.11e}", f"{w:.11e}", f"{a.real:.11e}", f"{a.imag:.11e}",
                             int(flag)])


def volterra_solve(kernel: MemoryKernel, delta, times) -> np.ndarray:
    """Amplitude samples on a uniform grid starting at t = 0.

    Trapezoidal product integration of the memory-kernel equation, second
    order in the step ``h``.  Raises :class:`StepTooCoarseError` unless
    ``h * max(|delta|, kernel.rate_scale) <= 0.05``.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1 or t[0] != 0.0:
        raise DomainError("time grid must be one-dimensional and start at 0")
    n = t.size
    if n == 1:
        return np.ones(1, dtype=complex)
    h = t[1] - t[0]
    if not h > 0 or not np.allclose(np.diff(t), h, rtol=1e-9, atol=0):
        raise DomainError("time grid must be uniform and increasing")
    rate = max(abs(delta), kernel.rate_scale)
    if h * rate > STEP_CRITERION:
        suggested = STEP_CRITERION / rate
        raise StepTooCoarseError(f"step {h:.3e} s too coarse; use <= {suggested:.3e} s", suggested)

    lags = h * np.arange(n)
    K = kernel(lags) * np.exp(1j * delta * lags)
    alpha = np.empty(n, dtype=complex)
    alpha[0] = 1.0
    f_prev = 0j  # d alpha/dt at t = 0
    denom = 1.0 + 0.25 * h * h * K[0]
    for m in range(1, n):
        # history part of -int_0^{t_m} K(t_m - s) alpha(s) ds, trapezoid weights
        hist = 0.5 * K[m] * alpha[0]
        if m > 1:
            hist += np.dot(K[m - 1:0:-1], alpha[1:m])
        s_m = -h * hist
        alpha[m] = (alpha[m - 1] + 0.5 * h * (f_prev + s_m)) / denom
        f_prev = s_m - 0.5 * h * K[0] * alpha[m]
    return alpha


def lorentzian_exact_amplitude(g_s, gamma_s, delta, t):
    """Closed-form amplitude for the Lorentzian kernel ``g^2 exp(-(Gamma - i delta) t)``.

    Solves ``a'' + (Gamma - i delta) a' + g^2 a = 0`` with ``a(0) = 1, a'(0) = 0``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    a = -complex(gamma_s, -delta) / 2.0
    b = cmath.sqrt(a * a - g_s * g_s)
    if b.real < 0:
        b = -b
    bt = b * t
    out = np.empty(t.shape, dtype=complex)
    small = np.abs(bt) < 0.1
    if np.any(small):
        x = bt[small]
        ts = t[small]
        x2 = x * x
        cosh = 1 + x2 / 2 * (1 + x2 / 12 * (1 + x2 / 30 * (1 + x2 / 56)))
        shc = 1 + x2 / 6 * (1 + x2 / 20 * (1 + x2 / 42 * (1 + x2 / 72)))
        out[small] = np.exp(a * ts) * (cosh - a * ts * shc)
    big = ~small
    if np.any(big):
        tb = t[big]
        out[big] = ((a + b) * np.exp((a - b) * tb) - (a - b) * np.exp((a + b) * tb)) / (2 * b)
    return out if out.ndim else complex(out)


def _sharp_lorentzian(system):
    sharp = system.sharp if isinstance(system, CompositeResponse) else system
    return sharp if isinstance(sharp, LorentzianMode) else None


def sample_step(system: SpectralResponse, delta):
    """Trace sampling step: 40 points per Rabi period and per 1/Gamma_s."""
    lor = _sharp_lorentzian(system)
    if lor is not None:
        rates = [lor.gamma_s, lor.g_s / math.pi, abs(delta) / (2 * math.pi)]
    else:
        rates = [system.kernel().rate_scale / (2 * math.pi), abs(delta) / (2 * math.pi)]
    return 1.0 / (SAMPLES_PER_FEATURE * max(rates))


def aligned_times(duration, dt, tau=None):
    """Uniform sampling of [0, duration] with step <= dt, hitting every multiple of tau."""
    if tau is None or tau >= duration:
        m = max(1, math.ceil(duration / dt))
        return np.linspace(0.0, duration, m + 1)
    m = max(1, math.ceil(tau / dt))
    count = max(1, math.ceil(duration / tau - 1e-9))
    s = np.linspace(0.0, tau, m + 1)[:-1]
    times = (tau * np.arange(count)[:, None] + s[None, :]).ravel()
    return np.append(times[times < duration * (1 - 1e-12)], duration)


def amplitude_function(system: SpectralResponse, delta, t_end):
    """Callable ``s -> alpha_e(s)`` on [0, t_end] for the sharp part of ``system``.

    Closed form for a Lorentzian line, otherwise a Volterra solution on a
    grid satisfying the step criterion (linearly interpolated).
    """
    lor = _sharp_lorentzian(system)
    if lor is not None:
        return lambda s: lorentzian_exact_amplitude(lor.g_s, lor.gamma_s, delta, s)
    sharp = system.sharp if isinstance(system, CompositeResponse) else system
    kernel = sharp.kernel()
    detuning = delta + sharp.reference_frequency() - kernel.omega_ref
    rate = max(abs(detuning), kernel.rate_scale)
    steps = max(2, math.ceil(t_end * rate / (0.5 * STEP_CRITERION)))
    grid = np.linspace(0.0, t_end, steps + 1)
    alpha = volterra_solve(kernel, detuning, grid)

    def interp(s):
        s = np.asarray(s, dtype=float)
        return np.interp(s, grid, alpha.real) + 1j * np.interp(s, grid, alpha.imag)

    return interp


def interrupted_evolution(system: SpectralResponse, delta, schedule: MeasurementSchedule | None,
                          t_max=None, times=None, label="") -> EvolutionTrace:
    """Population trace under equally spaced coherence-breaking interruptions.

    ``W(n tau + s) = exp(-gamma_b t) |alpha(tau)|^(2n) |alpha(s)|^2``.  With
    ``schedule=None`` the evolution is uninterrupted and ``t_max`` is required.

    Parameters
    ----------
    system : SpectralResponse
        Reservoir; a :class:`CompositeResponse` contributes its ``gamma_b``.
    delta : float
        Detuning of the atom from the reservoir reference frequency (rad/s).
    schedule : MeasurementSchedule or None
    t_max : float, optional
        Duration when uninterrupted.
    times : array_like, optional
        Explicit sample times; default is a grid aligned with interruptions.
    """
    gamma_b = system.gamma_b if isinstance(system, CompositeResponse) else 0.0
    if schedule is None:
        if t_max is None or not t_max > 0:
            raise DomainError("uninterrupted evolution needs t_max > 0")
        duration, tau, count = t_max, math.inf, 0
    else:
        duration, tau, count = schedule.duration, schedule.tau, schedule.count

    if times is None:
        times = aligned_times(duration, sample_step(system, delta),
                              None if schedule is None else tau)
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0:
        raise DomainError("trace must start at t = 0")

    amp = amplitude_function(system, delta, min(tau, duration))
    if schedule is None:
        n_done = np.zeros(times.shape, dtype=int)
        local = times
        surv = 1.0 + 0j
    else:
        n_done = np.floor(times / tau * (1 + 1e-12)).astype(int)
        local = np.clip(times - n_done * tau, 0.0, tau)
        surv = complex(amp(tau))
    mag = abs(surv) ** n_done
    alpha = np.exp(-0.5 * gamma_b * times) * mag * amp(local)
    pop = np.abs(alpha) ** 2
    pop[0] = 1.0
    pop = np.clip(pop, 0.0, 1.0)
    if schedule is None:
        marks = np.empty(0)
    else:
        marks = tau * np.arange(1, count + 1)
        marks = marks[marks <= duration * (1 + 1e-12)]
    return EvolutionTrace(times, pop, alpha, marks, label)


def fit_decay_rate(times, population, t_lo=None, t_hi=None):
    """Least-squares slope of ``-ln W`` on [t_lo, t_hi]; returns ``(rate, r_squared)``."""
    t = np.asarray(times, dtype=float)
    w = np.asarray(population, dtype=float)
    sel = np.ones(t.shape, dtype=bool)
    if t_lo is not None:
        sel &= t >= t_lo
    if t_hi is not None:
        sel &= t <= t_hi
    sel &= w > 0
    if sel.sum() < 2:
        raise DomainError("need at least two positive samples to fit a rate")
    y = -np.log(w[sel])
    x = t[sel]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(r2)


class EnhancementRow(NamedTuple):
    tau: float
    delta_tau: float
    kappa_eff: float
    kappa_s_eff: float
    kappa_s_pred: float
    kappa_free: float
    enhanced: bool


def detuned_enhancement(system: SpectralResponse, delta, taus, t_max):
    """Interrupted versus free decay at non-zero detuning.

    For each interval the effective rate is fitted to the population at the
    interruption instants and compared with the first-order prediction and
    with the envelope rate of the uninterrupted evolution.
    """
    if delta == 0:
        raise DomainError("detuned_enhancement needs a non-zero detuning")
    gamma_b = system.gamma_b if isinstance(system, CompositeResponse) else 0.0
    free = interrupted_evolution(system, delta, None, t_max=t_max)
    kappa_free, _ = fit_decay_rate(free.times, free.population)
    lor = _sharp_lorentzian(system)
    rows = []
    for tau in taus:
        trace = interrupted_evolution(system, delta, MeasurementSchedule(tau, t_max=t_max))
        at = np.concatenate(([0.0], trace.interruptions))
        w = np.interp(at, trace.times, trace.population)
        kappa_eff, _ = fit_decay_rate(at, w)
        if lor is not None:
            pred = lorentzian_interrupted_rate(lor.g_s, lor.gamma_s, delta, tau)
        else:
            sharp = system.sharp if isinstance(system, CompositeResponse) else system
            pred = impulsive_rate_time_domain(sharp.kernel(), delta, tau)
        rows.append(EnhancementRow(tau, delta * tau, kappa_eff, kappa_eff - gamma_b, pred,
                                   kappa_free, kappa_eff > kappa_free))
    return rows
