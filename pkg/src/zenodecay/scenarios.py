"""Cavity parameter mapping, pulse-schedule feasibility and figure presets."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .decay import hydrogenic_lorentzian_rate, universal_rate
from .errors import DomainError
from .evolution import (MeasurementSchedule, aligned_times, detuned_enhancement, fit_decay_rate,
                        interrupted_evolution, sample_step)
from .filters import LorentzianFilter
from .reservoirs import CompositeResponse, HydrogenicResponse, LorentzianMode

__all__ = [
    "SPEED_OF_LIGHT",
    "OPTICAL_OMEGA",
    "CavityGeometry",
    "CavityParams",
    "cavity_params",
    "PulseSchedule",
    "ScheduleReport",
    "validate_schedule",
    "PresetResult",
    "Fig3Plan",
    "Fig4Plan",
    "AntiZenoPlan",
    "PRESETS",
    "preset",
]

#: cm/s
SPEED_OF_LIGHT = 3.0e10
#: line center for cavity presets (rad/s); only sets the omega < 0 truncation
OPTICAL_OMEGA = 3.0e15


class CavityParams(NamedTuple):
    gamma_s: float
    g_s: float
    gamma_b: float


@dataclass(frozen=True)
class CavityGeometry:
    """Open confocal cavity.

    Attributes
    ----------
    finesse_factor : float
        ``(1 - R)^-2`` with R the geometric-mean mirror reflectivity.
    length : float
        Mirror separation (cm).
    solid_angle : float
        Fraction of 4 pi subtended by the mirrors.
    gamma_f : float
        Free-space decay rate (1/s).
    """

    finesse_factor: float
    length: float
    solid_angle: float
    gamma_f: float
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.finesse_factor > 1:
            raise DomainError("finesse factor (1-R)^-2 must exceed 1")
        if not self.length > 0:
            raise DomainError("cavity length must be > 0")
        if not 0 < self.solid_angle < 1:
            raise DomainError("solid-angle fraction must lie in (0, 1)")
        if not self.gamma_f > 0:
            raise DomainError("free-space rate gamma_f must be > 0")

    def params(self) -> CavityParams:
        return cavity_params(self)

    def response(self, omega_s=OPTICAL_OMEGA) -> CompositeResponse:
        p = self.params()
        return CompositeResponse(LorentzianMode(p.g_s, p.gamma_s, omega_s), p.gamma_b)


def cavity_params(geom: CavityGeometry) -> CavityParams:
    """Line width, coupling and background rate of an open cavity.

    ``Gamma_s = (1-R) c / L``, ``g_s = sqrt(c f gamma_f / (2L))``, ``gamma_b = (1-f) gamma_f``.
    """
    one_minus_r = 1.0 / math.sqrt(geom.finesse_factor)
    gamma_s = one_minus_r * geom.c / geom.length
    g_s = math.sqrt(geom.c * geom.solid_angle * geom.gamma_f / (2.0 * geom.length))
    gamma_b = (1.0 - geom.solid_angle) * geom.gamma_f
    return CavityParams(gamma_s, g_s, gamma_b)


@dataclass(frozen=True)
class PulseSchedule:
    """Impulsive measurements realized by pump pulses through an auxiliary level."""

    tau: float
    t_p: float
    omega_p: float
    gamma_u: float


class ScheduleReport(NamedTuple):
    checks: dict
    ok: bool


def validate_schedule(s: PulseSchedule, spacing=10.0, pulse_ratio=0.1, pi_tolerance=0.05):
    """Feasibility of a pi-pulse measurement sequence.

    Each entry of ``checks`` maps a condition name to ``(passed, value, bound)``.
    """
    values = [s.tau, s.t_p, s.omega_p, s.gamma_u]
    if not all(v > 0 for v in values):
        bad = {"positive": (False, min(values), 0.0)}
        return ScheduleReport(bad, False)
    area = s.omega_p * s.t_p
    checks = {
        "interval_vs_pulse": (s.tau / s.t_p >= spacing, s.tau / s.t_p, spacing),
        "pi_pulse": (abs(area - math.pi) <= pi_tolerance * math.pi, area / math.pi, pi_tolerance),
        "pulse_vs_aux_lifetime": (s.t_p * s.gamma_u <= pulse_ratio, s.t_p * s.gamma_u, pulse_ratio),
        "interval_vs_aux_lifetime": (s.tau * s.gamma_u >= spacing, s.tau * s.gamma_u, spacing),
    }
    return ScheduleReport(checks, all(c[0] for c in checks.values()))


@dataclass
class PresetResult:
    """Tabulated output of a preset plus the series to plot and scalar checks."""

    name: str
    columns: list
    rows: np.ndarray
    series: list  # (label, column index for y)
    x_column: int = 0
    log_x: bool = False
    log_y: bool = False
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def _fig_cavity(finesse):
    return CavityGeometry(finesse, 15.0, 0.02, 1.0e6)


@dataclass(frozen=True)
class Fig3Plan:
    """Resonant Zeno inhibition in an open cavity."""

    finesse_factors: tuple = (1.0e5, 1.0e6)
    delta: float = 0.0
    tau: float = 3.0e-8
    t_max: float = 4.0e-6
    fit_window: tuple = (2.0e-6, 4.0e-6)
    omega_s: float = OPTICAL_OMEGA
    name: str = "fig3"

    def parameters(self):
        d = asdict(self)
        d.update(length_cm=15.0, solid_angle=0.02, gamma_f=1.0e6)
        return d

    def systems(self):
        return [_fig_cavity(F).response(self.omega_s) for F in self.finesse_factors]

    def run(self) -> PresetResult:
        weak, strong = self.systems()
        dt = min(sample_step(s, self.delta) for s in (weak, strong))
        times = aligned_times(self.t_max, dt, self.tau)
        sched = MeasurementSchedule(self.tau, t_max=self.t_max)
        inter = interrupted_evolution(weak, self.delta, sched, times=times)
        inter_strong = interrupted_evolution(strong, self.delta, sched, times=times)
        free_weak = interrupted_evolution(weak, self.delta, None, t_max=self.t_max, times=times)
        free_strong = interrupted_evolution(strong, self.delta, None, t_max=self.t_max, times=times)
        background = np.exp(-weak.gamma_b * times)

        at = np.concatenate(([0.0], inter.interruptions))
        w_at = np.interp(at, times, inter.population)
        kappa_fit, _ = fit_decay_rate(at, w_at, *self.fit_window)
        g_s = weak.sharp.g_s
        predicted = g_s ** 2 * self.tau + weak.gamma_b
        diff = np.abs(inter.population - inter_strong.population)
        checks = {
            "gamma_s": [s.sharp.gamma_s for s in (weak, strong)],
            "g_s": g_s,
            "gamma_b": weak.gamma_b,
            "kappa_fit_interrupted": kappa_fit,
            "kappa_zeno_prediction": predicted,
            "kappa_rel_deviation": kappa_fit / predicted - 1.0,
            "interrupted_max_abs_difference": float(diff.max()),
            "interrupted_max_rel_difference": float((diff / inter.population).max()),
        }
        rows = np.column_stack([times, background, inter.population, free_weak.population,
                                free_strong.population])
        cols = ["t_s", "curve1_background", "curve2_interrupted", "curve3_free_F1e5",
                "curve4_free_F1e6"]
        series = [("1: background modes", 1), (f"2: interrupted, tau={self.tau:g} s", 2),
                  ("3: free, F=1e5", 3), ("4: free, F=1e6", 4)]
        return PresetResult(self.name, cols, rows, series, checks=checks)


@dataclass(frozen=True)
class Fig4Plan:
    """Detuned cavity: interruptions accelerate the decay."""

    finesse_factor: float = 1.0e6
    delta: float = 1.0e8
    taus: tuple = (5 * math.pi * 1e-8, 3 * math.pi * 1e-8)
    t_max: float = 4.0e-6
    omega_s: float = OPTICAL_OMEGA
    name: str = "fig4"

    def parameters(self):
        d = asdict(self)
        d.update(length_cm=15.0, solid_angle=0.02, gamma_f=1.0e6)
        return d

    def system(self):
        return _fig_cavity(self.finesse_factor).response(self.omega_s)

    def run(self) -> PresetResult:
        system = self.system()
        times = aligned_times(self.t_max, sample_step(system, self.delta))
        free = interrupted_evolution(system, self.delta, None, t_max=self.t_max, times=times)
        traces = [interrupted_evolution(system, self.delta,
                                        MeasurementSchedule(tau, t_max=self.t_max), times=times)
                  for tau in self.taus]
        background = np.exp(-system.gamma_b * times)
        table = detuned_enhancement(system, self.delta, self.taus, self.t_max)
        checks = {"enhancement": [row._asdict() for row in table]}
        rows = np.column_stack([times, background, free.population]
                               + [tr.population for tr in traces])
        cols = ["t_s", "curve1_background", "curve2_free"] + [
            f"curve{k + 3}_interrupted_dtau_{self.delta * tau / math.pi:.0f}pi"
            for k, tau in enumerate(self.taus)]
        series = [("1: background modes", 1), ("2: free evolution", 2)] + [
            (f"{k + 3}: interrupted, delta*tau={self.delta * tau / math.pi:.0f}pi", k + 3)
            for k, tau in enumerate(self.taus)]
        return PresetResult(self.name, cols, rows, series, checks=checks)


@dataclass(frozen=True)
class AntiZenoPlan:
    """Free-space hydrogenic decay under Lorentzian dephasing."""

    alpha: float = 1.0
    omega_c: float = 1.0e19
    omega_a_values: tuple = (1.0e15, 1.0e16, 1.0e17)
    nu_min: float = 1.0e12
    nu_max: float = 1.0e17
    nu_points: int = 50
    name: str = "antizeno"

    def parameters(self):
        return asdict(self)

    def nu_grid(self):
        return np.logspace(math.log10(self.nu_min), math.log10(self.nu_max), self.nu_points)

    def run(self) -> PresetResult:
        G = HydrogenicResponse(self.alpha, self.omega_c)
        rows = []
        monotone = {}
        for wa in self.omega_a_values:
            golden = 2 * math.pi * G(wa)
            ks = []
            for nu in self.nu_grid():
                k_closed = hydrogenic_lorentzian_rate(self.alpha, self.omega_c, wa, nu)
                k_quad = universal_rate(G, LorentzianFilter(nu), wa).kappa_s
                ks.append(k_closed)
                rows.append([wa, nu, k_closed, k_quad, golden, k_closed / golden])
            monotone[f"{wa:.3e}"] = bool(np.all(np.diff(ks) > 0))
        rows = np.array(rows)
        rel = np.abs(rows[:, 2] / rows[:, 3] - 1.0)
        checks = {"strictly_increasing": monotone, "closed_vs_quadrature_max_rel": float(rel.max())}
        cols = ["omega_a_rad_s", "nu_rad_s", "kappa_closed_form", "kappa_quadrature",
                "golden_rule", "kappa_over_golden_rule"]
        return PresetResult(self.name, cols, rows, [], x_column=1, log_x=True, checks=checks)

    def series_by_omega_a(self, result: PresetResult):
        out = []
        for wa in self.omega_a_values:
            sel = result.rows[:, 0] == wa
            out.append((f"omega_a={wa:.0e} rad/s", result.rows[sel, 1], result.rows[sel, 5]))
        return out


PRESETS = {"fig3": Fig3Plan, "fig4": Fig4Plan, "antizeno": AntiZenoPlan}


def preset(name):
    """Fully bound computation plan for a named figure."""
    try:
        return PRESETS[name]()
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
