"""Run configuration: flat ``key = value`` files merged with command-line flags."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

MODES = ("rate", "evolve", "sweep", "preset", "validate")

# name -> (type, unit, help)
PARAMETERS = {
    "reservoir": (str, "", "lorentzian | cavity | hydrogenic | tabulated"),
    "g_s": (float, "rad/s", "resonant coupling of the Lorentzian line"),
    "gamma_s": (float, "1/s", "half width of the Lorentzian line"),
    "omega_s": (float, "rad/s", "line center"),
    "gamma_b": (float, "1/s", "background-mode decay rate"),
    "finesse": (float, "", "cavity factor (1-R)^-2"),
    "length": (float, "cm", "cavity length"),
    "solid_angle": (float, "", "fractional solid angle of the cavity"),
    "gamma_f": (float, "1/s", "free-space decay rate"),
    "alpha": (float, "", "hydrogenic coupling constant"),
    "omega_c": (float, "rad/s", "hydrogenic cutoff frequency"),
    "table": (str, "", "two-column (omega, G) file for a tabulated response"),
    "omega_a": (float, "rad/s", "atomic transition frequency"),
    "delta": (float, "rad/s", "detuning omega_a - omega_s"),
    "filter": (str, "", "sinc | lorentzian"),
    "tau": (float, "s", "interruption interval"),
    "n": (int, "", "number of interruption intervals"),
    "nu": (float, "rad/s", "Lorentzian dephasing half width"),
    "noise_ms": (float, "rad^2/s^2", "mean-square Stark shift"),
    "noise_tc": (float, "s", "noise correlation time"),
    "cw_rabi": (float, "rad/s", "CW Rabi frequency on the auxiliary transition"),
    "cw_gamma_u": (float, "1/s", "auxiliary-level decay rate for CW dephasing"),
    "method": (str, "", "auto | quadrature | time-domain | closed-form"),
    "t_max": (float, "s", "evolution duration"),
    "t_p": (float, "s", "pump pulse duration"),
    "omega_p": (float, "rad/s", "pump Rabi frequency"),
    "gamma_u": (float, "1/s", "auxiliary-level decay rate"),
    "preset": (str, "", "fig3 | fig4 | antizeno"),
}

SWEEPABLE = tuple(k for k, v in PARAMETERS.items() if v[0] is float)


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    spacing: str
    count: int

    @classmethod
    def parse(cls, name, text):
        parts = text.split(":")
        if len(parts) != 4:
            raise DomainError(f"sweep axis {name}: expected lo:hi:linear|log:count, got {text!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[3])
        except ValueError:
            raise DomainError(f"sweep axis {name}: malformed {text!r}") from None
        return cls(name, lo, hi, parts[2], count)

    def validate(self):
        if self.name not in SWEEPABLE:
            raise DomainError(f"cannot sweep {self.name!r}; sweepable: {', '.join(SWEEPABLE)}")
        if self.spacing not in ("linear", "log"):
            raise DomainError(f"sweep axis {self.name}: spacing must be linear or log")
        if self.count < 2:
            raise DomainError(f"sweep axis {self.name}: need at least 2 points")
        if self.spacing == "log" and not (self.lo > 0 and self.hi > 0):
            raise DomainError(f"sweep axis {self.name}: log spacing needs positive bounds")

    def values(self):
        import numpy as np

        if self.spacing == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def text(self):
        return f"{self.lo!r}:{self.hi!r}:{self.spacing}:{self.count}"


def convert(name, raw):
    """Convert a textual value to the declared type of ``name``."""
    if name not in PARAMETERS:
        raise DomainError(f"unknown parameter {name!r}")
    kind = PARAMETERS[name][0]
    if isinstance(raw, kind) and not isinstance(raw, bool):
        return raw
    try:
        return kind(raw)
    except (TypeError, ValueError):
        raise DomainError(f"parameter {name}: cannot read {raw!r} as {kind.__name__}") from None


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: dict = field(default_factory=dict)
    sweeps: tuple = ()

    def validate(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        for k, v in self.params.items():
            if convert(k, v) != v:
                raise DomainError(f"parameter {k} has the wrong type")
        if self.sweeps and self.mode != "sweep":
            raise DomainError("range values are only allowed in sweep mode")
        if self.mode == "sweep" and not self.sweeps:
            raise DomainError("sweep mode needs at least one lo:hi:spacing:count axis")
        names = [a.name for a in self.sweeps]
        if len(set(names)) != len(names):
            raise DomainError("duplicate sweep axis")
        for axis in self.sweeps:
            axis.validate()
            if axis.name in self.params:
                raise DomainError(f"{axis.name} given both as value and as sweep axis")
        return self

    def to_text(self) -> str:
        lines = [f"mode = {self.mode}"]
        for k in sorted(self.params):
            v = self.params[k]
            lines.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
        for axis in self.sweeps:
            lines.append(f"{axis.name} = {axis.text()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, mode=None):
        raw = parse_key_values(text)
        file_mode = raw.pop("mode", None)
        return build_config(mode or file_mode, raw)

    def as_dict(self):
        d = {"mode": self.mode}
        d.update(self.params)
        d.update({a.name: a.text() for a in self.sweeps})
        return d


def parse_key_values(text) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def build_config(mode, raw: dict) -> RunConfig:
    """Typed configuration from string (or already typed) values."""
    if mode is None:
        raise DomainError("no mode given")
    params, sweeps = {}, []
    for key, value in raw.items():
        if value is None:
            continue
        if isinstance(value, str) and value.count(":") == 3 and PARAMETERS.get(key, (None,))[0] is float:
            sweeps.append(SweepAxis.parse(key, value))
        else:
            params[key] = convert(key, value)
    sweeps.sort(key=lambda a: list(PARAMETERS).index(a.name) if a.name in PARAMETERS else -1)
    return RunConfig(mode, params, tuple(sweeps)).validate()
