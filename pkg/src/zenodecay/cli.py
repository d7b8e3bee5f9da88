"""Command-line front end.

Parameters are layered: built-in defaults, then preset bindings, then a
``--config`` file, then flags.  Every command prints (or writes) a JSON
envelope echoing the effective configuration; tabular commands also produce
CSV and an SVG plot.

Exit status is 2 for configuration or domain errors, 3 when a numerical
routine fails to converge and 0 otherwise.
"""

from __future__ import annotations

import argparse
import io
import itertools
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import MODES, PARAMETERS, RunConfig, build_config, parse_key_values
from .decay import (CLOSED_FORM, QUADRATURE, TIME_DOMAIN, hydrogenic_lorentzian_rate,
                    hydrogenic_validity_note, impulsive_rate_time_domain,
                    lorentzian_interrupted_rate, short_time_valid, universal_rate)
from .errors import ConvergenceError, DomainError, ZenoError
from .evolution import MeasurementSchedule, interrupted_evolution
from .filters import LorentzianFilter, SincSquaredFilter, width_from_cw, width_from_noise
from .output import dumps_envelope, envelope, svg_plot, table_to_csv
from .reservoirs import CompositeResponse, HydrogenicResponse, LorentzianMode, load_tabulated
from .scenarios import (OPTICAL_OMEGA, PRESETS, AntiZenoPlan, CavityGeometry, PulseSchedule,
                        validate_schedule)

WORKERS_ENV = "ZENODECAY_WORKERS"

_CAVITY = {"reservoir": "cavity", "length": 15.0, "solid_angle": 0.02, "gamma_f": 1.0e6}

PRESET_BINDINGS = {
    "fig3": dict(_CAVITY, finesse=1.0e5, delta=0.0, tau=3.0e-8, t_max=4.0e-6),
    "fig4": dict(_CAVITY, finesse=1.0e6, delta=1.0e8, tau=5 * math.pi * 1e-8, t_max=4.0e-6),
    "antizeno": {"reservoir": "hydrogenic", "alpha": 1.0, "omega_c": 1.0e19, "omega_a": 1.0e15,
                 "filter": "lorentzian"},
}

RESERVOIR_DEFAULTS = {
    "lorentzian": {"omega_s": OPTICAL_OMEGA, "gamma_b": 0.0},
    "cavity": {"omega_s": OPTICAL_OMEGA},
    "hydrogenic": {"alpha": 1.0, "omega_c": 1.0e19, "omega_a": 1.0e15},
    "tabulated": {},
}

RESULT_UNITS = {"kappa_s": "1/s", "gamma_b": "1/s", "kappa": "1/s", "error": "1/s"}


def _column(name, unit):
    return f"{name} [{unit}]" if unit else name


# ----------------------------------------------------------------------------
# configuration assembly


def effective_params(cfg: RunConfig) -> dict:
    """Parameters after preset bindings and reservoir defaults are applied."""
    p = dict(PRESET_BINDINGS.get(cfg.params.get("preset"), {}))
    p.update(cfg.params)
    swept = {a.name for a in cfg.sweeps}
    reservoir = p.get("reservoir")
    for k, v in RESERVOIR_DEFAULTS.get(reservoir, {}).items():
        p.setdefault(k, v)
    for k in swept:
        p.pop(k, None)
    return p


def _require(p, *keys):
    missing = [k for k in keys if k not in p]
    if missing:
        raise DomainError(f"missing parameter(s): {', '.join(missing)}")
    return [p[k] for k in keys]


def build_system(p):
    """Reservoir model described by the flat parameters ``p``."""
    kind = p.get("reservoir")
    if kind == "lorentzian":
        g, gamma = _require(p, "g_s", "gamma_s")
        return CompositeResponse(LorentzianMode(g, gamma, p["omega_s"]), p.get("gamma_b", 0.0))
    if kind == "cavity":
        geom = CavityGeometry(*_require(p, "finesse", "length", "solid_angle", "gamma_f"))
        return geom.response(p["omega_s"])
    if kind == "hydrogenic":
        return HydrogenicResponse(p["alpha"], p["omega_c"])
    if kind == "tabulated":
        (path,) = _require(p, "table")
        return CompositeResponse(load_tabulated(path), p.get("gamma_b", 0.0))
    raise DomainError(f"reservoir must be one of {sorted(RESERVOIR_DEFAULTS)}, got {kind!r}")


def atomic_frequency(p):
    """``omega_a`` given directly or as ``omega_s + delta``."""
    if "omega_a" in p:
        wa = p["omega_a"]
    elif "omega_s" in p:
        wa = p["omega_s"] + p.get("delta", 0.0)
    else:
        raise DomainError("give omega_a (or omega_s and delta)")
    if not wa > 0:
        raise DomainError("omega_a must be > 0")
    return wa


def build_filter(p):
    """Sinc^2 window from ``tau`` or Lorentzian window from ``nu`` / noise / CW drive."""
    kind = p.get("filter")
    lorentz_keys = [k for k in ("nu", "noise_ms", "cw_rabi") if k in p]
    if kind is None:
        if lorentz_keys and "tau" in p:
            raise DomainError("both tau and a Lorentzian width given; set filter = sinc|lorentzian")
        kind = "lorentzian" if lorentz_keys else "sinc" if "tau" in p else None
    if kind == "sinc":
        (tau,) = _require(p, "tau")
        return SincSquaredFilter(tau)
    if kind == "lorentzian":
        if "nu" in p:
            return LorentzianFilter(p["nu"])
        if "noise_ms" in p:
            return LorentzianFilter(width_from_noise(*_require(p, "noise_ms", "noise_tc")))
        if "cw_rabi" in p:
            return LorentzianFilter(width_from_cw(*_require(p, "cw_rabi", "cw_gamma_u")))
        raise DomainError("Lorentzian filter needs nu, noise_ms+noise_tc or cw_rabi+cw_gamma_u")
    if kind is None:
        raise DomainError("no filter: give tau (impulsive) or nu (Lorentzian)")
    raise DomainError(f"filter must be sinc or lorentzian, got {kind!r}")


def compute_rate(p):
    """Rate for one parameter point; returns (values dict, annotations)."""
    system = build_system(p)
    omega_a = atomic_frequency(p)
    filt = build_filter(p)
    sharp = system.sharp if isinstance(system, CompositeResponse) else system
    gamma_b = system.gamma_b if isinstance(system, CompositeResponse) else 0.0
    method = p.get("method", "auto")
    hydro_lorentz = isinstance(sharp, HydrogenicResponse) and isinstance(filt, LorentzianFilter)
    lorentz_sinc = isinstance(sharp, LorentzianMode) and isinstance(filt, SincSquaredFilter)
    if method == "auto":
        method = CLOSED_FORM if hydro_lorentz else QUADRATURE

    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        error = 0.0
        if method == QUADRATURE:
            res = universal_rate(sharp, filt, omega_a)
            kappa_s, error = res.kappa_s, res.error
        elif method == TIME_DOMAIN:
            if not isinstance(filt, SincSquaredFilter):
                raise DomainError("time-domain method needs the impulsive (sinc) filter")
            kernel = sharp.kernel()
            if not kernel.analytic:
                kernel = sharp.kernel(omega_a)
            kappa_s = impulsive_rate_time_domain(kernel, omega_a - kernel.omega_ref, filt.tau)
        elif method == CLOSED_FORM:
            if hydro_lorentz:
                kappa_s = hydrogenic_lorentzian_rate(sharp.alpha, sharp.omega_c, omega_a, filt.nu)
            elif lorentz_sinc:
                kappa_s = lorentzian_interrupted_rate(sharp.g_s, sharp.gamma_s,
                                                      omega_a - sharp.omega_s, filt.tau)
            else:
                raise DomainError("closed form exists for hydrogenic+lorentzian and "
                                  "lorentzian+sinc only")
        else:
            raise DomainError(f"unknown method {method!r}")
    notes.extend(str(w.message) for w in caught)
    if hydro_lorentz and method != CLOSED_FORM:
        note = hydrogenic_validity_note(filt.nu, sharp.omega_c)
        if note:
            notes.append(note)
    if lorentz_sinc and not short_time_valid(sharp.g_s, sharp.gamma_s,
                                             omega_a - sharp.omega_s, filt.tau):
        notes.append(f"tau={filt.tau:g} s is outside the short-time (first-order) regime")
    values = {"kappa_s": float(kappa_s), "gamma_b": float(gamma_b),
              "kappa": float(kappa_s + gamma_b), "error": float(error), "method": method}
    return values, notes


def _sweep_point(args):
    p, names, values = args
    q = dict(p)
    q.update(zip(names, values))
    return compute_rate(q)


def worker_count(flag=None):
    if flag is not None:
        n = flag
    else:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise DomainError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise DomainError("worker count must be >= 1")
    return n


# ----------------------------------------------------------------------------
# commands; each returns (stem, envelope, csv text or None, svg text or None)


def run_rate(cfg, p, opts):
    values, notes = compute_rate(p)
    env = envelope("rate", p, values, notes, {"kappa_s": values["error"]})
    return "rate", env, None, None


def run_sweep(cfg, p, opts):
    names = [a.name for a in cfg.sweeps]
    grids = [a.values() for a in cfg.sweeps]
    points = list(itertools.product(*grids))
    jobs = [(p, names, pt) for pt in points]
    n = worker_count(opts.workers)
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]

    out_cols = ["kappa_s", "gamma_b", "kappa", "error"]
    columns = ([_column(nm, PARAMETERS[nm][1]) for nm in names]
               + [_column(c, RESULT_UNITS[c]) for c in out_cols])
    rows = [list(pt) + [r[0][c] for c in out_cols] for pt, r in zip(points, results)]
    notes = sorted({note for _, ns in results for note in ns})
    methods = sorted({r[0]["method"] for r in results})
    summary = {"points": len(rows), "methods": methods}
    if len(names) == 1:
        k = np.array([r[-2] for r in rows])
        summary["strictly_increasing"] = bool(np.all(np.diff(k) > 0))
    echo = dict(p, **{a.name: a.text() for a in cfg.sweeps})
    env = envelope("sweep", echo, summary, notes,
                   {"max_abs_error": max(r[-1] for r in rows)})
    csv_text = table_to_csv(columns, rows)
    svg = None
    if len(names) == 1:
        axis = cfg.sweeps[0]
        x = [r[0] for r in rows]
        svg = svg_plot([("kappa", x, [r[-2] for r in rows])], title="decay rate sweep",
                       xlabel=columns[0], ylabel="kappa [1/s]", log_x=axis.spacing == "log",
                       log_y=all(r[-2] > 0 for r in rows) and axis.spacing == "log")
    return "sweep", env, csv_text, svg


_PLAN_FIELDS = {
    "fig3": {"tau": "tau", "t_max": "t_max", "delta": "delta"},
    "fig4": {"finesse": "finesse_factor", "delta": "delta", "t_max": "t_max"},
    "antizeno": {"alpha": "alpha", "omega_c": "omega_c"},
}


def build_plan(cfg):
    """Preset plan with user-supplied overrides of its adjustable fields."""
    name = cfg.params.get("preset")
    if name not in PRESETS:
        raise DomainError(f"preset must be one of {sorted(PRESETS)}")
    plan = PRESETS[name]()
    user = cfg.params
    changes = {field: user[key] for key, field in _PLAN_FIELDS[name].items() if key in user}
    if name == "fig4" and "tau" in user:
        changes["taus"] = (user["tau"],)
    if name == "antizeno" and "omega_a" in user:
        changes["omega_a_values"] = (user["omega_a"],)
    return replace(plan, **changes)


def run_plan(cfg, p, opts):
    plan = build_plan(cfg)
    res = plan.run()
    if isinstance(plan, AntiZenoPlan):
        series = plan.series_by_omega_a(res)
        ylabel = "kappa / (2 pi G(omega_a))"
        xlabel = "nu [rad/s]"
    else:
        t = res.rows[:, res.x_column]
        series = [(label, t, res.rows[:, col]) for label, col in res.series]
        xlabel, ylabel = "t [s]", "W(t)"
    svg = svg_plot(series, title=plan.name, xlabel=xlabel, ylabel=ylabel,
                   log_x=res.log_x, log_y=res.log_y)
    env = envelope(cfg.mode, {"preset": plan.name, **plan.parameters()}, res.checks, res.notes)
    return plan.name, env, table_to_csv(res.columns, res.rows), svg


def run_evolve(cfg, p, opts):
    if "preset" in cfg.params:
        if cfg.params["preset"] not in ("fig3", "fig4"):
            raise DomainError("evolve presets: fig3, fig4")
        return run_plan(cfg, p, opts)
    system = build_system(p)
    omega_a = atomic_frequency(p)
    sharp = system.sharp if isinstance(system, CompositeResponse) else system
    delta = omega_a - sharp.reference_frequency()
    if "tau" in p:
        if "n" in p:
            sched = MeasurementSchedule(p["tau"], n=p["n"])
        else:
            sched = MeasurementSchedule(p["tau"], t_max=_require(p, "t_max")[0])
        trace = interrupted_evolution(system, delta, sched)
    else:
        trace = interrupted_evolution(system, delta, None, t_max=_require(p, "t_max")[0])
    buf = io.StringIO()
    trace.to_csv(buf)
    summary = {"samples": int(trace.times.size), "final_population": float(trace.population[-1]),
               "interruptions": int(trace.interruptions.size)}
    env = envelope("evolve", p, summary)
    svg = svg_plot([("W(t)", trace.times, trace.population)], title="excited-state population",
                   xlabel="t [s]", ylabel="W(t)")
    return "evolve", env, buf.getvalue(), svg


def run_validate(cfg, p, opts):
    results = {"config_valid": True}
    notes = []
    sched_keys = ("tau", "t_p", "omega_p", "gamma_u")
    if any(k in p for k in ("t_p", "omega_p", "gamma_u")):
        tau, t_p, omega_p, gamma_u = _require(p, *sched_keys)
        report = validate_schedule(PulseSchedule(tau, t_p, omega_p, gamma_u))
        results["schedule_ok"] = report.ok
        results["schedule_checks"] = {k: {"passed": v[0], "value": v[1], "bound": v[2]}
                                      for k, v in report.checks.items()}
        notes += [f"schedule condition {k} violated" for k, v in report.checks.items() if not v[0]]
    if "reservoir" in p:
        system = build_system(p)
        sharp = system.sharp if isinstance(system, CompositeResponse) else system
        if isinstance(sharp, LorentzianMode):
            results["gamma_s"] = sharp.gamma_s
            results["g_s"] = sharp.g_s
            results["gamma_b"] = system.gamma_b
            if "tau" in p:
                delta = atomic_frequency(p) - sharp.omega_s
                ok = short_time_valid(sharp.g_s, sharp.gamma_s, delta, p["tau"])
                results["short_time_regime"] = ok
    env = envelope("validate", p, results, notes)
    return "validate", env, None, None


COMMANDS = {"rate": run_rate, "evolve": run_evolve, "sweep": run_sweep, "preset": run_plan,
            "validate": run_validate}


# ----------------------------------------------------------------------------
# argument parsing


def _parser():
    parser = argparse.ArgumentParser(
        prog="zenodecay",
        description="Measurement-modified spontaneous decay rates and population traces. "
                    "Frequencies in rad/s, times in s.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        sp.add_argument("--config", type=Path, help="flat key = value file")
        sp.add_argument("--out", type=Path, help="directory for CSV/JSON/SVG outputs")
        sp.add_argument("--no-plot", action="store_true", help="skip the SVG output")
        sp.add_argument("--format", choices=("json", "csv"),
                        help="what to print on stdout when --out is not given")
        sp.add_argument("--workers", type=int, help=f"sweep processes (default ${WORKERS_ENV} or 1)")
        sp.add_argument("--write-config", type=Path,
                        help="write the merged configuration to this file")
        for name, (_, unit, text) in PARAMETERS.items():
            suffix = f" [{unit}]" if unit else ""
            sp.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None,
                            help=text + suffix)
    return parser


def load_config(ns) -> RunConfig:
    raw = {}
    if ns.config is not None:
        try:
            text = ns.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise DomainError(f"cannot read config: {exc}") from None
        raw = parse_key_values(text)
        file_mode = raw.pop("mode", None)
        if file_mode not in (None, ns.mode):
            raise DomainError(f"config file is for mode {file_mode!r}, not {ns.mode!r}")
    for name in PARAMETERS:
        value = getattr(ns, name)
        if value is not None:
            raw[name] = value
    return build_config(ns.mode, raw)


def _emit(stem, env, csv_text, svg, ns, stdout):
    json_text = dumps_envelope(env)
    if ns.out is not None:
        ns.out.mkdir(parents=True, exist_ok=True)
        (ns.out / f"{stem}.json").write_text(json_text, encoding="utf-8")
        if csv_text is not None:
            (ns.out / f"{stem}.csv").write_text(csv_text, encoding="utf-8")
        if svg is not None and not ns.no_plot:
            (ns.out / f"{stem}.svg").write_text(svg, encoding="utf-8")
        return
    fmt = ns.format or ("csv" if csv_text is not None else "json")
    if fmt == "csv" and csv_text is None:
        raise DomainError(f"{ns.mode} produces no table; use --format json")
    stdout.write(csv_text if fmt == "csv" else json_text)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(ns)
        if ns.write_config is not None:
            ns.write_config.write_text(cfg.to_text(), encoding="utf-8")
        p = effective_params(cfg)
        stem, env, csv_text, svg = COMMANDS[cfg.mode](cfg, p, ns)
        _emit(stem, env, csv_text, svg, ns, stdout)
    except ConvergenceError as exc:
        print(f"zenodecay: numerical non-convergence: {exc}", file=stderr)
        return 3
    except (ZenoError, ValueError, OSError) as exc:
        print(f"zenodecay: error: {exc}", file=stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
