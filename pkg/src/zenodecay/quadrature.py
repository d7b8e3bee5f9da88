"""Peak-aware adaptive quadrature on panels.

The integrands met here are products of narrow peaks (cavity lines,
dephasing windows) that may sit many widths apart, and slowly decaying
oscillatory tails.  Everything is built on QUADPACK through
:func:`scipy.integrate.quad`: the domain is first cut at feature points so
that each panel holds at most one sharp structure, and oscillatory factors
are handled with the cosine/sine weighted rules (QAWO on finite panels,
QAWF on the semi-infinite tail).
"""

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import ConvergenceError

DEFAULT_MULTIPLES = (0.0, 1.0, 10.0, 100.0, 1.0e3, 1.0e4)
_QUAD_LIMIT = 400
_QAWF_LIMLST = 200


def feature_points(features, lower=0.0, upper=math.inf, multiples=DEFAULT_MULTIPLES):
    """Breakpoints ``center +/- m * width`` for every feature, clipped to [lower, upper].

    Parameters
    ----------
    features : iterable of (center, width)
        Locations and widths of sharp spectral structures.
    lower, upper : float
        Integration limits. Both finite limits are included in the output.
    multiples : sequence of float
        Multiples of each width at which to cut; beyond the largest one cuts
        continue at decades until both finite limits are reached.

    Returns
    -------
    ndarray
        Sorted, de-duplicated breakpoints.
    """
    pts = [lower]
    if math.isfinite(upper):
        pts.append(upper)
    top = max(multiples, default=0.0)
    for center, width in features:
        for m in multiples:
            pts.append(center - m * width)
            pts.append(center + m * width)
        # keep cutting at decades so no finite panel dwarfs the feature
        m = 10.0 * top
        while width > 0 and top > 0 and (center - m * width > lower
                                           or center + m * width < upper < math.inf):
            pts.append(center - m * width)
            pts.append(center + m * width)
            m *= 10.0
    arr = np.array([p for p in pts if lower <= p <= upper and math.isfinite(p)])
    arr = np.unique(arr)
    if arr.size > 1:
        local = np.maximum(np.abs(arr[1:]), np.abs(arr[:-1]))
        keep = np.concatenate(([True], np.diff(arr) > 1e-13 * local))
        arr = arr[keep]
    return arr


def _quad(func, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(func, a, b, **kw)[:2]
    return val, err


def integrate_panels(func, points, tail=False, epsrel=1e-11, atol=0.0, weight=None, wvar=None):
    """Sum of adaptive integrals over consecutive panels.

    Parameters
    ----------
    func : callable
        Real scalar integrand.
    points : array_like
        Sorted panel boundaries.
    tail : bool
        Also integrate from ``points[-1]`` to +infinity.
    epsrel, atol : float
        Per-panel relative and absolute tolerances handed to QUADPACK.
    weight, wvar :
        Optional ``'cos'``/``'sin'`` weight and its angular frequency.

    Returns
    -------
    value, abserr : float
    """
    points = np.asarray(points, dtype=float)
    total = 0.0
    abserr = 0.0
    kw = dict(epsabs=atol, epsrel=epsrel, limit=_QUAD_LIMIT)
    if weight is not None:
        kw.update(weight=weight, wvar=wvar)
    for a, b in zip(points[:-1], points[1:]):
        val, err = _quad(func, a, b, **kw)
        total += val
        abserr += err
    if tail:
        start = points[-1]
        if weight is None:
            # QUADPACK maps [a, inf) assuming unit length scale; rescale first
            span = points[-1] - points[-2] if points.size > 1 else 0.0
            scale = max(abs(start), span) or 1.0
            val, err = _quad(lambda s: scale * func(start + scale * s), 0.0, math.inf,
                             epsabs=atol, epsrel=epsrel, limit=_QUAD_LIMIT)
        else:
            # QAWF rejects epsabs == 0
            eps = max(atol, epsrel * abs(total), 1e-300)
            val, err = _quad(func, start, math.inf, weight=weight, wvar=wvar,
                             epsabs=eps, limlst=_QAWF_LIMLST, limit=_QUAD_LIMIT)
        total += val
        abserr += err
    return total, abserr


def fourier_integral(func, points, t, tail=True, epsrel=1e-11, atol=0.0):
    """Return ``int func(x) exp(-i x t) dx`` over the panels (and tail).

    ``func`` must be real. For ``t == 0`` this reduces to a plain integral.
    """
    if t == 0.0:
        val, err = integrate_panels(func, points, tail=tail, epsrel=epsrel, atol=atol)
        return complex(val), err
    c, ec = integrate_panels(func, points, tail=tail, epsrel=epsrel, atol=atol,
                             weight="cos", wvar=t)
    s, es = integrate_panels(func, points, tail=tail, epsrel=epsrel, atol=atol,
                             weight="sin", wvar=t)
    return complex(c, -s), math.hypot(ec, es)


def check_accuracy(value, abserr, rtol, atol, what):
    """Raise :class:`ConvergenceError` unless ``abserr <= max(rtol*|value|, atol)``."""
    if not np.isfinite(value) or abserr > max(rtol * abs(value), atol):
        raise ConvergenceError(f"{what}: quadrature did not converge", float(np.real(value)), abserr)
