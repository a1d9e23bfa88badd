"""Adaptive Simpson integration of profile powers in the log domain.

The moment layer needs log of integrals like int_0^1 g(x)^m dx where g is a
kernel profile and m can reach the thousands. Such integrands are sharply
peaked at g's maximizer, so a uniform initial mesh underresolves them; the
integrator splits at profile kinks, grades geometrically toward the hot
endpoint of each piece, and normalizes by the peak value so nothing overflows
or underflows before the log is taken.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import PreconditionError
from .graphons import GraphonSpec, profile_breakpoints, profile_value

RTOL = 1e-10
MAX_DEPTH = 48


def _adapt(fn, a, fa, b, fb, m, fm, whole, eps, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = fn(lm)
    frm = fn(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    return _adapt(fn, a, fa, m, fm, lm, flm, left, 0.5 * eps, depth - 1) + _adapt(
        fn, m, fm, b, fb, rm, frm, right, 0.5 * eps, depth - 1
    )


def adaptive_simpson(fn, a: float, b: float, rtol: float = RTOL) -> float:
    """Integrate fn over [a, b] to the requested relative accuracy.

    Nonnegative integrands get genuine relative control; for signed ones the
    tolerance is relative to the magnitude of the initial estimate.
    """
    if not b > a:
        raise PreconditionError(f"empty integration range [{a}, {b}]")
    fa, fb = fn(a), fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = rtol * max(abs(whole), (b - a) * 1e-300)
    return _adapt(fn, a, fa, b, fb, m, fm, whole, eps, MAX_DEPTH)


def _graded_cells(a: float, b: float, hot: float, power: float) -> list[tuple[float, float]]:
    """Split [a, b] into cells whose widths grow geometrically away from the
    hot endpoint; the first cell has width about (b-a)/power, the scale on
    which g^power actually varies."""
    length = b - a
    if power <= 2.0:
        return [(a, b)]
    cuts = [length]
    w = length / power
    while w < length:
        cuts.append(w)
        w *= 2.0
    offsets = sorted(set(cuts))
    if hot <= a:
        knots = [a] + [a + d for d in offsets]
    else:
        knots = [b - d for d in reversed(offsets)] + [b]
    return [(u, v) for u, v in zip(knots, knots[1:]) if v > u]


def log_profile_power_integral(spec: GraphonSpec, power: int, rtol: float = RTOL) -> float:
    """log of int_0^1 g(x)^power dx for a product-profile spec.

    Returns -inf when the profile is identically zero. power = 0 gives 0
    (the integrand is 1). The profile is evaluated through the window
    composition, so windowed specs integrate over their restricted square.
    """
    if power < 0:
        raise PreconditionError(f"negative power {power}")
    if power == 0:
        return 0.0
    pieces = profile_breakpoints(spec)
    candidates = np.asarray(pieces, dtype=np.float64)
    values = profile_value(spec, candidates)
    gmax = float(values.max())
    if gmax <= 0.0:
        return -math.inf
    total = 0.0
    for u, v in zip(pieces, pieces[1:]):
        gu = float(profile_value(spec, u))
        gv = float(profile_value(spec, v))
        if max(gu, gv) <= 0.0:
            continue
        hot = u if gu >= gv else v

        def h(x):
            return float(profile_value(spec, x) / gmax) ** power

        for ca, cb in _graded_cells(u, v, hot, float(power)):
            total += adaptive_simpson(h, ca, cb, rtol)
    if total <= 0.0:
        return -math.inf
    return power * math.log(gmax) + math.log(total)
