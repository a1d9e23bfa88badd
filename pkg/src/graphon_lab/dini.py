"""Directional difference-quotient probes of a kernel near a diagonal point.

For a point (a,a) with W(a,a) = 1 and a unit direction d pointing into the
square, the quotients

    q(h) = (W((a,a) + h d) - W(a,a)) / h

over a decreasing h grid estimate the one-sided directional derivative.
Scanning a fan of inward directions and bucketing each one as bounded away
from zero, vanishing, or divergent separates three growth regimes:

* ``theta_sqrt``  every direction has quotients in [-ceiling, -near_zero]
* ``omega_sqrt``  every direction has quotients vanishing as h -> 0
* ``o_sqrt``      every direction has |q| blowing up as h -> 0
* ``unknown``     anything mixed (oscillation, direction dependence, ...)

The labels name the clique-growth regime the local slope certifies:
slopes pinned in a negative bracket go with cliques of order sqrt(n),
vanishing slopes with faster-than-sqrt growth, divergent slopes with
slower-than-sqrt growth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError, SpecValidationError
from .graphons import GraphonSpec, evaluate

DEFAULT_H_GRID: tuple[float, ...] = tuple(float(10.0**e) for e in np.linspace(-2.0, -6.0, 9))

# Verdicts use the quotient tail: "zero" needs |q| < near_zero at the two
# smallest h; "divergent" needs |q| > ceiling at the smallest h and |q|
# strictly increasing over the last three steps.
NEAR_ZERO = 0.05
CEILING = 50.0
TAIL = 4


@dataclass(frozen=True)
class DiniEstimate:
    point: float
    direction: tuple[float, float]
    h_grid: tuple[float, ...]
    quotients: tuple[float, ...]
    sup_estimate: float
    inf_estimate: float
    divergent: bool


@dataclass(frozen=True)
class RegimeReport:
    point: float
    label: str
    directions: tuple[tuple[float, float], ...]
    verdicts: tuple[str, ...]
    estimates: tuple[DiniEstimate, ...]


def estimate_dini(
    spec: GraphonSpec,
    a: float,
    direction: tuple[float, float],
    h_grid: tuple[float, ...] = DEFAULT_H_GRID,
    tail: int = TAIL,
    ceiling: float = CEILING,
) -> DiniEstimate:
    """Difference quotients of W along one direction from (a,a).

    `direction` must be a unit vector and (a,a) + h*direction must stay in
    the unit square for every h in the (strictly decreasing) grid.
    """
    d1, d2 = float(direction[0]), float(direction[1])
    norm = np.hypot(d1, d2)
    if abs(norm - 1.0) > 1e-9:
        raise SpecValidationError(f"direction {direction} is not a unit vector")
    hs = np.asarray(h_grid, dtype=np.float64)
    if hs.size < 3 or np.any(hs <= 0.0) or np.any(np.diff(hs) >= 0.0):
        raise SpecValidationError("h_grid must be strictly decreasing and positive, length >= 3")
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"point a={a} must lie in [0,1]")
    hmax = hs[0]
    for coord, d in ((a, d1), (a, d2)):
        if not (0.0 <= coord + hmax * d <= 1.0):
            raise DomainError(
                f"(a,a) + h*direction leaves the unit square at h={hmax} "
                f"(a={a}, direction=({d1},{d2}))"
            )
    base = evaluate(spec, a, a)
    vals = evaluate(spec, a + hs * d1, a + hs * d2)
    quot = (vals - base) / hs
    k = min(int(tail), quot.size)
    tail_q = quot[-k:]
    absq = np.abs(quot)
    divergent = bool(
        absq[-1] > ceiling and absq[-3] < absq[-2] < absq[-1]
    )
    return DiniEstimate(
        point=float(a),
        direction=(d1, d2),
        h_grid=tuple(float(h) for h in hs),
        quotients=tuple(float(q) for q in quot),
        sup_estimate=float(np.max(tail_q)),
        inf_estimate=float(np.min(tail_q)),
        divergent=divergent,
    )


def inward_fan(a: float, n_directions: int, h_max: float) -> tuple[tuple[float, float], ...]:
    """Unit directions from (a,a) that keep (a,a) + h_max*d inside the square.

    Within h_max of a boundary only the inward quadrant is scanned
    (endpoints included); in the interior the full circle is used.
    """
    if a - h_max < 0.0 and a + h_max > 1.0:
        raise DomainError(f"h_max={h_max} does not fit inside [0,1] from a={a}")
    if a - h_max < 0.0:
        angles = np.linspace(0.0, np.pi / 2.0, n_directions)
    elif a + h_max > 1.0:
        angles = np.linspace(np.pi, 1.5 * np.pi, n_directions)
    else:
        angles = np.linspace(0.0, 2.0 * np.pi, n_directions, endpoint=False)
    return tuple((float(np.cos(t)), float(np.sin(t))) for t in angles)


def _direction_verdict(est: DiniEstimate, near_zero: float, ceiling: float) -> str:
    q = np.asarray(est.quotients)
    if est.divergent:
        return "divergent"
    if abs(q[-1]) < near_zero and abs(q[-2]) < near_zero:
        return "zero"
    if -ceiling <= est.inf_estimate and est.sup_estimate <= -near_zero:
        return "bounded"
    return "mixed"


def classify_regime(
    spec: GraphonSpec,
    a: float,
    n_directions: int = 16,
    near_zero: float = NEAR_ZERO,
    ceiling: float = CEILING,
    h_grid: tuple[float, ...] = DEFAULT_H_GRID,
) -> RegimeReport:
    """Bucket the local slope of W at a diagonal maximizer (a,a).

    Precondition: W(a,a) = 1 (within 1e-9); the regimes are only meaningful
    at a point where the kernel attains 1. The verdict per direction is
    recorded, so direction-dependent slopes remain visible in the report
    even when every direction lands in the same bucket.
    """
    w_aa = evaluate(spec, a, a)
    if abs(w_aa - 1.0) > 1e-9:
        raise PreconditionError(f"W(a,a) = {w_aa} but classification needs W(a,a) = 1")
    dirs = inward_fan(a, n_directions, h_grid[0])
    estimates = tuple(
        estimate_dini(spec, a, d, h_grid=h_grid, ceiling=ceiling) for d in dirs
    )
    verdicts = tuple(_direction_verdict(e, near_zero, ceiling) for e in estimates)
    if all(v == "bounded" for v in verdicts):
        label = "theta_sqrt"
    elif all(v == "zero" for v in verdicts):
        label = "omega_sqrt"
    elif all(v == "divergent" for v in verdicts):
        label = "o_sqrt"
    else:
        label = "unknown"
    return RegimeReport(
        point=float(a),
        label=label,
        directions=dirs,
        verdicts=verdicts,
        estimates=estimates,
    )
