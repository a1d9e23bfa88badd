"""Directional difference quotients and the slope-regime classifier."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphon_lab.dini import (
    DEFAULT_H_GRID,
    classify_regime,
    estimate_dini,
    inward_fan,
)
from graphon_lab.errors import DomainError, PreconditionError, SpecValidationError
from graphon_lab.graphons import (
    constant,
    line,
    oscillating,
    poly_family,
    sqrt_family,
)

SQRT2 = math.sqrt(2.0)


def test_quotient_limits_known_slopes():
    # (1-h)*1 factor product: quotient is exactly -1 + r h ... at r=1 the
    # axis quotient of (1-x) at 0 is -1 for every h.
    est = estimate_dini(sqrt_family(1.0), 0.0, (1.0, 0.0))
    assert est.quotients[-1] == pytest.approx(-1.0, abs=1e-9)
    est = estimate_dini(poly_family(2.0), 0.0, (1.0, 0.0))
    assert abs(est.quotients[-1]) < 1e-5  # slope of 1-x^2 vanishes at 0
    est = estimate_dini(line(), 0.5, (1.0 / SQRT2, -1.0 / SQRT2))
    assert est.quotients[-1] == pytest.approx(-SQRT2, abs=1e-9)


def test_estimate_shape_invariants():
    est = estimate_dini(sqrt_family(2.0), 0.0, (0.0, 1.0))
    assert len(est.quotients) == len(est.h_grid)
    assert all(b < a for a, b in zip(est.h_grid, est.h_grid[1:]))
    assert est.sup_estimate >= est.inf_estimate


@given(
    st.floats(min_value=0.3, max_value=3.0),
    st.floats(min_value=0.0, max_value=math.pi / 2.0),
)
@settings(max_examples=100, deadline=None)
def test_sqrt_family_slope_is_minus_r_times_direction_sum(r, angle):
    # d/dh (1-h d1)^r (1-h d2)^r at h=0 is -r (d1+d2)
    d = (math.cos(angle), math.sin(angle))
    est = estimate_dini(sqrt_family(r), 0.0, d, h_grid=(1e-4, 1e-5, 1e-6))
    assert est.quotients[-1] == pytest.approx(-r * (d[0] + d[1]), abs=1e-4)


def test_direction_fan_respects_boundaries():
    fan = inward_fan(0.0, 5, 1e-3)
    assert all(d1 >= 0.0 and d2 >= 0.0 for d1, d2 in fan)
    assert fan[0] == pytest.approx((1.0, 0.0))
    assert fan[-1] == pytest.approx((0.0, 1.0))
    fan = inward_fan(0.5, 8, 1e-3)
    assert len(fan) == 8
    for d1, d2 in fan:
        assert math.hypot(d1, d2) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        inward_fan(0.5, 4, 0.75)


def test_domain_and_validation_errors():
    with pytest.raises(DomainError):
        estimate_dini(sqrt_family(1.0), 0.0, (-1.0, 0.0))  # leaves the square
    with pytest.raises(SpecValidationError):
        estimate_dini(sqrt_family(1.0), 0.0, (1.0, 1.0))  # not unit length
    with pytest.raises(SpecValidationError):
        estimate_dini(sqrt_family(1.0), 0.0, (1.0, 0.0), h_grid=(1e-3, 1e-2, 1e-1))
    with pytest.raises(PreconditionError):
        classify_regime(constant(0.5), 0.0)  # W(a,a) != 1


@pytest.mark.parametrize(
    "spec,label",
    [
        (sqrt_family(0.5), "theta_sqrt"),
        (sqrt_family(1.0), "theta_sqrt"),
        (sqrt_family(2.0), "theta_sqrt"),
        (poly_family(2.0), "omega_sqrt"),
        (poly_family(3.0), "omega_sqrt"),
        (poly_family(1.0 / 3.0), "o_sqrt"),
        (poly_family(0.5), "o_sqrt"),
    ],
    ids=lambda v: v if isinstance(v, str) else None,
)
def test_classifier_regimes(spec, label):
    report = classify_regime(spec, 0.0)
    assert report.label == label


def test_classifier_reports_direction_dependence():
    # distance kernel at the diagonal: zero slope along (1,1)/sqrt(2),
    # strictly negative across it; mixed verdicts, so no single regime
    report = classify_regime(line(), 0.5)
    assert report.label == "unknown"
    assert "zero" in report.verdicts and "bounded" in report.verdicts
    # sqrt family: every direction bounded, slopes confined to [-r*sqrt(2), -r]
    # (the fan need not hit the diagonal exactly, so the lower end is approached)
    rep = classify_regime(sqrt_family(1.0), 0.0)
    slopes = [e.quotients[-1] for e in rep.estimates]
    assert -SQRT2 - 1e-6 <= min(slopes) <= -1.40
    assert max(slopes) == pytest.approx(-1.0, abs=1e-6)


def test_oscillating_slope_never_settles():
    # quotient along an axis is -sin^2(1/h): bounded but not convergent,
    # so the classifier reports no regime rather than guessing one
    report = classify_regime(oscillating(), 0.0)
    assert report.label == "unknown"


def test_default_h_grid_is_strictly_decreasing():
    hs = np.asarray(DEFAULT_H_GRID)
    assert np.all(hs > 0.0) and np.all(np.diff(hs) < 0.0)
