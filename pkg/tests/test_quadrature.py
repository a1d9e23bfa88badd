"""Adaptive Simpson integration and log profile-power integrals."""

import math

import numpy as np
import pytest
from scipy.special import gammaln

from graphon_lab.errors import PreconditionError
from graphon_lab.graphons import (
    Interval,
    constant,
    holder_family,
    poly_family,
    rank1,
    restrict,
    sqrt_family,
)
from graphon_lab.quadrature import adaptive_simpson, log_profile_power_integral

RTOL = 1e-9


def test_simpson_exact_on_cubics():
    # Simpson integrates cubics exactly; the recursion accepts at depth 0
    assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-14)


def test_simpson_exponential():
    v = adaptive_simpson(math.exp, 0.0, 1.0)
    assert v == pytest.approx(math.e - 1.0, rel=1e-12)


def test_simpson_peaked_lorentzian():
    # half-width 1e-3 spike at an awkward interior point
    mu, eps = 0.3137, 1e-3
    f = lambda x: 1.0 / ((x - mu) ** 2 + eps**2)
    exact = (math.atan((1.0 - mu) / eps) + math.atan(mu / eps)) / eps
    assert adaptive_simpson(f, 0.0, 1.0, rtol=1e-10) == pytest.approx(exact, rel=1e-8)


def test_simpson_rejects_empty_range():
    with pytest.raises(PreconditionError):
        adaptive_simpson(math.exp, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        adaptive_simpson(math.exp, 2.0, 1.0)


def test_profile_power_zero_is_log_one():
    assert log_profile_power_integral(sqrt_family(1.0), 0.0) == 0.0


def test_profile_power_negative_rejected():
    with pytest.raises(PreconditionError):
        log_profile_power_integral(sqrt_family(1.0), -1.0)


def test_profile_integral_matches_sqrt_closed_form():
    # int_0^1 (1-x)^(r m) dx = 1/(r m + 1)
    for r in (0.5, 1.0, 2.0):
        for m in (1.0, 3.0, 17.5):
            got = log_profile_power_integral(sqrt_family(r), m)
            assert got == pytest.approx(-math.log1p(r * m), rel=RTOL)


def test_profile_integral_matches_poly_closed_form():
    # int_0^1 (1-x^r)^m dx = Gamma(1+1/r) Gamma(m+1) / Gamma(m+1+1/r)
    for r in (0.5, 2.0, 3.0):
        for m in (1.0, 4.0, 30.0):
            s = 1.0 / r
            want = gammaln(1.0 + s) + gammaln(m + 1.0) - gammaln(m + 1.0 + s)
            got = log_profile_power_integral(poly_family(r), m)
            assert got == pytest.approx(want, rel=RTOL, abs=1e-12)


def test_profile_integral_extreme_powers():
    # integrand mass collapses into a ~1e-4 wide boundary layer; the graded
    # cells must still resolve it to relative 1e-9
    got = log_profile_power_integral(sqrt_family(2.0), 1.0e4)
    assert got == pytest.approx(-math.log1p(2.0e4), rel=1e-11)
    s = 0.5
    m = 1.0e4
    want = gammaln(1.0 + s) + gammaln(m + 1.0) - gammaln(m + 1.0 + s)
    got = log_profile_power_integral(poly_family(2.0), m)
    assert got == pytest.approx(want, rel=1e-11)


def test_profile_integral_constant_kernel():
    # factor sqrt(p): integral of p^(m/2)
    got = log_profile_power_integral(constant(0.25), 3.0)
    assert got == pytest.approx(1.5 * math.log(0.25), rel=1e-12)
    assert log_profile_power_integral(constant(0.0), 2.0) == -math.inf


def test_profile_integral_holder_vs_scipy():
    # scipy.integrate.quad oracle 0.025000000000000012 (abserr 6e-11); the
    # exact value by substitution u = 2 sqrt(x) is 1/40
    got = log_profile_power_integral(holder_family(0.5, 2.0), 3.0)
    assert got == pytest.approx(math.log(0.025), rel=1e-10)


def test_profile_integral_rank1_piecewise():
    # knots (0,1),(0.5,0.8),(1,0), power 2: 61/150 + 16/150 = 77/150
    spec = rank1((0.0, 0.5, 1.0), (1.0, 0.8, 0.0))
    got = log_profile_power_integral(spec, 2.0)
    assert got == pytest.approx(math.log(77.0 / 150.0), rel=1e-11)


def test_profile_integral_zero_profile_is_log_zero():
    spec = rank1((0.0, 1.0), (0.0, 0.0))
    assert log_profile_power_integral(spec, 2.0) == -math.inf


def test_profile_integral_windowed_spec():
    # sqrt(1) on [0.2, 0.6]: profile u -> 0.8 - 0.4 u, squared integral
    # (0.8^3 - 0.4^3) / (3 * 0.4) = 0.448/1.2
    spec = restrict(sqrt_family(1.0), Interval(0.2, 0.6))
    got = log_profile_power_integral(spec, 2.0)
    assert got == pytest.approx(math.log(0.448 / 1.2), rel=1e-11)


def test_profile_integral_scales_with_peak_not_underflow():
    # peak normalization: a profile capped at 1e-160 still integrates in logs
    spec = rank1((0.0, 1.0), (1e-160, 1e-160))
    got = log_profile_power_integral(spec, 2.0)
    assert got == pytest.approx(2.0 * math.log(1e-160), rel=1e-12)
