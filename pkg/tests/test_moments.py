"""Clique-count moments: stable log-gamma, expectations, cutoffs, variance."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from graphon_lab.errors import PreconditionError, UnsupportedSpecError
from graphon_lab.graphons import (
    Interval,
    constant,
    flat_exp,
    holder_family,
    line,
    oscillating,
    poly_family,
    rank1,
    restrict,
    sqrt_family,
)
from graphon_lab.moments import (
    first_moment_cutoff,
    lgamma_diff,
    log_binom,
    log_expected_cliques,
    predicted_constants,
    variance_ratio,
)

# mpmath.loggamma at 60 digits, lgamma(k+s) - lgamma(k)
LGAMMA_DIFF_ORACLE = [
    (1.0, 0.5, -0.12078223763524522),
    (2.0, 0.25, 0.1248717148923966),
    (10.0, 1.0 / 3.0, 0.756359730603929),
    (31.0, 0.9, 3.0891431364573667),
    (32.0, 0.5, 1.728961860299051),
    (33.0, 0.1, 0.34828162956219316),
    (100.0, 2.0 / 3.0, 3.0690029676030535),
    (1.0e4, 0.5, 4.605157685988097),
    (1.0e8, 0.25, 4.605170185050591),
]


@pytest.mark.parametrize("k,s,want", LGAMMA_DIFF_ORACLE)
def test_lgamma_diff_against_mpmath(k, s, want):
    assert float(lgamma_diff(k, s)) == pytest.approx(want, rel=1e-13)


@given(st.floats(min_value=1.0, max_value=1e4),
       st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_lgamma_diff_tracks_direct_difference(k, s):
    # the direct difference is only good to ~eps * lgamma(k), so this
    # cross-check stops at k = 1e4; larger k is covered by the mpmath rows
    direct = gammaln(k + s) - gammaln(k)
    assert float(lgamma_diff(k, s)) == pytest.approx(direct, rel=1e-9, abs=1e-10)


def test_lgamma_diff_vectorizes():
    k = np.array([2.0, 50.0, 1e5])
    out = lgamma_diff(k, 0.5)
    assert out.shape == (3,)
    assert out[0] == pytest.approx(gammaln(2.5) - gammaln(2.0), rel=1e-12)


def test_log_binom_values_and_edges():
    assert float(log_binom(10, 3)) == pytest.approx(math.log(120), rel=1e-13)
    assert float(log_binom(5, 0)) == 0.0
    assert float(log_binom(5, 6)) == -math.inf
    assert float(log_binom(5, -1)) == -math.inf


def test_expected_cliques_small_example():
    # C(12,3) (1/3)^3 = 220/27
    rep = log_expected_cliques(sqrt_family(1.0), 12, 3)
    assert rep.log_expected == pytest.approx(math.log(220.0 / 27.0), rel=1e-12)
    assert rep.method == "closed_form_sqrt"


def test_expected_cliques_constant_pair():
    rep = log_expected_cliques(constant(0.37), 2, 2)
    assert rep.log_expected == pytest.approx(math.log(0.37), rel=1e-14)
    assert rep.method == "closed_form_const"


def test_constant_closed_form_any_k():
    # C(n,k) p^C(k,2) in logs
    n, k, p = 40, 7, 0.31
    rep = log_expected_cliques(constant(p), n, k)
    want = math.log(math.comb(n, k)) + math.comb(k, 2) * math.log(p)
    assert rep.log_expected == pytest.approx(want, rel=1e-12)


def test_poly_r1_coincides_with_sqrt_r1():
    # Gamma(k) Gamma(2) / Gamma(k+1) = 1/k = 1/(r(k-1)+1) at r=1
    n = 10**4
    for k in (2, 3, 17, 400, 5000, n):
        a = log_expected_cliques(sqrt_family(1.0), n, k).log_expected
        b = log_expected_cliques(poly_family(1.0), n, k).log_expected
        assert abs(a - b) <= 1e-9


def test_moment_methods_route_by_family():
    assert log_expected_cliques(poly_family(2.0), 30, 4).method == "closed_form_poly"
    assert log_expected_cliques(holder_family(0.5, 2.0), 30, 4).method == "quadrature"
    assert log_expected_cliques(rank1((0.0, 1.0), (1.0, 0.0)), 30, 4).method == "quadrature"
    windowed = restrict(sqrt_family(1.0), Interval(0.0, 0.5))
    assert log_expected_cliques(windowed, 30, 4).method == "quadrature"


def test_windowed_moment_agrees_with_direct_integral():
    from scipy.integrate import quad

    spec = restrict(sqrt_family(1.0), Interval(0.2, 0.6))
    n, k = 50, 5
    base, _ = quad(lambda u: (0.8 - 0.4 * u) ** (k - 1), 0.0, 1.0)
    want = math.log(math.comb(n, k)) + k * math.log(base)
    rep = log_expected_cliques(spec, n, k)
    assert rep.log_expected == pytest.approx(want, rel=1e-9)


def test_non_product_families_rejected():
    for spec in (line(), flat_exp(), oscillating()):
        with pytest.raises(UnsupportedSpecError):
            log_expected_cliques(spec, 20, 3)
        with pytest.raises(UnsupportedSpecError):
            first_moment_cutoff(spec, 20)
        with pytest.raises(UnsupportedSpecError):
            variance_ratio(spec, 20, 3)


def test_moment_preconditions():
    with pytest.raises(PreconditionError):
        log_expected_cliques(sqrt_family(1.0), 10, 0)
    with pytest.raises(PreconditionError):
        log_expected_cliques(sqrt_family(1.0), 10, 11)


def test_cutoff_frozen_values():
    assert first_moment_cutoff(constant(0.5), 2).k_star == 2
    assert first_moment_cutoff(constant(0.5), 512).k_star == 14
    assert first_moment_cutoff(constant(0.5), 1024).k_star == 16
    # scan of log C(n,k) - k log k at n = 1e6 flips sign at 1646
    # (mpmath 60-digit check: +1.46 at 1645, -0.54 at 1646)
    assert first_moment_cutoff(sqrt_family(1.0), 10**6).k_star == 1646


def test_cutoff_certificate_structure():
    res = first_moment_cutoff(constant(0.5), 512)
    assert not res.degenerate
    assert res.scan_certificate[0] >= 0.0  # log E at k*-1
    assert all(v < 0.0 for v in res.scan_certificate[1:])  # k* and the tail


def test_cutoff_degenerate_kernel():
    res = first_moment_cutoff(constant(1.0), 64)
    assert res.degenerate and res.k_star == 65
    res = first_moment_cutoff(constant(0.0), 64)
    assert res.k_star == 2 and not res.degenerate


def test_variance_ratio_k1_is_exactly_one():
    for spec in (constant(0.5), sqrt_family(1.0), poly_family(2.0)):
        rep = variance_ratio(spec, 50, 1)
        assert rep.log_ratio == 0.0


def _er_second_moment_ratio(n, k, p):
    # classical E[X^2]/E[X]^2 for the constant kernel, summed directly
    total = math.fsum(
        math.comb(k, i) * math.comb(n - k, k - i) / math.comb(n, k) * p ** (-math.comb(i, 2))
        for i in range(0, k + 1)
    )
    return math.log(total)


@pytest.mark.parametrize("n,k,p", [(30, 6, 0.5), (100, 10, 0.3), (200, 12, 0.7)])
def test_variance_ratio_matches_er_closed_form(n, k, p):
    rep = variance_ratio(constant(p), n, k)
    assert rep.log_ratio == pytest.approx(_er_second_moment_ratio(n, k, p), rel=1e-10)


def test_variance_ratio_grows_along_sqrt_scaling():
    small = variance_ratio(sqrt_family(1.0), 100, 10).log_ratio
    big = variance_ratio(sqrt_family(1.0), 400, 20).log_ratio
    assert 0.0 < small < big


def test_variance_ratio_preconditions():
    with pytest.raises(PreconditionError):
        variance_ratio(sqrt_family(1.0), 10, 6)  # needs 2k <= n
    with pytest.raises(PreconditionError):
        variance_ratio(constant(0.0), 10, 2)  # first moment is zero


def test_predicted_constants_sqrt():
    pred = predicted_constants(sqrt_family(1.0))
    assert pred.exponent == pytest.approx(0.5)
    assert pred.upper_constant == pytest.approx(math.sqrt(math.e), rel=1e-12)
    assert pred.lower_constant == pytest.approx((12.0 * math.e) ** -0.5, rel=1e-12)


def test_predicted_constants_poly():
    pred = predicted_constants(poly_family(2.0))
    assert pred.exponent == pytest.approx(2.0 / 3.0)
    want_upper = (math.gamma(1.5) * math.e) ** (2.0 / 3.0)
    assert pred.upper_constant == pytest.approx(want_upper, rel=1e-12)
    assert pred.upper_constant == pytest.approx(1.797, abs=1e-3)
    assert pred.lower_constant == pytest.approx(0.5 * math.exp(-2.0 / 3.0), rel=1e-12)
    # families coincide at r=1
    a = predicted_constants(poly_family(1.0))
    b = predicted_constants(sqrt_family(1.0))
    assert a.exponent == b.exponent
    assert a.upper_constant == pytest.approx(b.upper_constant, rel=1e-12)


def test_predicted_constants_unsupported():
    with pytest.raises(UnsupportedSpecError):
        predicted_constants(line())
    with pytest.raises(UnsupportedSpecError):
        predicted_constants(restrict(sqrt_family(1.0), Interval(0.0, 0.5)))


@given(st.integers(min_value=2, max_value=300), st.integers(min_value=2, max_value=12))
@settings(max_examples=100, deadline=None)
def test_cutoff_is_first_negative_k(n, k):
    # whenever k* <= n, the scan certificate pins E[X_{k*}] < 1 <= E[X_{k*-1}]
    res = first_moment_cutoff(sqrt_family(1.0), n)
    if res.degenerate:
        return
    ks = res.k_star
    assert log_expected_cliques(sqrt_family(1.0), n, ks).log_expected < 0.0
    if ks > 2:
        assert log_expected_cliques(sqrt_family(1.0), n, ks - 1).log_expected >= 0.0
