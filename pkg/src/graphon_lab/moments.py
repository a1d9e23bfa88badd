"""Log-domain clique-count moments for product-profile kernels.

First moments E[X_k] (X_k = number of k-cliques), the integer cutoff where
E[X_k] first drops below 1, second-moment ratios E[X_k^2]/E[X_k]^2 over
clique overlaps, and the predicted scaling constants for the sqrt and poly
families. Everything is computed in the natural-log domain via log-gamma;
direct products overflow at the sizes these formulas are used for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import PreconditionError, UnsupportedSpecError
from .graphons import GraphonSpec, spec_tag
from .quadrature import log_profile_power_integral

MOMENT_FAMILIES = ("const", "sqrt", "poly", "holder", "rank1")


@dataclass(frozen=True)
class MomentReport:
    n: int
    k: int
    log_expected: float
    family_tag: str
    method: str


@dataclass(frozen=True)
class CutoffResult:
    n: int
    k_star: int
    scan_certificate: tuple[int, ...]
    degenerate: bool
    family_tag: str


@dataclass(frozen=True)
class VarianceReport:
    n: int
    k: int
    log_ratio: float
    per_i_terms: tuple[float, ...]
    family_tag: str


def log_binom(n, k):
    """log C(n, k); broadcasts, and is -inf outside 0 <= k <= n."""
    n = np.asarray(n, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    out = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    out = np.where((k < 0) | (k > n), -np.inf, out)
    return float(out) if out.ndim == 0 else out

_STIRLING_TAIL = ((1.0 / 12.0, 1), (-1.0 / 360.0, 3), (1.0 / 1260.0, 5),
                  (-1.0 / 1680.0, 7), (1.0 / 1188.0, 9))


def lgamma_diff(k, s: float):
    """lgamma(k + s) - lgamma(k) without the large-argument cancellation.

    The direct difference of two log-gamma values near k*log(k) carries an
    absolute error around eps*k*log(k), which multiplied by k breaks the
    1e-9 agreement the r=1 sqrt/poly coincidence demands at k ~ 1e4. Writing
    the difference through Stirling's expansion keeps every term O(s*log k),
    so the rounding floor stays near machine epsilon. Vectorizes over k.
    """
    k = np.asarray(k, dtype=np.float64)
    small = k < 32.0
    ks = k + s
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (k - 0.5) * np.log1p(s / k) + s * np.log(ks) - s
        for coef, m in _STIRLING_TAIL:
            out = out + coef * (ks ** -float(m) - k ** -float(m))
    if np.any(small):
        direct = gammaln(np.where(small, ks, 2.0)) - gammaln(np.where(small, k, 2.0))
        out = np.where(small, direct, out)
    return float(out) if out.ndim == 0 else out


def _log_mean_profile_power(spec: GraphonSpec, power: int) -> float:
    """log of int g^power over [0,1] with closed forms where they exist."""
    if spec.window is None:
        if spec.family == "const":
            if power == 0:
                return 0.0
            return 0.5 * power * math.log(spec.p) if spec.p > 0.0 else -math.inf
        if spec.family == "sqrt":
            return -math.log(spec.r * power + 1.0)
        if spec.family == "poly":
            s = 1.0 / spec.r
            return float(gammaln(1.0 + s) - lgamma_diff(power + 1.0, s))
    return log_profile_power_integral(spec, power)


def _moment_method(spec: GraphonSpec) -> str:
    if spec.family not in MOMENT_FAMILIES:
        raise UnsupportedSpecError(
            f"family {spec.family} is not rank-1; clique moments need W(x,y) = g(x)g(y)"
        )
    if spec.window is not None:
        return "quadrature"
    return {
        "const": "closed_form_const",
        "sqrt": "closed_form_sqrt",
        "poly": "closed_form_poly",
        "holder": "quadrature",
        "rank1": "quadrature",
    }[spec.family]


def log_expected_cliques(spec: GraphonSpec, n: int, k: int) -> MomentReport:
    """E[X_k] in log domain: log C(n,k) + k * log int g^(k-1).

    Supported for product-profile families (const, sqrt, poly, holder,
    rank1), windowed or not; -inf flags a vanishing expectation.
    """
    method = _moment_method(spec)
    if not 1 <= k <= n:
        raise PreconditionError(f"need 1 <= k <= n, got k={k}, n={n}")
    lb = log_binom(n, k)
    if method == "closed_form_const":
        if spec.p == 0.0 and k >= 2:
            log_e = -math.inf
        else:
            log_e = lb + (0.0 if k < 2 else k * (k - 1) / 2.0 * math.log(spec.p))
    elif method == "closed_form_sqrt":
        log_e = lb - k * math.log(spec.r * (k - 1.0) + 1.0)
    elif method == "closed_form_poly":
        s = 1.0 / spec.r
        log_e = lb + k * float(gammaln(1.0 + s) - lgamma_diff(float(k), s))
    else:
        log_e = lb + k * log_profile_power_integral(spec, k - 1)
    return MomentReport(n, k, float(log_e), spec_tag(spec), method)


def first_moment_cutoff(spec: GraphonSpec, n: int) -> CutoffResult:
    """Smallest k >= 2 with E[X_k] < 1, confirmed over a 10-value tail.

    Scans k upward without assuming the sequence is unimodal; a candidate
    only counts when the next 10 values of log E[X_k] stay negative (values
    past k = n count as negative since X_k = 0 there). When no such k
    exists up to n, returns k_star = n + 1 flagged degenerate.
    """
    if n < 2:
        raise PreconditionError(f"need n >= 2, got {n}")
    _moment_method(spec)

    def log_e(k: int) -> float:
        return log_expected_cliques(spec, n, k).log_expected

    cache: dict[int, float] = {}

    def val(k: int) -> float:
        if k > n:
            return -math.inf
        if k not in cache:
            cache[k] = log_e(k)
        return cache[k]

    k = 2
    while k <= n:
        if val(k) < 0.0:
            tail = [val(k + j) for j in range(1, 11)]
            if all(t < 0.0 for t in tail):
                cert = [_sign(val(k - 1))] + [_sign(val(k + j)) for j in range(0, 11)]
                return CutoffResult(n, k, tuple(cert), False, spec_tag(spec))
            # wobble: resume past the first nonnegative tail value
            k += 1 + next(j for j, t in enumerate(tail) if t >= 0.0)
            k += 1
            continue
        k += 1
    cert = [_sign(val(n))]
    return CutoffResult(n, n + 1, tuple(cert), True, spec_tag(spec))


def _sign(x: float) -> int:
    return -1 if x < 0.0 else (0 if x == 0.0 else 1)


def variance_ratio(spec: GraphonSpec, n: int, k: int) -> VarianceReport:
    """E[X_k^2] / E[X_k]^2 as a log-sum-exp over clique overlap sizes.

    Pair cliques by overlap i; the i-term is the hypergeometric weight
    C(k,i) C(n-k,k-i) / C(n,k) times the conditional blow-up
    (int g^(k-1))^(-2i) (int g^(2k-i-1))^i. Requires 2k <= n so the
    overlap combinatorics are well defined.
    """
    method = _moment_method(spec)
    if not 1 <= k <= n - k:
        raise PreconditionError(f"need 1 <= k <= n - k, got k={k}, n={n}")
    log_a = _log_mean_profile_power(spec, k - 1)
    if log_a == -math.inf:
        raise PreconditionError("first moment is zero; the ratio is undefined")
    i = np.arange(k + 1)
    log_w = log_binom(k, i) + log_binom(n - k, k - i) - log_binom(n, k)
    log_b = np.array([_log_mean_profile_power(spec, 2 * k - j - 1) for j in i])
    terms = log_w + i * (log_b - 2.0 * log_a)
    log_ratio = float(logsumexp(terms))
    if -1e-9 < log_ratio < 0.0:
        # the i-sum is exactly >= 1; tiny negatives are pure roundoff
        log_ratio = 0.0
    return VarianceReport(n, k, log_ratio, tuple(float(t) for t in terms), spec_tag(spec))


@dataclass(frozen=True)
class PredictedConstants:
    exponent: float
    upper_constant: float
    lower_constant: float


def predicted_constants(spec: GraphonSpec) -> PredictedConstants:
    """Predicted clique-number scaling omega ~ c * n^exponent.

    sqrt(r): exponent 1/2, constants (e/r)^(1/2) above and (12 e r)^(-1/2)
    below. poly(r): exponent r/(r+1), constants (Gamma(1+1/r) e)^(r/(r+1))
    above and e^(-2/(1+r))/2 below. Other families have no closed-form
    prediction here.
    """
    if spec.window is not None or spec.family not in ("sqrt", "poly"):
        raise UnsupportedSpecError(
            "scaling constants are only predicted for the unwindowed sqrt and poly families"
        )
    if spec.family == "sqrt":
        r = spec.r
        return PredictedConstants(0.5, math.sqrt(math.e / r), 1.0 / math.sqrt(12.0 * math.e * r))
    r = spec.r
    expo = r / (r + 1.0)
    upper = (math.gamma(1.0 + 1.0 / r) * math.e) ** expo
    lower = 0.5 * math.exp(-2.0 / (1.0 + r))
    return PredictedConstants(expo, upper, lower)
