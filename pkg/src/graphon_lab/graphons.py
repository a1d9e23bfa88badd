"""Symmetric kernels W: [0,1]^2 -> [0,1] and operations on them.

The built-in families are all dense near a preferred corner or diagonal:

* ``const``    W(x,y) = p
* ``sqrt``     W(x,y) = (1-x)^r (1-y)^r          (r > 0)
* ``poly``     W(x,y) = (1-x^r)(1-y^r)           (r > 0)
* ``holder``   W(x,y) = g(x)g(y), g(x) = max(0, 1 - C x^alpha)
* ``line``     W(x,y) = 1 - |x-y|
* ``flatexp``  W(x,y) = g(x)g(y), g(x) = 1 - exp(-1/x^2), g(0) = 1
* ``osc``      W(x,y) = g(x)g(y), g(x) = 1 - x sin^2(1/x), g(0) = 1
* ``rank1``    W(x,y) = g(x)g(y) with g piecewise linear through given knots

Every family except ``line`` factors as g(x)g(y); the subset of families
whose factor is cheap and monotone enough for closed-form or quadrature
moment work is exposed through `has_product_profile` / `profile_value`.

A spec may carry a window [lo,hi]; evaluation then reads
W(lo + u*(hi-lo), lo + v*(hi-lo)), i.e. the kernel restricted to the
window and rescaled back to the unit square.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SpecValidationError, UnsupportedSpecError

FAMILIES = ("const", "sqrt", "poly", "holder", "line", "flatexp", "osc", "rank1")

# Families of the form g(x)g(y) that the moment layer accepts.
PROFILE_FAMILIES = ("const", "sqrt", "poly", "holder", "rank1")


@dataclass(frozen=True)
class Interval:
    """A nonempty closed subinterval of [0,1]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise SpecValidationError(
                f"interval [{self.lo}, {self.hi}] must satisfy 0 <= lo < hi <= 1"
            )

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class GraphonSpec:
    """Immutable description of one kernel, with optional window restriction.

    `knots_x`/`knots_f` are only set for rank1 specs; `source` remembers the
    profile file a rank1 spec was loaded from so it can be re-serialized.
    """

    family: str
    p: float | None = None
    r: float | None = None
    alpha: float | None = None
    c: float | None = None
    knots_x: tuple[float, ...] | None = None
    knots_f: tuple[float, ...] | None = None
    window: Interval | None = None
    source: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecValidationError(f"unknown family {self.family!r}")
        if self.family == "const":
            if self.p is None or not (0.0 <= self.p <= 1.0):
                raise SpecValidationError("const requires p in [0,1]")
        elif self.family in ("sqrt", "poly"):
            if self.r is None or not (self.r > 0.0) or not math.isfinite(self.r):
                raise SpecValidationError(f"{self.family} requires finite r > 0")
        elif self.family == "holder":
            ok = (
                self.alpha is not None
                and 0.0 < self.alpha
                and math.isfinite(self.alpha)
                and self.c is not None
                and 1.0 <= self.c
                and math.isfinite(self.c)
            )
            if not ok:
                raise SpecValidationError("holder requires alpha > 0 and C >= 1")
        elif self.family == "rank1":
            xs, fs = self.knots_x, self.knots_f
            if xs is None or fs is None or len(xs) != len(fs) or len(xs) < 2:
                raise SpecValidationError("rank1 requires >= 2 matching knots")
            if xs[0] != 0.0 or xs[-1] != 1.0:
                raise SpecValidationError("rank1 knots must start at 0 and end at 1")
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise SpecValidationError("rank1 knot x values must be strictly increasing")
            if any(not (0.0 <= f <= 1.0) for f in fs):
                raise SpecValidationError("rank1 profile values must lie in [0,1]")


def constant(p: float) -> GraphonSpec:
    return GraphonSpec("const", p=float(p))


def sqrt_family(r: float) -> GraphonSpec:
    return GraphonSpec("sqrt", r=float(r))


def poly_family(r: float) -> GraphonSpec:
    return GraphonSpec("poly", r=float(r))


def holder_family(alpha: float, c: float) -> GraphonSpec:
    return GraphonSpec("holder", alpha=float(alpha), c=float(c))


def line() -> GraphonSpec:
    return GraphonSpec("line")


def flat_exp() -> GraphonSpec:
    return GraphonSpec("flatexp")


def oscillating() -> GraphonSpec:
    return GraphonSpec("osc")


def rank1(knots_x, knots_f, source: str | None = None) -> GraphonSpec:
    return GraphonSpec(
        "rank1",
        knots_x=tuple(float(x) for x in knots_x),
        knots_f=tuple(float(f) for f in knots_f),
        source=source,
    )


def restrict(spec: GraphonSpec, interval: Interval) -> GraphonSpec:
    """Restrict to a window, composing with any existing window.

    restrict(restrict(W, [a,b]), [u,v]) equals the single restriction to
    [a + u(b-a), a + v(b-a)] because both are affine reparametrizations.
    """
    if spec.window is None:
        return replace(spec, window=interval)
    base = spec.window
    lo = base.lo + interval.lo * base.length
    hi = base.lo + interval.hi * base.length
    return replace(spec, window=Interval(lo, hi))


def _check_unit(arr: np.ndarray, what: str) -> None:
    if arr.size and (np.min(arr) < 0.0 or np.max(arr) > 1.0):
        raise DomainError(f"{what} must lie in [0,1]")


def _flatexp_factor(x: np.ndarray) -> np.ndarray:
    # g(x) = 1 - exp(-1/x^2); the x=0 limit is 1 and is patched explicitly.
    # x*x can underflow to 0 for subnormal x; 1/0 -> inf still gives the
    # correct limit through expm1, so the divide warning is suppressed.
    out = np.ones_like(x)
    pos = x > 0.0
    xp = x[pos]
    with np.errstate(divide="ignore"):
        out[pos] = -np.expm1(-1.0 / (xp * xp))
    return out


def _osc_factor(x: np.ndarray) -> np.ndarray:
    # g(x) = 1 - x sin^2(1/x); the x=0 limit is 1 and is patched explicitly.
    # Below 1/realmax the reciprocal overflows and sin(inf) is nan; there
    # 1 - x sin^2 rounds to 1.0 exactly, so those x join the limit branch.
    out = np.ones_like(x)
    pos = x > 1.0 / np.finfo(np.float64).max
    xp = x[pos]
    s = np.sin(1.0 / xp)
    out[pos] = 1.0 - xp * s * s
    return out


def _factor(spec: GraphonSpec, x: np.ndarray) -> np.ndarray:
    """The factor g with W(x,y) = g(x)g(y), for every family except line."""
    fam = spec.family
    if fam == "const":
        return np.full_like(x, math.sqrt(spec.p))
    if fam == "sqrt":
        return np.power(1.0 - x, spec.r)
    if fam == "poly":
        return 1.0 - np.power(x, spec.r)
    if fam == "holder":
        return np.maximum(0.0, 1.0 - spec.c * np.power(x, spec.alpha))
    if fam == "flatexp":
        return _flatexp_factor(x)
    if fam == "osc":
        return _osc_factor(x)
    if fam == "rank1":
        return np.interp(x, spec.knots_x, spec.knots_f)
    raise UnsupportedSpecError(f"family {fam} has no product factor")


def evaluate(spec: GraphonSpec, x, y):
    """Kernel value W(x,y); broadcasts over array inputs.

    Scalars in give a float back; arrays broadcast like numpy ufuncs.
    Coordinates outside [0,1] raise DomainError.
    """
    scalar = np.isscalar(x) and np.isscalar(y)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_unit(x, "x")
    _check_unit(y, "y")
    if spec.window is not None:
        w = spec.window
        x = w.lo + x * w.length
        y = w.lo + y * w.length
    if spec.family == "line":
        out = 1.0 - np.abs(x - y)
    elif spec.family == "const":
        # not g(x)*g(y) with g = sqrt(p): that would round p
        out = np.full(np.broadcast(x, y).shape, spec.p)
    else:
        out = _factor(spec, x) * _factor(spec, y)
    if scalar:
        return float(out)
    return out


def has_product_profile(spec: GraphonSpec) -> bool:
    """True when W = g(x)g(y) with a profile the moment layer accepts."""
    return spec.family in PROFILE_FAMILIES


def profile_value(spec: GraphonSpec, x) -> np.ndarray:
    """The factor g (window-composed) for moment-supported families.

    flatexp and osc do factor as products, but their moment integrals are
    deliberately not routed through this accessor; the moment layer treats
    them as unsupported.
    """
    if not has_product_profile(spec):
        raise UnsupportedSpecError(
            f"family {spec.family} is not supported by the moment layer"
        )
    x = np.asarray(x, dtype=np.float64)
    _check_unit(x, "x")
    if spec.window is not None:
        w = spec.window
        x = w.lo + x * w.length
    return _factor(spec, x)


def profile_breakpoints(spec: GraphonSpec) -> tuple[float, ...]:
    """Points in [0,1] where the (window-composed) profile is not smooth.

    Used by the quadrature layer to split integrals at kinks: the holder
    profile has one at the truncation root C^(-1/alpha), rank1 profiles at
    every knot. Endpoints 0 and 1 are always included.
    """
    if not has_product_profile(spec):
        raise UnsupportedSpecError(
            f"family {spec.family} is not supported by the moment layer"
        )
    raw: list[float] = []
    if spec.family == "holder":
        raw.append(spec.c ** (-1.0 / spec.alpha))
    elif spec.family == "rank1":
        raw.extend(spec.knots_x)
    if spec.window is not None:
        w = spec.window
        raw = [(b - w.lo) / w.length for b in raw]
    pts = sorted({0.0, 1.0, *(b for b in raw if 0.0 < b < 1.0)})
    return tuple(pts)


def grid_dominance_gap(lower: GraphonSpec, upper: GraphonSpec, points: int = 1001):
    """Max of lower - upper over a (points x points) grid including endpoints.

    A nonpositive gap certifies pointwise dominance at grid resolution; the
    coupled sampler uses this as its precondition check.
    """
    g = np.linspace(0.0, 1.0, points)
    x = g[:, None]
    y = g[None, :]
    diff = evaluate(lower, x, y) - evaluate(upper, x, y)
    idx = np.unravel_index(np.argmax(diff), diff.shape)
    return float(diff[idx]), (float(g[idx[0]]), float(g[idx[1]]))


def load_profile(path: str) -> GraphonSpec:
    """Read a two-column ``x f(x)`` text profile into a rank1 spec.

    Blank lines and ``#`` comments are ignored. x must be strictly
    increasing from 0 to 1 and f must stay inside [0,1].
    """
    xs: list[float] = []
    fs: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, rawline in enumerate(fh, 1):
            text = rawline.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise SpecValidationError(f"{path}:{ln}: expected two columns, got {text!r}")
            try:
                xs.append(float(parts[0]))
                fs.append(float(parts[1]))
            except ValueError as exc:
                raise SpecValidationError(f"{path}:{ln}: {exc}") from None
    return rank1(xs, fs, source=os.fspath(path))


def _fmt(v: float) -> str:
    # repr of a float round-trips exactly, so tags stay lossless; integral
    # values drop the ".0" (tags read p=0.5 but r=2, not r=2.0).
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def spec_tag(spec: GraphonSpec) -> str:
    """Canonical one-token text form, parseable by `parse_spec`."""
    fam = spec.family
    if fam == "const":
        base = f"const:p={_fmt(spec.p)}"
    elif fam in ("sqrt", "poly"):
        base = f"{fam}:r={_fmt(spec.r)}"
    elif fam == "holder":
        base = f"holder:alpha={_fmt(spec.alpha)},C={_fmt(spec.c)}"
    elif fam in ("line", "flatexp", "osc"):
        base = fam
    else:
        if spec.source is not None:
            base = f"rank1:file={spec.source}"
        else:
            knots = ";".join(f"{_fmt(x)}:{_fmt(f)}" for x, f in zip(spec.knots_x, spec.knots_f))
            base = f"rank1:knots={knots}"
    if spec.window is not None:
        base += f"@[{_fmt(spec.window.lo)},{_fmt(spec.window.hi)}]"
    return base


def _parse_kv(body: str, fam: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in body.split(","):
        if "=" not in item:
            raise SpecValidationError(f"{fam}: expected key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def parse_spec(text: str) -> GraphonSpec:
    """Parse tags like ``sqrt:r=1``, ``holder:alpha=0.5,C=2``, ``line``,
    ``rank1:file=prof.txt``; an optional ``@[lo,hi]`` suffix restricts to a
    window."""
    text = text.strip()
    window = None
    if "@" in text:
        text, _, wtext = text.partition("@")
        wtext = wtext.strip()
        if not (wtext.startswith("[") and wtext.endswith("]")):
            raise SpecValidationError(f"bad window suffix {wtext!r}, expected @[lo,hi]")
        parts = wtext[1:-1].split(",")
        if len(parts) != 2:
            raise SpecValidationError(f"bad window suffix {wtext!r}, expected @[lo,hi]")
        try:
            window = Interval(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise SpecValidationError(f"bad window suffix {wtext!r}: {exc}") from None
    fam, _, body = text.partition(":")
    fam = fam.strip()
    try:
        if fam in ("line", "flatexp", "osc"):
            if body:
                raise SpecValidationError(f"{fam} takes no parameters")
            spec = GraphonSpec(fam)
        elif fam == "const":
            kv = _parse_kv(body, fam)
            if set(kv) != {"p"}:
                raise SpecValidationError("const takes exactly p=...")
            spec = constant(float(kv["p"]))
        elif fam in ("sqrt", "poly"):
            kv = _parse_kv(body, fam)
            if set(kv) != {"r"}:
                raise SpecValidationError(f"{fam} takes exactly r=...")
            spec = GraphonSpec(fam, r=float(kv["r"]))
        elif fam == "holder":
            kv = _parse_kv(body, fam)
            if set(kv) != {"alpha", "C"}:
                raise SpecValidationError("holder takes exactly alpha=...,C=...")
            spec = holder_family(float(kv["alpha"]), float(kv["C"]))
        elif fam == "rank1":
            kv = _parse_kv(body, fam)
            if set(kv) == {"file"}:
                spec = load_profile(kv["file"])
            elif set(kv) == {"knots"}:
                pairs = [p.split(":") for p in kv["knots"].split(";")]
                if any(len(p) != 2 for p in pairs):
                    raise SpecValidationError("rank1 knots must be x:f pairs joined by ';'")
                spec = rank1([float(p[0]) for p in pairs], [float(p[1]) for p in pairs])
            else:
                raise SpecValidationError("rank1 takes file=... or knots=...")
        else:
            raise SpecValidationError(f"unknown family {fam!r}")
    except ValueError as exc:
        if isinstance(exc, SpecValidationError):
            raise
        raise SpecValidationError(f"bad spec {text!r}: {exc}") from None
    if window is not None:
        spec = restrict(spec, window)
    return spec
