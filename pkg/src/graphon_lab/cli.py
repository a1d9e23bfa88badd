"""Command-line interface: sampling, clique solving, moments, experiments.

One binary with subcommands; every run is reproducible from its flag set
(seed defaults to 0). Results print as single-line JSON with schema_version
and package version; tabular sweeps use CSV. A `key = value` config file
can predefine any flag, with command-line flags taking precedence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys

from . import __version__
from .cliques import (
    SolveBudget,
    default_threshold,
    degree_greedy_clique,
    exact_max_clique,
    threshold_greedy_clique,
)
from .errors import GraphonLabError, UsageError
from .experiments import (
    concentration_check,
    dominance_suite,
    interval_suite,
    moment_mc_check,
    partition_suite,
    scaling_study,
    union_bound_upper_check,
    write_run,
)
from .graphons import parse_spec
from .moments import first_moment_cutoff, log_expected_cliques, variance_ratio
from .sampling import DEFAULT_CAP, SampleConfig, load_edge_list, sample, save_edge_list

SCHEMA_VERSION = 1
COMMANDS = ("sample", "clique", "moments", "cutoff", "variance", "scaling",
            "concentration", "check")
SUITES = ("dominance", "partition", "interval", "union_bound", "moment_mc")

_FLAG_HELP = {
    "graphon": "kernel spec string, e.g. const:p=0.5, sqrt:r=1, poly:r=2, "
               "holder:alpha=0.5,C=1, line, flatexp, osc, rank1:file=PATH; "
               "append @[lo,hi] for a window restriction",
    "n": "number of vertices (or count-check draw size for check --suite interval)",
    "k": "clique size for moment and variance calculations",
    "n_grid": "comma-separated vertex counts, e.g. 1024,2048,4096",
    "trials": "independent trials per grid point",
    "seed": "master seed; per-trial seeds derive from it (default 0)",
    "method": "clique estimator: exact, threshold_greedy, degree_greedy, or best_of",
    "threshold": "explicit coordinate threshold for threshold_greedy",
    "center": "window center for threshold_greedy, or comma-separated "
              "partition cut points for check --suite partition",
    "budget_nodes": "exact-solver node budget (0 disables the limit)",
    "budget_ms": "exact-solver time budget in milliseconds (0 disables)",
    "jobs": "worker count; defaults to GRAPHON_LAB_JOBS or the machine's cpu count",
    "out": "output path: edge-list file for sample, run directory for scaling",
    "config": "key = value file supplying defaults for any flag",
    "table": "emit CSV over an inclusive k range LO:HI instead of one JSON row",
    "suite": "property suite for check: " + ", ".join(SUITES),
    "lower": "dominated kernel spec (check --suite dominance)",
    "upper": "dominating kernel spec (check --suite dominance)",
    "in_path": "read a graph from an edge-list file instead of sampling",
}

_INT_KEYS = {"n", "k", "trials", "seed", "budget_nodes", "budget_ms", "jobs"}
_FLOAT_KEYS = {"threshold"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphon-lab",
        description="Sampling, exact cliques, moment formulas, and Monte Carlo "
                    "studies for inhomogeneous random graphs.",
    )
    parser.add_argument("--version", action="version", version=f"graphon-lab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    specs = {
        "sample": ("draw one graph and optionally write its edge list",
                   ("graphon", "n", "seed", "out", "config", "jobs")),
        "clique": ("clique of one graph: exact search or greedy estimators",
                   ("graphon", "n", "seed", "in_path", "method", "threshold",
                    "center", "budget_nodes", "budget_ms", "config", "jobs")),
        "moments": ("log E[number of k-cliques]",
                    ("graphon", "n", "k", "seed", "table", "out", "config", "jobs")),
        "cutoff": ("smallest k with E[cliques] below one",
                   ("graphon", "n", "seed", "config", "jobs")),
        "variance": ("second-moment ratio E[X^2]/E[X]^2",
                     ("graphon", "n", "k", "seed", "table", "out", "config", "jobs")),
        "scaling": ("clique-size scaling exponent over an n grid",
                    ("graphon", "n_grid", "trials", "method", "seed", "threshold",
                     "center", "budget_nodes", "budget_ms", "out", "config", "jobs")),
        "concentration": ("spread of clique sizes at fixed n",
                          ("graphon", "n", "trials", "method", "seed",
                           "budget_nodes", "budget_ms", "config", "jobs")),
        "check": ("property suites; exit 1 when a suite fails",
                  ("suite", "graphon", "lower", "upper", "n", "k", "n_grid",
                   "trials", "seed", "method", "center", "budget_nodes",
                   "budget_ms", "config", "jobs")),
    }
    for name, (help_text, keys) in specs.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        for key in keys:
            flag = "--" + ("in" if key == "in_path" else key.replace("_", "-"))
            kwargs: dict = {"help": _FLAG_HELP[key], "default": None}
            if key == "in_path":
                kwargs["dest"] = "in_path"
            if key in _INT_KEYS:
                kwargs["type"] = int
            elif key in _FLOAT_KEYS:
                kwargs["type"] = float
            p.add_argument(flag, **kwargs)
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                text = raw.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value'")
                key, value = text.split("=", 1)
                key = key.strip().lower().replace("-", "_")
                if key == "in":
                    key = "in_path"
                entries[key] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return entries


def parse_config(argv=None) -> argparse.Namespace:
    """Parse flags, then fill unset ones from --config; flags win.

    Unknown config keys are rejected by name. The returned namespace is the
    run configuration handed to dispatch.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise UsageError("missing command; see --help")
    if getattr(ns, "config", None):
        allowed = {k for k in vars(ns) if k not in ("command", "config")}
        for key, value in _read_config_file(ns.config).items():
            if key not in allowed:
                raise UsageError(f"unknown config key {key!r} for command {ns.command!r}")
            if getattr(ns, key) is None:
                if key in _INT_KEYS:
                    try:
                        setattr(ns, key, int(value))
                    except ValueError as exc:
                        raise UsageError(f"config key {key!r}: {value!r} is not an integer") from exc
                elif key in _FLOAT_KEYS:
                    try:
                        setattr(ns, key, float(value))
                    except ValueError as exc:
                        raise UsageError(f"config key {key!r}: {value!r} is not a number") from exc
                else:
                    setattr(ns, key, value)
    if getattr(ns, "seed", None) is None and hasattr(ns, "seed"):
        ns.seed = 0
    if getattr(ns, "jobs", None) is None and hasattr(ns, "jobs"):
        env = os.environ.get("GRAPHON_LAB_JOBS")
        ns.jobs = int(env) if env else (os.cpu_count() or 1)
    if getattr(ns, "jobs", 1) is not None and getattr(ns, "jobs", 1) < 1:
        raise UsageError("--jobs must be at least 1")
    return ns


def _require(ns, *keys):
    for key in keys:
        if getattr(ns, key, None) is None:
            flag = "--" + ("in" if key == "in_path" else key.replace("_", "-"))
            raise UsageError(f"missing required key {flag} for command {ns.command!r}")


def _budget(ns) -> SolveBudget:
    default = SolveBudget()
    nodes = ns.budget_nodes if getattr(ns, "budget_nodes", None) is not None else default.max_nodes
    millis = ns.budget_ms if getattr(ns, "budget_ms", None) is not None else default.max_millis
    return SolveBudget(max_nodes=nodes, max_millis=millis)


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--n-grid: {text!r} is not a comma-separated integer list") from exc


def _parse_cuts(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--center: {text!r} is not a comma-separated number list") from exc


def _parse_table_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"--table: {text!r} is not LO:HI")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise UsageError(f"--table: {text!r} is not LO:HI with integers") from exc
    if lo < 1 or hi < lo:
        raise UsageError(f"--table: need 1 <= LO <= HI, got {text!r}")
    return lo, hi


def _emit(payload: dict, extra_first: dict | None = None) -> None:
    body = {"schema_version": SCHEMA_VERSION, "version": __version__}
    if extra_first:
        body.update(extra_first)
    body.update(payload)
    print(json.dumps(body, separators=(",", ":"), allow_nan=True))


def _plain(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        value = dataclasses.asdict(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float) and math.isinf(value):
        return "-inf" if value < 0 else "inf"
    if hasattr(value, "item") and callable(value.item) and not isinstance(value, (str, bytes)):
        try:
            return value.item()
        except Exception:
            return value
    return value


def _table_out(ns, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if getattr(ns, "out", None):
        with open(ns.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_sample(ns) -> int:
    _require(ns, "graphon", "n")
    spec = parse_spec(ns.graphon)
    graph = sample(SampleConfig(spec, ns.n, ns.seed, DEFAULT_CAP))
    if ns.out:
        save_edge_list(graph, ns.out)  # also writes the .coords sidecar
    _emit({
        "spec": graph.spec_tag, "seed": ns.seed, "n": graph.n,
        "edges": graph.edges, "out": ns.out,
    })
    return 0


def _load_or_sample(ns):
    if getattr(ns, "in_path", None):
        return load_edge_list(ns.in_path)
    _require(ns, "graphon", "n")
    spec = parse_spec(ns.graphon)
    return sample(SampleConfig(spec, ns.n, ns.seed, DEFAULT_CAP))


def _cmd_clique(ns) -> int:
    graph = _load_or_sample(ns)
    method = ns.method or "exact"
    if method == "exact":
        res = exact_max_clique(graph, _budget(ns))
    elif method == "degree_greedy":
        res = degree_greedy_clique(graph)
    elif method == "threshold_greedy":
        center = None
        if ns.center is not None:
            try:
                center = float(ns.center)
            except ValueError as exc:
                raise UsageError(f"--center: {ns.center!r} is not a number") from exc
        threshold = ns.threshold
        if center is None and threshold is None and graph.window is None:
            # family default window; explicit flags are still required for
            # graphs loaded from files without a parseable kernel tag
            if not ns.graphon:
                raise UsageError(
                    "threshold_greedy on a loaded graph needs --center and --threshold"
                )
            center, threshold = default_threshold(parse_spec(ns.graphon), graph.n)
        res = threshold_greedy_clique(graph, center, threshold)
    else:
        raise UsageError(f"--method {method!r} is not one of exact, degree_greedy, "
                         "threshold_greedy")
    _emit({
        "spec": graph.spec_tag, "seed": graph.seed, "n": graph.n,
        "method": res.method, "status": res.status, "size": res.size,
        "vertices": list(res.vertices), "stats": _plain(res.stats),
        "warning": res.warning,
    })
    return 0


def _cmd_moments(ns) -> int:
    _require(ns, "graphon", "n")
    spec = parse_spec(ns.graphon)
    if ns.table:
        lo, hi = _parse_table_range(ns.table)
        rows = []
        for k in range(lo, min(hi, ns.n) + 1):
            rep = log_expected_cliques(spec, ns.n, k)
            rows.append([ns.n, k, repr(rep.log_expected)])
        _table_out(ns, ["n", "k", "log_expected"], rows)
        return 0
    _require(ns, "k")
    rep = log_expected_cliques(spec, ns.n, ns.k)
    _emit({
        "spec": rep.family_tag, "seed": ns.seed, "n": rep.n, "k": rep.k,
        "log_expected": _plain(rep.log_expected), "method": rep.method,
    })
    return 0


def _cmd_cutoff(ns) -> int:
    _require(ns, "graphon", "n")
    spec = parse_spec(ns.graphon)
    res = first_moment_cutoff(spec, ns.n)
    _emit({
        "spec": res.family_tag, "seed": ns.seed, "n": res.n, "k_star": res.k_star,
        "degenerate": res.degenerate, "scan_certificate": list(res.scan_certificate),
    })
    return 0


def _cmd_variance(ns) -> int:
    _require(ns, "graphon", "n")
    spec = parse_spec(ns.graphon)
    if ns.table:
        lo, hi = _parse_table_range(ns.table)
        rows = []
        for k in range(lo, min(hi, ns.n // 2) + 1):
            moment = log_expected_cliques(spec, ns.n, k)
            ratio = variance_ratio(spec, ns.n, k)
            rows.append([ns.n, k, repr(moment.log_expected), repr(ratio.log_ratio)])
        _table_out(ns, ["n", "k", "log_expected", "log_ratio"], rows)
        return 0
    _require(ns, "k")
    rep = variance_ratio(spec, ns.n, ns.k)
    _emit({
        "spec": rep.family_tag, "seed": ns.seed, "n": rep.n, "k": rep.k,
        "log_ratio": rep.log_ratio, "per_i_terms": list(rep.per_i_terms),
    })
    return 0


def _cmd_scaling(ns) -> int:
    _require(ns, "graphon", "n_grid")
    spec = parse_spec(ns.graphon)
    grid = _parse_grid(ns.n_grid)
    trials = ns.trials if ns.trials is not None else 10
    method = ns.method or "threshold_greedy"
    explicit = None
    if ns.threshold is not None:
        center = float(ns.center) if ns.center is not None else 0.0
        explicit = (center, ns.threshold)
    report = scaling_study(spec, grid, trials, method, ns.seed, budget=_budget(ns),
                           explicit_threshold=explicit)
    run_dir = None
    if ns.out:
        run_dir = str(write_run(report, ns.out))
    _emit({
        "spec": report.spec_tag, "seed": report.seed, "n_grid": list(report.n_grid),
        "exponent": report.fitted_exponent, "stderr": report.exponent_stderr,
        "empirical_constant": report.empirical_constant,
        "predicted_upper": report.predicted.upper_constant if report.predicted else None,
        "predicted_lower": report.predicted.lower_constant if report.predicted else None,
        "trials": report.trials, "method": report.method,
        "markov_violations": report.markov_violations, "run_dir": run_dir,
    })
    return 0


def _cmd_concentration(ns) -> int:
    _require(ns, "graphon", "n")
    spec = parse_spec(ns.graphon)
    trials = ns.trials if ns.trials is not None else 20
    method = ns.method or "threshold_greedy"
    rep = concentration_check(spec, ns.n, trials, method, ns.seed, budget=_budget(ns))
    _emit({
        "spec": ns.graphon, "seed": ns.seed, "n": rep.n, "trials": rep.trials,
        "mean": rep.mean, "coefficient_of_variation": rep.coefficient_of_variation,
        "max_over_min": rep.max_over_min, "method": rep.method,
        "sizes": list(rep.sizes),
    })
    return 0


def _cmd_check(ns) -> int:
    _require(ns, "suite")
    suite = ns.suite
    trials = ns.trials if ns.trials is not None else 10
    if suite == "dominance":
        _require(ns, "lower", "upper", "n")
        rep = dominance_suite(parse_spec(ns.lower), parse_spec(ns.upper), ns.n,
                              trials, ns.seed, method=ns.method or "degree_greedy",
                              budget=_budget(ns))
    elif suite == "partition":
        _require(ns, "graphon", "n", "center")
        rep = partition_suite(parse_spec(ns.graphon), ns.n, _parse_cuts(ns.center),
                              trials, ns.seed, budget=_budget(ns))
    elif suite == "interval":
        kwargs = {}
        if ns.n is not None:
            kwargs["count_n"] = ns.n
        rep = interval_suite(ns.trials if ns.trials is not None else 100, ns.seed, **kwargs)
    elif suite == "union_bound":
        _require(ns, "n_grid")
        rep = union_bound_upper_check(_parse_grid(ns.n_grid), trials, ns.seed,
                                      method=ns.method or "exact", budget=_budget(ns))
    elif suite == "moment_mc":
        _require(ns, "graphon", "n", "k")
        check = moment_mc_check(parse_spec(ns.graphon), ns.n, ns.k,
                                ns.trials if ns.trials is not None else 10_000, ns.seed)
        passed = abs(check.z_score) <= 3.0
        _emit({"suite": suite, "seed": ns.seed, "passed": passed, **_plain(check.__dict__)})
        return 0 if passed else 1
    else:
        raise UsageError(f"--suite {suite!r} is not one of {', '.join(SUITES)}")
    _emit({"suite": suite, "seed": ns.seed, **_plain(rep.__dict__)})
    return 0 if rep.passed else 1


_DISPATCH = {
    "sample": _cmd_sample,
    "clique": _cmd_clique,
    "moments": _cmd_moments,
    "cutoff": _cmd_cutoff,
    "variance": _cmd_variance,
    "scaling": _cmd_scaling,
    "concentration": _cmd_concentration,
    "check": _cmd_check,
}


def dispatch(ns) -> int:
    """Run the configured command: 0 success, 1 suite failure, 2 usage error."""
    return _DISPATCH[ns.command](ns)


def main(argv=None) -> int:
    try:
        ns = parse_config(argv)
        return dispatch(ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except GraphonLabError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
