"""Tools for studying clique growth in dense inhomogeneous random graphs.

The package is organized in layers: kernel families and local-slope probes
(`graphons`, `dini`), exact-distribution samplers (`sampling`), exact and
greedy clique solvers (`cliques`), closed-form and quadrature moment
calculators (`moments`, `quadrature`), experiment drivers (`experiments`),
and a command line front end (`cli`).
"""

__version__ = "0.1.0"

from .graphons import (  # noqa: F401
    GraphonSpec,
    Interval,
    constant,
    evaluate,
    flat_exp,
    holder_family,
    line,
    load_profile,
    oscillating,
    parse_spec,
    poly_family,
    rank1,
    restrict,
    spec_tag,
    sqrt_family,
)
from .dini import DiniEstimate, RegimeReport, classify_regime, estimate_dini  # noqa: F401
from .errors import (  # noqa: F401
    CapacityError,
    DomainError,
    GraphonLabError,
    PreconditionError,
    SpecValidationError,
    UnsupportedSpecError,
    UsageError,
)
from .sampling import (  # noqa: F401
    CoupledPair,
    SampleConfig,
    SampledGraph,
    count_in_interval,
    dense_adjacency,
    graph_from_dense,
    load_edge_list,
    min_window_length,
    mix64,
    sample,
    sample_below_threshold,
    sample_coupled,
    save_edge_list,
)
from .cliques import (  # noqa: F401
    CliqueResult,
    SolveBudget,
    default_threshold,
    degree_greedy_clique,
    exact_max_clique,
    induced_subgraph,
    threshold_greedy_clique,
    verify_clique,
)
from .moments import (  # noqa: F401
    CutoffResult,
    MomentReport,
    PredictedConstants,
    VarianceReport,
    first_moment_cutoff,
    log_expected_cliques,
    predicted_constants,
    variance_ratio,
)
from .experiments import (  # noqa: F401
    ConcentrationReport,
    DominanceReport,
    IntervalReport,
    MomentCheck,
    PartitionReport,
    ScalingReport,
    UnionBoundReport,
    concentration_check,
    dominance_suite,
    interval_suite,
    moment_mc_check,
    partition_suite,
    scaling_study,
    union_bound_upper_check,
    write_run,
)
