"""Hyperbolic-type metric densities on punctured and perforated domains in R^n."""
from .constants import (
    C0,
    RootResult,
    alpha,
    bp_constant_k,
    c1_bound,
    lemma8_bound,
    monotone_f,
    solve_log_reciprocal,
    solve_midpoint_eq,
    solve_t0,
)
from .density import (
    DensityKind,
    DensityValue,
    SamplingBudget,
    beta,
    brute_force_density,
    density_all,
    density_batch,
    eval_density,
    pair_objective,
)
from .geodesic import DistanceResult, GraphParams, MetricKind, PathGraph, build_graph, distance, edge_weight
from .geometry import (
    DomainError,
    DomainSpec,
    OpenBall,
    RemovedBall,
    RemovedPoint,
    WholeSpace,
    contains,
    dist_to_complement,
    domain_from_json,
    domain_to_json,
    in_complement,
    nearest_boundary_points,
    sample_boundary,
)
from .qcmaps import (
    Dilatation,
    Inversion,
    Linear,
    RadialStretch,
    Similarity,
    apply,
    check_qc1,
    check_qc2,
    dilatation,
    inverse,
    push_domain,
)

__version__ = "0.1.0"
